//! Matrix exponential, principal logarithm and power-series matrix functions
//! for the small dense matrices that appear as realizations and `ad` maps.

use nalgebra::DMatrix;

use crate::error::{OrbitError, Result};

/// Series terms beyond this count signal an argument that should be rescaled.
pub const MAX_SERIES_TERMS: usize = 200;

fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` by scaling and squaring around a Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = norm1(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(squarings);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &b / k as f64;
        result += &term;
        if norm1(&term) <= f64::EPSILON * 1e-2 * norm1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi =
            y.clone().try_inverse().ok_or_else(|| OrbitError::LogDomain("singular iterate in square root".into()))?;
        let zi =
            z.clone().try_inverse().ok_or_else(|| OrbitError::LogDomain("singular iterate in square root".into()))?;
        let y_next = (&y + zi) * 0.5;
        let z_next = (&z + yi) * 0.5;
        let delta = norm1(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * norm1(&y) {
            return Ok(y);
        }
    }
    Err(OrbitError::LogDomain("square root iteration did not converge".into()))
}

/// Rejects matrices with a real eigenvalue on the closed negative half line.
pub fn check_log_domain(a: &DMatrix<f64>) -> Result<()> {
    let scale = norm1(a).max(1.0);
    for ev in a.clone().complex_eigenvalues().iter() {
        if ev.im.abs() <= 1e-12 * scale && ev.re <= 1e-12 * scale {
            return Err(OrbitError::LogDomain(format!("eigenvalue {:.6e}{:+.6e}i on the branch cut", ev.re, ev.im)));
        }
    }
    Ok(())
}

/// Principal logarithm by inverse scaling and squaring.
pub fn logm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_log_domain(a)?;
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = a.clone();
    let mut roots = 0;
    while norm1(&(&x - &id)) > 0.25 {
        if roots >= 60 {
            return Err(OrbitError::LogDomain("too many square roots".into()));
        }
        x = sqrtm(&x)?;
        roots += 1;
    }
    // log X = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    let plus = (&x + &id).try_inverse().ok_or_else(|| OrbitError::LogDomain("X + I singular".into()))?;
    let zm = (&x - &id) * plus;
    let z2 = &zm * &zm;
    let mut power = zm.clone();
    let mut sum = zm.clone();
    let mut k = 1;
    loop {
        power = &power * &z2;
        k += 2;
        let term = &power / k as f64;
        sum += &term;
        if norm1(&term) <= 1e-18 * norm1(&sum).max(1e-300) || k > 2 * MAX_SERIES_TERMS {
            break;
        }
    }
    Ok(sum * 2f64.powi(roots + 1))
}

/// `Σ_k coef(k) A^k` with term-norm stopping; used for entire functions of
/// `ad` maps. Stops exactly when a nilpotent argument produces a zero term.
pub fn power_series(a: &DMatrix<f64>, coef: impl Fn(usize) -> f64) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut sum = &power * coef(0);
    for k in 1..=MAX_SERIES_TERMS {
        power = &power * a;
        let c = coef(k);
        let term = &power * c;
        sum += &term;
        let tn = norm1(&term);
        let pn = norm1(&power);
        if !tn.is_finite() || !pn.is_finite() {
            break;
        }
        if pn == 0.0 || (c != 0.0 && tn <= 1e-16 * norm1(&sum).max(1.0)) {
            return Ok(sum);
        }
    }
    Err(OrbitError::SeriesNonConvergence(MAX_SERIES_TERMS))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `(I - e^{-A}) / A = Σ (-A)^k / (k+1)!`.
pub fn phi_minus(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    power_series(a, |k| {
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        s / factorial(k + 1)
    })
}

/// `sinh(A/2) / (A/2) = Σ (A/2)^{2m} / (2m+1)!`.
pub fn sinhc_half(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let half = a * 0.5;
    let sq = &half * &half;
    power_series(&sq, |m| 1.0 / factorial(2 * m + 1))
}
