use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::lie::{Group, GroupElement};

/// Relative size below which a test function counts as zero.
pub const NEGLIGIBLE: f64 = 1e-14;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub coef: Complex64,
}

/// `p(u) exp(−‖u − c‖² / 2s²) e^{i⟨k, u⟩}` in exponential coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDictElem {
    pub center: Vec<f64>,
    pub scale: f64,
    #[serde(default)]
    pub phase: Vec<f64>,
    /// Empty means the constant polynomial 1.
    #[serde(default)]
    pub poly: Vec<Monomial>,
}

impl GaussianDictElem {
    pub fn new(center: Vec<f64>, scale: f64) -> Self {
        Self { center, scale, phase: Vec::new(), poly: Vec::new() }
    }

    pub fn with_phase(mut self, phase: Vec<f64>) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_poly(mut self, poly: Vec<Monomial>) -> Self {
        self.poly = poly;
        self
    }

    fn degree(&self) -> u32 {
        self.poly.iter().map(|m| m.powers.iter().sum::<u32>()).max().unwrap_or(0)
    }

    #[inline]
    fn eval(&self, u: &[f64]) -> Complex64 {
        let mut r2 = 0.0;
        for (x, c) in u.iter().zip(&self.center) {
            r2 += (x - c) * (x - c);
        }
        let mut theta = 0.0;
        for (x, k) in u.iter().zip(&self.phase) {
            theta += x * k;
        }
        let env = (-0.5 * r2 / (self.scale * self.scale)).exp();
        let p = if self.poly.is_empty() {
            Complex64::new(1.0, 0.0)
        } else {
            self.poly
                .iter()
                .map(|m| m.coef * m.powers.iter().zip(u).map(|(&e, x)| x.powi(e as i32)).product::<f64>())
                .sum()
        };
        p * Complex64::from_polar(env, theta)
    }
}

/// Values on a regular grid, interpolated multilinearly and zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSampled {
    pub lo: Vec<f64>,
    pub step: Vec<f64>,
    pub shape: Vec<usize>,
    /// Row-major, last axis fastest.
    pub values: Vec<Complex64>,
}

impl GridSampled {
    fn eval(&self, u: &[f64]) -> Complex64 {
        let d = self.shape.len();
        let mut base = [0usize; 16];
        let mut frac = [0.0; 16];
        for a in 0..d {
            let t = (u[a] - self.lo[a]) / self.step[a];
            let n = self.shape[a];
            if !(t >= 0.0 && t <= (n - 1) as f64) {
                return Complex64::new(0.0, 0.0);
            }
            let i = (t.floor() as usize).min(n.saturating_sub(2));
            base[a] = i;
            frac[a] = t - i as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for corner in 0..(1usize << d) {
            let mut idx = 0;
            let mut w = 1.0;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                let i = (base[a] + bit).min(self.shape[a] - 1);
                idx = idx * self.shape[a] + i;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += self.values[idx] * w;
            }
        }
        acc
    }
}

#[derive(Clone)]
pub enum TestFunctionKind {
    GaussianDict(GaussianDictElem),
    GridSampled(GridSampled),
    Wrapped(Evaluator),
}

impl fmt::Debug for TestFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GaussianDict(g) => f.debug_tuple("GaussianDict").field(g).finish(),
            Self::GridSampled(g) => f.debug_struct("GridSampled").field("shape", &g.shape).finish(),
            Self::Wrapped(_) => f.write_str("Wrapped(..)"),
        }
    }
}

/// A complex function on the group, evaluated in exponential coordinates
/// and negligible outside a coordinate ball.
#[derive(Debug, Clone)]
pub struct TestFunction {
    dim: usize,
    support_radius: f64,
    kind: TestFunctionKind,
}

impl TestFunction {
    pub fn gaussian(elem: GaussianDictElem) -> Result<Self> {
        let dim = elem.center.len();
        if !(elem.scale.is_finite() && elem.scale > 0.0) {
            return Err(OrbitError::InvalidEntry(format!("scale {} must be positive", elem.scale)));
        }
        if !elem.phase.is_empty() && elem.phase.len() != dim {
            return Err(OrbitError::DimensionMismatch("phase length differs from center".into()));
        }
        if elem.poly.iter().any(|m| m.powers.len() != dim) {
            return Err(OrbitError::DimensionMismatch("monomial arity differs from center".into()));
        }
        let c = elem.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        let tail = (2.0 * (1.0 / NEGLIGIBLE).ln()).sqrt() + elem.degree() as f64;
        Ok(Self { dim, support_radius: c + elem.scale * tail, kind: TestFunctionKind::GaussianDict(elem) })
    }

    /// Standard Gaussian `exp(−‖u‖²/2)` in `dim` coordinates.
    pub fn unit_gaussian(dim: usize) -> Self {
        Self::gaussian(GaussianDictElem::new(vec![0.0; dim], 1.0)).expect("unit Gaussian is valid")
    }

    pub fn grid(grid: GridSampled, support_radius: f64) -> Result<Self> {
        let d = grid.shape.len();
        if grid.lo.len() != d || grid.step.len() != d || grid.values.len() != grid.shape.iter().product::<usize>() {
            return Err(OrbitError::DimensionMismatch("inconsistent grid".into()));
        }
        if d > 16 || grid.shape.iter().any(|&n| n < 2) {
            return Err(OrbitError::DimensionMismatch("grid needs 2+ points per axis and at most 16 axes".into()));
        }
        Ok(Self { dim: d, support_radius, kind: TestFunctionKind::GridSampled(grid) })
    }

    pub fn wrapped(dim: usize, support_radius: f64, f: Evaluator) -> Self {
        Self { dim, support_radius, kind: TestFunctionKind::Wrapped(f) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::wrapped(dim, 0.0, Arc::new(|_| Complex64::new(0.0, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn kind(&self) -> &TestFunctionKind {
        &self.kind
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            TestFunctionKind::GaussianDict(_) => "gaussian_dict",
            TestFunctionKind::GridSampled(_) => "grid_sampled",
            TestFunctionKind::Wrapped(_) => "wrapped",
        }
    }

    /// Largest Gaussian scale, used to size quadrature boxes.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            TestFunctionKind::GaussianDict(g) => g.scale,
            _ => self.support_radius / 8.0,
        }
    }

    #[inline]
    pub fn eval(&self, u: &[f64]) -> Complex64 {
        match &self.kind {
            TestFunctionKind::GaussianDict(g) => g.eval(u),
            TestFunctionKind::GridSampled(g) => g.eval(u),
            TestFunctionKind::Wrapped(f) => f(u),
        }
    }

    /// Value at a group element, through its logarithm.
    pub fn eval_element(&self, group: &Group, g: &GroupElement) -> Result<Complex64> {
        let u = group.log(g)?;
        Ok(self.eval(u.as_slice()))
    }

    pub fn with_support_radius(mut self, r: f64) -> Self {
        self.support_radius = r;
        self
    }

    /// `Σ c_k f_k` as a wrapped function.
    pub fn linear_combination(terms: &[(Complex64, TestFunction)]) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(OrbitError::DimensionMismatch("empty combination".into()));
        };
        let dim = first.1.dim;
        if terms.iter().any(|(_, f)| f.dim != dim) {
            return Err(OrbitError::DimensionMismatch("functions on different groups".into()));
        }
        let radius = terms.iter().map(|(_, f)| f.support_radius).fold(0.0, f64::max);
        let owned: Vec<(Complex64, TestFunction)> = terms.to_vec();
        Ok(Self::wrapped(dim, radius, Arc::new(move |u| owned.iter().map(|(c, f)| c * f.eval(u)).sum())))
    }

    /// Largest `|f|` on spheres just outside the support radius, relative to
    /// `|f|` over a probe set inside. Deterministic probe directions.
    pub fn support_spot_check(&self, samples: usize) -> f64 {
        let d = self.dim;
        let dirs = probe_directions(d, samples);
        let mut inside: f64 = match &self.kind {
            TestFunctionKind::GaussianDict(g) => self.eval(&g.center).norm(),
            _ => 0.0,
        };
        let mut outside: f64 = 0.0;
        for dir in &dirs {
            for frac in [0.0, 0.1, 0.25, 0.5, 0.75] {
                let u: Vec<f64> = dir.iter().map(|x| x * frac * self.support_radius).collect();
                inside = inside.max(self.eval(&u).norm());
            }
            for frac in [1.0, 1.1, 1.5, 2.0] {
                let u: Vec<f64> = dir.iter().map(|x| x * frac * self.support_radius).collect();
                outside = outside.max(self.eval(&u).norm());
            }
        }
        if inside == 0.0 {
            0.0
        } else {
            outside / inside
        }
    }
}

/// Unit vectors from a low-discrepancy sequence, plus the coordinate axes.
pub(crate) fn probe_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n + 2 * d);
    for a in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[a] = s;
            out.push(e);
        }
    }
    let primes = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0, 41.0, 43.0, 47.0, 53.0];
    for i in 1..=n {
        let v: Vec<f64> = (0..d)
            .map(|a| {
                let mut f = 1.0;
                let mut r = 0.0;
                let mut k = i;
                while k > 0 {
                    f /= primes[a % primes.len()];
                    r += f * (k % primes[a % primes.len()] as usize) as f64;
                    k /= primes[a % primes.len()] as usize;
                }
                2.0 * r - 1.0
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            out.push(v.iter().map(|x| x / norm).collect());
        }
    }
    out
}
