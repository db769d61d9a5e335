use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::testfn::{probe_directions, TestFunction};
use crate::error::{OrbitError, Result};
use crate::lie::{Group, GroupElement};
use crate::linalg::singular_values;

/// One factor of a product whose logarithm is being bounded.
#[derive(Debug, Clone, Copy)]
pub enum Extent<'a> {
    Point(&'a [f64]),
    Ball(f64),
}

fn spectral_norm(m: &nalgebra::DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Upper bound on `‖log(exp a · exp b)‖` for `a`, `b` ranging over the given
/// extents. Nilpotent groups use the BCH words with operator norms of `ad`,
/// taking the sharper of the two estimates for the innermost bracket, so
/// central points add exactly their norm. Matrix groups are probed on
/// sphere samples with a 5% margin.
pub fn compose_radius(group: &Group, left: Extent<'_>, right: Extent<'_>) -> f64 {
    match group {
        Group::Nilpotent(alg) => {
            let n = alg.dim();
            let ad_const = (0..n)
                .map(|i| {
                    let ad = alg.ad(&alg.basis_vector(i)).expect("basis vector");
                    spectral_norm(&ad).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            let norms = |e: Extent<'_>| -> (f64, f64) {
                match e {
                    Extent::Point(a) => {
                        let v = DVector::from_column_slice(a);
                        (v.norm(), spectral_norm(&alg.ad(&v).expect("length checked")))
                    }
                    Extent::Ball(r) => (r, ad_const * r),
                }
            };
            let letters = [norms(left), norms(right)];
            let table = alg.bch_table().expect("nilpotent algebras carry a BCH table");
            let mut bound = letters[0].0 + letters[1].0;
            for (word, coef) in table.terms() {
                let k = word.len();
                if k < 2 {
                    continue;
                }
                let (p, q) = (letters[word[k - 2] as usize], letters[word[k - 1] as usize]);
                let mut b = (p.1 * q.0).min(q.1 * p.0);
                for &l in &word[..k - 2] {
                    b *= letters[l as usize].1;
                }
                bound += coef.abs() * b;
            }
            bound
        }
        Group::Matrix(_) => {
            let d = group.dim();
            let samples = |e: Extent<'_>| -> Vec<Vec<f64>> {
                match e {
                    Extent::Point(a) => vec![a.to_vec()],
                    Extent::Ball(r) => {
                        let mut pts: Vec<Vec<f64>> =
                            probe_directions(d, 64).into_iter().map(|v| v.iter().map(|x| x * r).collect()).collect();
                        pts.push(vec![0.0; d]);
                        pts
                    }
                }
            };
            let (ls, rs) = (samples(left), samples(right));
            let mut out = vec![0.0; d];
            let mut worst: f64 = 0.0;
            for a in &ls {
                for b in &rs {
                    if group.compose_coords(a, b, &mut out).is_err() {
                        return f64::INFINITY;
                    }
                    worst = worst.max(out.iter().map(|x| x * x).sum::<f64>().sqrt());
                }
            }
            worst * 1.05
        }
    }
}

fn overflow(needed: f64, available: f64) -> Result<()> {
    if needed > available {
        return Err(OrbitError::SupportOverflow { needed, available });
    }
    Ok(())
}

fn coords(group: &Group, g: &GroupElement) -> Result<Vec<f64>> {
    Ok(group.log(g)?.as_slice().to_vec())
}

/// `x ↦ f(g₁⁻¹ x g₂)`. Fails if the translated support leaves the ball of
/// radius `limit`.
pub fn translate(
    group: &Group,
    g1: &GroupElement,
    g2: &GroupElement,
    f: &TestFunction,
    limit: f64,
) -> Result<TestFunction> {
    let a = coords(group, g1)?;
    let b = coords(group, g2)?;
    let inner = compose_radius(
        group,
        Extent::Ball(f.support_radius()),
        Extent::Point(&b.iter().map(|x| -x).collect::<Vec<_>>()),
    );
    let radius = compose_radius(group, Extent::Point(&a), Extent::Ball(inner));
    overflow(radius, limit)?;
    let neg_a: Vec<f64> = a.iter().map(|x| -x).collect();
    let (group, f) = (group.clone(), f.clone());
    Ok(TestFunction::wrapped(
        f.dim(),
        radius,
        Arc::new(move |u| {
            let mut t = [0.0; 16];
            let mut s = [0.0; 16];
            let d = u.len();
            if group.compose_coords(&neg_a, u, &mut t[..d]).is_err()
                || group.compose_coords(&t[..d], &b, &mut s[..d]).is_err()
            {
                return Complex64::new(0.0, 0.0);
            }
            f.eval(&s[..d])
        }),
    ))
}

/// `x ↦ f(g⁻¹ x)`.
pub fn left_translate(group: &Group, g: &GroupElement, f: &TestFunction, limit: f64) -> Result<TestFunction> {
    translate(group, g, &group.identity(), f, limit)
}

/// `x ↦ f(x g)`.
pub fn right_translate(group: &Group, g: &GroupElement, f: &TestFunction, limit: f64) -> Result<TestFunction> {
    translate(group, &group.identity(), g, f, limit)
}

/// `f*(x) = conj(f(x⁻¹)) Δ(x⁻¹)`, with `Δ(exp(−u)) = e^{tr ad u}`.
pub fn involution(group: &Group, f: &TestFunction) -> TestFunction {
    let alg = group.algebra();
    let traces: Vec<f64> =
        (0..alg.dim()).map(|i| alg.ad(&alg.basis_vector(i)).expect("basis vector").trace()).collect();
    let unimodular = traces.iter().all(|t| t.abs() <= alg.tolerance());
    let f = f.clone();
    TestFunction::wrapped(
        f.dim(),
        f.support_radius(),
        Arc::new(move |u| {
            let mut neg = [0.0; 16];
            for (n, x) in neg.iter_mut().zip(u) {
                *n = -x;
            }
            let v = f.eval(&neg[..u.len()]).conj();
            if unimodular {
                v
            } else {
                v * traces.iter().zip(u).map(|(t, x)| t * x).sum::<f64>().exp()
            }
        }),
    )
}
