use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::modular_function;
use crate::builtin;
use crate::error::{OrbitError, Result};
use crate::lie::{Group, GroupElement, Subalgebra};

/// `SL(2,ℝ)` over its upper triangular subgroup `M`.
pub const SL2_G_M: &str = "sl2:G/M";
/// `M` over its diagonal subgroup `R`.
pub const SL2_M_R: &str = "sl2:M/R";

pub type RhoFn = Arc<dyn Fn(&GroupElement) -> Result<f64> + Send + Sync>;

/// A pair `H ⊂ G` of connected subgroups of one ambient group, together with
/// a ρ function solving `ρ(xh) = ρ(x) Δ_H(h) / Δ_G(h)`.
#[derive(Clone)]
pub struct RhoPair {
    pub group: Group,
    /// Lie algebra of `G`; `None` means the whole ambient group.
    pub outer: Option<Subalgebra>,
    pub inner: Subalgebra,
    pub rho: RhoFn,
}

impl fmt::Debug for RhoPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RhoPair")
            .field("outer_dim", &self.outer.as_ref().map(|s| s.dim()))
            .field("inner_dim", &self.inner.dim())
            .finish_non_exhaustive()
    }
}

impl RhoPair {
    pub fn eval(&self, g: &GroupElement) -> Result<f64> {
        self.group.validate(g)?;
        (self.rho)(g)
    }

    /// Max over `(x, h)` of `|ρ(xh) − ρ(x)Δ_H(h)/Δ_G(h)| / ρ(x)`. Fails if
    /// ρ is not strictly positive on some sample.
    pub fn functional_residual(&self, samples: &[(GroupElement, GroupElement)]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (x, h) in samples {
            let rx = self.eval(x)?;
            let xh = self.group.multiply(x, h)?;
            let rxh = self.eval(&xh)?;
            if !(rx > 0.0 && rxh > 0.0) {
                return Err(OrbitError::RhoRejected(rx.min(rxh)));
            }
            let dh = modular_function(&self.group, Some(&self.inner), h)?;
            let dg = modular_function(&self.group, self.outer.as_ref(), h)?;
            worst = worst.max((rxh - rx * dh / dg).abs() / rx);
        }
        Ok(worst)
    }

    /// Deterministic sample pairs `(exp x, exp h)` with `x` in the outer
    /// algebra and `h` in the inner one, coordinates uniform in `[−1, 1]`.
    pub fn samples(&self, n: usize, seed: u64) -> Result<Vec<(GroupElement, GroupElement)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = self.group.dim();
        let mut draw = |sub: Option<&Subalgebra>| -> Result<GroupElement> {
            let v = match sub {
                None => DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0)),
                Some(s) => s.embed(&DVector::from_fn(s.dim(), |_, _| rng.gen_range(-1.0..1.0))),
            };
            self.group.exp(&v)
        };
        (0..n).map(|_| Ok((draw(self.outer.as_ref())?, draw(Some(&self.inner))?))).collect()
    }
}

fn matrix_entries(g: &GroupElement) -> Result<(f64, f64)> {
    match g {
        GroupElement::Matrix(m) if m.shape() == (2, 2) => Ok((m[(0, 0)], m[(1, 0)])),
        _ => Err(OrbitError::DimensionMismatch("expected a 2x2 matrix".into())),
    }
}

/// Registry of ρ functions keyed by pair id. Built once, then read-only.
#[derive(Debug, Clone, Default)]
pub struct RhoRegistry {
    pairs: BTreeMap<String, RhoPair>,
}

impl RhoRegistry {
    /// The two closed forms on `SL(2,ℝ)`: `1/(g₁₁² + g₂₁²)` on `G/M` and
    /// `a²` on `M/R`.
    pub fn with_builtins() -> Self {
        let group = builtin::sl2_group();
        let m = builtin::sl2_upper(group.algebra());
        let r = builtin::sl2_diagonal(group.algebra());
        let mut pairs = BTreeMap::new();
        pairs.insert(
            SL2_G_M.to_string(),
            RhoPair {
                group: group.clone(),
                outer: None,
                inner: m.clone(),
                rho: Arc::new(|g| {
                    let (g11, g21) = matrix_entries(g)?;
                    Ok(1.0 / (g11 * g11 + g21 * g21))
                }),
            },
        );
        pairs.insert(
            SL2_M_R.to_string(),
            RhoPair {
                group,
                outer: Some(m),
                inner: r,
                rho: Arc::new(|g| {
                    let (a, _) = matrix_entries(g)?;
                    Ok(a * a)
                }),
            },
        );
        Self { pairs }
    }

    /// Adds a user pair after checking the functional equation on `samples`
    /// random draws. Rejects with the observed residual if it exceeds `tol`.
    pub fn register(&mut self, id: &str, pair: RhoPair, samples: usize, tol: f64) -> Result<f64> {
        let draws = pair.samples(samples, 0x5eed)?;
        let r = pair.functional_residual(&draws)?;
        if r.is_nan() || r > tol {
            return Err(OrbitError::RhoRejected(r));
        }
        self.pairs.insert(id.to_string(), pair);
        Ok(r)
    }

    pub fn get(&self, id: &str) -> Result<&RhoPair> {
        self.pairs.get(id).ok_or_else(|| OrbitError::UnknownPair(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.pairs.keys().map(|s| s.as_str())
    }

    pub fn eval(&self, id: &str, g: &GroupElement) -> Result<f64> {
        self.get(id)?.eval(g)
    }

    pub fn functional_residual(&self, id: &str, samples: &[(GroupElement, GroupElement)]) -> Result<f64> {
        self.get(id)?.functional_residual(samples)
    }
}

/// Max over `(x, m)` of `|ρ_{G/M}(xm) ρ_{M/R}(m) − ρ_{G/M}(x)| / ρ_{G/M}(x)`.
pub fn sl2_cocycle_residual(reg: &RhoRegistry, samples: &[(GroupElement, GroupElement)]) -> Result<f64> {
    let gm = reg.get(SL2_G_M)?;
    let mr = reg.get(SL2_M_R)?;
    let mut worst: f64 = 0.0;
    for (x, m) in samples {
        let xm = gm.group.multiply(x, m)?;
        let lhs = gm.eval(&xm)? * mr.eval(m)?;
        let rhs = gm.eval(x)?;
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    Ok(worst)
}
