//! The coadjoint representation, radicals and real polarizations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, Result};
use crate::lie::{AlgebraVector, Group, GroupElement, LieAlgebra, Subalgebra};
use crate::linalg::{null_space, numerical_rank, RANK_RTOL};

/// Coefficients of a functional against the dual basis.
pub type DualVector = DVector<f64>;

/// `Ad*(g)ℓ = Ad(g⁻¹)ᵀ ℓ`.
pub fn coadjoint_action(group: &Group, g: &GroupElement, l: &DualVector) -> Result<DualVector> {
    group.algebra().check_len(l.len())?;
    let inv = group.inverse(g)?;
    Ok(group.adjoint_matrix(&inv)?.transpose() * l)
}

/// `B_ℓ[i][j] = ℓ([e_i, e_j])`.
pub fn skew_form(alg: &LieAlgebra, l: &DualVector) -> Result<DMatrix<f64>> {
    alg.check_len(l.len())?;
    let n = alg.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| alg.structure(i, j, k) * l[k]).sum()))
}

/// `ad*(X)ℓ = −ℓ ∘ ad X`.
pub fn coadjoint_derivative(alg: &LieAlgebra, x: &AlgebraVector, l: &DualVector) -> Result<DualVector> {
    alg.check_len(x.len())?;
    Ok(skew_form(alg, l)? * x)
}

/// The radical `𝔯_ℓ = ker B_ℓ`, the Lie algebra of the stabilizer of `ℓ`.
pub fn radical(alg: &LieAlgebra, l: &DualVector) -> Result<Subalgebra> {
    let b = skew_form(alg, l)?;
    let k = null_space(&b, RANK_RTOL);
    let cols: Vec<AlgebraVector> = k.column_iter().map(|c| c.into_owned()).collect();
    Subalgebra::new(alg, &cols)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub ok: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub is_subalgebra: Check,
    /// `ℓ([𝔪, 𝔪]) = 0`.
    pub isotropy: Check,
    /// `dim 𝔪 = (dim 𝔤 + dim 𝔯_ℓ) / 2`.
    pub dimension_ok: bool,
    /// `ℓ([X, 𝔪]) = 0` only for `X ∈ 𝔪`.
    pub maximality_ok: bool,
    pub dim_algebra: usize,
    pub dim_subalgebra: usize,
    pub dim_radical: usize,
}

impl PolarizationReport {
    pub fn is_polarization(&self) -> bool {
        self.is_subalgebra.ok && self.isotropy.ok && self.dimension_ok && self.maximality_ok
    }
}

pub fn check_polarization(alg: &LieAlgebra, l: &DualVector, m: &Subalgebra) -> Result<PolarizationReport> {
    if m.ambient_dim() != alg.dim() {
        return Err(OrbitError::DimensionMismatch(format!(
            "subalgebra lives in dimension {}, algebra has {}",
            m.ambient_dim(),
            alg.dim()
        )));
    }
    let tol = alg.tolerance();
    let scale = m.scale() * (1.0 + l.norm());
    let closure = m.closure_residual(alg);
    let b = skew_form(alg, l)?;
    let bm = m.basis().transpose() * &b;
    let iso = (&bm * m.basis()).amax();
    let rad = radical(alg, l)?;
    let n = alg.dim();
    let k = m.dim();
    let isotropic = iso <= tol * scale;
    let nullity = n - numerical_rank(&bm, RANK_RTOL);
    Ok(PolarizationReport {
        is_subalgebra: Check { ok: closure <= tol * m.scale(), residual: closure },
        isotropy: Check { ok: isotropic, residual: iso },
        dimension_ok: 2 * k == n + rad.dim(),
        maximality_ok: isotropic && nullity == k,
        dim_algebra: n,
        dim_subalgebra: k,
        dim_radical: rad.dim(),
    })
}

fn validate_flag(alg: &LieAlgebra, flag: &[Subalgebra]) -> Result<Vec<Subalgebra>> {
    let n = alg.dim();
    let mut flag = flag.to_vec();
    if flag.len() + 1 == n {
        flag.push(Subalgebra::whole(alg));
    }
    if flag.len() != n {
        return Err(OrbitError::FlagInvalid(format!("expected {n} ideals, got {}", flag.len())));
    }
    let tol = alg.tolerance();
    for (i, gi) in flag.iter().enumerate() {
        if gi.dim() != i + 1 {
            return Err(OrbitError::FlagInvalid(format!("member {} has dimension {}", i + 1, gi.dim())));
        }
        if i > 0 && !flag[i - 1].is_contained_in(gi, tol) {
            return Err(OrbitError::FlagInvalid(format!("member {i} is not contained in member {}", i + 1)));
        }
        for e in 0..n {
            let ad = alg.ad(&alg.basis_vector(e))?;
            let (_, r) = gi.restrict_map(&ad);
            if r > tol * gi.scale() {
                return Err(OrbitError::FlagInvalid(format!("member {} is not an ideal", i + 1)));
            }
        }
    }
    Ok(flag)
}

/// Vergne's construction `𝔪 = Σ_i rad(ℓ|𝔤_i)` along a flag of ideals with
/// `dim 𝔤_i = i`. The last member may be omitted.
pub fn vergne_polarization(alg: &LieAlgebra, l: &DualVector, flag: &[Subalgebra]) -> Result<Subalgebra> {
    if !alg.is_nilpotent() {
        return Err(OrbitError::NotNilpotent);
    }
    alg.check_len(l.len())?;
    let flag = validate_flag(alg, flag)?;
    let b = skew_form(alg, l)?;
    let mut spanning: Vec<AlgebraVector> = Vec::new();
    for gi in &flag {
        let restricted = gi.basis().transpose() * &b * gi.basis();
        let kernel = null_space(&restricted, RANK_RTOL);
        for c in kernel.column_iter() {
            spanning.push(gi.basis() * c);
        }
    }
    let m = Subalgebra::span(alg, &spanning).map_err(|_| OrbitError::ConstructionFailed)?;
    if !check_polarization(alg, l, &m)?.is_polarization() {
        return Err(OrbitError::ConstructionFailed);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaRank {
    pub computed: usize,
    pub expected: usize,
}

impl ThetaRank {
    pub fn matches(&self) -> bool {
        self.computed == self.expected
    }
}

/// Rank of `X ↦ Ad*(g)(ad*(X)ℓ)` on `𝔪`, against `dim 𝔪 − dim 𝔯_ℓ`.
pub fn theta_rank(group: &Group, l: &DualVector, m: &Subalgebra, g: &GroupElement) -> Result<ThetaRank> {
    let alg = group.algebra();
    let b = skew_form(alg, l)?;
    let inv = group.inverse(g)?;
    let co = group.adjoint_matrix(&inv)?.transpose();
    let map = co * b * m.basis();
    let rad = radical(alg, l)?;
    Ok(ThetaRank { computed: numerical_rank(&map, RANK_RTOL), expected: m.dim().saturating_sub(rad.dim()) })
}
