//! Modular function, Schur's Jacobian and the ρ functions of homogeneous
//! spaces.

mod rho;

pub use rho::{sl2_cocycle_residual, RhoFn, RhoPair, RhoRegistry, SL2_G_M, SL2_M_R};

use nalgebra::DMatrix;

use crate::error::{OrbitError, Result};
use crate::lie::matrix::{expm, phi_minus, sinhc_half};
use crate::lie::{ad_matrix, AlgebraVector, Group, GroupElement, LieAlgebra, Subalgebra};

/// Checks that `h` lies in the connected subgroup with Lie algebra `sub`.
///
/// `Ad(h)` must preserve `sub`, and either `log h` or `log h²` must lie in
/// it. The square covers elements such as `diag(a, 1/a)` with `a < 0`, whose
/// principal logarithm does not exist.
pub fn subgroup_membership_residual(group: &Group, sub: &Subalgebra, h: &GroupElement) -> Result<f64> {
    let ad = group.adjoint_matrix(h)?;
    let (_, invariance) = sub.restrict_map(&ad);
    let log_residual = match group.log(h) {
        Ok(v) => sub.membership_residual(&v),
        Err(OrbitError::LogDomain(_)) => {
            let h2 = group.multiply(h, h)?;
            let v = group.log(&h2)?;
            sub.membership_residual(&v)
        }
        Err(e) => return Err(e),
    };
    Ok(invariance.max(log_residual))
}

/// `Δ(h) = |det Ad(h⁻¹)|`, with `Ad` restricted to `on` when given.
pub fn modular_function(group: &Group, on: Option<&Subalgebra>, h: &GroupElement) -> Result<f64> {
    let inv = group.inverse(h)?;
    let ad = group.adjoint_matrix(&inv)?;
    match on {
        None => Ok(ad.determinant().abs()),
        Some(sub) => {
            let r = subgroup_membership_residual(group, sub, h)?;
            let scale = 1.0 + ad.norm();
            if r > group.algebra().tolerance() * scale * 1e2 {
                return Err(OrbitError::NotInSubgroup(r));
            }
            Ok(sub.restrict_map(&ad).0.determinant().abs())
        }
    }
}

/// `det((1 − e^{−ad v}) / ad v)` on the algebra or on a subalgebra.
pub fn j_function(alg: &LieAlgebra, on: Option<&Subalgebra>, v: &AlgebraVector) -> Result<f64> {
    let ad = ad_matrix(alg, v, on)?;
    Ok(phi_minus(&ad)?.determinant())
}

/// `det(sinh(ad v / 2) / (ad v / 2))`.
pub fn hyperbolic_j(alg: &LieAlgebra, on: Option<&Subalgebra>, v: &AlgebraVector) -> Result<f64> {
    let ad = ad_matrix(alg, v, on)?;
    Ok(sinhc_half(&ad)?.determinant())
}

/// `Δ_M(exp W) = det e^{−ad_𝔪 W}`, evaluated without leaving the algebra.
pub fn subgroup_modular_of_exp(alg: &LieAlgebra, m: &Subalgebra, w: &AlgebraVector) -> Result<f64> {
    let ad: DMatrix<f64> = m.ad_restricted(alg, w)?;
    Ok(expm(&(-ad)).determinant())
}

fn require_member(alg: &LieAlgebra, m: &Subalgebra, w: &AlgebraVector) -> Result<()> {
    alg.check_len(w.len())?;
    let r = m.membership_residual(w);
    if r > alg.tolerance() * (1.0 + w.norm()) {
        return Err(OrbitError::NotInSubgroup(r));
    }
    Ok(())
}

/// `|j_𝔤(W) − j_𝔪(W)² / Δ_M(exp W)|` for `W ∈ 𝔪`.
pub fn j_relation_residual(alg: &LieAlgebra, m: &Subalgebra, w: &AlgebraVector) -> Result<f64> {
    require_member(alg, m, w)?;
    let jg = j_function(alg, None, w)?;
    let jm = j_function(alg, Some(m), w)?;
    let delta = subgroup_modular_of_exp(alg, m, w)?;
    Ok((jg - jm * jm / delta).abs())
}

/// `|hj_𝔤(W) − hj_𝔪(W)²|` for `W ∈ 𝔪`.
pub fn hyperbolic_relation_residual(alg: &LieAlgebra, m: &Subalgebra, w: &AlgebraVector) -> Result<f64> {
    require_member(alg, m, w)?;
    let hg = hyperbolic_j(alg, None, w)?;
    let hm = hyperbolic_j(alg, Some(m), w)?;
    Ok((hg - hm * hm).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use nalgebra::{DMatrix, DVector};

    fn upper(a: f64, b: f64) -> GroupElement {
        GroupElement::Matrix(DMatrix::from_row_slice(2, 2, &[a, b, 0.0, 1.0 / a]))
    }

    #[test]
    fn modular_function_of_borel() {
        let g = builtin::sl2_group();
        let m = builtin::sl2_upper(g.algebra());
        let r = builtin::sl2_diagonal(g.algebra());
        for (a, b) in [(2.0, 0.3), (0.5, -1.0), (-1.5, 0.7)] {
            let d = modular_function(&g, Some(&m), &upper(a, b)).unwrap();
            assert!((d - 1.0 / (a * a)).abs() < 1e-12, "a={a}: {d}");
            let dr = modular_function(&g, Some(&r), &upper(a, 0.0)).unwrap();
            assert!((dr - 1.0).abs() < 1e-12);
        }
        assert!(matches!(modular_function(&g, Some(&r), &upper(2.0, 1.0)), Err(OrbitError::NotInSubgroup(_))));
    }

    #[test]
    fn j_values_on_sl2() {
        let g = builtin::sl2_group();
        let alg = g.algebra();
        let m = builtin::sl2_upper(alg);
        let w = DVector::from_vec(vec![1.0, 0.7, 0.7]);
        let jm = j_function(alg, Some(&m), &w).unwrap();
        let jg = j_function(alg, None, &w).unwrap();
        let e = std::f64::consts::E;
        assert!((jm - (1.0 - e.powi(-2)) / 2.0).abs() < 1e-13);
        assert!((jg - (e - 1.0 / e).powi(2) / 4.0).abs() < 1e-13);
        assert!(j_relation_residual(alg, &m, &w).unwrap() < 1e-12);
        assert!(hyperbolic_relation_residual(alg, &m, &w).unwrap() < 1e-12);
    }

    #[test]
    fn hyperbolic_j_equals_j_on_unimodular() {
        let g = builtin::sl2_group();
        let h = g.algebra().basis_vector(0);
        let a = j_function(g.algebra(), None, &h).unwrap();
        let b = hyperbolic_j(g.algebra(), None, &h).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_j_is_one() {
        let h = builtin::heisenberg();
        let v = DVector::from_vec(vec![0.8, -1.3, 2.0]);
        assert!((j_function(&h, None, &v).unwrap() - 1.0).abs() < 1e-14);
        assert!((hyperbolic_j(&h, None, &v).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn w_outside_subalgebra_rejected() {
        let g = builtin::sl2_group();
        let m = builtin::sl2_upper(g.algebra());
        let w = g.algebra().basis_vector(1);
        assert!(j_relation_residual(g.algebra(), &m, &w).is_err());
    }
}
