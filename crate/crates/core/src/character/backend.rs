use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::{sum_indexed, QuadratureSpec, Rule1d, TensorGrid};
use super::testfn::TestFunction;
use crate::builtin;
use crate::coadjoint::{check_polarization, skew_form, DualVector};
use crate::error::{OrbitError, Result};
use crate::lie::matrix::expm;
use crate::lie::{Group, GroupElement, Subalgebra};
use crate::linalg::{numerical_rank, RANK_RTOL};

/// Serializable description of a backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BackendVariant {
    PointOrbit { functional: Vec<f64> },
    HeisenbergPlane { gamma: f64 },
    Lipsman { functional: Vec<f64>, polarization: Vec<Vec<f64>> },
    Sl2Principal { u_radius: f64 },
}

#[derive(Debug, Clone)]
enum Variant {
    PointOrbit { l: DualVector },
    HeisenbergPlane { gamma: f64 },
    Lipsman { l: DualVector, m: Subalgebra, complement: Vec<DVector<f64>> },
    Sl2Principal { u_radius: f64 },
}

/// A character functional written as a weighted sum of point evaluations,
/// `χ(f) ≈ Σ_n w_n f(exp u_n)`.
#[derive(Debug, Clone)]
pub struct CharacterRule {
    pub dim: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<Complex64>,
}

impl CharacterRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn apply<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        sum_indexed(self.len(), |i| self.weights[i] * f(self.node(i)))
    }

    fn push(&mut self, u: &[f64], w: Complex64) {
        self.nodes.extend_from_slice(u);
        self.weights.push(w);
    }
}

/// A character backend bound to a group, with its calibration scalar.
#[derive(Debug, Clone)]
pub struct CharacterBackend {
    group: Group,
    variant: Variant,
    calibration: f64,
}

impl CharacterBackend {
    /// `χ(f) = ∫ f(x) e^{iℓ(log x)} dx`, for `ℓ` vanishing on `[𝔤, 𝔤]`.
    pub fn point_orbit(group: &Group, l: DualVector) -> Result<Self> {
        let Group::Nilpotent(alg) = group else {
            return Err(mismatch("point_orbit", "needs a nilpotent group in exponential coordinates"));
        };
        alg.check_len(l.len())?;
        if skew_form(alg, &l)?.amax() > alg.tolerance() * (1.0 + l.norm()) {
            return Err(mismatch("point_orbit", "functional does not vanish on [g, g]"));
        }
        Ok(Self::with(group, Variant::PointOrbit { l }))
    }

    /// `χ(f) = (2π/|γ|) ∫ f(exp tZ) e^{itγ} dt` on the Heisenberg group.
    pub fn heisenberg_plane(group: &Group, gamma: f64) -> Result<Self> {
        if !matches!(group, Group::Nilpotent(a) if **a == builtin::heisenberg()) {
            return Err(mismatch("heisenberg_plane", "needs the Heisenberg algebra [X, Y] = Z"));
        }
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(OrbitError::GammaZero);
        }
        Ok(Self::with(group, Variant::HeisenbergPlane { gamma }))
    }

    /// `χ(f) = ∫_{G/M} ∫_M f(x p x⁻¹) e^{iℓ(log p)} dp dx` with `G/M`
    /// parametrized by `exp(s₁c₁)⋯exp(s_r c_r)` over a greedy complement.
    pub fn lipsman(group: &Group, l: DualVector, m: Subalgebra) -> Result<Self> {
        let Group::Nilpotent(alg) = group else {
            return Err(mismatch("lipsman", "needs a nilpotent group in exponential coordinates"));
        };
        if !check_polarization(alg, &l, &m)?.is_polarization() {
            return Err(OrbitError::NotAPolarization);
        }
        let mut cols: Vec<DVector<f64>> = m.vectors();
        let mut complement = Vec::new();
        for i in 0..alg.dim() {
            let e = alg.basis_vector(i);
            cols.push(e.clone());
            if numerical_rank(&DMatrix::from_columns(&cols), RANK_RTOL) == cols.len() {
                complement.push(e);
            } else {
                cols.pop();
            }
        }
        Ok(Self::with(group, Variant::Lipsman { l, m, complement }))
    }

    /// The principal-series orbit of `H*` on `SL(2,ℝ)`, for functions
    /// supported in the coordinate ball of radius `u_radius`.
    pub fn sl2_principal(group: &Group, u_radius: f64) -> Result<Self> {
        let Some(real) = group.realization() else {
            return Err(mismatch("sl2_principal", "needs the 2x2 realization of sl(2,R)"));
        };
        if real.algebra() != builtin::sl2().algebra() {
            return Err(mismatch("sl2_principal", "needs the basis H, X, Y of sl(2,R)"));
        }
        check_log_ball(group, u_radius)?;
        Ok(Self::with(group, Variant::Sl2Principal { u_radius }))
    }

    fn with(group: &Group, variant: Variant) -> Self {
        Self { group: group.clone(), variant, calibration: 1.0 }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            Variant::PointOrbit { .. } => "point_orbit",
            Variant::HeisenbergPlane { .. } => "heisenberg_plane",
            Variant::Lipsman { .. } => "lipsman",
            Variant::Sl2Principal { .. } => "sl2_principal",
        }
    }

    pub fn describe(&self) -> BackendVariant {
        match &self.variant {
            Variant::PointOrbit { l } => BackendVariant::PointOrbit { functional: l.as_slice().to_vec() },
            Variant::HeisenbergPlane { gamma } => BackendVariant::HeisenbergPlane { gamma: *gamma },
            Variant::Lipsman { l, m, .. } => BackendVariant::Lipsman {
                functional: l.as_slice().to_vec(),
                polarization: m.vectors().iter().map(|v| v.as_slice().to_vec()).collect(),
            },
            Variant::Sl2Principal { u_radius } => BackendVariant::Sl2Principal { u_radius: *u_radius },
        }
    }

    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    pub fn set_calibration(&mut self, c: f64) {
        self.calibration = c;
    }

    /// Functional used by the point-orbit backend, if any.
    pub fn point_functional(&self) -> Option<&DualVector> {
        match &self.variant {
            Variant::PointOrbit { l } => Some(l),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.variant {
            Variant::HeisenbergPlane { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Node rule for integrands supported in the ball of radius `support`.
    pub fn rule(&self, support: f64, q: &QuadratureSpec) -> Result<CharacterRule> {
        let dim = self.group.dim();
        let mut rule = CharacterRule { dim, nodes: Vec::new(), weights: Vec::new() };
        let c = self.calibration;
        match &self.variant {
            Variant::PointOrbit { l } => {
                fits(support, q.radius)?;
                let grid = TensorGrid::cube(q, dim);
                let mut u = vec![0.0; dim];
                for i in 0..grid.len() {
                    let w = grid.point(i, &mut u);
                    if norm(&u) <= support {
                        let phase: f64 = u.iter().zip(l.iter()).map(|(a, b)| a * b).sum();
                        rule.push(&u, Complex64::from_polar(w * c, phase));
                    }
                }
            }
            Variant::HeisenbergPlane { gamma } => {
                fits(support, q.radius)?;
                let r = q.rule();
                let pref = std::f64::consts::TAU / gamma.abs() * c;
                for (t, w) in r.nodes.iter().zip(&r.weights) {
                    if t.abs() <= support {
                        rule.push(&[0.0, 0.0, *t], Complex64::from_polar(pref * w, gamma * t));
                    }
                }
            }
            Variant::Lipsman { l, m, complement } => self.lipsman_rule(&mut rule, l, m, complement, support, q)?,
            Variant::Sl2Principal { u_radius } => {
                if support > *u_radius {
                    return Err(OrbitError::SupportNotInU(support));
                }
                self.sl2_rule(&mut rule, support, q)?;
            }
        }
        Ok(rule)
    }

    fn lipsman_rule(
        &self,
        rule: &mut CharacterRule,
        l: &DualVector,
        m: &Subalgebra,
        complement: &[DVector<f64>],
        support: f64,
        q: &QuadratureSpec,
    ) -> Result<()> {
        let alg = self.group.algebra();
        let ads: Vec<DMatrix<f64>> = complement.iter().map(|e| alg.ad(e)).collect::<Result<_>>()?;
        let coset = TensorGrid::cube(q, complement.len());
        let k = m.dim();
        let fiber = TensorGrid::new(vec![q.rule_on(support); k]);
        let (fiber_pts, fiber_w) = fiber.points();
        let l_m = m.basis().transpose() * l;
        let mut s = vec![0.0; complement.len()];
        for i in 0..coset.len() {
            let ws = coset.point(i, &mut s);
            let mut ad_x = DMatrix::identity(alg.dim(), alg.dim());
            for (si, ad) in s.iter().zip(&ads) {
                ad_x *= expm(&(ad * *si));
            }
            // Ad(x)𝔪 with an orthonormal basis O; P = (OᵀA)⁻¹ t for Q = O t
            let a = &ad_x * m.basis();
            let o = a.clone().qr().q();
            let ota = o.transpose() * &a;
            let jac = ota.determinant().abs();
            let ota_inv = ota.try_inverse().ok_or(OrbitError::ConstructionFailed)?;
            let phase_row = l_m.transpose() * ota_inv;
            for (t, wt) in fiber_pts.chunks(k.max(1)).zip(&fiber_w) {
                let t = &t[..k];
                if norm(t) > support {
                    continue;
                }
                let tv = DVector::from_column_slice(t);
                let node = &o * &tv;
                let phase = (&phase_row * &tv)[0];
                rule.push(node.as_slice(), Complex64::from_polar(ws * wt * self.calibration / jac, phase));
            }
        }
        Ok(())
    }

    fn sl2_rule(&self, rule: &mut CharacterRule, support: f64, q: &QuadratureSpec) -> Result<()> {
        let n = q.points_per_axis;
        let angles = Rule1d::periodic(sl2_angle_points(n));
        let t = q.rule_on(support);
        let sqrt2 = std::f64::consts::SQRT_2;
        for (theta, wth) in angles.nodes.iter().zip(&angles.weights) {
            let (sn, cs) = theta.sin_cos();
            let k = GroupElement::Matrix(DMatrix::from_row_slice(2, 2, &[cs, sn, -sn, cs]));
            let ad_k = self.group.adjoint_matrix(&k)?;
            // ρ_(G,M) = 1/(k₁₁² + k₂₁²) = 1 on rotations
            let rho = 1.0 / (cs * cs + sn * sn);
            for (t1, w1) in t.nodes.iter().zip(&t.weights) {
                for (t2, w2) in t.nodes.iter().zip(&t.weights) {
                    if t1.hypot(*t2) > support {
                        continue;
                    }
                    // p = exp(αH + β(X+Y)) with α = t₁, β = t₂/√2; the measure
                    // Δ_M^{-1/2}(p) dp = dα db and db = 2 sinh(α)/α dβ
                    let p = DVector::from_vec(vec![*t1, t2 / sqrt2, t2 / sqrt2]);
                    let node = &ad_k * p;
                    let w = wth * w1 * w2 * sqrt2 * sinhc(*t1) / rho * self.calibration;
                    rule.push(node.as_slice(), Complex64::from_polar(w, *t1));
                }
            }
        }
        Ok(())
    }

    /// `χ(f)` at resolution `q`.
    pub fn evaluate(&self, f: &TestFunction, q: &QuadratureSpec) -> Result<Complex64> {
        if f.dim() != self.group.dim() {
            return Err(OrbitError::DimensionMismatch("test function lives on another group".into()));
        }
        let rule = self.rule(f.support_radius(), q)?;
        Ok(rule.apply(|u| f.eval(u)))
    }

    /// Sets the calibration scalar to `Re(χ_ref(f) / χ(f))` and returns it.
    pub fn calibrate(&mut self, reference: &CharacterBackend, f: &TestFunction, q: &QuadratureSpec) -> Result<f64> {
        self.calibration = 1.0;
        let raw = self.evaluate(f, q)?;
        let target = reference.evaluate(f, q)?;
        if raw.norm() < 1e-300 {
            return Err(OrbitError::CalibrationFailed("reference function has zero character".into()));
        }
        let c = (target / raw).re;
        if !(c.is_finite() && c > 0.0) {
            return Err(OrbitError::CalibrationFailed(format!("scalar {c}")));
        }
        self.calibration = c;
        Ok(c)
    }
}

/// Angular resolution of the `SL(2,ℝ)` rule for `n` points per radial axis.
pub(crate) fn sl2_angle_points(n: usize) -> usize {
    (std::f64::consts::PI * n as f64).ceil() as usize
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn fits(support: f64, radius: f64) -> Result<()> {
    if support > radius {
        return Err(OrbitError::SupportOverflow { needed: support, available: radius });
    }
    Ok(())
}

fn mismatch(backend: &str, reason: &str) -> OrbitError {
    OrbitError::BackendMismatch { backend: backend.into(), reason: reason.into() }
}

/// Checks that `log ∘ exp` is the identity on sample points of the ball.
fn check_log_ball(group: &Group, radius: f64) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(OrbitError::SupportNotInU(radius));
    }
    for dir in super::testfn::probe_directions(group.dim(), 200) {
        for frac in [0.5, 1.0] {
            let v = DVector::from_iterator(dir.len(), dir.iter().map(|x| x * radius * frac));
            let back = group.exp(&v).and_then(|g| group.log(&g));
            match back {
                Ok(w) if (&w - &v).norm() <= 1e-9 * (1.0 + v.norm()) => {}
                _ => return Err(OrbitError::SupportNotInU(radius)),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::testfn::GaussianDictElem;
    use std::f64::consts::{PI, TAU};

    fn q() -> QuadratureSpec {
        QuadratureSpec::trapezoid(9.0, 64).unwrap()
    }

    #[test]
    fn heisenberg_closed_form() {
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
        let v = b.evaluate(&TestFunction::unit_gaussian(3), &q()).unwrap();
        let exact = TAU * TAU.sqrt() * (-0.5f64).exp();
        assert!((v.re - exact).abs() / exact < 1e-12 && v.im.abs() < 1e-12);
        assert!(matches!(CharacterBackend::heisenberg_plane(&g, 0.0), Err(OrbitError::GammaZero)));
    }

    #[test]
    fn point_orbit_gaussian_moments() {
        let g = builtin::heisenberg_group();
        let f = TestFunction::unit_gaussian(3);
        let zero = CharacterBackend::point_orbit(&g, DVector::zeros(3)).unwrap();
        let v = zero.evaluate(&f, &QuadratureSpec::trapezoid(9.0, 40).unwrap()).unwrap();
        assert!((v.re - TAU.powf(1.5)).abs() < 1e-9);
        let x = CharacterBackend::point_orbit(&g, DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let v = x.evaluate(&f, &QuadratureSpec::trapezoid(9.0, 40).unwrap()).unwrap();
        assert!((v.re - TAU.powf(1.5) * (-0.5f64).exp()).abs() < 1e-9);
        assert!(CharacterBackend::point_orbit(&g, DVector::from_vec(vec![0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn lipsman_matches_closed_form() {
        let g = builtin::heisenberg_group();
        let m = builtin::heisenberg_polarization(g.algebra());
        let lip = CharacterBackend::lipsman(&g, DVector::from_vec(vec![0.0, 0.0, 1.0]), m).unwrap();
        let plane = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
        let f =
            TestFunction::gaussian(GaussianDictElem::new(vec![0.3, -0.2, 0.1], 0.8).with_phase(vec![0.4, 0.0, -0.3]))
                .unwrap();
        let a = lip.evaluate(&f, &QuadratureSpec::trapezoid(8.0, 64).unwrap()).unwrap();
        let b = plane.evaluate(&f, &QuadratureSpec::trapezoid(8.0, 64).unwrap()).unwrap();
        assert!((a - b).norm() / b.norm() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn lipsman_rejects_non_polarization() {
        let g = builtin::heisenberg_group();
        let z = Subalgebra::new(g.algebra(), &[g.algebra().basis_vector(2)]).unwrap();
        assert!(matches!(
            CharacterBackend::lipsman(&g, DVector::from_vec(vec![0.0, 0.0, 1.0]), z),
            Err(OrbitError::NotAPolarization)
        ));
    }

    #[test]
    fn sl2_backend_guards() {
        let g = builtin::sl2_group();
        let b = CharacterBackend::sl2_principal(&g, 0.8).unwrap();
        let wide = TestFunction::unit_gaussian(3);
        assert!(matches!(b.evaluate(&wide, &q()), Err(OrbitError::SupportNotInU(_))));
        assert!(CharacterBackend::sl2_principal(&g, 4.0).is_err());
        let h = builtin::heisenberg_group();
        assert!(CharacterBackend::sl2_principal(&h, 0.8).is_err());
        let _ = PI;
    }
}
