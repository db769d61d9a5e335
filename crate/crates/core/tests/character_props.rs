use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use orbitk::builtin;
use orbitk::character::{
    involution, left_translate, right_translate, translate, CharacterBackend, GaussianDictElem, QuadratureSpec,
    TestFunction,
};
use proptest::prelude::*;

fn gaussian(center: Vec<f64>, scale: f64, phase: Vec<f64>) -> TestFunction {
    TestFunction::gaussian(GaussianDictElem::new(center, scale).with_phase(phase)).unwrap()
}

fn small(r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, 3)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn plane_character_converges_under_refinement() {
    let g = builtin::heisenberg_group();
    let b = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
    let f = TestFunction::unit_gaussian(3);
    let exact = TAU * TAU.sqrt() * (-0.5f64).exp();
    let errs: Vec<f64> = [8, 12, 16, 32]
        .iter()
        .map(|&n| (b.evaluate(&f, &QuadratureSpec::trapezoid(9.0, n).unwrap()).unwrap().re - exact).abs())
        .collect();
    assert!(errs[3] < 1e-12 * exact, "{errs:?}");
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn point_orbit_character_is_a_fourier_transform() {
    let g = builtin::heisenberg_group();
    let l = DVector::from_vec(vec![0.7, -0.4, 0.0]);
    let b = CharacterBackend::point_orbit(&g, l.clone()).unwrap();
    let v = b.evaluate(&TestFunction::unit_gaussian(3), &QuadratureSpec::trapezoid(9.0, 48).unwrap()).unwrap();
    let exact = TAU.powf(1.5) * (-l.norm_squared() / 2.0).exp();
    assert!((v.re - exact).abs() < 1e-10 && v.im.abs() < 1e-10);
}

#[test]
fn zero_function_has_zero_character() {
    let g = builtin::heisenberg_group();
    let b = CharacterBackend::heisenberg_plane(&g, 0.8).unwrap();
    let v = b.evaluate(&TestFunction::zero(3), &QuadratureSpec::trapezoid(6.0, 16).unwrap()).unwrap();
    assert_eq!(v, Complex64::new(0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn lipsman_agrees_with_plane(c in small(0.5), k in small(0.6), s in 0.7f64..1.0, gamma in 1.0f64..1.5) {
        let g = builtin::heisenberg_group();
        let m = builtin::heisenberg_polarization(g.algebra());
        let lip = CharacterBackend::lipsman(&g, DVector::from_vec(vec![0.0, 0.0, gamma]), m).unwrap();
        let plane = CharacterBackend::heisenberg_plane(&g, gamma).unwrap();
        let f = gaussian(c, s, k);
        let q = QuadratureSpec::trapezoid(9.5, 64).unwrap();
        let (a, b) = (lip.evaluate(&f, &q).unwrap(), plane.evaluate(&f, &q).unwrap());
        prop_assert!(rel(a, b) < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn plane_character_is_conjugation_invariant(c in small(0.4), x in small(0.4), s in 0.4f64..0.6) {
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::heisenberg_plane(&g, 1.0).unwrap();
        let f = gaussian(c, s, vec![0.3, -0.2, 0.0]);
        let h = g.exp(&DVector::from_vec(x)).unwrap();
        let conj = translate(&g, &h, &h, &f, 9.5).unwrap();
        let q = QuadratureSpec::trapezoid(9.5, 64).unwrap();
        let (a, v) = (b.evaluate(&conj, &q).unwrap(), b.evaluate(&f, &q).unwrap());
        prop_assert!(rel(a, v) < 1e-8, "{} vs {}", a, v);
    }

    #[test]
    fn character_is_linear(c1 in small(0.5), c2 in small(0.5), a in -2.0f64..2.0, bi in -2.0f64..2.0) {
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::heisenberg_plane(&g, 1.2).unwrap();
        let (f1, f2) = (gaussian(c1, 0.7, vec![]), gaussian(c2, 0.9, vec![0.1, 0.2, 0.3]));
        let w = Complex64::new(a, bi);
        let one = Complex64::new(1.0, 0.0);
        let combo = TestFunction::linear_combination(&[(w, f1.clone()), (one, f2.clone())]).unwrap();
        let q = QuadratureSpec::trapezoid(9.0, 48).unwrap();
        let lhs = b.evaluate(&combo, &q).unwrap();
        let rhs = w * b.evaluate(&f1, &q).unwrap() + b.evaluate(&f2, &q).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn involution_conjugates_the_character(c in small(0.5), k in small(0.8)) {
        let g = builtin::heisenberg_group();
        let b = CharacterBackend::heisenberg_plane(&g, 0.9).unwrap();
        let f = gaussian(c, 0.7, k);
        let q = QuadratureSpec::trapezoid(9.0, 48).unwrap();
        let (a, v) = (b.evaluate(&involution(&g, &f), &q).unwrap(), b.evaluate(&f, &q).unwrap());
        prop_assert!((a - v.conj()).norm() < 1e-10 * (1.0 + v.norm()));
    }

    #[test]
    fn central_translates_agree(z in -0.5f64..0.5, c in small(0.5)) {
        let g = builtin::heisenberg_group();
        let f = gaussian(c, 0.7, vec![]);
        let h = g.exp(&DVector::from_vec(vec![0.0, 0.0, z])).unwrap();
        let l = left_translate(&g, &h, &f, 9.0).unwrap();
        let r = right_translate(&g, &g.inverse(&h).unwrap(), &f, 9.0).unwrap();
        for u in [[0.1, 0.2, 0.3], [-0.4, 0.0, 0.7], [0.0, 0.0, 0.0]] {
            prop_assert!((l.eval(&u) - r.eval(&u)).norm() < 1e-13);
        }
    }
}
