use nalgebra::DVector;
use orbitk::builtin;
use orbitk::calculus::modular_function;
use orbitk::coadjoint::coadjoint_action;
use orbitk::lie::matrix::{expm, logm};
use orbitk::lie::{Group, GroupElement};
use proptest::prelude::*;

fn vec_in(dim: usize, r: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-r..r, dim).prop_map(DVector::from_vec)
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.amax()
}

#[test]
fn builtin_brackets_are_lie() {
    for tag in builtin::TAGS {
        let g = builtin::group_by_tag(tag).unwrap();
        let alg = g.algebra();
        assert!(alg.antisymmetry_residual() < 1e-14, "{tag}");
        assert!(alg.jacobi_residual() < 1e-12, "{tag}");
    }
    assert!(builtin::strictly_upper(5).algebra().jacobi_residual() < 1e-14);
}

#[test]
fn strictly_upper_five_has_step_four() {
    let alg = builtin::strictly_upper(5).algebra().clone();
    assert_eq!(alg.nilpotency().step(), Some(4));
    assert_eq!(alg.lower_central_series(), vec![10, 6, 3, 1, 0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bch_is_associative_on_filiform(x in vec_in(4, 2.0), y in vec_in(4, 2.0), z in vec_in(4, 2.0)) {
        let alg = builtin::filiform4();
        let l = alg.bch(&alg.bch(&x, &y).unwrap(), &z).unwrap();
        let r = alg.bch(&x, &alg.bch(&y, &z).unwrap()).unwrap();
        prop_assert!(max_abs(&(l - r)) < 1e-11);
    }

    #[test]
    fn bch_matches_matrix_log_of_product(x in vec_in(10, 1.5), y in vec_in(10, 1.5)) {
        let real = builtin::strictly_upper(5);
        let alg = real.algebra().clone();
        let z = alg.bch(&x, &y).unwrap();
        let prod = expm(&real.to_matrix(&x).unwrap()) * expm(&real.to_matrix(&y).unwrap());
        let w = real.from_matrix(&logm(&prod).unwrap()).unwrap();
        prop_assert!(max_abs(&(z - w)) < 1e-9);
    }

    #[test]
    fn log_inverts_exp_on_sl2(v in vec_in(3, 0.9)) {
        let g = builtin::sl2_group();
        let back = g.log(&g.exp(&v).unwrap()).unwrap();
        prop_assert!(max_abs(&(back - &v)) < 1e-11);
    }

    #[test]
    fn log_inverts_exp_on_sl3(v in vec_in(8, 0.6)) {
        let g = Group::matrix(builtin::sl3());
        let back = g.log(&g.exp(&v).unwrap()).unwrap();
        prop_assert!(max_abs(&(back - &v)) < 1e-10);
    }

    #[test]
    fn adjoint_is_a_homomorphism(a in vec_in(8, 0.7), b in vec_in(8, 0.7)) {
        let g = Group::matrix(builtin::sl3());
        let (x, y) = (g.exp(&a).unwrap(), g.exp(&b).unwrap());
        let xy = g.multiply(&x, &y).unwrap();
        let lhs = g.adjoint_matrix(&xy).unwrap();
        let rhs = g.adjoint_matrix(&x).unwrap() * g.adjoint_matrix(&y).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn coadjoint_action_composes(a in vec_in(4, 1.5), b in vec_in(4, 1.5), l in vec_in(4, 2.0)) {
        let g = Group::nilpotent(builtin::filiform4()).unwrap();
        let (x, y) = (g.exp(&a).unwrap(), g.exp(&b).unwrap());
        let xy = g.multiply(&x, &y).unwrap();
        let lhs = coadjoint_action(&g, &xy, &l).unwrap();
        let rhs = coadjoint_action(&g, &x, &coadjoint_action(&g, &y, &l).unwrap()).unwrap();
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-10 * (1.0 + l.amax()) * 50.0);
    }

    #[test]
    fn modular_function_is_multiplicative(a1 in 0.3f64..3.0, b1 in -2.0f64..2.0, a2 in 0.3f64..3.0, b2 in -2.0f64..2.0) {
        let g = builtin::sl2_group();
        let m = builtin::sl2_upper(g.algebra());
        let h = |a: f64, b: f64| GroupElement::Matrix(nalgebra::DMatrix::from_row_slice(2, 2, &[a, b, 0.0, 1.0 / a]));
        let (h1, h2) = (h(a1, b1), h(a2, b2));
        let prod = g.multiply(&h1, &h2).unwrap();
        let d = |x: &GroupElement| modular_function(&g, Some(&m), x).unwrap();
        let lhs = d(&prod);
        let rhs = d(&h1) * d(&h2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
        prop_assert!((d(&h1) - a1.powi(-2)).abs() <= 1e-10 * a1.powi(-2));
    }
}
