use nalgebra::DVector;
use orbitk::builtin;
use orbitk::calculus::{
    hyperbolic_relation_residual, j_function, j_relation_residual, sl2_cocycle_residual, RhoRegistry, SL2_G_M, SL2_M_R,
};
use orbitk::lie::{Group, Subalgebra};
use orbitk::OrbitError;
use proptest::prelude::*;

fn coords(dim: usize, r: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-r..r, dim).prop_map(DVector::from_vec)
}

#[test]
fn j_is_one_at_zero() {
    let g = Group::matrix(builtin::sl3());
    let alg = g.algebra();
    assert!((j_function(alg, None, &alg.zero()).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn j_relation_rejects_vectors_outside_subalgebra() {
    let g = builtin::sl2_group();
    let alg = g.algebra();
    let m = builtin::sl2_upper(alg);
    let w = DVector::from_vec(vec![0.0, 1.0, 0.0]);
    assert!(matches!(j_relation_residual(alg, &m, &w), Err(OrbitError::NotInSubgroup(_))));
}

#[test]
fn sl2_rho_pairs_satisfy_their_equations() {
    let reg = RhoRegistry::with_builtins();
    for id in [SL2_G_M, SL2_M_R] {
        let samples = reg.get(id).unwrap().samples(100, 11).unwrap();
        assert!(reg.functional_residual(id, &samples).unwrap() < 1e-10, "{id}");
    }
    let samples = reg.get(SL2_G_M).unwrap().samples(100, 12).unwrap();
    assert!(sl2_cocycle_residual(&reg, &samples).unwrap() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn j_relation_holds_on_sl3_borel(c in coords(5, 1.0)) {
        let g = Group::matrix(builtin::sl3());
        let alg = g.algebra();
        let m = builtin::sl3_upper(alg);
        let w = m.embed(&c);
        prop_assert!(j_relation_residual(alg, &m, &w).unwrap() < 1e-10);
        prop_assert!(hyperbolic_relation_residual(alg, &m, &w).unwrap() < 1e-10);
    }

    #[test]
    fn j_relation_holds_on_sl2_borel(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let g = builtin::sl2_group();
        let alg = g.algebra();
        let m = builtin::sl2_upper(alg);
        let w = m.embed(&DVector::from_vec(vec![a, b]));
        prop_assert!(j_relation_residual(alg, &m, &w).unwrap() < 1e-12);
    }

    #[test]
    fn j_relation_is_trivial_for_the_whole_algebra_of_a_nilpotent_group(c in coords(4, 2.0)) {
        let alg = builtin::filiform4();
        let m = Subalgebra::whole(&alg);
        prop_assert!((j_function(&alg, None, &c).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(j_relation_residual(&alg, &m, &c).unwrap() < 1e-12);
    }
}
