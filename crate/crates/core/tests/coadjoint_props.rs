use nalgebra::DVector;
use orbitk::builtin;
use orbitk::coadjoint::{check_polarization, coadjoint_derivative, radical, theta_rank, vergne_polarization};
use orbitk::lie::Group;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vergne_polarization_on_filiform(l in prop::collection::vec(-2.0f64..2.0, 4), x in prop::collection::vec(-1.0f64..1.0, 4)) {
        let alg = builtin::filiform4();
        let l = DVector::from_vec(l);
        prop_assume!(l[3].abs() > 0.1);
        let flag = builtin::filiform4_flag(&alg);
        let m = vergne_polarization(&alg, &l, &flag).unwrap();
        let rad = radical(&alg, &l).unwrap();
        prop_assert_eq!(2 * m.dim(), alg.dim() + rad.dim());
        prop_assert!(check_polarization(&alg, &l, &m).unwrap().is_polarization());
        let g = Group::nilpotent(alg.clone()).unwrap();
        let h = g.exp(&DVector::from_vec(x)).unwrap();
        prop_assert!(theta_rank(&g, &l, &m, &h).unwrap().matches());
    }

    #[test]
    fn radical_annihilates_the_functional(l in prop::collection::vec(-2.0f64..2.0, 8)) {
        let g = Group::matrix(builtin::sl3());
        let alg = g.algebra();
        let l = DVector::from_vec(l);
        let rad = radical(alg, &l).unwrap();
        for v in rad.vectors() {
            prop_assert!(coadjoint_derivative(alg, &v, &l).unwrap().amax() < 1e-9 * (1.0 + l.amax()));
        }
        prop_assert_eq!((alg.dim() - rad.dim()) % 2, 0);
    }
}

#[test]
fn heisenberg_polarization_is_vergne() {
    let alg = builtin::heisenberg();
    let l = DVector::from_vec(vec![0.3, -0.2, 1.5]);
    let m = vergne_polarization(&alg, &l, &builtin::heisenberg_flag(&alg)).unwrap();
    assert!(m.same_span(&builtin::heisenberg_polarization(&alg), 1e-12));
    assert_eq!(radical(&alg, &l).unwrap().dim(), 1);
}
