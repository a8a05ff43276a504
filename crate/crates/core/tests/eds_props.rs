mod common;

use calibkit::critical::{phi_module, rho_product};
use calibkit::eds::{cartan_test, hodge_dual_ideal_check, integral_element_codim, polar_space, rotate_in_plane};
use calibkit::exterior::{unit_vector, AltForm};
use calibkit::linalg::{null_space, subspace_distance};
use calibkit::plane::OrientedPlane;
use common::families;
use nalgebra::DMatrix;

#[test]
fn jacobian_rank_is_gauge_invariant() {
    for f in families() {
        let module = phi_module(&f.phi);
        let base = integral_element_codim(&f.calibrated, &module).unwrap();
        assert!(!base.singular, "{}", f.name);
        for i in 0..20 {
            let xi = rotate_in_plane(&f.calibrated, 1000 + i).unwrap();
            let r = integral_element_codim(&xi, &module).unwrap();
            assert_eq!(r.codim, base.codim, "{} rotation {i}", f.name);
            assert_eq!(r.exact_rank, r.fd_rank);
        }
    }
}

#[test]
fn low_polar_codims_vanish_and_bound_holds() {
    for f in families() {
        let r = cartan_test(&f.calibrated, &phi_module(&f.phi)).unwrap();
        let p = f.phi.degree();
        assert_eq!(r.polar_codims.len(), p - 1);
        assert!(
            r.polar_codims[..p.saturating_sub(2)].iter().all(|&c| c == 0),
            "{}: {:?}",
            f.name,
            r.polar_codims
        );
        assert!(r.actual_codim >= f.phi.dim() - p, "{}", f.name);
        assert!(r.max_bound_random_flags >= r.cartan_bound);
    }
}

#[test]
fn associative_codim_regression() {
    let f = &families()[0];
    let r = cartan_test(&f.calibrated, &phi_module(&f.phi)).unwrap();
    assert_eq!((r.cartan_bound, r.actual_codim), (4, 4));
    assert!(r.involutive_at_flag);
    let h = hodge_dual_ideal_check(&f.phi, &f.calibrated).unwrap();
    assert_eq!((h.codim_p, h.codim_dual), (4, 4));
}

#[test]
fn coassociative_is_not_involutive() {
    let f = &families()[1];
    let r = cartan_test(&f.calibrated, &phi_module(&f.phi)).unwrap();
    assert_eq!(r.polar_codims, vec![0, 0, 3]);
    assert_eq!(r.actual_codim, 4);
    assert!(!r.involutive_at_flag);
}

#[test]
fn self_dual_cayley_has_equal_codims() {
    let f = &families()[2];
    let h = hodge_dual_ideal_check(&f.phi, &f.calibrated).unwrap();
    assert!(h.equal);
}

#[test]
fn simple_form_and_its_dual() {
    let phi = AltForm::parse(4, "e12").unwrap();
    let xi = OrientedPlane::coordinate(4, &[0, 1]).unwrap();
    let h = hodge_dual_ideal_check(&phi, &xi).unwrap();
    assert_eq!((h.codim_p, h.codim_dual), (4, 4));
}

#[test]
fn zero_valued_polar_space_is_the_kernel_of_rho() {
    let phi = AltForm::parse(5, "e12").unwrap();
    let e1 = OrientedPlane::coordinate(5, &[2]).unwrap();
    let h = polar_space(&e1, &phi_module(&phi)).unwrap();
    let rho = DMatrix::from_columns(
        &(0..5)
            .map(|i| rho_product(&phi, &[unit_vector(5, i)]).unwrap())
            .collect::<Vec<_>>(),
    );
    let kernel = null_space(&rho, 1e-9);
    assert_eq!(h.ncols(), 3);
    assert!(subspace_distance(&h, &kernel) < 1e-12);
}

#[test]
fn associative_polar_spaces() {
    let f = &families()[0];
    let module = phi_module(&f.phi);
    let line = rotate_in_plane(&f.calibrated, 3).unwrap().prefix(1);
    assert_eq!(polar_space(&line, &module).unwrap().ncols(), 7);
    let e2 = f.calibrated.prefix(2);
    let h = polar_space(&e2, &module).unwrap();
    assert!(subspace_distance(&h, f.calibrated.frame()) < 1e-12);
    let generic = calibkit::grassmann::random_plane(7, 2, 8).unwrap();
    assert!(polar_space(&generic, &module).unwrap().ncols() < 7);
}
