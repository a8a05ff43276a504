#![allow(dead_code)]

use calibkit::calibrations::{
    associative_form, cartan_three_form, cayley_form, coassociative_form, special_lagrangian, LieAlgebraData,
};
use calibkit::critical::stabilizer_algebra;
use calibkit::exterior::{AltForm, SkewMap};
use calibkit::plane::OrientedPlane;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_form(rng: &mut ChaCha8Rng, n: usize, p: usize) -> AltForm {
    let len = calibkit::linalg::binomial(n, p);
    let v: Vec<f64> = (0..len).map(|_| normal(rng)).collect();
    AltForm::from_dense(n, p, &v)
}

pub fn random_skew(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> SkewMap {
    let c: Vec<f64> = (0..n * (n - 1) / 2).map(|_| scale * normal(rng)).collect();
    SkewMap::from_coords(n, &c)
}

/// `exp(theta)` for a random `theta` in the stabilizer algebra of `phi`.
pub fn random_stabilizer_element(rng: &mut ChaCha8Rng, phi: &AltForm) -> DMatrix<f64> {
    let n = phi.dim();
    let mut theta = SkewMap::zero(n);
    for g in stabilizer_algebra(phi) {
        let c = normal(rng);
        for i in 0..n {
            for j in i + 1..n {
                theta.set(i, j, theta.get(i, j) + c * g.get(i, j));
            }
        }
    }
    theta.exp()
}

pub struct Family {
    pub name: &'static str,
    pub phi: AltForm,
    /// A plane on which `phi` takes the value 1.
    pub calibrated: OrientedPlane,
}

fn coordinate(n: usize, idx: &[usize]) -> OrientedPlane {
    OrientedPlane::coordinate(n, idx).unwrap()
}

pub fn su_calibrated_plane(k: usize) -> OrientedPlane {
    let g = LieAlgebraData::su(k).unwrap();
    let t = g.highest_root_triple().unwrap();
    let m = DMatrix::from_fn(g.dim(), 3, |i, j| t[j][i]);
    let xi = OrientedPlane::from_spanning(&m).unwrap();
    let phi = cartan_three_form(&g).unwrap();
    if phi.evaluate_frame(xi.frame()).unwrap() < 0.0 {
        xi.reversed()
    } else {
        xi
    }
}

/// Every named calibration with a known calibrated plane.
pub fn families() -> Vec<Family> {
    let assoc_plane = coordinate(7, &[0, 1, 2]);
    let mut out = vec![
        Family {
            name: "associative",
            phi: associative_form(),
            calibrated: assoc_plane.clone(),
        },
        Family {
            name: "coassociative",
            phi: coassociative_form(),
            calibrated: assoc_plane.orthogonal_complement(),
        },
        Family {
            name: "cayley",
            phi: cayley_form(),
            calibrated: coordinate(8, &[0, 1, 2, 3]),
        },
    ];
    for (m, name) in [
        (2, "special_lagrangian_2"),
        (3, "special_lagrangian_3"),
        (4, "special_lagrangian_4"),
    ] {
        let s = special_lagrangian(m, 0.0).unwrap();
        let xs: Vec<usize> = (0..m).map(|i| 2 * i).collect();
        out.push(Family {
            name,
            phi: s.calib,
            calibrated: coordinate(2 * m, &xs),
        });
    }
    out.push(Family {
        name: "cartan_su3",
        phi: cartan_three_form(&LieAlgebraData::su(3).unwrap()).unwrap(),
        calibrated: su_calibrated_plane(3),
    });
    out
}
