//! Pointwise analysis of the exterior ideal generated by the module `Phi`.
//!
//! The ideal has no nonzero elements below degree p, so polar spaces of
//! small integral elements are the whole space and only `H(E_{p-1})`
//! carries information. The integral-element variety near an integral
//! p-plane is cut out by `gamma(xi) = 0` for `gamma` in `Phi`; its codimension
//! is read off from the rank of the linearized constraint.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::critical::{phi_module, FormModule, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::exterior::{canonical_masks, indices_of, AltForm, FormEvaluator};
use crate::grassmann::{random_plane, trial_seed, Ascender, SearchParams, Sense};
use crate::linalg;
use crate::plane::OrientedPlane;

/// Relative singular-value cutoff for integral-element Jacobians.
pub const JACOBIAN_CUTOFF: f64 = 1e-4;
/// Central-difference step for the Jacobian.
pub const FD_STEP: f64 = 1e-6;
/// A plane is integral when every module element vanishes on it to this
/// accuracy.
pub const INTEGRAL_TOL: f64 = 1e-8;
/// Number of random in-plane frames used for the generic-flag bound.
pub const RANDOM_FLAGS: usize = 50;

/// Orthonormal basis of `H(E)` for the k-plane `E` (k <= p): vectors `v` with
/// `gamma(e_I, v) = 0` for every module element and every (p-1)-subset `I` of
/// the frame of `E`.
pub fn polar_space(e: &OrientedPlane, module: &FormModule) -> Result<DMatrix<f64>> {
    let (n, p, k) = (module.dim_n(), module.degree(), e.p());
    if e.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e.dim(),
        });
    }
    if k > p {
        return Err(Error::OutOfRange(format!("polar space needs dim E <= {p}, got {k}")));
    }
    if p == 0 || k + 1 < p || module.rank() == 0 {
        return Ok(DMatrix::identity(n, n));
    }
    let evals: Vec<FormEvaluator> = module.basis().iter().map(FormEvaluator::new).collect();
    let frame = e.frame();
    let subsets = canonical_masks(k, p - 1);
    let mut rows = DMatrix::zeros(evals.len() * subsets.len(), n);
    let id = DMatrix::<f64>::identity(n, n);
    let mut r = 0;
    for ev in &evals {
        for &mask in &subsets {
            let mut slots: Vec<&[f64]> = indices_of(mask).map(|a| frame.column(a).data.into_slice()).collect();
            for j in 0..n {
                slots.push(id.column(j).data.into_slice());
                rows[(r, j)] = ev.eval(&slots);
                slots.pop();
            }
            r += 1;
        }
    }
    Ok(linalg::null_space(&rows, RANK_CUTOFF))
}

/// `n - dim H(E)`.
pub fn polar_codim(e: &OrientedPlane, module: &FormModule) -> Result<usize> {
    Ok(module.dim_n() - polar_space(e, module)?.ncols())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimReport {
    pub exact_rank: usize,
    pub fd_rank: usize,
    pub codim: usize,
    pub singular: bool,
}

fn check_integral(xi: &OrientedPlane, module: &FormModule) -> Result<()> {
    let worst = crate::critical::annihilator_check(xi, module)?;
    if worst >= INTEGRAL_TOL {
        return Err(Error::NotIntegral(worst));
    }
    Ok(())
}

/// Exact linearization: row `gamma`, column `(s, a)` holds
/// `gamma(e_1, ..., v_s at slot a, ..., e_p)`.
pub fn exact_jacobian(xi: &OrientedPlane, module: &FormModule) -> DMatrix<f64> {
    let adapted = xi.adapted_frame();
    let p = xi.p();
    let q = xi.dim() - p;
    let mut j = DMatrix::zeros(module.rank(), p * q);
    for (row, g) in module.basis().iter().enumerate() {
        let c = crate::critical::cousin_matrix(&FormEvaluator::new(g), &adapted);
        for a in 0..p {
            for s in 0..q {
                j[(row, a * q + s)] = c[(s, a)];
            }
        }
    }
    j
}

/// Central differences of `gamma(xi_A)` with `xi_A` moving column `e_a` by
/// `h v_s`.
pub fn fd_jacobian(xi: &OrientedPlane, module: &FormModule, h: f64) -> Result<DMatrix<f64>> {
    let adapted = xi.adapted_frame();
    let p = xi.p();
    let q = xi.dim() - p;
    let mut j = DMatrix::zeros(module.rank(), p * q);
    for a in 0..p {
        for s in 0..q {
            let mut plus = xi.frame().clone();
            let mut minus = xi.frame().clone();
            let v = adapted.column(p + s);
            plus.column_mut(a).axpy(h, &v, 1.0);
            minus.column_mut(a).axpy(-h, &v, 1.0);
            for (row, g) in module.basis().iter().enumerate() {
                j[(row, a * q + s)] = (g.evaluate_frame(&plus)? - g.evaluate_frame(&minus)?) / (2.0 * h);
            }
        }
    }
    Ok(j)
}

/// Codimension of the integral-element variety at an integral plane.
pub fn integral_element_codim(xi: &OrientedPlane, module: &FormModule) -> Result<CodimReport> {
    check_integral(xi, module)?;
    let exact_rank = linalg::rank(&exact_jacobian(xi, module), JACOBIAN_CUTOFF);
    let fd_rank = linalg::rank(&fd_jacobian(xi, module, FD_STEP)?, JACOBIAN_CUTOFF);
    Ok(CodimReport {
        exact_rank,
        fd_rank,
        codim: fd_rank,
        singular: exact_rank != fd_rank,
    })
}

/// Cartan's test along the flag of frame prefixes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub n: usize,
    pub p: usize,
    pub polar_codims: Vec<usize>,
    pub cartan_bound: usize,
    pub actual_codim: usize,
    pub involutive_at_flag: bool,
    pub max_bound_random_flags: usize,
    pub singular: bool,
}

fn flag_bound(xi: &OrientedPlane, module: &FormModule) -> Result<(Vec<usize>, usize)> {
    let codims: Vec<usize> = (1..xi.p())
        .map(|k| polar_codim(&xi.prefix(k), module))
        .collect::<Result<_>>()?;
    let bound = codims.iter().sum();
    Ok((codims, bound))
}

/// The plane with its frame rotated by a Haar-random element of SO(p).
pub fn rotate_in_plane(xi: &OrientedPlane, seed: u64) -> Result<OrientedPlane> {
    let p = xi.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(p, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = linalg::orthonormalize(&m)?;
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    OrientedPlane::new(xi.frame() * q)
}

pub fn cartan_test(xi: &OrientedPlane, module: &FormModule) -> Result<FlagReport> {
    let codim = integral_element_codim(xi, module)?;
    let (polar_codims, cartan_bound) = flag_bound(xi, module)?;
    let mut max_bound = cartan_bound;
    for i in 0..RANDOM_FLAGS {
        let rotated = rotate_in_plane(xi, trial_seed(0xF1A6, i))?;
        max_bound = max_bound.max(flag_bound(&rotated, module)?.1);
    }
    Ok(FlagReport {
        n: xi.dim(),
        p: xi.p(),
        polar_codims,
        cartan_bound,
        actual_codim: codim.codim,
        involutive_at_flag: codim.codim == cartan_bound,
        max_bound_random_flags: max_bound,
        singular: codim.singular,
    })
}

/// Maximizing plane of `phi` from multistart ascent, required to converge.
pub fn find_calibrated_plane(phi: &AltForm, params: &SearchParams) -> Result<OrientedPlane> {
    params.validate()?;
    let ascender = Ascender::new(phi);
    let mut best: Option<(f64, OrientedPlane)> = None;
    for trial in 0..params.trials {
        let start = random_plane(phi.dim(), phi.degree(), trial_seed(params.master_seed, trial))?;
        let r = ascender.ascend(&start, params, Sense::Maximize)?;
        if r.converged && best.as_ref().is_none_or(|(v, _)| r.report.value > *v) {
            best = Some((r.report.value, r.plane));
        }
    }
    best.map(|(_, xi)| xi)
        .ok_or_else(|| Error::SearchFailed(format!("no maximizing run converged in {} trials", params.trials)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeDualReport {
    pub codim_p: usize,
    pub codim_dual: usize,
    pub equal: bool,
}

/// Codimensions of the integral-element varieties of `Phi(phi)` at `xi` and
/// of `Phi(*phi)` at the positively oriented complement.
pub fn hodge_dual_ideal_check(phi: &AltForm, xi: &OrientedPlane) -> Result<HodgeDualReport> {
    let dual = phi.hodge_star();
    let codim_p = integral_element_codim(xi, &phi_module(phi))?.codim;
    let codim_dual = integral_element_codim(&xi.orthogonal_complement(), &phi_module(&dual))?.codim;
    Ok(HodgeDualReport {
        codim_p,
        codim_dual,
        equal: codim_p == codim_dual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> (AltForm, FormModule) {
        let phi = AltForm::parse(4, "e12").unwrap();
        let m = phi_module(&phi);
        (phi, m)
    }

    #[test]
    fn small_elements_have_full_polar_space() {
        let m = phi_module(&AltForm::parse(5, "e123").unwrap());
        let e = OrientedPlane::coordinate(5, &[3]).unwrap();
        assert_eq!(polar_space(&e, &m).unwrap().ncols(), 5);
    }

    #[test]
    fn simple_form_polar_spaces() {
        let (_, m) = simple();
        let h = polar_space(&OrientedPlane::coordinate(4, &[0]).unwrap(), &m).unwrap();
        assert_eq!(h.ncols(), 2);
        let e3 = OrientedPlane::coordinate(4, &[2]).unwrap();
        let h = polar_space(&e3, &m).unwrap();
        let expected = OrientedPlane::coordinate(4, &[2, 3]).unwrap();
        assert!(linalg::subspace_distance(&h, expected.frame()) < 1e-12);
    }

    #[test]
    fn simple_form_calibrated_plane_is_isolated() {
        let (_, m) = simple();
        let xi = OrientedPlane::coordinate(4, &[0, 1]).unwrap();
        let r = cartan_test(&xi, &m).unwrap();
        assert_eq!(r.polar_codims, vec![2]);
        assert_eq!(r.actual_codim, 4);
        assert!(!r.involutive_at_flag);
        assert!(!r.singular);
    }

    #[test]
    fn non_integral_rejected() {
        let (_, m) = simple();
        let xi = random_plane(4, 2, 1).unwrap();
        assert!(matches!(integral_element_codim(&xi, &m), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn polar_space_degree_guard() {
        let (_, m) = simple();
        let e = OrientedPlane::coordinate(4, &[0, 1, 2]).unwrap();
        assert!(polar_space(&e, &m).is_err());
    }

    #[test]
    fn in_plane_rotation_keeps_plane() {
        let xi = random_plane(6, 3, 4).unwrap();
        let r = rotate_in_plane(&xi, 11).unwrap();
        assert!(linalg::subspace_distance(xi.frame(), r.frame()) < 1e-12);
        assert!(r.multivector().approx_eq(&xi.multivector(), 1e-12));
    }
}
