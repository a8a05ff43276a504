//! Criticality of oriented planes for a constant-coefficient form.
//!
//! A plane `xi = e_1 ^ ... ^ e_p` is critical for `phi` on the oriented
//! Grassmannian when every first-cousin coefficient
//! `phi^a_s = phi(e_1, ..., v_s (slot a), ..., e_p)` vanishes for an
//! orthonormal basis `v_s` of the complement. Two further tests are provided
//! and must agree with it: vanishing of the module `Phi = P(so(n))` on `xi`,
//! and closure of `[xi]` under the vector product `rho` dual to `phi`.

mod module;
mod sff;

pub use module::{
    annihilator_check, p_map, p_matrix, phi_module, stabilizer_algebra, stabilizer_dim, FormModule, FormModuleJson,
    RANK_CUTOFF,
};
pub use sff::{sff_space, SffElement, SffSolution, TRACE_TOL};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{AltForm, FormEvaluator, VectorN};
use crate::plane::OrientedPlane;

/// Default criticality tolerance on the first-cousin residual.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Outcome of the three criticality tests on one plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub residual_cousin: f64,
    pub residual_module: f64,
    pub residual_rho: f64,
    pub value: f64,
    pub is_critical: bool,
}

/// First-cousin matrix `G[s][a] = phi(e_1, ..., v_s at slot a, ..., e_p)` in
/// the adapted frame `[e_1..e_p | v_{p+1}..v_n]` (an n x n orthonormal matrix).
/// Rows are indexed by `s - p`.
pub fn cousin_matrix(eval: &FormEvaluator, adapted: &DMatrix<f64>) -> DMatrix<f64> {
    let n = adapted.nrows();
    let p = eval.degree();
    let mut g = DMatrix::zeros(n - p, p);
    let cols: Vec<&[f64]> = (0..n).map(|j| adapted.column(j).data.into_slice()).collect();
    let mut slots: Vec<&[f64]> = cols[..p].to_vec();
    for a in 0..p {
        for s in p..n {
            slots[a] = cols[s];
            g[(s - p, a)] = eval.eval(&slots);
        }
        slots[a] = cols[a];
    }
    g
}

/// Second-cousin coefficients `phi^{ab}_{st}`: slot `a` replaced by `v_s` and
/// slot `b` by `v_t`. Indexed `[((a * p + b) * q + s) * q + t]` with
/// `q = n - p` and `s, t` counted from the first normal vector. Zero when
/// `a == b`.
pub fn second_cousins(eval: &FormEvaluator, adapted: &DMatrix<f64>) -> Vec<f64> {
    let n = adapted.nrows();
    let p = eval.degree();
    let q = n - p;
    let mut out = vec![0.0; p * p * q * q];
    let cols: Vec<&[f64]> = (0..n).map(|j| adapted.column(j).data.into_slice()).collect();
    let mut slots: Vec<&[f64]> = cols[..p].to_vec();
    for a in 0..p {
        for b in a + 1..p {
            for s in 0..q {
                for t in 0..q {
                    if s == t {
                        continue;
                    }
                    slots[a] = cols[p + s];
                    slots[b] = cols[p + t];
                    let v = eval.eval(&slots);
                    out[((a * p + b) * q + s) * q + t] = v;
                    out[((b * p + a) * q + t) * q + s] = v;
                    slots[a] = cols[a];
                    slots[b] = cols[b];
                }
            }
        }
    }
    out
}

/// `rho(v_2, ..., v_p)`, defined by `phi(u, v_2, ..., v_p) = <u, rho(v_2, ..., v_p)>`.
pub fn rho_product(phi: &AltForm, vs: &[VectorN]) -> Result<VectorN> {
    let p = phi.degree();
    if p == 0 || vs.len() != p - 1 {
        return Err(Error::WrongArgumentCount {
            expected: p.saturating_sub(1),
            found: vs.len(),
        });
    }
    for v in vs {
        if v.len() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                found: v.len(),
            });
        }
    }
    Ok(rho_with(
        &FormEvaluator::new(phi),
        vs.iter().map(|v| v.as_slice()).collect(),
    ))
}

fn rho_with(eval: &FormEvaluator, vs: Vec<&[f64]>) -> VectorN {
    let n = eval.dim();
    let mut basis = vec![0.0; n];
    let mut out = VectorN::zeros(n);
    for k in 0..n {
        basis[k] = 1.0;
        let mut slots: Vec<&[f64]> = Vec::with_capacity(vs.len() + 1);
        slots.push(&basis);
        slots.extend(vs.iter().copied());
        out[k] = eval.eval(&slots);
        basis[k] = 0.0;
    }
    out
}

/// Evaluates the three criticality tests against a fixed form, caching `Phi`.
#[derive(Clone, Debug)]
pub struct CriticalityEngine {
    phi: AltForm,
    eval: FormEvaluator,
    module: FormModule,
}

impl CriticalityEngine {
    pub fn new(phi: &AltForm) -> Self {
        CriticalityEngine {
            phi: phi.clone(),
            eval: FormEvaluator::new(phi),
            module: phi_module(phi),
        }
    }

    pub fn form(&self) -> &AltForm {
        &self.phi
    }

    pub fn module(&self) -> &FormModule {
        &self.module
    }

    fn check(&self, xi: &OrientedPlane) -> Result<()> {
        if xi.dim() != self.phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.phi.dim(),
                found: xi.dim(),
            });
        }
        if xi.p() != self.phi.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.phi.degree(),
                found: xi.p(),
            });
        }
        Ok(())
    }

    /// `max |phi^a_s|`.
    pub fn cousin_residual(&self, xi: &OrientedPlane) -> Result<f64> {
        self.check(xi)?;
        let g = cousin_matrix(&self.eval, &xi.adapted_frame());
        Ok(g.iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// Largest norm of the component of `rho` (over all (p-1)-subsets of
    /// frame columns) orthogonal to `[xi]`.
    pub fn rho_residual(&self, xi: &OrientedPlane) -> Result<f64> {
        self.check(xi)?;
        let p = xi.p();
        let y = xi.frame();
        let mut worst: f64 = 0.0;
        for skip in 0..p {
            let vs: Vec<&[f64]> = (0..p)
                .filter(|&a| a != skip)
                .map(|a| y.column(a).data.into_slice())
                .collect();
            let r = rho_with(&self.eval, vs);
            let perp = &r - y * (y.transpose() * &r);
            worst = worst.max(perp.norm());
        }
        Ok(worst)
    }

    /// `|rho(e_2, ..., e_p) - phi(xi) e_1|`, zero on critical planes.
    pub fn rho_alignment(&self, xi: &OrientedPlane) -> Result<f64> {
        self.check(xi)?;
        let p = xi.p();
        let y = xi.frame();
        let vs: Vec<&[f64]> = (1..p).map(|a| y.column(a).data.into_slice()).collect();
        let r = rho_with(&self.eval, vs);
        let value = self.phi.evaluate_frame(y)?;
        Ok((r - y.column(0) * value).norm())
    }

    pub fn report(&self, xi: &OrientedPlane, tol: f64) -> Result<CriticalityReport> {
        self.check(xi)?;
        let residual_cousin = self.cousin_residual(xi)?;
        Ok(CriticalityReport {
            residual_cousin,
            residual_module: annihilator_check(xi, &self.module)?,
            residual_rho: self.rho_residual(xi)?,
            value: self.phi.evaluate_frame(xi.frame())?,
            is_critical: residual_cousin < tol,
        })
    }

    /// Rho-closure verdict, with the alignment check when the critical value is
    /// nonzero.
    pub fn rho_closed(&self, xi: &OrientedPlane, tol: f64) -> Result<bool> {
        if self.rho_residual(xi)? >= tol {
            return Ok(false);
        }
        let value = self.phi.evaluate_frame(xi.frame())?;
        if value.abs() > tol {
            return Ok(self.rho_alignment(xi)? < tol);
        }
        Ok(true)
    }
}

/// Runs all three criticality tests; `is_critical` follows the first-cousin
/// residual.
pub fn is_critical(xi: &OrientedPlane, phi: &AltForm, tol: f64) -> Result<CriticalityReport> {
    CriticalityEngine::new(phi).report(xi, tol)
}

/// Whether `[xi]` is closed under `rho`.
pub fn rho_closed(xi: &OrientedPlane, phi: &AltForm, tol: f64) -> Result<bool> {
    CriticalityEngine::new(phi).rho_closed(xi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::unit_vector;

    #[test]
    fn simple_form_zero_valued_critical_plane() {
        let phi = AltForm::parse(5, "e12").unwrap();
        let xi = OrientedPlane::coordinate(5, &[2, 4]).unwrap();
        let r = is_critical(&xi, &phi, DEFAULT_TOL).unwrap();
        assert!(r.is_critical);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.residual_module, 0.0);
        assert_eq!(r.residual_rho, 0.0);
    }

    #[test]
    fn rho_repeated_argument_vanishes() {
        let phi = AltForm::parse(4, "e123 + 2*e234 - e124").unwrap();
        let v = VectorN::from_vec(vec![0.3, -1.0, 0.2, 0.5]);
        let r = rho_product(&phi, &[v.clone(), v]).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn rho_wrong_count() {
        let phi = AltForm::parse(4, "e123").unwrap();
        assert!(matches!(
            rho_product(&phi, &[unit_vector(4, 0)]),
            Err(Error::WrongArgumentCount { .. })
        ));
    }

    #[test]
    fn cousin_matrix_for_simple_form() {
        // phi = e12 at span(e1, e3): phi(e1, e2) = 1 appears at s = e2, a = 2
        let phi = AltForm::parse(3, "e12").unwrap();
        let xi = OrientedPlane::coordinate(3, &[0, 2]).unwrap();
        let g = cousin_matrix(&FormEvaluator::new(&phi), &xi.adapted_frame());
        assert_eq!(g.shape(), (1, 2));
        assert_eq!(g[(0, 0)], 0.0);
        assert_eq!(g[(0, 1)].abs(), 1.0);
    }

    #[test]
    fn degree_mismatch_reported() {
        let phi = AltForm::parse(4, "e123").unwrap();
        let xi = OrientedPlane::coordinate(4, &[0, 1]).unwrap();
        assert!(matches!(
            is_critical(&xi, &phi, 1e-8),
            Err(Error::DegreeMismatch { .. })
        ));
    }
}
