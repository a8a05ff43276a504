//! Second fundamental forms compatible with a critical plane.
//!
//! In an adapted frame a submanifold through a critical point with
//! `phi_o = phi(xi) != 0` must satisfy
//! `phi_o h^s_{ac} = sum_{b,t} phi^{ab}_{st} h^t_{bc}`; tracing over `a = c`
//! kills the right-hand side, so `h` is trace-free.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{second_cousins, CriticalityEngine, DEFAULT_TOL, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::exterior::{AltForm, FormEvaluator};
use crate::linalg;
use crate::plane::OrientedPlane;

/// Bound on `max_s |sum_a h^s_{aa}|` for a trace-free element.
pub const TRACE_TOL: f64 = 1e-10;

/// Symmetric `h^s_{ab}`, stored as the upper triangle `a <= b` for each normal
/// index `s` (counted from the first normal vector).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SffElement {
    q: usize,
    p: usize,
    upper: Vec<f64>,
}

fn tri(p: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * p - a * (a + 1) / 2 + b
}

impl SffElement {
    pub fn zero(q: usize, p: usize) -> Self {
        SffElement {
            q,
            p,
            upper: vec![0.0; q * p * (p + 1) / 2],
        }
    }

    fn from_coords(q: usize, p: usize, coords: &[f64]) -> Self {
        SffElement {
            q,
            p,
            upper: coords.to_vec(),
        }
    }

    pub fn normal_dim(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, s: usize, a: usize, b: usize) -> f64 {
        self.upper[s * self.p * (self.p + 1) / 2 + tri(self.p, a, b)]
    }

    pub fn set(&mut self, s: usize, a: usize, b: usize, v: f64) {
        let k = s * self.p * (self.p + 1) / 2 + tri(self.p, a, b);
        self.upper[k] = v;
    }

    /// `sum_a h^s_{aa}` for each `s`.
    pub fn traces(&self) -> Vec<f64> {
        (0..self.q)
            .map(|s| (0..self.p).map(|a| self.get(s, a, a)).sum())
            .collect()
    }

    pub fn max_trace(&self) -> f64 {
        self.traces().into_iter().fold(0.0, |m, t| m.max(t.abs()))
    }
}

/// Solution space of the adapted-frame constraint at a critical plane.
#[derive(Clone, Debug, Serialize)]
pub struct SffSolution {
    pub value: f64,
    pub unknowns: usize,
    pub basis: Vec<SffElement>,
    pub max_trace: f64,
    pub all_trace_free: bool,
}

impl SffSolution {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Coefficient matrix of the constraint, one row per `(s, a, c)` and one
/// column per independent `h^t_{bc}`.
pub(crate) fn constraint_matrix(value: f64, cousins: &[f64], q: usize, p: usize) -> DMatrix<f64> {
    let width = p * (p + 1) / 2;
    let mut m = DMatrix::zeros(q * p * p, q * width);
    for s in 0..q {
        for a in 0..p {
            for c in 0..p {
                let row = (s * p + a) * p + c;
                m[(row, s * width + tri(p, a, c))] += value;
                for b in 0..p {
                    for t in 0..q {
                        let k = cousins[((a * p + b) * q + s) * q + t];
                        if k != 0.0 {
                            m[(row, t * width + tri(p, b, c))] -= k;
                        }
                    }
                }
            }
        }
    }
    m
}

/// Basis of symmetric `h` solving the constraint at `xi`, and whether every
/// basis element is trace-free. Fails with [`Error::NotCritical`] unless `xi`
/// passes the first-cousin test at the default tolerance.
pub fn sff_space(xi: &OrientedPlane, phi: &AltForm) -> Result<SffSolution> {
    let engine = CriticalityEngine::new(phi);
    let residual = engine.cousin_residual(xi)?;
    if residual >= DEFAULT_TOL {
        return Err(Error::NotCritical(residual));
    }
    let (n, p) = (xi.dim(), xi.p());
    let q = n - p;
    let value = phi.evaluate_frame(xi.frame())?;
    let cousins = second_cousins(&FormEvaluator::new(phi), &xi.adapted_frame());
    let m = constraint_matrix(value, &cousins, q, p);
    let ns = linalg::null_space(&m, RANK_CUTOFF);
    let basis: Vec<SffElement> = (0..ns.ncols())
        .map(|j| SffElement::from_coords(q, p, ns.column(j).as_slice()))
        .collect();
    let max_trace = basis.iter().fold(0.0, |acc: f64, h| acc.max(h.max_trace()));
    Ok(SffSolution {
        value,
        unknowns: m.ncols(),
        all_trace_free: max_trace < TRACE_TOL,
        max_trace,
        basis,
    })
}
