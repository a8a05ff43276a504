//! First-order search on the oriented Grassmannian.
//!
//! Tangent vectors at `xi` are `(n-p) x p` matrices `A` acting as
//! `e_a -> e_a + sum_s A[s][a] v_s`, and the retraction re-orthonormalizes
//! `Y + V A`. In these coordinates the gradient of `phi` is the first-cousin
//! matrix `G`, and the derivative of `G` itself is
//! `M[(s,a),(t,b)] = phi^{ab}_{st} - phi_o delta_st delta_ab`.

mod catalog;

pub use catalog::{
    cluster_values, comass_estimate, critical_spectrum, Cluster, ComassEstimate, CriticalCatalog, TrialRecord,
    DEFAULT_CLUSTER_TOL,
};

use log::trace;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::critical::{cousin_matrix, second_cousins, CriticalityEngine, CriticalityReport, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::exterior::{AltForm, FormEvaluator};
use crate::linalg;
use crate::plane::OrientedPlane;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    pub shrink: f64,
    pub grad_tol: f64,
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_iters: 5000,
            step_init: 0.1,
            armijo_c: 1e-4,
            shrink: 0.5,
            grad_tol: 1e-10,
            trials: 32,
            master_seed: 0,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        let positive = self.max_iters > 0
            && self.step_init > 0.0
            && self.armijo_c > 0.0
            && self.shrink > 0.0
            && self.shrink < 1.0
            && self.grad_tol > 0.0
            && self.trials > 0;
        if !positive {
            return Err(Error::Config(format!(
                "search parameters must be positive (shrink < 1): {self:?}"
            )));
        }
        if self.grad_tol >= 1e-6 {
            return Err(Error::Config(format!(
                "grad_tol must be below 1e-6, got {}",
                self.grad_tol
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
    Critical,
}

/// Schedule-independent seed for one trial.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(master_seed ^ splitmix(trial as u64))
}

/// Haar-random oriented p-plane in R^n.
pub fn random_plane(n: usize, p: usize, seed: u64) -> Result<OrientedPlane> {
    if p > n {
        return Err(Error::PlaneTooLarge { n, p });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        match OrientedPlane::from_spanning(&m) {
            Ok(xi) => return Ok(xi),
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// First-cousin matrix `G[s][a]` at `xi`, the gradient of `phi` restricted to
/// the Grassmannian.
pub fn riemann_gradient(phi: &AltForm, xi: &OrientedPlane) -> Result<DMatrix<f64>> {
    if xi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: xi.dim(),
        });
    }
    if xi.p() != phi.degree() {
        return Err(Error::DegreeMismatch {
            expected: phi.degree(),
            found: xi.p(),
        });
    }
    Ok(cousin_matrix(&FormEvaluator::new(phi), &xi.adapted_frame()))
}

/// `exp(t E_sa) . xi`: rotate frame vector `e_a` towards normal `v_s`.
pub fn rotate_towards_normal(xi: &OrientedPlane, s: usize, a: usize, t: f64) -> Result<OrientedPlane> {
    let f = xi.adapted_frame();
    let p = xi.p();
    let mut y = xi.frame().clone();
    let ea = f.column(a).clone_owned();
    let vs = f.column(p + s).clone_owned();
    y.set_column(a, &(ea * t.cos() + vs * t.sin()));
    OrientedPlane::from_spanning(&y)
}

/// Derivative of the first-cousin matrix, with `(s, a)` flattened
/// column-major as `a * q + s`.
pub fn cousin_jacobian(eval: &FormEvaluator, adapted: &DMatrix<f64>, value: f64) -> DMatrix<f64> {
    let n = adapted.nrows();
    let p = eval.degree();
    let q = n - p;
    let cousins = second_cousins(eval, adapted);
    let mut m = DMatrix::zeros(p * q, p * q);
    for a in 0..p {
        for b in 0..p {
            for s in 0..q {
                for t in 0..q {
                    let mut v = cousins[((a * p + b) * q + s) * q + t];
                    if a == b && s == t {
                        v -= value;
                    }
                    m[(a * q + s, b * q + t)] = v;
                }
            }
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct AscentResult {
    pub plane: OrientedPlane,
    pub report: CriticalityReport,
    pub converged: bool,
    pub iterations: usize,
}

struct State {
    frame: DMatrix<f64>,
    adapted: DMatrix<f64>,
    value: f64,
    grad: DMatrix<f64>,
}

/// Optimizer bound to one form.
#[derive(Clone, Debug)]
pub struct Ascender {
    eval: FormEvaluator,
    engine: CriticalityEngine,
}

/// Gradient norm below which the maximize/minimize senses switch to Newton
/// steps on `G`.
const POLISH_SWITCH: f64 = 1e-3;
const MIN_STEP: f64 = 1e-14;

impl Ascender {
    pub fn new(phi: &AltForm) -> Self {
        Ascender {
            eval: FormEvaluator::new(phi),
            engine: CriticalityEngine::new(phi),
        }
    }

    pub fn engine(&self) -> &CriticalityEngine {
        &self.engine
    }

    fn state(&self, frame: DMatrix<f64>) -> State {
        let adapted = linalg::complete_frame(&frame);
        let cols: Vec<&[f64]> = (0..frame.ncols()).map(|j| frame.column(j).data.into_slice()).collect();
        let value = self.eval.eval(&cols);
        let grad = cousin_matrix(&self.eval, &adapted);
        State {
            frame,
            adapted,
            value,
            grad,
        }
    }

    fn retract(&self, st: &State, dir: &DMatrix<f64>, t: f64) -> Option<State> {
        let p = st.frame.ncols();
        let v = st.adapted.columns(p, st.adapted.ncols() - p);
        let moved = &st.frame + (v * dir) * t;
        linalg::orthonormalize(&moved).ok().map(|f| self.state(f))
    }

    /// Backtracking on `|G|^2` along `dir`, with slope `2 <G, M dir>`.
    fn residual_search(
        &self,
        st: &State,
        m: &DMatrix<f64>,
        dir: &DMatrix<f64>,
        t0: f64,
        params: &SearchParams,
    ) -> Option<State> {
        let f0 = st.grad.norm_squared();
        let g = DVector::from_column_slice(st.grad.as_slice());
        let d = DVector::from_column_slice(dir.as_slice());
        let slope = 2.0 * g.dot(&(m * d));
        if slope >= 0.0 {
            return None;
        }
        let mut t = t0;
        while t > MIN_STEP {
            if let Some(next) = self.retract(st, dir, t) {
                if next.grad.norm_squared() <= f0 + params.armijo_c * t * slope {
                    return Some(next);
                }
            }
            t *= params.shrink;
        }
        None
    }

    /// Backtracking on `phi` along `sign * G`.
    fn value_search(&self, st: &State, sign: f64, t0: f64, params: &SearchParams) -> Option<(State, f64)> {
        let dir = &st.grad * sign;
        let slope = st.grad.norm_squared();
        let mut t = t0;
        while t > MIN_STEP {
            if let Some(next) = self.retract(st, &dir, t) {
                if sign * (next.value - st.value) >= params.armijo_c * t * slope {
                    return Some((next, t));
                }
            }
            t *= params.shrink;
        }
        None
    }

    /// Gauss-Newton step for `G = 0`, falling back to steepest descent on
    /// `|G|^2 / 2`.
    fn residual_step(&self, st: &State, params: &SearchParams) -> Option<State> {
        let (q, p) = st.grad.shape();
        let m = cousin_jacobian(&self.eval, &st.adapted, st.value);
        let g = DVector::from_column_slice(st.grad.as_slice());
        let svd = linalg::svd(&m);
        let eps = (svd.s.max() * 1e-9).max(1e-14);
        let step = svd.solve(&(-&g), eps);
        let dir = DMatrix::from_column_slice(q, p, step.as_slice());
        if let Some(next) = self.residual_search(st, &m, &dir, 1.0, params) {
            return Some(next);
        }
        let descent = -(&m * g);
        let dir = DMatrix::from_column_slice(q, p, descent.as_slice());
        self.residual_search(st, &m, &dir, params.step_init, params)
    }

    pub fn ascend(&self, start: &OrientedPlane, params: &SearchParams, sense: Sense) -> Result<AscentResult> {
        let phi = self.engine.form();
        if start.dim() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                found: start.dim(),
            });
        }
        if start.p() != phi.degree() {
            return Err(Error::DegreeMismatch {
                expected: phi.degree(),
                found: start.p(),
            });
        }
        let mut st = self.state(start.frame().clone());
        let mut step = params.step_init;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < params.max_iters {
            let gmax = st.grad.amax();
            if gmax < params.grad_tol {
                converged = true;
                break;
            }
            iterations += 1;
            let next = match sense {
                Sense::Critical => self.residual_step(&st, params),
                Sense::Maximize | Sense::Minimize if gmax < POLISH_SWITCH => self.residual_step(&st, params),
                Sense::Maximize | Sense::Minimize => {
                    let sign = if sense == Sense::Maximize { 1.0 } else { -1.0 };
                    self.value_search(&st, sign, step, params).map(|(s, t)| {
                        step = (t * 2.0).min(1.0);
                        s
                    })
                }
            };
            match next {
                Some(s) => st = s,
                None => {
                    trace!("line search stalled at |G| = {gmax:.3e}");
                    break;
                }
            }
        }
        if !converged && st.grad.amax() < params.grad_tol {
            converged = true;
        }
        let plane = OrientedPlane::new(st.frame)?;
        let report = self.engine.report(&plane, DEFAULT_TOL)?;
        Ok(AscentResult {
            plane,
            report,
            converged,
            iterations,
        })
    }
}

/// One optimizer run from `start`.
pub fn ascend(phi: &AltForm, start: &OrientedPlane, params: &SearchParams, sense: Sense) -> Result<AscentResult> {
    Ascender::new(phi).ascend(start, params, sense)
}
