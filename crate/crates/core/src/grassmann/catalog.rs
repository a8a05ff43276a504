//! Multistart drivers: comass estimation and critical-value catalogs.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{random_plane, trial_seed, Ascender, AscentResult, SearchParams, Sense};
use crate::critical::CriticalityReport;
use crate::error::{Error, Result};
use crate::exterior::AltForm;
use crate::plane::{OrientedPlane, PlaneJson};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-4;

fn run_trials(phi: &AltForm, params: &SearchParams, sense: Sense) -> Result<Vec<(u64, AscentResult)>> {
    params.validate()?;
    let ascender = Ascender::new(phi);
    let (n, p) = (phi.dim(), phi.degree());
    (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(params.master_seed, trial);
            let start = random_plane(n, p, seed)?;
            Ok((seed, ascender.ascend(&start, params, sense)?))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ComassEstimate {
    pub value: f64,
    pub trial: usize,
    pub plane: PlaneJson,
    pub report: CriticalityReport,
}

/// Best value of `phi` over `params.trials` maximizing runs. Ties go to the
/// lowest trial index.
pub fn comass_estimate(phi: &AltForm, params: &SearchParams) -> Result<ComassEstimate> {
    let runs = run_trials(phi, params, Sense::Maximize)?;
    let (trial, (_, best)) = runs
        .iter()
        .enumerate()
        .fold(None::<(usize, &(u64, AscentResult))>, |acc, (i, r)| match acc {
            Some((_, b)) if b.1.report.value >= r.1.report.value => acc,
            _ => Some((i, r)),
        })
        .ok_or_else(|| Error::SearchFailed("no trials".into()))?;
    Ok(ComassEstimate {
        value: best.report.value,
        trial,
        plane: PlaneJson::from(&best.plane),
        report: best.report.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub count: usize,
}

/// 1-d single-linkage clustering: sorted values split wherever consecutive
/// gaps exceed `tol`. Centers are cluster means.
pub fn cluster_values(values: &[f64], tol: f64) -> Vec<Cluster> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<Cluster> = Vec::new();
    let mut start = 0;
    for i in 1..=v.len() {
        if i == v.len() || v[i] - v[i - 1] > tol {
            if i > start {
                let mean = v[start..i].iter().sum::<f64>() / (i - start) as f64;
                out.push(Cluster {
                    center: mean,
                    count: i - start,
                });
            }
            start = i;
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub value: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Converged critical planes from a multistart saddle search.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CriticalCatalog {
    pub master_seed: u64,
    pub params: SearchParams,
    pub cluster_tol: f64,
    pub planes: Vec<PlaneJson>,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub trials: Vec<TrialRecord>,
}

impl CriticalCatalog {
    pub fn converged(&self) -> usize {
        self.planes.len()
    }

    pub fn oriented_planes(&self) -> Result<Vec<OrientedPlane>> {
        self.planes.iter().map(|p| OrientedPlane::new(p.matrix()?)).collect()
    }

    /// `trial,value,residual,converged` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "trial,value,residual,converged")?;
        for t in &self.trials {
            writeln!(w, "{},{:.17e},{:.17e},{}", t.trial, t.value, t.residual, t.converged)?;
        }
        Ok(())
    }
}

/// Runs the critical sense from `params.trials` random starts and clusters
/// `|phi(xi)|` over the converged planes.
pub fn critical_spectrum(phi: &AltForm, params: &SearchParams, cluster_tol: f64) -> Result<CriticalCatalog> {
    if cluster_tol <= 0.0 {
        return Err(Error::Config(format!(
            "cluster_tol must be positive, got {cluster_tol}"
        )));
    }
    let runs = run_trials(phi, params, Sense::Critical)?;
    let mut cat = CriticalCatalog {
        master_seed: params.master_seed,
        params: params.clone(),
        cluster_tol,
        planes: Vec::new(),
        values: Vec::new(),
        residuals: Vec::new(),
        clusters: Vec::new(),
        trials: Vec::with_capacity(runs.len()),
    };
    for (trial, (seed, r)) in runs.into_iter().enumerate() {
        cat.trials.push(TrialRecord {
            trial,
            seed,
            value: r.report.value,
            residual: r.report.residual_cousin,
            converged: r.converged,
            iterations: r.iterations,
        });
        if r.converged {
            cat.planes.push(PlaneJson::from(&r.plane));
            cat.values.push(r.report.value);
            cat.residuals.push(r.report.residual_cousin);
        }
    }
    let abs: Vec<f64> = cat.values.iter().map(|v| v.abs()).collect();
    cat.clusters = cluster_values(&abs, cluster_tol);
    Ok(cat)
}
