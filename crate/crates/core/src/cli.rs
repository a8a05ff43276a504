//! Command-line front end. Machine output goes to stdout, logs to stderr.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 usage error,
//! 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use crate::calibrations::{build_clifford, CalibrationSpec, SpinorReport};
use crate::config::RunConfig;
use crate::critical::{phi_module, sff_space, stabilizer_dim, CriticalityEngine};
use crate::eds::{cartan_test, find_calibrated_plane, hodge_dual_ideal_check};
use crate::error::{Error, Result};
use crate::exterior::{AltForm, AltFormJson};
use crate::grassmann::{comass_estimate, critical_spectrum, random_plane};
use crate::linalg;
use crate::plane::{OrientedPlane, PlaneJson, ORTHONORMAL_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "calibkit",
    version,
    about = "Calibrations, critical planes and their exterior differential systems"
)]
pub struct Cli {
    /// JSON file overriding the built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON report to this path (search adds a .csv sibling).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension of the module Phi and of the stabilizer.
    Module {
        #[command(flatten)]
        calib: CalibArgs,
        /// Include the orthonormal basis of Phi.
        #[arg(long)]
        basis: bool,
    },
    /// Criticality report for one plane.
    Check {
        #[command(flatten)]
        calib: CalibArgs,
        #[command(flatten)]
        plane: PlaneArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Multistart saddle search and critical-value clustering.
    Search {
        #[command(flatten)]
        calib: CalibArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Multistart estimate of the comass.
    Comass {
        #[command(flatten)]
        calib: CalibArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Cartan test and Hodge-dual comparison at a maximizing plane.
    Eds {
        #[command(flatten)]
        calib: CalibArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Second-fundamental-form solution space at a critical plane.
    Sff {
        #[command(flatten)]
        calib: CalibArgs,
        #[command(flatten)]
        plane: PlaneArgs,
    },
    /// Squared-spinor checks in dimension 8.
    Spinor {
        /// Seed for the random unit positive spinor.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct CalibArgs {
    /// associative, coassociative, cayley, special_lagrangian, cartan or custom.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub phase: Option<f64>,
    /// su2, su3 or su4.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Ambient dimension for a text form literal.
    #[arg(long)]
    pub n: Option<usize>,
    /// Form literal such as "e123 + e145", or AltForm JSON.
    #[arg(long)]
    pub form: Option<String>,
}

#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct PlaneArgs {
    /// Plane JSON file `{"n", "p", "frame": [[col], ...]}`.
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// Seed for a random plane.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

impl CalibArgs {
    pub fn spec(&self) -> Result<CalibrationSpec> {
        let usage = |msg: &str| Error::Config(format!("--family {}: {msg}", self.family));
        Ok(match self.family.as_str() {
            "associative" => CalibrationSpec::Associative,
            "coassociative" => CalibrationSpec::Coassociative,
            "cayley" => CalibrationSpec::Cayley,
            "special_lagrangian" => CalibrationSpec::SpecialLagrangian {
                m: self.m.ok_or_else(|| usage("--m is required"))?,
                phase: self.phase.unwrap_or(0.0),
            },
            "cartan" => CalibrationSpec::Cartan {
                algebra: self.algebra.clone().ok_or_else(|| usage("--algebra is required"))?,
            },
            "custom" => {
                let text = self.form.as_deref().ok_or_else(|| usage("--form is required"))?;
                let form = if text.trim_start().starts_with('{') {
                    AltForm::from_json_str(text)?
                } else {
                    AltForm::parse(self.n.ok_or_else(|| usage("--n is required for a text literal"))?, text)?
                };
                CalibrationSpec::Custom {
                    form: AltFormJson::from(&form),
                }
            }
            other => return Err(Error::Config(format!("unknown family {other:?}"))),
        })
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotCritical(_) | Error::NotIntegral(_) => EXIT_NEGATIVE,
        Error::RankDeficient | Error::SearchFailed(_) | Error::NotOrthonormal(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn load_plane(args: &PlaneArgs, cfg: &RunConfig, n: usize, p: usize) -> Result<OrientedPlane> {
    match (&args.frame, args.seed) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let pj: PlaneJson = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            if (pj.n, pj.p) != (n, p) {
                return Err(Error::Config(format!(
                    "plane is ({}, {}) but the form needs ({n}, {p})",
                    pj.n, pj.p
                )));
            }
            let m = pj.matrix()?;
            let defect = linalg::orthonormality_defect(&m);
            if defect <= ORTHONORMAL_TOL {
                return OrientedPlane::new(m);
            }
            if defect > cfg.frame_warn_tol {
                warn!("frame orthonormality defect {defect:.3e}; re-orthonormalizing");
            }
            OrientedPlane::from_spanning(&m)
        }
        (None, Some(seed)) => random_plane(n, p, seed),
        (None, None) => Err(Error::Config("a plane needs --frame or --seed".into())),
    }
}

struct Output<'a> {
    json: bool,
    out: Option<&'a Path>,
}

impl Output<'_> {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        let encoded = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
        if self.json {
            println!("{encoded}");
        } else {
            println!("{}", text());
        }
        if let Some(path) = self.out {
            write_file(path, &format!("{encoded}\n"))?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn apply_run(cfg: &mut RunConfig, run: &RunArgs) -> Result<()> {
    if let Some(s) = run.seed {
        cfg.search.master_seed = s;
    }
    if let Some(t) = run.trials {
        cfg.search.trials = t;
    }
    if let Some(t) = run.tol {
        cfg.tol = t;
    }
    cfg.validate()
}

fn execute(cli: &Cli) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = Output {
        json: cli.json,
        out: cli.out.as_deref(),
    };
    match &cli.command {
        Command::Module { calib, basis } => {
            let phi = calib.spec()?.build()?;
            let module = phi_module(&phi);
            let mut report = json!({ "dim_phi": module.rank(), "dim_stab": stabilizer_dim(&phi) });
            if *basis {
                report["basis"] = serde_json::to_value(module.to_json().basis).expect("serializable");
            }
            out.emit(&report, || {
                let mut s = format!("dim Phi = {}\ndim stabilizer = {}", module.rank(), stabilizer_dim(&phi));
                if *basis {
                    for b in module.basis() {
                        s.push_str(&format!("\n  {}", b.pruned(1e-12)));
                    }
                }
                s
            })?;
            Ok(EXIT_OK)
        }
        Command::Check { calib, plane, tol } => {
            if let Some(t) = tol {
                cfg.tol = *t;
                cfg.validate()?;
            }
            let phi = calib.spec()?.build()?;
            let xi = load_plane(plane, &cfg, phi.dim(), phi.degree())?;
            let engine = CriticalityEngine::new(&phi);
            let report = engine.report(&xi, cfg.tol)?;
            out.emit(&report, || {
                format!(
                    "critical: {}\nvalue: {:.12}\nresidual_cousin: {:.3e}\nresidual_module: {:.3e}\nresidual_rho: {:.3e}",
                    report.is_critical, report.value, report.residual_cousin, report.residual_module, report.residual_rho
                )
            })?;
            Ok(if report.is_critical { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Search { calib, run } => {
            apply_run(&mut cfg, run)?;
            let phi = calib.spec()?.build()?;
            info!("searching {} trials", cfg.search.trials);
            let cat = critical_spectrum(&phi, &cfg.search, cfg.cluster_tol)?;
            out.emit(&cat, || {
                let mut s = format!("converged {}/{}", cat.converged(), cat.trials.len());
                for c in &cat.clusters {
                    s.push_str(&format!("\n  |value| = {:.10}  count {}", c.center, c.count));
                }
                s
            })?;
            if let Some(path) = &cli.out {
                let mut buf = Vec::new();
                cat.write_csv(&mut buf).map_err(|e| Error::Config(e.to_string()))?;
                write_file(&path.with_extension("csv"), &String::from_utf8(buf).expect("ascii"))?;
            }
            Ok(if cat.converged() > 0 { EXIT_OK } else { EXIT_NUMERICAL })
        }
        Command::Comass { calib, run } => {
            apply_run(&mut cfg, run)?;
            let phi = calib.spec()?.build()?;
            let est = comass_estimate(&phi, &cfg.search)?;
            out.emit(&est, || format!("comass ~ {:.12} (trial {})", est.value, est.trial))?;
            Ok(EXIT_OK)
        }
        Command::Eds { calib, run } => {
            apply_run(&mut cfg, run)?;
            let phi = calib.spec()?.build()?;
            let xi = find_calibrated_plane(&phi, &cfg.search)?;
            let flag = cartan_test(&xi, &phi_module(&phi))?;
            let dual = hodge_dual_ideal_check(&phi, &xi)?;
            let value = phi.evaluate_frame(xi.frame())?;
            let report = json!({
                "value": value,
                "plane": PlaneJson::from(&xi),
                "flag": flag,
                "hodge_dual": dual,
            });
            out.emit(&report, || {
                format!(
                    "value {:.12}\npolar codims {:?}\ncartan bound {} / actual codim {}\ninvolutive at flag: {}\nhodge dual codims {} / {}",
                    value, flag.polar_codims, flag.cartan_bound, flag.actual_codim, flag.involutive_at_flag,
                    dual.codim_p, dual.codim_dual
                )
            })?;
            Ok(if flag.involutive_at_flag {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Sff { calib, plane } => {
            let phi = calib.spec()?.build()?;
            let xi = load_plane(plane, &cfg, phi.dim(), phi.degree())?;
            let sol = sff_space(&xi, &phi)?;
            let report = json!({
                "value": sol.value,
                "unknowns": sol.unknowns,
                "dim": sol.dim(),
                "max_trace": sol.max_trace,
                "all_trace_free": sol.all_trace_free,
            });
            out.emit(&report, || {
                format!(
                    "value {:.12}\nsolution dimension {} of {}\nall trace-free: {}",
                    sol.value,
                    sol.dim(),
                    sol.unknowns,
                    sol.all_trace_free
                )
            })?;
            Ok(if sol.all_trace_free { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Spinor { seed } => {
            let model = build_clifford();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(cfg.seed));
            let coords: Vec<f64> = (0..8).map(|_| rng.sample(StandardNormal)).collect();
            let x: DVector<f64> = model.positive_spinor(&coords)?;
            let r = SpinorReport::compute(&model, &x)?;
            let ok = (r.phi0 - 1.0).abs() < 1e-10
                && r.top_minus_vol < 1e-10
                && [1, 2, 3, 5, 6, 7].iter().all(|&k| r.component_norms[k] < 1e-10)
                && r.n_psi == 7
                && r.span_distance < 1e-9
                && r.gamma_vs_two_psi < 1e-10;
            out.emit(&r, || {
                let norms: Vec<String> = r.component_norms.iter().map(|v| format!("{v:.3e}")).collect();
                format!(
                    "component norms [{}]\nphi_0 = {:.12}\n|phi_8 - vol| = {:.3e}\nN = {}\nspan distance {:.3e}\n|gamma_j - 2 Psi_j| = {:.3e}",
                    norms.join(", "), r.phi0, r.top_minus_vol, r.n_psi, r.span_distance, r.gamma_vs_two_psi
                )
            })?;
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn calib(family: &str) -> CalibArgs {
        CalibArgs {
            family: family.into(),
            m: None,
            phase: None,
            algebra: None,
            n: None,
            form: None,
        }
    }

    #[test]
    fn spec_from_flags() {
        assert_eq!(calib("cayley").spec().unwrap(), CalibrationSpec::Cayley);
        assert!(calib("special_lagrangian").spec().is_err());
        assert!(calib("nonsense").spec().is_err());
        let mut c = calib("custom");
        c.form = Some("e12".into());
        assert!(c.spec().is_err());
        c.n = Some(4);
        assert_eq!(c.spec().unwrap().shape().unwrap(), (4, 2));
        c.n = None;
        c.form = Some(r#"{"n": 5, "p": 1, "terms": [{"idx": [2], "c": 1.0}]}"#.into());
        assert_eq!(c.spec().unwrap().shape().unwrap(), (5, 1));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["calibkit", "module"]), EXIT_USAGE);
        assert_eq!(run(["calibkit", "module", "--family", "nope"]), EXIT_USAGE);
        assert_eq!(run(["calibkit", "bogus"]), EXIT_USAGE);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::NotCritical(1.0)), EXIT_NEGATIVE);
        assert_eq!(exit_code(&Error::SearchFailed("x".into())), EXIT_NUMERICAL);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
    }
}
