//! Experiment runner behind the command-line tool.
//!
//! [`run`] resolves an [`ExperimentConfig`], executes the requested kind and
//! writes its artifacts into the output directory:
//!
//! * `results.csv`: one [`ResultRow`] per evaluated configuration,
//! * `surface.csv`: the plotting grid of a sweep,
//! * `check.csv`: one line per check of a suite,
//! * `manifest.json` and `config.toml`: the merged effective configuration,
//!   seeds and timing. Re-running `config.toml` regenerates the CSV files
//!   byte for byte.

pub mod checks;
pub mod config;
pub mod output;

pub use checks::{CheckEffort, CheckLine};
pub use config::{AxisRange, AxisSpec, ExperimentConfig, RunKind, Spacing, Suite};
pub use output::{emit_surface, format_number, Manifest, ResultRow, RowStatus};

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use crate::error::Error;
use crate::error_law::eps;
use crate::model::{CorrelationParams, Discipline, Scheduler, SystemConfig};
use crate::optimize::{logspace, optimize_fcfs, optimize_lcfs, sweep, SearchOptions, SweepAxes, TimeRate};
use crate::rng::RNG_ALGORITHM;
use crate::sim::{simulate_field_error, FieldSimOptions};

pub const DEFAULT_OUT: &str = "fieldaoi-out";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("{0}")]
    Runtime(String),
}

impl ExperimentError {
    /// 2 config, 3 infeasible, 4 failed check, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Infeasible(_) => 3,
            ExperimentError::CheckFailed(_) => 4,
            ExperimentError::Runtime(_) => 1,
        }
    }
}

impl From<Error> for ExperimentError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unstable { rho0 } => ExperimentError::Infeasible(format!(
                "FCFS stability requires rho0 = lambda_s*lambda_t/mu_bar < 1, got rho0 = {rho0}"
            )),
            Error::InvalidParameter { .. } | Error::Domain { .. } | Error::Unsupported(_) => {
                ExperimentError::Config(e.to_string())
            }
            other => ExperimentError::Runtime(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Runtime(format!("{}: {e}", path.display()))
}

/// What a run printed and wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub kind: RunKind,
    pub lines: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub exit_code: i32,
    pub seed: Option<u64>,
}

fn required<T: Copy>(v: Option<T>, key: &str, flag: &str) -> Result<T, ExperimentError> {
    v.ok_or_else(|| ExperimentError::Config(format!("missing `{key}` (set it in the config file or pass {flag})")))
}

fn correlation(cfg: &ExperimentConfig) -> Result<CorrelationParams, ExperimentError> {
    let a = required(cfg.model.a, "model.a", "--a")?;
    let b = required(cfg.model.b, "model.b", "--b")?;
    Ok(CorrelationParams::new(a, b)?)
}

fn discipline(cfg: &ExperimentConfig) -> Discipline {
    cfg.model.discipline.unwrap_or(Discipline::Fcfs)
}

fn scheduler(cfg: &ExperimentConfig) -> Scheduler {
    cfg.model.scheduler.unwrap_or(Scheduler::UniformRandom)
}

/// `mu_bar` directly or as `mu / length`.
fn mu_bar(cfg: &ExperimentConfig) -> Result<f64, ExperimentError> {
    match (cfg.model.mu_bar, cfg.model.mu) {
        (Some(_), Some(_)) => Err(ExperimentError::Config(
            "give either `model.mu_bar` (--mu-bar) or `model.mu` with `model.length` (--mu --length), not both".into(),
        )),
        (Some(m), None) => Ok(m),
        (None, Some(mu)) => {
            let length = required(cfg.model.length, "model.length", "--length")?;
            Ok(SystemConfig::from_raw(1.0, 1.0, mu, length, Discipline::Fcfs)?.mu_bar)
        }
        (None, None) => Err(ExperimentError::Config(
            "missing `model.mu_bar` (--mu-bar) or `model.mu` with `model.length` (--mu --length)".into(),
        )),
    }
}

fn system(cfg: &ExperimentConfig) -> Result<SystemConfig, ExperimentError> {
    let ls = required(cfg.model.lambda_s, "model.lambda_s", "--lambda-s")?;
    let lt = required(cfg.model.lambda_t, "model.lambda_t", "--lambda-t")?;
    let mut c = SystemConfig::new(ls, lt, mu_bar(cfg)?, discipline(cfg)).with_scheduler(scheduler(cfg));
    if cfg.model.mu.is_some() {
        c.region_length = cfg.model.length;
    }
    Ok(c)
}

fn generated_seed() -> u64 {
    // TOML integers are signed 64-bit.
    rand::random::<u64>() >> 1
}

/// Executes `config` and writes its artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, ExperimentError> {
    let kind = config
        .kind
        .ok_or_else(|| ExperimentError::Config("missing run `kind`".into()))?;
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut effective = config.clone();
    let randomized = matches!(kind, RunKind::Simulate | RunKind::Check);
    let mut lines = Vec::new();
    let mut seed_generated = false;
    if randomized && effective.seed.is_none() {
        let s = generated_seed();
        effective.seed = Some(s);
        seed_generated = true;
        lines.push(format!("*** no seed given: generated seed = {s} (pass --seed {s} to reproduce) ***"));
    }
    if kind == RunKind::Sweep {
        // Record the grid actually used so the run can be regenerated.
        if let Ok((ls, lt)) = sweep_axes(&effective) {
            effective.sweep.lambda_s = Some(AxisSpec::Values(ls));
            effective.sweep.lambda_t = Some(AxisSpec::Values(lt));
        }
    }
    let out_dir = effective.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    std::fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;

    let outcome = match kind {
        RunKind::Analytic => run_analytic(&effective, &out_dir),
        RunKind::Simulate => run_simulate(&effective, &out_dir),
        RunKind::Optimize => run_optimize(&effective, &out_dir),
        RunKind::Sweep => run_sweep(&effective, &out_dir),
        RunKind::Check => run_check(&effective, &out_dir),
    }?;
    lines.extend(outcome.lines);
    let mut artifacts = outcome.artifacts;

    let config_path = out_dir.join("config.toml");
    std::fs::write(&config_path, effective.to_toml()).map_err(|e| io_error(&config_path, e))?;
    artifacts.push(config_path);
    let manifest_path = out_dir.join("manifest.json");
    artifacts.push(manifest_path.clone());
    let manifest = Manifest {
        tool: "fieldaoi",
        version: env!("CARGO_PKG_VERSION"),
        kind: kind.to_string(),
        config: effective.clone(),
        seed: effective.seed,
        seed_generated,
        rng: RNG_ALGORITHM,
        started_unix,
        wall_time_s: started.elapsed().as_secs_f64(),
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        details: outcome.details,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| io_error(&manifest_path, e))?;
    std::fs::write(&manifest_path, json).map_err(|e| io_error(&manifest_path, e))?;

    Ok(RunReport {
        kind,
        lines,
        artifacts,
        exit_code: outcome.exit_code,
        seed: effective.seed,
    })
}

struct Outcome {
    lines: Vec<String>,
    artifacts: Vec<PathBuf>,
    details: serde_json::Value,
    exit_code: i32,
}

fn write_rows(out_dir: &Path, rows: &[ResultRow]) -> Result<PathBuf, ExperimentError> {
    let path = out_dir.join("results.csv");
    output::write_results(&path, rows).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn json(v: &impl serde::Serialize) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn run_analytic(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let params = correlation(cfg)?;
    let sys = system(cfg)?;
    let mut row = ResultRow {
        lambda_s: Some(sys.lambda_s),
        lambda_t: Some(sys.lambda_t),
        eps_analytic: None,
        eps_sim_mean: None,
        eps_sim_ci95: None,
        discipline: sys.discipline,
        scheduler: sys.scheduler,
        seed: None,
        replications: None,
        status: RowStatus::Ok,
    };
    match eps(&sys, &params) {
        Ok(summary) => {
            row.eps_analytic = Some(summary.eps_bar);
            let path = write_rows(out_dir, &[row])?;
            let derived = sys.validate()?;
            Ok(Outcome {
                lines: vec![
                    format!("eps = {}", summary.eps_bar),
                    format!(
                        "method {:?}, largest cross-check gap {:e}",
                        summary.method,
                        summary.max_discrepancy()
                    ),
                    format!("mu0 = {}, rho0 = {}", derived.mu0, derived.rho0),
                ],
                artifacts: vec![path],
                details: json(&summary),
                exit_code: 0,
            })
        }
        Err(e @ Error::Unstable { .. }) => {
            row.status = RowStatus::Infeasible;
            write_rows(out_dir, &[row])?;
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn run_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let params = correlation(cfg)?;
    let sys = system(cfg)?;
    let seed = cfg.seed.expect("seed resolved before dispatch");
    let length = cfg
        .simulate
        .length
        .or(cfg.model.length)
        .unwrap_or(200.0 / sys.lambda_s);
    let mut options = FieldSimOptions::new(
        length,
        cfg.simulate.horizon.unwrap_or(1e4),
        cfg.simulate.replications.unwrap_or(10),
        seed,
    );
    options.warmup = cfg.simulate.warmup;
    options.probes = cfg.simulate.probes.unwrap_or(options.probes);
    options.mode = cfg.simulate.mode.unwrap_or_default();

    let analytic = eps(&sys, &params).ok().map(|s| s.eps_bar);
    let result = simulate_field_error(&sys, &params, &options)?;
    let status = if result.warnings.is_empty() {
        RowStatus::Ok
    } else {
        RowStatus::Warned
    };
    let row = ResultRow {
        lambda_s: Some(sys.lambda_s),
        lambda_t: Some(sys.lambda_t),
        eps_analytic: analytic,
        eps_sim_mean: Some(result.eps_hat),
        eps_sim_ci95: Some(result.ci95),
        discipline: sys.discipline,
        scheduler: sys.scheduler,
        seed: Some(seed),
        replications: Some(result.replications),
        status,
    };
    let path = write_rows(out_dir, &[row])?;
    let mut lines = vec![
        format!("eps_hat = {} ± {} (95%, {} replications)", result.eps_hat, result.ci95, result.replications),
        match analytic {
            Some(v) => format!("eps analytic = {v}"),
            None => "eps analytic: not available for this configuration".to_string(),
        },
        format!(
            "L = {length}, horizon = {}, warmup = {}, seed = {seed}",
            result.horizon, result.warmup
        ),
    ];
    lines.extend(result.warnings.iter().map(|w| format!("warning: {w}")));
    Ok(Outcome {
        lines,
        artifacts: vec![path],
        details: json(&result),
        exit_code: 0,
    })
}

fn run_optimize(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let params = correlation(cfg)?;
    let mu_bar = mu_bar(cfg)?;
    let d = discipline(cfg);
    let result = match d {
        Discipline::Lcfs => optimize_lcfs(&params, mu_bar)?,
        Discipline::Fcfs => {
            let defaults = SearchOptions::default();
            let o = &cfg.optimize;
            let options = SearchOptions {
                coarse_points: o.coarse_points.unwrap_or(defaults.coarse_points),
                span: o.span.unwrap_or(defaults.span),
                rel_tol: o.rel_tol.unwrap_or(defaults.rel_tol),
                stability_margin: o.stability_margin.unwrap_or(defaults.stability_margin),
                ..defaults
            };
            optimize_fcfs(&params, mu_bar, &options)?
        }
    };
    let lt = match result.lambda_t_star {
        TimeRate::Finite(v) => v,
        TimeRate::Unbounded => f64::INFINITY,
    };
    let row = ResultRow {
        lambda_s: Some(result.lambda_s_star),
        lambda_t: Some(lt),
        eps_analytic: Some(result.eps_star),
        eps_sim_mean: None,
        eps_sim_ci95: None,
        discipline: d,
        scheduler: scheduler(cfg),
        seed: None,
        replications: None,
        status: RowStatus::Ok,
    };
    let path = write_rows(out_dir, &[row])?;
    let mut lines = vec![format!("lambda_s* = {}", result.lambda_s_star)];
    lines.push(match (result.lambda_t_star, result.practical_lambda_t) {
        (TimeRate::Finite(v), _) => format!("lambda_t* = {v}"),
        (TimeRate::Unbounded, Some(p)) => {
            format!("lambda_t* = unbounded (lambda_t >= {p} is within 1% of the limit)")
        }
        (TimeRate::Unbounded, None) => "lambda_t* = unbounded".to_string(),
    });
    lines.push(format!("eps* = {}", result.eps_star));
    lines.push(format!(
        "method {:?}, {} evaluations, feasible region: {}",
        result.method, result.evaluations, result.feasible_region
    ));
    if result.local_minima.len() > 1 {
        lines.push(format!("{} distinct local minima found", result.local_minima.len()));
    }
    Ok(Outcome {
        lines,
        artifacts: vec![path],
        details: json(&result),
        exit_code: 0,
    })
}

fn axis(spec: Option<&AxisSpec>, natural: f64) -> Vec<f64> {
    match spec {
        Some(s) => s.values(),
        None => logspace(natural / 10.0, natural * 10.0, 32),
    }
}

fn natural_scales(params: &CorrelationParams, mu_bar: f64) -> (f64, f64) {
    let s_nat = (params.b() * mu_bar / (2.0 * params.a())).sqrt();
    (s_nat, mu_bar / s_nat)
}

/// Configured axes, or 32 log-spaced values over two decades around the
/// natural scales `sqrt(b·mu_bar/(2a))` and `mu_bar` divided by it.
fn sweep_axes(cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<f64>), ExperimentError> {
    let (s_nat, t_nat) = natural_scales(&correlation(cfg)?, mu_bar(cfg)?);
    Ok((
        axis(cfg.sweep.lambda_s.as_ref(), s_nat),
        axis(cfg.sweep.lambda_t.as_ref(), t_nat),
    ))
}

fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let params = correlation(cfg)?;
    let mu_bar = mu_bar(cfg)?;
    let (s_nat, t_nat) = natural_scales(&params, mu_bar);
    let (ls, lt) = sweep_axes(cfg)?;
    let template = SystemConfig::new(
        cfg.model.lambda_s.unwrap_or(s_nat),
        cfg.model.lambda_t.unwrap_or(t_nat),
        mu_bar,
        discipline(cfg),
    )
    .with_scheduler(scheduler(cfg));
    let axes = SweepAxes::new(ls, lt).map_err(|e| ExperimentError::Config(format!("sweep axis: {e}")))?;
    let grid = sweep(&template, &params, &axes);

    let surface_path = out_dir.join("surface.csv");
    emit_surface(&grid, &surface_path)?;
    let rows: Vec<ResultRow> = output::surface_rows(&grid)?
        .into_iter()
        .map(|r| {
            let feasible = r[3] == "ok";
            ResultRow {
                lambda_s: r[0].parse().ok(),
                lambda_t: r[1].parse().ok(),
                eps_analytic: r[2].parse().ok(),
                eps_sim_mean: None,
                eps_sim_ci95: None,
                discipline: template.discipline,
                scheduler: template.scheduler,
                seed: None,
                replications: None,
                status: if feasible { RowStatus::Ok } else { RowStatus::Infeasible },
            }
        })
        .collect();
    let results_path = write_rows(out_dir, &rows)?;
    let infeasible = rows.iter().filter(|r| r.status == RowStatus::Infeasible).count();
    let mut lines = vec![format!(
        "{} x {} grid, {} infeasible nodes",
        grid.lambda_s.len(),
        grid.lambda_t.len(),
        infeasible
    )];
    if let Some((i, j, e)) = grid.argmin() {
        lines.push(format!(
            "grid minimum eps = {e} at lambda_s = {}, lambda_t = {} ({})",
            grid.lambda_s[i],
            grid.lambda_t[j],
            if grid.has_interior_minimum() { "interior" } else { "on the boundary" }
        ));
    }
    Ok(Outcome {
        lines,
        artifacts: vec![results_path, surface_path],
        details: serde_json::json!({
            "lambda_s": grid.lambda_s,
            "lambda_t": grid.lambda_t,
            "argmin": grid.argmin(),
        }),
        exit_code: 0,
    })
}

fn run_check(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Outcome, ExperimentError> {
    let suite = cfg
        .check
        .suite
        .ok_or_else(|| ExperimentError::Config("missing `check.suite` (--suite appendix-a|aoi-laws|identities)".into()))?;
    let effort = CheckEffort {
        seed: cfg.seed.expect("seed resolved before dispatch"),
        horizon: cfg.check.horizon.unwrap_or(1e5),
        replications: cfg.check.replications.unwrap_or(20),
    };
    let results = match suite {
        Suite::Identities => checks::identities(effort.seed),
        Suite::AoiLaws => checks::aoi_laws(effort),
        Suite::AppendixA => checks::appendix_a(effort),
    };
    let path = out_dir.join("check.csv");
    output::write_check_table(&path, &results).map_err(|e| io_error(&path, e))?;
    let failed = results.iter().filter(|c| !c.passed).count();
    let mut lines: Vec<String> = results
        .iter()
        .map(|c| format!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail))
        .collect();
    lines.push(format!("suite {suite}: {} passed, {failed} failed", results.len() - failed));
    Ok(Outcome {
        lines,
        artifacts: vec![path],
        details: json(&results),
        exit_code: if failed == 0 { 0 } else { 4 },
    })
}
