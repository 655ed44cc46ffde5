//! CSV and manifest writers.

use serde::Serialize;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Discipline, Scheduler};
use crate::optimize::{SweepCell, SweepGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Infeasible,
    Warned,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Warned => "warned",
        }
    }
}

/// One line of `results.csv`. Numeric fields of infeasible rows stay empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub lambda_s: Option<f64>,
    pub lambda_t: Option<f64>,
    pub eps_analytic: Option<f64>,
    pub eps_sim_mean: Option<f64>,
    pub eps_sim_ci95: Option<f64>,
    pub discipline: Discipline,
    pub scheduler: Scheduler,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub status: RowStatus,
}

pub const RESULTS_HEADER: [&str; 10] = [
    "lambda_s",
    "lambda_t",
    "eps_analytic",
    "eps_sim_mean",
    "eps_sim_ci95",
    "discipline",
    "scheduler",
    "seed",
    "replications",
    "status",
];

pub const SURFACE_HEADER: [&str; 4] = ["lambda_s", "lambda_t", "eps", "status"];

/// Shortest round-trip scientific notation; `inf` for unbounded values.
pub fn format_number(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.to_string(),
        Some(x) => format!("{x:e}"),
        None => String::new(),
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Numerical(format!("{}: {e}", path.display()))
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        let infeasible = r.status == RowStatus::Infeasible;
        let num = |v: Option<f64>| if infeasible { String::new() } else { format_number(v) };
        w.write_record([
            format_number(r.lambda_s),
            format_number(r.lambda_t),
            num(r.eps_analytic),
            num(r.eps_sim_mean),
            num(r.eps_sim_ci95),
            r.discipline.to_string(),
            r.scheduler.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.replications.map(|n| n.to_string()).unwrap_or_default(),
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush()
}

fn ascending_order(axis: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..axis.len()).collect();
    idx.sort_by(|&i, &j| axis[i].total_cmp(&axis[j]));
    idx
}

/// Long-format surface rows, `lambda_s`-major with both axes ascending.
pub fn surface_rows(grid: &SweepGrid) -> Result<Vec<[String; 4]>> {
    grid.check_rectangular()?;
    let mut rows = Vec::with_capacity(grid.cells.len());
    for i in ascending_order(&grid.lambda_s) {
        for j in ascending_order(&grid.lambda_t) {
            let cell = grid.cell(i, j);
            rows.push([
                format_number(Some(grid.lambda_s[i])),
                format_number(Some(grid.lambda_t[j])),
                format_number(cell.eps()),
                match cell {
                    SweepCell::Value(_) => "ok",
                    SweepCell::Infeasible(_) => "infeasible",
                }
                .to_string(),
            ]);
        }
    }
    Ok(rows)
}

/// Writes the plotting grid `lambda_s,lambda_t,eps,status`.
pub fn emit_surface(grid: &SweepGrid, path: &Path) -> Result<()> {
    let rows = surface_rows(grid)?;
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(SURFACE_HEADER).map_err(|e| io(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_check_table(path: &Path, lines: &[super::checks::CheckLine]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["check", "status", "detail"])?;
    for l in lines {
        w.write_record([l.name.as_str(), if l.passed { "pass" } else { "fail" }, l.detail.as_str()])?;
    }
    w.flush()
}

/// Run manifest written as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: String,
    pub config: super::ExperimentConfig,
    pub seed: Option<u64>,
    pub seed_generated: bool,
    pub rng: &'static str,
    pub started_unix: u64,
    pub wall_time_s: f64,
    pub artifacts: Vec<String>,
    pub details: serde_json::Value,
}
