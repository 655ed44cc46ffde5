//! Error-minimizing sampling rates and parameter sweeps.
//!
//! FCFS has no closed-form optimum; [`optimize_fcfs`] runs a log-spaced
//! coarse grid over the stable region followed by local grid refinement.
//! Under LCFS the error decreases in `lambda_t`, so the optimum sits at
//! `lambda_t → ∞` and balances the two remaining factors, giving
//! `lambda_s* = sqrt(b·mu_bar / (2a))`.

use rayon::prelude::*;
use serde::Serialize;
use std::cmp::Ordering;

use crate::error::{positive, Error, Result};
use crate::error_law::{eps, eps_lcfs, f_ratio, ErrorSummary};
use crate::model::{CorrelationParams, Discipline, SystemConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Nodes per axis of the coarse grid.
    pub coarse_points: usize,
    /// The coarse grid spans `[1/span, span]` times the natural scales.
    pub span: f64,
    /// Refinement windows have `2·refine_half + 1` nodes per axis.
    pub refine_half: usize,
    /// Stop once the refinement cell is narrower than this (relative).
    pub rel_tol: f64,
    /// Nodes must satisfy `lambda_s·lambda_t < (1 - margin)·mu_bar`.
    pub stability_margin: f64,
    pub max_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            coarse_points: 64,
            span: 1e3,
            refine_half: 4,
            rel_tol: 1e-4,
            stability_margin: 1e-3,
            max_iterations: 200,
        }
    }
}

/// Optimal time-domain rate: finite, or unbounded (LCFS).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeRate {
    Finite(f64),
    Unbounded,
}

impl TimeRate {
    pub fn finite(self) -> Option<f64> {
        match self {
            TimeRate::Finite(v) => Some(v),
            TimeRate::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizationMethod {
    GridRefine,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub lambda_s: f64,
    pub lambda_t: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub lambda_s_star: f64,
    pub lambda_t_star: TimeRate,
    pub eps_star: f64,
    pub method: OptimizationMethod,
    pub evaluations: usize,
    pub feasible_region: String,
    /// Finite `lambda_t` reaching within 1% of the limiting error (LCFS).
    pub practical_lambda_t: Option<f64>,
    /// Distinct local minima surviving refinement, best first (FCFS).
    pub local_minima: Vec<Candidate>,
    /// Incumbent error after the coarse pass and each refinement step.
    pub history: Vec<f64>,
}

/// Log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// Orders candidates by error, ties broken toward the lexicographically
/// smallest `(lambda_s, lambda_t)`.
fn better(x: &Candidate, y: &Candidate) -> bool {
    match x.eps.total_cmp(&y.eps) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => (x.lambda_s, x.lambda_t) < (y.lambda_s, y.lambda_t),
    }
}

struct FcfsObjective<'a> {
    params: &'a CorrelationParams,
    mu_bar: f64,
    margin: f64,
    evaluations: usize,
}

impl FcfsObjective<'_> {
    fn eval(&mut self, lambda_s: f64, lambda_t: f64) -> Option<Candidate> {
        if lambda_s * lambda_t >= (1.0 - self.margin) * self.mu_bar {
            return None;
        }
        self.evaluations += 1;
        let config = SystemConfig::new(lambda_s, lambda_t, self.mu_bar, Discipline::Fcfs);
        eps(&config, self.params).ok().map(|s| Candidate {
            lambda_s,
            lambda_t,
            eps: s.eps_bar,
        })
    }
}

/// Two-dimensional grid search with local refinement for the FCFS optimum.
pub fn optimize_fcfs(params: &CorrelationParams, mu_bar: f64, options: &SearchOptions) -> Result<OptimizationResult> {
    let mu_bar = positive("mu_bar", mu_bar)?;
    let n = options.coarse_points.max(3);
    let s_nat = (params.b() * mu_bar / (2.0 * params.a())).sqrt();
    let t_nat = mu_bar / s_nat;
    let ls_axis = logspace(s_nat / options.span, s_nat * options.span, n);
    let lt_axis = logspace(t_nat / options.span, t_nat * options.span, n);
    let step_u = (ls_axis[1] / ls_axis[0]).ln();
    let step_v = (lt_axis[1] / lt_axis[0]).ln();

    let mut objective = FcfsObjective {
        params,
        mu_bar,
        margin: options.stability_margin,
        evaluations: 0,
    };
    let mut coarse: Vec<Option<Candidate>> = Vec::with_capacity(n * n);
    for &ls in &ls_axis {
        for &lt in &lt_axis {
            coarse.push(objective.eval(ls, lt));
        }
    }
    let best = coarse
        .iter()
        .flatten()
        .copied()
        .reduce(|x, y| if better(&y, &x) { y } else { x })
        .ok_or(Error::EmptyFeasibleGrid)?;

    // Coarse local minima over the 8-neighbourhood, ignoring saturated nodes.
    let at = |i: isize, j: isize| -> Option<Candidate> {
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
            None
        } else {
            coarse[i as usize * n + j as usize]
        }
    };
    let mut starts = Vec::new();
    for i in 0..n as isize {
        for j in 0..n as isize {
            let Some(c) = at(i, j) else { continue };
            if c.eps >= 1.0 - 1e-12 {
                continue;
            }
            let is_min = (-1..=1)
                .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
                .filter(|&d| d != (0, 0))
                .filter_map(|(di, dj)| at(i + di, j + dj))
                .all(|nb| !better(&nb, &c));
            if is_min {
                starts.push(c);
            }
        }
    }
    if starts.is_empty() {
        starts.push(best);
    }

    let mut refined: Vec<Candidate> = Vec::new();
    let mut history = Vec::new();
    for start in &starts {
        let is_global = start == &best;
        let mut trace = vec![start.eps];
        let end = refine(&mut objective, *start, step_u, step_v, options, &mut trace);
        if is_global {
            history = trace;
        }
        let duplicate = refined.iter().any(|r| {
            (r.lambda_s / end.lambda_s).ln().abs() < 1e-3 && (r.lambda_t / end.lambda_t).ln().abs() < 1e-3
        });
        if !duplicate {
            refined.push(end);
        }
    }
    refined.sort_by(|x, y| if better(x, y) { Ordering::Less } else { Ordering::Greater });
    let winner = refined[0];

    Ok(OptimizationResult {
        lambda_s_star: winner.lambda_s,
        lambda_t_star: TimeRate::Finite(winner.lambda_t),
        eps_star: winner.eps,
        method: OptimizationMethod::GridRefine,
        evaluations: objective.evaluations,
        feasible_region: format!(
            "lambda_s*lambda_t < (1 - {})*mu_bar = {}",
            options.stability_margin,
            (1.0 - options.stability_margin) * mu_bar
        ),
        practical_lambda_t: None,
        local_minima: refined,
        history,
    })
}

fn refine(
    objective: &mut FcfsObjective<'_>,
    start: Candidate,
    step_u: f64,
    step_v: f64,
    options: &SearchOptions,
    trace: &mut Vec<f64>,
) -> Candidate {
    let k = options.refine_half.max(1) as isize;
    let mut incumbent = start;
    let (mut hu, mut hv) = (step_u, step_v);
    for _ in 0..options.max_iterations {
        if hu <= options.rel_tol && hv <= options.rel_tol {
            break;
        }
        let (u0, v0) = (incumbent.lambda_s.ln(), incumbent.lambda_t.ln());
        let mut best = incumbent;
        let mut best_index = (0, 0);
        for i in -k..=k {
            for j in -k..=k {
                if i == 0 && j == 0 {
                    continue;
                }
                let ls = (u0 + hu * i as f64 / k as f64).exp();
                let lt = (v0 + hv * j as f64 / k as f64).exp();
                if let Some(c) = objective.eval(ls, lt) {
                    if better(&c, &best) {
                        best = c;
                        best_index = (i, j);
                    }
                }
            }
        }
        incumbent = best;
        // An edge winner means the minimum may lie outside the window: move
        // without shrinking.
        let on_edge = best_index.0.abs() == k || best_index.1.abs() == k;
        if !on_edge {
            hu /= k as f64;
            hv /= k as f64;
        }
        trace.push(incumbent.eps);
    }
    incumbent
}

/// Closed-form LCFS optimum at `lambda_t → ∞`.
pub fn optimize_lcfs(params: &CorrelationParams, mu_bar: f64) -> Result<OptimizationResult> {
    let mu_bar = positive("mu_bar", mu_bar)?;
    let (a, b) = (params.a(), params.b());
    let lambda_s_star = (b * mu_bar / (2.0 * a)).sqrt();
    let balance = (2.0 * mu_bar / (a * b)).sqrt();
    let eps_star = 1.0 - f_ratio(balance).powi(2);

    let mu0 = mu_bar / lambda_s_star;
    let target = 1.01 * eps_star;
    let mut evaluations = 0;
    let mut error_at = |lambda_t: f64| -> f64 {
        evaluations += 1;
        let c = SystemConfig::new(lambda_s_star, lambda_t, mu_bar, Discipline::Lcfs);
        eps_lcfs(&c, params).map(|s| s.eps_bar).unwrap_or(1.0)
    };
    let mut lo = 1e-6 * mu0;
    let practical = if error_at(lo) <= target {
        lo
    } else {
        let mut hi = mu0;
        while error_at(hi) > target {
            lo = hi;
            hi *= 10.0;
            if hi > 1e12 * mu0 {
                break;
            }
        }
        for _ in 0..100 {
            let mid = (lo * hi).sqrt();
            if error_at(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo < 1.0 + 1e-10 {
                break;
            }
        }
        hi
    };

    Ok(OptimizationResult {
        lambda_s_star,
        lambda_t_star: TimeRate::Unbounded,
        eps_star,
        method: OptimizationMethod::ClosedForm,
        evaluations,
        feasible_region: "all positive rates (LCFS keeps only the freshest packet)".to_string(),
        practical_lambda_t: Some(practical),
        local_minima: Vec::new(),
        history: vec![eps_star],
    })
}

/// Grid axes for [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    lambda_s: Vec<f64>,
    lambda_t: Vec<f64>,
}

fn check_axis(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter {
            name,
            value: 0.0,
            reason: "axis must not be empty",
        });
    }
    for &v in values {
        positive(name, v)?;
    }
    let ascending = values.windows(2).all(|w| w[0] < w[1]);
    let descending = values.windows(2).all(|w| w[0] > w[1]);
    if !(ascending || descending) {
        return Err(Error::InvalidParameter {
            name,
            value: f64::NAN,
            reason: "axis must be strictly monotone",
        });
    }
    Ok(())
}

impl SweepAxes {
    pub fn new(lambda_s: Vec<f64>, lambda_t: Vec<f64>) -> Result<Self> {
        check_axis("lambda_s", &lambda_s)?;
        check_axis("lambda_t", &lambda_t)?;
        Ok(Self { lambda_s, lambda_t })
    }

    /// Axes not given fall back to the template's single value.
    pub fn from_template(template: &SystemConfig, lambda_s: Option<Vec<f64>>, lambda_t: Option<Vec<f64>>) -> Result<Self> {
        Self::new(
            lambda_s.unwrap_or_else(|| vec![template.lambda_s]),
            lambda_t.unwrap_or_else(|| vec![template.lambda_t]),
        )
    }

    pub fn lambda_s(&self) -> &[f64] {
        &self.lambda_s
    }

    pub fn lambda_t(&self) -> &[f64] {
        &self.lambda_t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCell {
    Value(ErrorSummary),
    /// The node violates a constraint; the reason is kept, no value is made up.
    Infeasible(String),
}

impl SweepCell {
    pub fn eps(&self) -> Option<f64> {
        match self {
            SweepCell::Value(s) => Some(s.eps_bar),
            SweepCell::Infeasible(_) => None,
        }
    }
}

/// Analytic error over a rectangular grid, stored `lambda_s`-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub lambda_s: Vec<f64>,
    pub lambda_t: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn is_rectangular(&self) -> bool {
        self.cells.len() == self.lambda_s.len() * self.lambda_t.len()
    }

    pub fn check_rectangular(&self) -> Result<()> {
        if self.is_rectangular() {
            Ok(())
        } else {
            Err(Error::RaggedGrid {
                expected: self.lambda_s.len() * self.lambda_t.len(),
                found: self.cells.len(),
            })
        }
    }

    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.lambda_t.len() + j]
    }

    /// `(lambda_s, lambda_t, cell)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, &SweepCell)> + '_ {
        let nt = self.lambda_t.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.lambda_s[k / nt], self.lambda_t[k % nt], c))
    }

    /// Index and value of the smallest feasible error.
    pub fn argmin(&self) -> Option<(usize, usize, f64)> {
        let nt = self.lambda_t.len();
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.eps().map(|e| (k, e)))
            .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
            .map(|(k, e)| (k / nt, k % nt, e))
    }

    /// True when the grid minimum is not on the outer boundary of the grid.
    pub fn has_interior_minimum(&self) -> bool {
        match self.argmin() {
            Some((i, j, _)) => {
                i > 0 && j > 0 && i + 1 < self.lambda_s.len() && j + 1 < self.lambda_t.len()
            }
            None => false,
        }
    }
}

/// Evaluates the analytic error of `template` at every grid node.
pub fn sweep(template: &SystemConfig, params: &CorrelationParams, axes: &SweepAxes) -> SweepGrid {
    let nodes: Vec<(f64, f64)> = axes
        .lambda_s
        .iter()
        .flat_map(|&ls| axes.lambda_t.iter().map(move |&lt| (ls, lt)))
        .collect();
    let cells = nodes
        .par_iter()
        .map(|&(ls, lt)| match eps(&template.with_rates(ls, lt), params) {
            Ok(s) => SweepCell::Value(s),
            Err(e) => SweepCell::Infeasible(e.to_string()),
        })
        .collect();
    SweepGrid {
        lambda_s: axes.lambda_s.clone(),
        lambda_t: axes.lambda_t.clone(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> CorrelationParams {
        CorrelationParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn lcfs_closed_form_reference() {
        let r = optimize_lcfs(&unit(), 2.0).unwrap();
        assert_eq!(r.lambda_s_star, 1.0);
        assert!((r.eps_star - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(r.lambda_t_star, TimeRate::Unbounded);
        let practical = r.practical_lambda_t.unwrap();
        let at = eps_lcfs(&SystemConfig::new(1.0, practical, 2.0, Discipline::Lcfs), &unit())
            .unwrap()
            .eps_bar;
        assert!(at <= 1.01 * r.eps_star * (1.0 + 1e-9));
    }

    #[test]
    fn lcfs_balance_condition() {
        let p = CorrelationParams::new(0.1, 0.01).unwrap();
        let r = optimize_lcfs(&p, 5e-5).unwrap();
        assert!((r.lambda_s_star - 1.581_138_830_084_19e-3).abs() < 1e-15);
        let mu0 = 5e-5 / r.lambda_s_star;
        let lhs = 2.0 * r.lambda_s_star / p.b();
        assert!((lhs - mu0 / p.a()).abs() < 1e-12 * lhs);
    }

    #[test]
    fn fcfs_beats_reference_point() {
        let r = optimize_fcfs(&unit(), 4.0, &SearchOptions::default()).unwrap();
        assert!(r.eps_star <= 0.68);
        let lt = r.lambda_t_star.finite().unwrap();
        assert!(r.lambda_s_star * lt < 4.0);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.local_minima.len(), 1);
    }

    #[test]
    fn fcfs_small_service_rate_saturates() {
        let r = optimize_fcfs(&unit(), 1e-8, &SearchOptions::default()).unwrap();
        assert!(r.eps_star > 0.999);
    }

    #[test]
    fn sweep_marks_infeasible_nodes() {
        let template = SystemConfig::new(1.0, 1.0, 4.0, Discipline::Fcfs);
        let axes = SweepAxes::new(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let grid = sweep(&template, &unit(), &axes);
        assert_eq!(grid.cells.len(), 4);
        let rows: Vec<_> = grid.rows().collect();
        assert_eq!((rows[1].0, rows[1].1), (1.0, 3.0));
        // lambda_s·lambda_t = 6 >= 4
        assert!(matches!(grid.cell(1, 1), SweepCell::Infeasible(_)));
        let direct = eps(&template.with_rates(2.0, 1.0), &unit()).unwrap();
        assert_eq!(grid.cell(1, 0).eps(), Some(direct.eps_bar));
    }

    #[test]
    fn axes_must_be_monotone() {
        assert!(SweepAxes::new(vec![1.0, 3.0, 2.0], vec![1.0]).is_err());
        assert!(SweepAxes::new(vec![], vec![1.0]).is_err());
        assert!(SweepAxes::new(vec![3.0, 2.0], vec![1.0]).is_ok());
    }

    #[test]
    fn logspace_endpoints() {
        let v = logspace(1e-3, 1e3, 7);
        assert_eq!(v.len(), 7);
        assert!((v[0] - 1e-3).abs() < 1e-18 && (v[6] - 1e3).abs() < 1e-10);
        assert!((v[3] - 1.0).abs() < 1e-12);
    }
}
