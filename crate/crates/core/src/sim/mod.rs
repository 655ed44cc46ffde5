//! Discrete-event simulation of the shared channel, the per-point queues and
//! the resulting field estimation error.
//!
//! Grants are resolved at epoch ends: when a transmission epoch of the
//! shared channel completes, the scheduler picks a point and that point's
//! selected packet (head of line under FCFS, freshest under LCFS) is the one
//! delivered at that instant. Under uniform scheduling this gives each point
//! Poisson(mu/M) service opportunities, so [`ChannelMode::Decoupled`] is an
//! exact equivalent of [`ChannelMode::ChannelLevel`].

mod engine;
mod stats;
mod tracker;

pub use stats::Estimate;
pub use tracker::{AoiTracker, PointAoiStats, Segment};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::model::{CorrelationParams, Discipline, Scheduler, SystemConfig};
use crate::rng::{stream, Purpose, RNG_ALGORITHM};
use crate::spatial::{sample_points_with, PointSet};

/// How the channel is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// One channel shared by all points; epochs are exponential(mu).
    #[default]
    ChannelLevel,
    /// Independent points: exponential(mu/M) service under uniform
    /// scheduling, Erlang(M, mu) service under round robin.
    Decoupled,
}

/// Channel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelModel {
    pub mode: ChannelMode,
    pub scheduler: Scheduler,
    pub mu: f64,
    pub points: usize,
}

impl ChannelModel {
    pub fn mu0(&self) -> f64 {
        self.mu / self.points as f64
    }
}

/// Inputs of [`simulate_aoi`].
#[derive(Debug, Clone, PartialEq)]
pub struct AoiSimParams {
    pub discipline: Discipline,
    pub scheduler: Scheduler,
    pub mode: ChannelMode,
    pub lambda_t: f64,
    /// Channel service rate.
    pub mu: f64,
    pub points: usize,
    pub horizon: f64,
    /// `None` picks the default warmup for the discipline.
    pub warmup: Option<f64>,
    /// Arguments of the empirical LST.
    pub s_values: Vec<f64>,
    pub record_paths: bool,
}

impl AoiSimParams {
    pub fn new(discipline: Discipline, scheduler: Scheduler, lambda_t: f64, mu: f64, points: usize, horizon: f64) -> Self {
        Self {
            discipline,
            scheduler,
            mode: ChannelMode::ChannelLevel,
            lambda_t,
            mu,
            points,
            horizon,
            warmup: None,
            s_values: vec![0.5, 1.0, 2.0],
            record_paths: false,
        }
    }

    pub fn with_mode(mut self, mode: ChannelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_warmup(mut self, warmup: f64) -> Self {
        self.warmup = Some(warmup);
        self
    }

    pub fn with_s_values(mut self, s_values: Vec<f64>) -> Self {
        self.s_values = s_values;
        self
    }

    pub fn recording_paths(mut self) -> Self {
        self.record_paths = true;
        self
    }

    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            mode: self.mode,
            scheduler: self.scheduler,
            mu: self.mu,
            points: self.points,
        }
    }

    pub fn rho0(&self) -> f64 {
        self.lambda_t * self.points as f64 / self.mu
    }

    pub fn effective_warmup(&self) -> f64 {
        self.warmup
            .unwrap_or_else(|| default_warmup(self.discipline, self.lambda_t, self.mu / self.points as f64))
    }

    fn validate(&self) -> Result<f64> {
        positive("lambda_t", self.lambda_t)?;
        positive("mu", self.mu)?;
        if self.points == 0 {
            return Err(Error::NoSampler);
        }
        positive("horizon", self.horizon)?;
        let warmup = non_negative("warmup", self.effective_warmup())?;
        if warmup >= self.horizon {
            return Err(Error::InvalidParameter {
                name: "horizon",
                value: self.horizon,
                reason: "must exceed the warmup",
            });
        }
        for &s in &self.s_values {
            non_negative("s", s)?;
        }
        Ok(warmup)
    }
}

/// Discarded prefix: `10/((1-rho0)·mu0)` for a stable FCFS point, and
/// `10·(1/lambda_t + 1/mu0)` otherwise.
pub fn default_warmup(discipline: Discipline, lambda_t: f64, mu0: f64) -> f64 {
    let rho0 = lambda_t / mu0;
    match discipline {
        Discipline::Fcfs if rho0 < 1.0 => 10.0 / ((1.0 - rho0) * mu0),
        _ => 10.0 * (1.0 / lambda_t + 1.0 / mu0),
    }
}

/// Per-point statistics of one simulated sample path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoiRun {
    pub points: Vec<PointAoiStats>,
    pub s_values: Vec<f64>,
    pub warmup: f64,
    pub horizon: f64,
    pub warnings: Vec<String>,
    /// Full sawtooth of every point when requested.
    #[serde(skip)]
    pub paths: Option<Vec<Vec<Segment>>>,
}

impl AoiRun {
    /// Mean AoI averaged over points.
    pub fn mean_age(&self) -> f64 {
        self.points.iter().map(|p| p.mean_age).sum::<f64>() / self.points.len() as f64
    }

    /// Empirical LST at `s_values[j]`, averaged over points.
    pub fn lst(&self, j: usize) -> f64 {
        self.points.iter().map(|p| p.lst[j]).sum::<f64>() / self.points.len() as f64
    }

    pub fn mean_queue(&self) -> f64 {
        self.points.iter().map(|p| p.mean_queue).sum::<f64>() / self.points.len() as f64
    }

    pub fn deliveries(&self) -> u64 {
        self.points.iter().map(|p| p.deliveries).sum()
    }
}

/// Simulates replication 0 of the AoI processes for all points.
pub fn simulate_aoi(params: &AoiSimParams, seed: u64) -> Result<AoiRun> {
    simulate_aoi_replication(params, seed, 0)
}

pub fn simulate_aoi_replication(params: &AoiSimParams, seed: u64, replication: u32) -> Result<AoiRun> {
    let warmup = params.validate()?;
    let mut warnings = Vec::new();
    if params.discipline == Discipline::Fcfs && params.rho0() >= 1.0 {
        warnings.push(format!("FCFS with rho0 = {} >= 1 has no stationary regime", params.rho0()));
    }
    let mut tracker = AoiTracker::new(
        params.points,
        (warmup, params.horizon),
        &params.s_values,
        params.record_paths,
    );
    engine::run(params, seed, replication, &mut tracker);
    let (points, paths) = tracker.finish();
    let run = AoiRun {
        points,
        s_values: params.s_values.clone(),
        warmup,
        horizon: params.horizon,
        warnings,
        paths,
    };
    if run.deliveries() == 0 {
        return Err(Error::NoDeliveries);
    }
    Ok(run)
}

/// Replication estimates of the point-averaged AoI statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AoiSummary {
    pub mean_age: Estimate,
    pub lst: Vec<(f64, Estimate)>,
    pub mean_queue: Estimate,
    pub replications: usize,
    pub warnings: Vec<String>,
}

pub fn replicate_aoi(params: &AoiSimParams, seed: u64, replications: usize) -> Result<AoiSummary> {
    replicate_aoi_seeds(params, &[seed], replications)
}

/// Pools `replications` runs for each seed into one set of estimates.
pub fn replicate_aoi_seeds(params: &AoiSimParams, seeds: &[u64], replications: usize) -> Result<AoiSummary> {
    if replications == 0 || seeds.is_empty() {
        return Err(Error::InvalidParameter {
            name: "replications",
            value: replications as f64,
            reason: "need at least one replication and one seed",
        });
    }
    let jobs: Vec<(u64, u32)> = seeds
        .iter()
        .flat_map(|&s| (0..replications as u32).map(move |r| (s, r)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(s, r)| simulate_aoi_replication(params, s, r))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: &dyn Fn(&AoiRun) -> f64| Estimate::from_samples(&runs.iter().map(f).collect::<Vec<_>>());
    let mut warnings: Vec<String> = runs.iter().flat_map(|r| r.warnings.iter().cloned()).collect();
    warnings.dedup();
    Ok(AoiSummary {
        mean_age: pick(&|r| r.mean_age()),
        lst: params
            .s_values
            .iter()
            .enumerate()
            .map(|(j, &s)| (s, pick(&|r| r.lst(j))))
            .collect(),
        mean_queue: pick(&|r| r.mean_queue()),
        replications: runs.len(),
        warnings,
    })
}

/// Controls of [`simulate_field_error`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSimOptions {
    /// Region length `L`; the channel rate is `mu_bar·L`.
    pub length: f64,
    pub probes: usize,
    pub horizon: f64,
    pub warmup: Option<f64>,
    pub replications: usize,
    pub mode: ChannelMode,
    pub seed: u64,
}

impl FieldSimOptions {
    pub fn new(length: f64, horizon: f64, replications: usize, seed: u64) -> Self {
        Self {
            length,
            probes: 10_000,
            horizon,
            warmup: None,
            replications,
            mode: ChannelMode::ChannelLevel,
            seed,
        }
    }
}

/// Seeds and stream layout needed to regenerate a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedManifest {
    pub algorithm: String,
    pub seed: u64,
    pub replications: usize,
    pub streams: Vec<String>,
}

/// Estimated time- and space-averaged field error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub eps_hat: f64,
    pub ci95: f64,
    pub replication_eps: Vec<f64>,
    pub aoi_mean: Estimate,
    /// Empirical AoI LST at `s = a`, the argument entering the error.
    pub lst: Vec<(f64, Estimate)>,
    pub replications: usize,
    pub seeds: SeedManifest,
    pub horizon: f64,
    pub warmup: f64,
    /// Empty point sets that were redrawn, summed over replications.
    pub redraws: usize,
    pub warnings: Vec<String>,
}

struct FieldReplication {
    eps: f64,
    mean_age: f64,
    lst_a: f64,
    redraws: usize,
    warnings: Vec<String>,
}

fn draw_nonempty(lambda_s: f64, length: f64, seed: u64, replication: u32) -> Result<(PointSet, usize)> {
    let mut rng = stream(seed, replication, 0, Purpose::Points);
    let mut redraws = 0;
    loop {
        let set = sample_points_with(lambda_s, length, &mut rng)?;
        if !set.is_empty() {
            return Ok((set, redraws));
        }
        redraws += 1;
        if redraws > 10_000 {
            return Err(Error::NoSampler);
        }
    }
}

/// Monte Carlo estimate of the average estimation error: for each
/// replication a point set is drawn, the AoI processes run on a shared
/// channel with rate `mu_bar·L`, and each probe uses the sawtooth of its
/// nearest point (torus distance).
pub fn simulate_field_error(config: &SystemConfig, params: &CorrelationParams, options: &FieldSimOptions) -> Result<SimResult> {
    positive("lambda_s", config.lambda_s)?;
    positive("lambda_t", config.lambda_t)?;
    positive("mu_bar", config.mu_bar)?;
    let length = positive("length", options.length)?;
    if options.probes == 0 {
        return Err(Error::InvalidParameter {
            name: "probes",
            value: 0.0,
            reason: "need at least one probe",
        });
    }
    if options.replications == 0 {
        return Err(Error::InvalidParameter {
            name: "replications",
            value: 0.0,
            reason: "need at least one replication",
        });
    }
    let mu0 = config.mu_bar / config.lambda_s;
    let warmup = options
        .warmup
        .unwrap_or_else(|| default_warmup(config.discipline, config.lambda_t, mu0));
    let mut warnings = Vec::new();
    if config.lambda_s * length < 10.0 {
        warnings.push(format!(
            "lambda_s*L = {} < 10: edge and count fluctuations are large",
            config.lambda_s * length
        ));
    }
    if config.discipline == Discipline::Fcfs && config.lambda_t >= mu0 {
        warnings.push(format!("FCFS with rho0 = {} >= 1", config.lambda_t / mu0));
    }

    let reps: Vec<FieldReplication> = (0..options.replications as u32)
        .into_par_iter()
        .map(|r| field_replication(config, params, options, warmup, r))
        .collect::<Result<Vec<_>>>()?;

    let eps: Vec<f64> = reps.iter().map(|r| r.eps).collect();
    let est = Estimate::from_samples(&eps);
    for r in &reps {
        for w in &r.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
    }
    Ok(SimResult {
        eps_hat: est.mean.clamp(0.0, 1.0),
        ci95: est.ci95,
        aoi_mean: Estimate::from_samples(&reps.iter().map(|r| r.mean_age).collect::<Vec<_>>()),
        lst: vec![(
            params.a(),
            Estimate::from_samples(&reps.iter().map(|r| r.lst_a).collect::<Vec<_>>()),
        )],
        replication_eps: eps,
        replications: options.replications,
        seeds: SeedManifest {
            algorithm: RNG_ALGORITHM.to_string(),
            seed: options.seed,
            replications: options.replications,
            streams: vec![
                "points: (replication, 0, Points)".into(),
                "probes: (replication, 0, Probes)".into(),
                match options.mode {
                    ChannelMode::ChannelLevel => "channel: (replication, 0, Channel), arrivals: (replication, 0, Arrivals)".into(),
                    ChannelMode::Decoupled => "per point i: (replication, i, Arrivals), (replication, i, Service)".into(),
                },
            ],
        },
        horizon: options.horizon,
        warmup,
        redraws: reps.iter().map(|r| r.redraws).sum(),
        warnings,
    })
}

fn field_replication(
    config: &SystemConfig,
    params: &CorrelationParams,
    options: &FieldSimOptions,
    warmup: f64,
    replication: u32,
) -> Result<FieldReplication> {
    let (points, redraws) = draw_nonempty(config.lambda_s, options.length, options.seed, replication)?;
    let aoi = AoiSimParams {
        discipline: config.discipline,
        scheduler: config.scheduler,
        mode: options.mode,
        lambda_t: config.lambda_t,
        mu: config.mu_bar * options.length,
        points: points.len(),
        horizon: options.horizon,
        warmup: Some(warmup),
        s_values: vec![params.a()],
        record_paths: false,
    };
    let run = simulate_aoi_replication(&aoi, options.seed, replication)?;

    use rand::Rng;
    let mut probes = stream(options.seed, replication, 0, Purpose::Probes);
    let mut kept = 0.0;
    for _ in 0..options.probes {
        let y = probes.random::<f64>() * options.length;
        let (i, d) = points.nearest_torus(y)?;
        // Time average of e^{-b d - a Δ(t)} over the window.
        kept += (-params.b() * d).exp() * run.points[i].lst[0];
    }
    Ok(FieldReplication {
        eps: 1.0 - kept / options.probes as f64,
        mean_age: run.mean_age(),
        lst_a: run.lst(0),
        redraws,
        warnings: run.warnings,
    })
}

/// Degenerate diagnostic: the error with every age held at zero, i.e. the
/// spatial part `1 - mean(e^{-b·d})` over torus probes of one point set.
pub fn spatial_only_error(lambda_s: f64, length: f64, params: &CorrelationParams, probes: usize, seed: u64) -> Result<f64> {
    use rand::Rng;
    let (points, _) = draw_nonempty(lambda_s, length, seed, 0)?;
    let mut rng = stream(seed, 0, 0, Purpose::Probes);
    let mut kept = 0.0;
    for _ in 0..probes.max(1) {
        let y = rng.random::<f64>() * length;
        kept += (-params.b() * points.nearest_torus(y)?.1).exp();
    }
    Ok(1.0 - kept / probes.max(1) as f64)
}

/// Comparison of one statistic between two setups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub statistic: String,
    pub first: Estimate,
    pub second: Estimate,
    pub difference: f64,
    /// `sqrt(ci1² + ci2²)`.
    pub pooled_ci95: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub label: String,
    pub comparisons: Vec<Comparison>,
    pub passed: bool,
}

/// Compares mean AoI and the empirical LST of two setups, which must share
/// their `s_values`.
pub fn compare_setups(
    label: &str,
    first: &AoiSimParams,
    second: &AoiSimParams,
    seeds: &[u64],
    replications: usize,
) -> Result<EquivalenceReport> {
    let a = replicate_aoi_seeds(first, seeds, replications)?;
    // Offset the second setup's seeds so the two sample paths are independent.
    let shifted: Vec<u64> = seeds.iter().map(|s| s ^ 0x9e37_79b9_7f4a_7c15).collect();
    let b = replicate_aoi_seeds(second, &shifted, replications)?;
    let mut comparisons = vec![compare("mean_age", a.mean_age, b.mean_age)];
    for ((s, ea), (_, eb)) in a.lst.iter().zip(&b.lst) {
        comparisons.push(compare(&format!("lst(s={s})"), *ea, *eb));
    }
    let passed = comparisons.iter().all(|c| c.passed);
    Ok(EquivalenceReport {
        label: label.to_string(),
        comparisons,
        passed,
    })
}

fn compare(statistic: &str, first: Estimate, second: Estimate) -> Comparison {
    let difference = first.mean - second.mean;
    let pooled = first.ci95.hypot(second.ci95);
    Comparison {
        statistic: statistic.to_string(),
        first,
        second,
        difference,
        pooled_ci95: pooled,
        passed: difference.abs() <= pooled,
    }
}

/// Simulation settings for [`equivalence_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceParams {
    pub discipline: Discipline,
    pub lambda_t: f64,
    pub mu: f64,
    pub points: usize,
    pub horizon: f64,
    pub replications: usize,
}

/// Runs the channel-level and decoupled representations of the same system
/// and checks mean AoI and the LST at `s ∈ {0.5, 1, 2}` agree within pooled
/// 95% intervals.
pub fn equivalence_check(scheduler: Scheduler, params: &EquivalenceParams, seeds: &[u64]) -> Result<EquivalenceReport> {
    let base = AoiSimParams::new(
        params.discipline,
        scheduler,
        params.lambda_t,
        params.mu,
        params.points,
        params.horizon,
    );
    compare_setups(
        &format!(
            "{} {} lambda_t={} mu={} M={}: channel-level vs decoupled",
            params.discipline, scheduler, params.lambda_t, params.mu, params.points
        ),
        &base.clone().with_mode(ChannelMode::ChannelLevel),
        &base.with_mode(ChannelMode::Decoupled),
        seeds,
        params.replications,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_warmups() {
        assert_eq!(default_warmup(Discipline::Fcfs, 0.5, 1.0), 20.0);
        assert_eq!(default_warmup(Discipline::Lcfs, 1.0, 1.0), 20.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 0.5, 1.0, 1, 10.0).with_warmup(20.0);
        assert!(simulate_aoi(&p, 1).is_err());
        let p = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, -1.0, 1.0, 1, 100.0);
        assert!(matches!(simulate_aoi(&p, 1), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn short_horizon_reports_no_deliveries() {
        let p = AoiSimParams::new(Discipline::Lcfs, Scheduler::UniformRandom, 1e-3, 1e-3, 1, 1e-3).with_warmup(0.0);
        assert_eq!(simulate_aoi(&p, 3), Err(Error::NoDeliveries));
    }

    #[test]
    fn same_seed_same_result() {
        let p = AoiSimParams::new(Discipline::Fcfs, Scheduler::UniformRandom, 0.1, 4.0, 4, 2000.0);
        let a = simulate_aoi(&p, 11).unwrap();
        let b = simulate_aoi(&p, 11).unwrap();
        assert_eq!(a, b);
        let c = simulate_aoi(&p, 12).unwrap();
        assert_ne!(a, c);
    }
}
