//! Typed TOML experiment files.
//!
//! ```toml
//! kind = "simulate"
//! seed = 7
//! out = "runs/fcfs"
//!
//! [model]
//! a = 1.0
//! b = 1.0
//! lambda_s = 1.0
//! lambda_t = 2.0
//! mu_bar = 4.0
//! discipline = "fcfs"
//! scheduler = "ur"
//!
//! [simulate]
//! length = 200.0
//! horizon = 1e4
//! replications = 10
//! ```
//!
//! Unknown keys are rejected. Every field is optional in the file so that
//! command-line flags can fill or override it; missing required values are
//! reported when the run is resolved.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::model::{Discipline, Scheduler};
use crate::sim::ChannelMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunKind {
    Analytic,
    Simulate,
    Optimize,
    Sweep,
    Check,
}

impl std::fmt::Display for RunKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunKind::Analytic => "analytic",
            RunKind::Simulate => "simulate",
            RunKind::Optimize => "optimize",
            RunKind::Sweep => "sweep",
            RunKind::Check => "check",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AppendixA,
    AoiLaws,
    Identities,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "appendix-a" => Ok(Suite::AppendixA),
            "aoi-laws" => Ok(Suite::AoiLaws),
            "identities" => Ok(Suite::Identities),
            other => Err(format!("unknown suite `{other}` (expected appendix-a, aoi-laws or identities)")),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::AppendixA => "appendix-a",
            Suite::AoiLaws => "aoi-laws",
            Suite::Identities => "identities",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

/// `from`..=`to` in `points` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Spacing>,
}

/// A sweep axis: an explicit list or a range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range(AxisRange),
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            AxisSpec::Values(v) => v.clone(),
            AxisSpec::Range(r) => match r.spacing.unwrap_or_default() {
                Spacing::Log => crate::optimize::logspace(r.from, r.to, r.points),
                Spacing::Linear => match r.points {
                    0 => Vec::new(),
                    1 => vec![r.from],
                    n => (0..n)
                        .map(|i| r.from + (r.to - r.from) * i as f64 / (n - 1) as f64)
                        .collect(),
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_bar: Option<f64>,
    /// Raw channel rate; needs `length`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discipline: Option<Discipline>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheduler: Option<Scheduler>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// Simulated region length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ChannelMode>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_s: Option<AxisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_t: Option<AxisSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<RunKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub simulate: SimulateSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub sweep: SweepSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub optimize: OptimizeSection,
    #[serde(default, skip_serializing_if = "is_default")]
    pub check: CheckSection,
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

macro_rules! overlay {
    ($dst:expr, $src:expr; $($field:ident),+) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always representable in TOML")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Values set in `over` replace those in `self`.
    pub fn merged(mut self, over: &ExperimentConfig) -> Self {
        overlay!(self, over; kind, seed, out);
        overlay!(self.model, over.model; a, b, lambda_s, lambda_t, mu_bar, mu, length, discipline, scheduler);
        // A raw rate on one side displaces a normalized one on the other.
        if over.model.mu.is_some() && over.model.mu_bar.is_none() {
            self.model.mu_bar = None;
        }
        if over.model.mu_bar.is_some() && over.model.mu.is_none() {
            self.model.mu = None;
        }
        overlay!(self.simulate, over.simulate; length, horizon, warmup, probes, replications, mode);
        overlay!(self.sweep, over.sweep; lambda_s, lambda_t);
        overlay!(self.optimize, over.optimize; coarse_points, span, rel_tol, stability_margin);
        overlay!(self.check, over.check; suite, horizon, replications);
        self
    }
}
