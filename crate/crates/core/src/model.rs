//! Domain types: correlation parameters, system configuration and the
//! pointwise estimation error.
//!
//! Units are fixed throughout the crate: positions in meters, times in
//! seconds, rates in the matching reciprocal units. The normalized service
//! rate `mu_bar` (1/(s·m)) is the canonical service parameter; a raw channel
//! rate `mu` over a region of length `L` is converted at construction.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{non_negative, positive, Error, Result};

/// Decay constants of the separable exponential correlation
/// `g(d, t) = exp(-b·d/2 - a·t/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationParams {
    a: f64,
    b: f64,
}

impl CorrelationParams {
    /// `a` is the time decay rate (1/s), `b` the spatial decay rate (1/m).
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            a: positive("a", a)?,
            b: positive("b", b)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Correlation coefficient between the field at two points `distance`
    /// meters and `age` seconds apart. Lies in (0, 1].
    pub fn correlation(&self, distance: f64, age: f64) -> Result<f64> {
        let distance = non_negative("distance", distance)?;
        let age = non_negative("age", age)?;
        Ok((-0.5 * self.b * distance - 0.5 * self.a * age).exp())
    }

    /// MMSE error `1 - g²` of estimating the field from a sample at the given
    /// distance and age.
    pub fn instantaneous_error(&self, distance: f64, age: f64) -> Result<PointError> {
        let distance = non_negative("distance", distance)?;
        let age = non_negative("age", age)?;
        // 1 - exp(-x) without cancellation near zero.
        let value = -(-self.b * distance - self.a * age).exp_m1();
        Ok(PointError(value.clamp(0.0, 1.0)))
    }
}

/// Normalized mean squared estimation error at a point, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PointError(f64);

impl PointError {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain {
                name: "error",
                value,
                domain: "[0, 1]",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Queue discipline at each sampling point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discipline {
    /// First-come first-served, unbounded queue.
    Fcfs,
    /// Last-come first-served keeping only the freshest packet.
    Lcfs,
}

/// Channel scheduler shared by the sampling points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheduler {
    #[serde(rename = "ur")]
    UniformRandom,
    #[serde(rename = "rr")]
    RoundRobin,
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discipline::Fcfs => "fcfs",
            Discipline::Lcfs => "lcfs",
        })
    }
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheduler::UniformRandom => "ur",
            Scheduler::RoundRobin => "rr",
        })
    }
}

impl FromStr for Discipline {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fcfs" => Ok(Discipline::Fcfs),
            "lcfs" => Ok(Discipline::Lcfs),
            other => Err(format!("unknown discipline `{other}` (expected fcfs or lcfs)")),
        }
    }
}

impl FromStr for Scheduler {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ur" | "uniform" => Ok(Scheduler::UniformRandom),
            "rr" | "round-robin" => Ok(Scheduler::RoundRobin),
            other => Err(format!("unknown scheduler `{other}` (expected ur or rr)")),
        }
    }
}

/// Sampling and service parameters of the system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Spatial sampling density (points/m).
    pub lambda_s: f64,
    /// Packet arrival rate per point (1/s).
    pub lambda_t: f64,
    /// Normalized service rate (1/(s·m)).
    pub mu_bar: f64,
    /// Region length (m), when the configuration was given as raw `(mu, L)`.
    pub region_length: Option<f64>,
    pub discipline: Discipline,
    pub scheduler: Scheduler,
}

/// Quantities derived from a validated [`SystemConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    /// Per-point service rate `mu_bar / lambda_s`.
    pub mu0: f64,
    /// Per-point load `lambda_t / mu0`.
    pub rho0: f64,
    /// Expected point count `lambda_s · L`, when a region length is known.
    pub expected_points: Option<f64>,
}

impl SystemConfig {
    /// Uniform-random scheduling with the given normalized service rate.
    pub fn new(lambda_s: f64, lambda_t: f64, mu_bar: f64, discipline: Discipline) -> Self {
        Self {
            lambda_s,
            lambda_t,
            mu_bar,
            region_length: None,
            discipline,
            scheduler: Scheduler::UniformRandom,
        }
    }

    /// Builds a configuration from a raw channel rate `mu` over a region of
    /// `length` meters; `mu_bar = mu / length`.
    pub fn from_raw(
        lambda_s: f64,
        lambda_t: f64,
        mu: f64,
        length: f64,
        discipline: Discipline,
    ) -> Result<Self> {
        let mu = positive("mu", mu)?;
        let length = positive("length", length)?;
        Ok(Self {
            region_length: Some(length),
            ..Self::new(lambda_s, lambda_t, mu / length, discipline)
        })
    }

    pub fn with_scheduler(mut self, scheduler: Scheduler) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn with_discipline(mut self, discipline: Discipline) -> Self {
        self.discipline = discipline;
        self
    }

    pub fn with_rates(mut self, lambda_s: f64, lambda_t: f64) -> Self {
        self.lambda_s = lambda_s;
        self.lambda_t = lambda_t;
        self
    }

    /// Checks rates and, for FCFS, queue stability.
    pub fn validate(&self) -> Result<Derived> {
        let lambda_s = positive("lambda_s", self.lambda_s)?;
        let lambda_t = positive("lambda_t", self.lambda_t)?;
        let mu_bar = positive("mu_bar", self.mu_bar)?;
        let expected_points = match self.region_length {
            Some(l) => Some(positive("region_length", l)? * lambda_s),
            None => None,
        };
        let mu0 = mu_bar / lambda_s;
        let rho0 = lambda_t * lambda_s / mu_bar;
        if !(mu0.is_finite() && mu0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu0",
                value: mu0,
                reason: "derived per-point service rate must be finite and > 0",
            });
        }
        if self.discipline == Discipline::Fcfs && rho0 >= 1.0 {
            return Err(Error::Unstable { rho0 });
        }
        Ok(Derived {
            mu0,
            rho0,
            expected_points,
        })
    }
}
