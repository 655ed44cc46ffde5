//! Stationary age-of-information laws of a single sampling point.
//!
//! * FCFS with uniformly random scheduling: the per-point queue is M/M/1 with
//!   service rate `mu0`; closed-form CDF and transform.
//! * FCFS with round-robin scheduling: M/G/1 with Erlang(M, mu) service;
//!   transform only.
//! * LCFS keeping the freshest packet, uniformly random scheduling: the age
//!   is exp(`lambda_t`) + exp(`mu0`).
//!
//! All transforms are Laplace–Stieltjes transforms `s ↦ E[e^{-sΔ}]`. They are
//! rational (or rational in `(mu/(s+mu))^M`) and can be evaluated at small
//! negative `s` as well, which [`mean_from_lst`] relies on.

use crate::error::{non_negative, positive, Error, Result};
use crate::mixture::ExpMixtureCdf;
use crate::numerics::phi1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoiKind {
    FcfsUniform,
    LcfsUniform,
    FcfsRoundRobin,
}

/// A stationary AoI distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum AoiLaw {
    FcfsUniform { lambda_t: f64, mu0: f64 },
    LcfsUniform { lambda_t: f64, mu0: f64 },
    FcfsRoundRobin { lambda_t: f64, mu: f64, points: u32 },
}

impl AoiLaw {
    pub fn fcfs_uniform(lambda_t: f64, mu0: f64) -> Result<Self> {
        let lambda_t = positive("lambda_t", lambda_t)?;
        let mu0 = positive("mu0", mu0)?;
        if lambda_t >= mu0 {
            return Err(Error::Unstable { rho0: lambda_t / mu0 });
        }
        Ok(Self::FcfsUniform { lambda_t, mu0 })
    }

    pub fn lcfs_uniform(lambda_t: f64, mu0: f64) -> Result<Self> {
        Ok(Self::LcfsUniform {
            lambda_t: positive("lambda_t", lambda_t)?,
            mu0: positive("mu0", mu0)?,
        })
    }

    /// `mu` is the channel rate shared by `points` samplers.
    pub fn fcfs_round_robin(lambda_t: f64, mu: f64, points: u32) -> Result<Self> {
        let lambda_t = positive("lambda_t", lambda_t)?;
        let mu = positive("mu", mu)?;
        if points == 0 {
            return Err(Error::InvalidParameter {
                name: "points",
                value: 0.0,
                reason: "need at least one sampling point",
            });
        }
        let rho0 = lambda_t * f64::from(points) / mu;
        if rho0 >= 1.0 {
            return Err(Error::Unstable { rho0 });
        }
        Ok(Self::FcfsRoundRobin { lambda_t, mu, points })
    }

    pub fn kind(&self) -> AoiKind {
        match self {
            Self::FcfsUniform { .. } => AoiKind::FcfsUniform,
            Self::LcfsUniform { .. } => AoiKind::LcfsUniform,
            Self::FcfsRoundRobin { .. } => AoiKind::FcfsRoundRobin,
        }
    }

    /// Per-point load `lambda_t / mu0`.
    pub fn rho0(&self) -> f64 {
        match *self {
            Self::FcfsUniform { lambda_t, mu0 } | Self::LcfsUniform { lambda_t, mu0 } => lambda_t / mu0,
            Self::FcfsRoundRobin { lambda_t, mu, points } => lambda_t * f64::from(points) / mu,
        }
    }

    /// `E[e^{-sΔ}]`.
    pub fn lst(&self, s: f64) -> f64 {
        match *self {
            Self::FcfsUniform { lambda_t, mu0 } => fcfs_ur_transform(lambda_t, mu0, s),
            Self::LcfsUniform { lambda_t, mu0 } => lambda_t / (s + lambda_t) * mu0 / (s + mu0),
            Self::FcfsRoundRobin { lambda_t, mu, points } => fcfs_rr_transform(lambda_t, mu, points, s),
        }
    }

    /// Transform of the scaled age `scale·Δ`, i.e. `lst(scale·s)`.
    pub fn scaled_lst(&self, scale: f64, s: f64) -> f64 {
        self.lst(scale * s)
    }

    /// Closed-form CDF as an exponential mixture; not available for
    /// round-robin scheduling.
    pub fn mixture(&self) -> Option<ExpMixtureCdf> {
        match *self {
            Self::FcfsUniform { lambda_t, mu0 } => Some(fcfs_ur_mixture(lambda_t, mu0)),
            Self::LcfsUniform { lambda_t, mu0 } => {
                Some(ExpMixtureCdf::hypoexponential(&[lambda_t, mu0]).expect("validated rates"))
            }
            Self::FcfsRoundRobin { .. } => None,
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        let t = non_negative("t", t)?;
        match *self {
            Self::LcfsUniform { lambda_t, mu0 } => Ok(hypo2(lambda_t, mu0, t)),
            Self::FcfsUniform { .. } => Ok(self.mixture().expect("closed form").cdf(t)),
            Self::FcfsRoundRobin { .. } => Err(Error::Unsupported("closed-form CDF under round-robin scheduling")),
        }
    }

    /// Mean age: closed form where one exists, otherwise from the transform.
    pub fn mean(&self) -> Result<f64> {
        match *self {
            Self::FcfsUniform { lambda_t, mu0 } => {
                let rho = lambda_t / mu0;
                Ok((1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / mu0)
            }
            Self::LcfsUniform { lambda_t, mu0 } => Ok(1.0 / lambda_t + 1.0 / mu0),
            Self::FcfsRoundRobin { .. } => mean_from_lst(|s| self.lst(s)),
        }
    }
}

fn fcfs_ur_transform(lambda_t: f64, mu0: f64, s: f64) -> f64 {
    let q = mu0 - lambda_t; // (1 - rho0)·mu0
    q / (s + q) - q * s * (s + lambda_t + mu0) / ((s + mu0).powi(2) * (s + lambda_t))
}

/// M/M/1 FCFS age law inverted from its transform:
/// `E_q + c·E_λ - (c - ρ)·E_μ - ρ·Erlang₂(μ)` with `q = (1-ρ)μ`, `c = 1/(1-ρ)`.
fn fcfs_ur_mixture(lambda_t: f64, mu0: f64) -> ExpMixtureCdf {
    let rho = lambda_t / mu0;
    let c = 1.0 / (1.0 - rho);
    let drain = ExpMixtureCdf::exponential(mu0 - lambda_t).expect("stable");
    let arrival = ExpMixtureCdf::exponential(lambda_t).expect("positive");
    let service = ExpMixtureCdf::exponential(mu0).expect("positive");
    let service2 = ExpMixtureCdf::erlang(2, mu0).expect("positive");
    ExpMixtureCdf::combine(&[
        (1.0, &drain),
        (c, &arrival),
        (-(c - rho), &service),
        (-rho, &service2),
    ])
}

fn fcfs_rr_transform(lambda_t: f64, mu: f64, points: u32, s: f64) -> f64 {
    let m = f64::from(points);
    let rho = lambda_t * m / mu;
    let q = |x: f64| (mu / (x + mu)).powi(points as i32);
    // w(s) is the M/G/1 sojourn-time transform; removable singularity at 0.
    let w = if s.abs() < 1e-8 * lambda_t {
        let mean_service = m / mu;
        let second_moment = m * (m + 1.0) / (mu * mu);
        let sojourn = mean_service + lambda_t * second_moment / (2.0 * (1.0 - rho));
        1.0 - s * sojourn
    } else {
        (1.0 - rho) * s * q(s) / (s - lambda_t + lambda_t * q(s))
    };
    w - (1.0 - rho) * s * q(s) / (s + lambda_t * q(s + lambda_t))
}

/// CDF of exp(λ1) + exp(λ2).
fn hypo2(lambda1: f64, lambda2: f64, x: f64) -> f64 {
    let (lo, hi) = if lambda1 <= lambda2 {
        (lambda1, lambda2)
    } else {
        (lambda2, lambda1)
    };
    // 1 - [λ2 e^{-λ1 x} - λ1 e^{-λ2 x}]/(λ2 - λ1), rewritten around the slower
    // rate; continuous through λ1 = λ2.
    let survival = (-lo * x).exp() * (1.0 + lo * x * phi1((hi - lo) * x));
    1.0 - survival
}

pub fn hypo2_cdf(lambda1: f64, lambda2: f64, x: f64) -> Result<f64> {
    let l1 = positive("lambda1", lambda1)?;
    let l2 = positive("lambda2", lambda2)?;
    let x = non_negative("x", x)?;
    Ok(hypo2(l1, l2, x))
}

pub fn fcfs_ur_cdf(lambda_t: f64, mu0: f64, t: f64) -> Result<f64> {
    AoiLaw::fcfs_uniform(lambda_t, mu0)?.cdf(t)
}

pub fn fcfs_ur_lst(lambda_t: f64, mu0: f64, s: f64) -> Result<f64> {
    let s = non_negative("s", s)?;
    Ok(AoiLaw::fcfs_uniform(lambda_t, mu0)?.lst(s))
}

pub fn lcfs_ur_cdf(lambda_t: f64, mu0: f64, t: f64) -> Result<f64> {
    AoiLaw::lcfs_uniform(lambda_t, mu0)?.cdf(t)
}

pub fn lcfs_ur_lst(lambda_t: f64, mu0: f64, s: f64) -> Result<f64> {
    let s = non_negative("s", s)?;
    Ok(AoiLaw::lcfs_uniform(lambda_t, mu0)?.lst(s))
}

pub fn fcfs_rr_lst(lambda_t: f64, mu: f64, points: u32, s: f64) -> Result<f64> {
    let s = non_negative("s", s)?;
    Ok(AoiLaw::fcfs_round_robin(lambda_t, mu, points)?.lst(s))
}

/// First moment `-L'(0)` of the law with transform `lst`, by central
/// differences at the origin refined with Richardson extrapolation.
///
/// The transform must be analytic in a neighbourhood of zero, which holds for
/// every law with exponentially decaying tail.
pub fn mean_from_lst<F: Fn(f64) -> f64>(lst: F) -> Result<f64> {
    let probe = 1e-7;
    let crude = (lst(0.0) - lst(probe)) / probe;
    if !crude.is_finite() || crude <= 0.0 {
        return Err(Error::Numerical(format!("transform slope at 0 is {crude}")));
    }
    const LEVELS: usize = 6;
    let mut h = 0.05 / crude;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(LEVELS);
    for i in 0..LEVELS {
        let d = (lst(-h) - lst(h)) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::Numerical(format!("transform not finite near 0 (h = {h})")));
        }
        let mut row = vec![d];
        for j in 1..=i {
            let factor = 4f64.powi(j as i32);
            let prev = &table[i - 1];
            row.push(row[j - 1] + (row[j - 1] - prev[j - 1]) / (factor - 1.0));
        }
        table.push(row);
        h *= 0.5;
    }
    Ok(*table[LEVELS - 1].last().unwrap())
}
