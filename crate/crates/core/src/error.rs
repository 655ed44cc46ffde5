use thiserror::Error;

/// Errors raised by the analytic, simulation and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("FCFS queue is unstable: rho0 = {rho0} (needs rho0 < 1)")]
    Unstable { rho0: f64 },

    #[error("argument `{name}` = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("point set is empty: no sampler to probe")]
    NoSampler,

    #[error("confluent rates {rates:?}: closed-form coefficients need distinct rates; use quadrature on the combined CDF")]
    ConfluentRates { rates: Vec<f64> },

    #[error("{0} is not supported")]
    Unsupported(&'static str),

    #[error("no feasible node in the search grid")]
    EmptyFeasibleGrid,

    #[error("ragged grid: expected {expected} cells, found {found}")]
    RaggedGrid { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("simulation produced no delivery within the observation window")]
    NoDeliveries,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && !value.is_nan() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, inf)",
        })
    }
}
