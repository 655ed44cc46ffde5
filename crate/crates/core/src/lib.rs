//! Remote estimation of a one-dimensional Gauss–Markov random field sampled
//! by Poisson-placed sensors that report over a shared queueing channel.
//!
//! The crate provides
//!
//! * closed-form age-of-information laws ([`aoi`]) and the resulting
//!   estimation-error laws ([`error_law`]) for FCFS and LCFS points under
//!   uniformly random scheduling,
//! * a discrete-event simulator ([`sim`]) that reproduces those laws from
//!   first principles,
//! * optimizers for the spatial and temporal sampling rates ([`optimize`]),
//! * an experiment layer ([`experiment`]) with a typed configuration file,
//!   CSV outputs and run manifests.

pub mod aoi;
pub mod error;
pub mod error_law;
pub mod experiment;
pub mod mixture;
pub mod model;
pub mod numerics;
pub mod optimize;
pub mod rng;
pub mod sim;
pub mod spatial;

pub use error::{Error, Result};
pub use model::{CorrelationParams, Derived, Discipline, PointError, Scheduler, SystemConfig};
