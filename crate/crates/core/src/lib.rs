//! Holonomic two-qubit gates on Förster-resonant Rydberg atom pairs:
//! invariant-engineered pulse design, time-dependent propagation, and
//! fidelity metrics.

pub mod atom;
pub mod config;
pub mod drive;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod operator;
pub mod pulse;
pub mod scenario;
pub mod sweep;

pub use error::{Error, Result};
