//! DFT-s-OFDM with spectral extension and frequency-domain spectrum shaping.
//!
//! The crate simulates the uplink chain, measures PAPR and symbol error
//! rate, and learns FDSS filters as polynomials in the subcarrier index by
//! stochastic gradient descent on a weighted error/PAPR/flatness loss.

pub mod campaign;
pub mod chain;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod metrics;
pub mod plot;
pub mod rng;
pub mod trainer;

pub use chain::{Chain, NoiseModel, NormMode, SystemConfig};
pub use error::{FdssError, Result};
pub use experiment::{ExperimentKind, ExperimentSpec};
pub use filters::{Design, FilterRecord, FilterTaps, PolyFilterModel};
