//! Forward simulator of a fiber-based bright-squeezed-light generation chain
//! (seed laser → SHG pump → double-pass phase-sensitive parametric amplifier →
//! loss chain → balanced homodyne detection), plus an inverse-problem engine
//! that fits the chain's physical parameters to measured gains and squeezing
//! levels.
//!
//! All quantum states are single-mode Gaussian states tracked as a mean
//! quadrature vector plus a 2×2 covariance matrix in shot-noise units
//! (vacuum variance = 1).

pub mod chain;
pub mod config;
pub mod gaussian;
pub mod homodyne;
pub mod inference;
pub mod pipeline;
pub mod simplex;

pub use chain::{ChainConfig, OpaParams, PumpStage};
pub use config::{ExperimentConfig, Mode};
pub use gaussian::{DbValue, QuadratureState};
pub use homodyne::{BhdSettings, PhaseWaveform, ScanTrace, WaveformShape};
pub use inference::{FitResult, MeasurementRecord};
