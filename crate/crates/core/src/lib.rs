//! Frequency-stability analysis and clock-synchronization simulation.
//!
//! The crate is organised around the data flow of a timing experiment:
//!
//! * [`noisegen`] synthesizes the five power-law oscillator noise processes.
//! * [`clockmodel`] turns a clock description (offset, drift, noise) into
//!   sampled phase data, and models frequency-comb mode and pulse timing.
//! * [`stability`] computes the Allan-family deviations (FFI⁽⁰⁾, FFI⁽¹⁾,
//!   FFI⁽²⁾), TDEV, σ–τ curves, slope fits and noise identification.
//! * [`quantum`] holds squeezed-state algebra and the SQL/HL timing
//!   precision laws.
//! * [`synclink`] simulates one-way and two-way time transfer over a
//!   free-space link and runs repeated-exchange campaigns.

pub mod clockmodel;
pub mod error;
pub mod fit;
pub mod noisegen;
pub mod quantum;
pub mod rng;
pub mod series;
pub mod stability;
pub mod synclink;

pub use error::{Error, Result};
pub use noisegen::{NoiseKind, NoiseSpec};
pub use series::{TimeSeriesX, TimeSeriesY};
pub use stability::{StabilityCurve, StabilityPoint, Variant};
