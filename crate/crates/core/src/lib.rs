//! Simulation of faster-than-Nyquist, Tomlinson-Harashima precoded
//! dual-polarization QAM over a WDM coherent optical link with an adaptive
//! butterfly equalizer.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod equalizer;
pub mod error;
pub mod framing;
pub mod harness;
pub mod qam;
pub mod report;
pub mod selftest;
pub mod signal;
pub mod thp;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use report::ExperimentResult;
pub use signal::{SampledSignal, C64};
