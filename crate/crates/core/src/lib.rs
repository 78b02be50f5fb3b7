//! Gaussian-state toolkit for target-detection receivers.
//!
//! States are built and propagated through a lossy thermal target channel
//! ([`gaussian`], [`channel`]); quadratic observables are evaluated exactly
//! on them ([`observable`]); receivers are scored by their signal-to-noise
//! ratio ([`receivers`]) and compared with quantum Chernoff bounds
//! ([`chernoff`]). [`figures`] and [`emit`] drive parameter sweeps and write
//! CSV, JSON or SVG.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod chernoff;
pub mod emit;
pub mod error;
pub mod figures;
pub mod gaussian;
pub mod observable;
pub mod optimize;
pub mod receivers;
pub mod snr;
pub mod special;
pub mod symplectic;

pub use error::{Error, Result};
