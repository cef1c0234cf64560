//! Analytic and Monte Carlo model of a quantum repeater chain built from
//! encoded Bell pairs, classical error correction and Pauli-frame tracking.
//!
//! - [`codes`]: CSS code registry and block decoders
//! - [`noise`]: effective bit-flip and phase error rates per physical qubit
//! - [`chain`]: logical error probability, maximum chain length, threshold
//! - [`purification`]: purification yield, raw-pair budget, cycle time and key rate
//! - [`mcsim`]: Monte Carlo cross-check of the chain model

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod codes;
pub mod error;
pub mod mcsim;
pub mod noise;
pub mod purification;

pub use error::{Error, Result};
