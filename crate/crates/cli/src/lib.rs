//! Command-line front end for the repeater model: parameter sweeps and
//! simulations written as CSV.

pub mod commands;
pub mod config;
