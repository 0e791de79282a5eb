//! Benchmark harness for the zospg optimizer: configuration-driven
//! multi-seed experiments with CSV traces, aggregate confidence bands, SVG
//! convergence plots, theoretical-bound overlays, and a property
//! verification suite.

// validation uses negated comparisons (`!(x > 0.0)`) because they also
// reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod csvio;
pub mod plot;
pub mod runner;
pub mod stats;
pub mod verify;
