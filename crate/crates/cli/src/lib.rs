//! Command-line front end: configuration, pipeline orchestration and
//! result files.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod heatmap;
pub mod pipeline;
pub mod report;
pub mod units;
