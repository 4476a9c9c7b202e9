//! Benchmark harness for image registration methods evaluated on
//! landmark-annotated image pairs.
//!
//! The usual flow: describe a dataset ([`dataset`]), wrap a registration
//! tool in an adapter spec ([`adapters`]), run it over every pair
//! ([`runner`]), then read accuracy and robustness numbers ([`metrics`])
//! and charts ([`report`]). The `regbench` binary exposes the same steps
//! ([`cli`]).

pub mod adapters;
pub mod cli;
pub mod dataset;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod stats;
pub mod synthetic;
