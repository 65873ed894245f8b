//! Benchmark harness: solver × instance matrices over a grid of generator
//! factors, energy-vs-time traces, marginal curves and reports.

pub mod config;
pub mod curves;
pub mod error;
pub mod matrix;
pub mod report;
pub mod svg;

pub use config::{BenchConfig, Cell, SolverEntry};
pub use curves::{marginalize, Curve, Factor};
pub use error::{BenchError, Result};
pub use matrix::{run_matrix, InstanceInfo, MatrixResult};
pub use report::{emit_reports, load_results, plots_for, Plot};
