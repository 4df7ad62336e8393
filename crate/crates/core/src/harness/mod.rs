//! Experiments, configuration, reports and the command line front end.

#[cfg(feature = "cli")]
pub mod cli;
pub mod config;
pub mod convergence;
pub mod functions;
pub mod report;

pub use config::Config;
pub use convergence::{
    near_best_check, run_convergence, ConvergenceConfig, ConvergenceReport, NearBestConfig, NearBestReport, Order,
};
pub use functions::{Shape, Smoothness, TestFunction};
