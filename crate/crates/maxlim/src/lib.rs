//! Simulation and Monte Carlo verification of partial maxima processes of
//! regularly varying stationary sequences.
//!
//! The crate builds the objects that appear in functional limit theory for
//! maxima: cadlag step paths on `[0,1]` with the Skorohod `J1` and (monotone)
//! `M1` metrics, generators for heavy-tailed stationary sequences, partial
//! maxima and time-space point processes, exact simulation of extremal
//! processes from Poisson point processes, extremal-index and tail-process
//! estimators, and a verification harness that compares desk-scale Monte
//! Carlo output against closed-form limit laws.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run --release --example simulate_models
//! cargo run --release --example maxima_paths
//! cargo run --release --example skorohod_metrics
//! cargo run --release --example extremal_process
//! cargo run --release --example estimate_theta
//! cargo run --release --example tail_process
//! cargo run --release --example block_schedules
//! cargo run --release --example verify_limits
//! ```
//!
//! A thin CLI (`maxlim`) exposes the same functionality as subcommands
//! (`simulate`, `maxima`, `metric`, `estimate`, `verify`, `calibrate`).

pub mod cadlag;
pub mod cli;
pub mod config;
mod error;
pub mod estimators;
pub mod extremal;
pub mod maxima;
pub mod models;
pub mod verify;

pub use error::{Error, Result};
