//! Experiments, file formats and the command line on top of `hslpp-core`.

pub use hslpp_core as core;

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod stats;

pub use error::{Error, Result};
