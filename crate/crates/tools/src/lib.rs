//! Experiment harness, file formats and command line for learning type-II
//! opposites with [`opplearn_core`].

pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod manifest;

pub use error::{HarnessError, Result};
