//! Learning type-II ("true") opposites.
//!
//! Given samples `<x, y>` of an unknown function, [`mining`] pairs each sample
//! with the sample whose output is closest to the opposite of its own output.
//! A Takagi-Sugeno rule base built by fuzzy c-means ([`fuzzy`]) then learns the
//! map `(x, y) -> opposite x`, and can keep learning as data arrives.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod functions;
pub mod fuzzy;
pub mod matrix;
pub mod mining;
pub mod opposition;
pub mod stats;

pub use error::{Error, Result};
pub use functions::{FunctionId, OptFunction, OptFunctionId, TestFunction, TestFunctionId, TrueOpposite};
pub use fuzzy::{build_fis, evolve_update, fcm_cluster, fis_predict, FcmResult, FisModel, FuzzyRule, History, TrainConfig};
pub use matrix::Matrix;
pub use mining::{mine_opposites, mining_dataset, MinedPair, Sample, SampleSet};
pub use opposition::{scheme_opposite, type1_opposite, update_range, Bounds, OppositionScheme, RunningRange};
pub use stats::{ks_two_sample, ErrorStats, KsOutcome};
