//! Clustering-derived Takagi-Sugeno fuzzy inference.

mod evolve;
mod fcm;
mod fis;

pub use evolve::{evolve_update, History};
pub use fcm::{fcm_cluster, fcm_objective, FcmResult, TrainConfig};
pub use fis::{build_fis, fis_predict, FisModel, FuzzyRule, Norm, SINGULAR_CONDITION, WIDTH_FLOOR};
