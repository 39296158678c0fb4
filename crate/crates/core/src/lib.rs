//! Conformal prediction sets for ordinal severity grading.
//!
//! Wraps the class-probability output of any ordinal classifier into
//! prediction sets that contain the true grade with probability at least
//! `1 - alpha`, using a held-out calibration set:
//!
//! - [`methods`]: greedy Ordinal APS, an exact minimum-width diagnostic,
//!   LAC and Ordinal CDF, each as a nested set family with a matching score;
//! - [`calibrate`]: the split-conformal threshold and a serializable predictor;
//! - [`eval`]: multi-trial coverage/set-size evaluation, stratified reports,
//!   per-patient uncertainty flagging and Fisher's exact test;
//! - [`data`]: CSV ingestion, synthetic data and patient-level splits;
//! - [`cli`]: the command-line front end.
//!
//! ```
//! use ordinal_conformal::{calibrate, Alpha, GradingRecord, MethodKind, ScoreVector, SeverityLabel};
//!
//! let f = ScoreVector::new(vec![0.1, 0.6, 0.2, 0.1]).unwrap();
//! let cal: Vec<_> = (0..50)
//!     .map(|i| GradingRecord::new(f.clone(), SeverityLabel(i % 3), format!("P{i}")).unwrap())
//!     .collect();
//! let predictor = calibrate(MethodKind::OrdinalApsGreedy, &cal, Alpha::new(0.1).unwrap()).unwrap();
//! let set = predictor.predict(&f).unwrap();
//! assert!(set.contains(SeverityLabel(1)));
//! ```

pub mod calibrate;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod methods;
pub mod types;
mod util;

pub use calibrate::{calibrate, conformal_quantile, CalibratedPredictor};
pub use data::Dataset;
pub use error::{Error, Result};
pub use methods::MethodKind;
pub use types::{
    argmax_label, default_alpha_grid, Alpha, GradingRecord, LabelInterval, LabelSubset, Lambda, PredictionSet,
    ScoreVector, SeverityLabel,
};
pub use util::sig17;
