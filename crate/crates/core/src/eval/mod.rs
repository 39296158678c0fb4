//! Evaluation: coverage and set-size metrics, stratified breakdowns,
//! repeated random-split trials, per-patient uncertainty flagging and the
//! Fisher exact enrichment test.

mod fisher;
mod flagging;
mod metrics;
mod report;
mod trials;

pub use fisher::fisher_exact_2x2;
pub use flagging::{flag_top_k, patient_uncertainty, PatientUncertainty};
pub use metrics::{empirical_coverage, mean_set_size, stratified_report, Stratification, StratumKey, StratumStats};
pub use report::{render_table, report_csv};
pub use trials::{
    run_trials, trial_seed, Evaluation, StratumSummary, Summary, TrialConfig, TrialOutcome, TrialReport,
};
