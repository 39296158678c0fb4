use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("score vector needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("probability {value} at class {class} is negative or not finite")]
    InvalidProbability { class: usize, value: f64 },
    #[error("probabilities sum to {sum}, outside 1 +/- 1e-6")]
    BadProbabilitySum { sum: f64 },
    #[error("label {label} out of range for K = {k}")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("empty calibration set")]
    EmptyCalibration,
    #[error("records disagree on class count: expected K = {expected}, found {found}")]
    ClassCountMismatch { expected: usize, found: usize },
    #[error("exact variant is diagnostic-only; calibrate the greedy Ordinal APS instead")]
    ExactNotCalibratable,
    #[error("empty patient id")]
    EmptyPatientId,
    #[error("length mismatch: {sets} prediction sets vs {labels} labels")]
    LengthMismatch { sets: usize, labels: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("unknown group tag '{0}'")]
    UnknownGroupTag(String),
    #[error("k = {k} exceeds the number of patients ({n})")]
    FlagCountTooLarge { k: usize, n: usize },
    #[error("contingency table is all zeros")]
    EmptyTable,
    #[error("need at least 2 distinct patients to split, got {0}")]
    TooFewPatients(usize),
    #[error("calibration fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("trial {trial} (seed {seed:#018x}) has an empty calibration split")]
    EmptyCalibrationSplit { trial: usize, seed: u64 },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
