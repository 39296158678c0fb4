use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::GradingRecord;

/// `ceil(cal_fraction * n_patients)`, kept within `[1, n_patients - 1]` so
/// neither side of the split is empty.
pub fn calibration_patient_count(n_patients: usize, cal_fraction: f64) -> usize {
    let raw = (cal_fraction * n_patients as f64 - 1e-9).ceil() as usize;
    raw.clamp(1, n_patients.saturating_sub(1).max(1))
}

/// Record indices `(calibration, evaluation)` for a seeded patient-level
/// split. Every grading of a patient lands on the same side; indices keep
/// their original order within each side.
pub fn split_indices(records: &[GradingRecord], cal_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(cal_fraction > 0.0 && cal_fraction < 1.0) {
        return Err(Error::InvalidFraction(cal_fraction));
    }
    let patients: BTreeSet<&str> = records.iter().map(|r| r.patient_id.as_str()).collect();
    if patients.len() < 2 {
        return Err(Error::TooFewPatients(patients.len()));
    }
    let mut order: Vec<&str> = patients.into_iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_cal = calibration_patient_count(order.len(), cal_fraction);
    let cal_patients: HashSet<&str> = order[..n_cal].iter().copied().collect();
    Ok((0..records.len()).partition(|&i| cal_patients.contains(records[i].patient_id.as_str())))
}

/// Seeded patient-level split into `(calibration, evaluation)` records.
pub fn split_by_patient(
    records: &[GradingRecord],
    cal_fraction: f64,
    seed: u64,
) -> Result<(Vec<GradingRecord>, Vec<GradingRecord>)> {
    let (cal, eval) = split_indices(records, cal_fraction, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| records[i].clone()).collect();
    Ok((pick(cal), pick(eval)))
}
