//! Datasets: file ingestion, synthetic generation and patient-level splits.

mod csv_io;
mod split;
mod synthetic;

use std::collections::BTreeSet;

pub use csv_io::{load_records, save_records, save_truth, truth_path};
pub use split::{calibration_patient_count, split_by_patient, split_indices};
pub use synthetic::{generate_synthetic, Miscalibration, Sharing, SyntheticData, SyntheticSpec, DISC_LEVELS, TASKS};

use crate::error::{Error, Result};
use crate::types::GradingRecord;

/// A collection of gradings that all share the class count `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    k: usize,
    records: Vec<GradingRecord>,
    /// `file:<path>` or `synthetic:seed=<seed>`.
    pub provenance: String,
}

impl Dataset {
    pub fn new(k: usize, records: Vec<GradingRecord>, provenance: impl Into<String>) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        for r in &records {
            if r.k() != k {
                return Err(Error::ClassCountMismatch {
                    expected: k,
                    found: r.k(),
                });
            }
            if r.patient_id.is_empty() {
                return Err(Error::EmptyPatientId);
            }
        }
        Ok(Dataset {
            k,
            records,
            provenance: provenance.into(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn records(&self) -> &[GradingRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct patient ids, sorted.
    pub fn patients(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.patient_id.as_str()).collect()
    }

    /// Group tags present on any record, sorted.
    pub fn group_tags(&self) -> BTreeSet<&str> {
        self.records
            .iter()
            .flat_map(|r| r.groups.keys().map(String::as_str))
            .collect()
    }
}
