use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::types::{GradingRecord, PredictionSet, SeverityLabel};

/// Fraction of sets that contain their label.
pub fn empirical_coverage(sets: &[PredictionSet], labels: &[SeverityLabel]) -> Result<f64> {
    if sets.len() != labels.len() {
        return Err(Error::LengthMismatch {
            sets: sets.len(),
            labels: labels.len(),
        });
    }
    if sets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let covered = sets.iter().zip(labels).filter(|(s, &y)| s.contains(y)).count();
    Ok(covered as f64 / sets.len() as f64)
}

pub fn mean_set_size(sets: &[PredictionSet]) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(sets.iter().map(PredictionSet::len).sum::<usize>() as f64 / sets.len() as f64)
}

/// How to partition evaluated records.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stratification {
    TrueClass,
    SetSize,
    /// By the value of a group tag, e.g. `disc_level`.
    Group(String),
}

impl Stratification {
    pub fn kind(&self) -> &str {
        match self {
            Stratification::TrueClass => "true_class",
            Stratification::SetSize => "set_size",
            Stratification::Group(tag) => tag,
        }
    }

    pub(crate) fn key(&self, set: &PredictionSet, record: &GradingRecord) -> Result<StratumKey> {
        match self.record_key(record)? {
            Some(key) => Ok(key),
            None => Ok(StratumKey::SetSize(set.len())),
        }
    }

    /// The key for stratifications that depend only on the record; `None`
    /// for [`Stratification::SetSize`].
    pub(crate) fn record_key(&self, record: &GradingRecord) -> Result<Option<StratumKey>> {
        Ok(match self {
            Stratification::TrueClass => Some(StratumKey::TrueClass(record.label.index())),
            Stratification::SetSize => None,
            Stratification::Group(tag) => Some(StratumKey::Group {
                tag: tag.clone(),
                value: record
                    .groups
                    .get(tag)
                    .ok_or_else(|| Error::UnknownGroupTag(tag.clone()))?
                    .clone(),
            }),
        })
    }
}

/// One cell of a stratification.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StratumKey {
    TrueClass(usize),
    SetSize(usize),
    Group { tag: String, value: String },
}

impl StratumKey {
    /// Column name of the stratification this key belongs to.
    pub fn kind(&self) -> &str {
        match self {
            StratumKey::TrueClass(_) => "true_class",
            StratumKey::SetSize(_) => "set_size",
            StratumKey::Group { tag, .. } => tag,
        }
    }

    pub fn value(&self) -> String {
        match self {
            StratumKey::TrueClass(y) | StratumKey::SetSize(y) => y.to_string(),
            StratumKey::Group { value, .. } => value.clone(),
        }
    }
}

impl fmt::Display for StratumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.kind(), self.value())
    }
}

/// Raw counts for one stratum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StratumStats {
    pub covered: usize,
    pub count: usize,
    pub size_total: usize,
}

impl StratumStats {
    pub fn coverage(&self) -> f64 {
        self.covered as f64 / self.count as f64
    }

    pub fn mean_size(&self) -> f64 {
        self.size_total as f64 / self.count as f64
    }

    pub(crate) fn add(&mut self, set: &PredictionSet, label: SeverityLabel) {
        self.count += 1;
        self.size_total += set.len();
        if set.contains(label) {
            self.covered += 1;
        }
    }
}

/// Coverage, mean size and count per stratum. Empty strata do not appear.
pub fn stratified_report(
    sets: &[PredictionSet],
    records: &[GradingRecord],
    strata: &Stratification,
) -> Result<BTreeMap<StratumKey, StratumStats>> {
    if sets.len() != records.len() {
        return Err(Error::LengthMismatch {
            sets: sets.len(),
            labels: records.len(),
        });
    }
    let mut cells: BTreeMap<StratumKey, StratumStats> = BTreeMap::new();
    for (set, record) in sets.iter().zip(records) {
        cells.entry(strata.key(set, record)?).or_default().add(set, record.label);
    }
    Ok(cells)
}
