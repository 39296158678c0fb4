//! Domain types shared across the crate: labels, score vectors, prediction
//! sets, records and the two calibration parameters (`Alpha`, `Lambda`).
//!
//! Everything here is an immutable value after construction.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on the sum of an ingested probability vector.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// An ordinal class index in `0..K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeverityLabel(pub usize);

impl SeverityLabel {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for SeverityLabel {
    fn from(v: usize) -> Self {
        SeverityLabel(v)
    }
}

impl fmt::Display for SeverityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A probability distribution over `K >= 2` ordinal classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    probs: Vec<f64>,
}

impl ScoreVector {
    /// Validates and renormalizes a probability vector.
    ///
    /// Entries must be finite and non-negative and sum to one within
    /// [`PROB_SUM_TOLERANCE`]. Unless the sum is already 1 to within 1e-12,
    /// the vector is then divided by it.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let sum = Self::check_entries(&probs)?;
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::BadProbabilitySum { sum });
        }
        Ok(Self::normalized(probs, sum))
    }

    /// Builds a score vector from arbitrary non-negative weights with a
    /// positive sum.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum = Self::check_entries(&weights)?;
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::BadProbabilitySum { sum });
        }
        Ok(Self::normalized(weights, sum))
    }

    fn check_entries(probs: &[f64]) -> Result<f64> {
        if probs.len() < 2 {
            return Err(Error::TooFewClasses(probs.len()));
        }
        for (class, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidProbability { class, value });
            }
        }
        Ok(probs.iter().sum())
    }

    // Vectors already normalized up to rounding are kept bit-exact.
    fn normalized(mut probs: Vec<f64>, sum: f64) -> Self {
        if (sum - 1.0).abs() > 1e-12 {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        ScoreVector { probs }
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, y: SeverityLabel) -> f64 {
        self.probs[y.0]
    }

    /// The most probable label. Ties go to the lowest label.
    pub fn argmax(&self) -> SeverityLabel {
        argmax_label(self)
    }

    /// Cumulative distribution `F(y) = sum_{j <= y} p_j`, one entry per class.
    pub fn cumulative(&self) -> Vec<f64> {
        self.probs
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Total probability mass on `[lo, hi]`.
    pub fn mass(&self, interval: LabelInterval) -> f64 {
        self.probs[interval.lo.0..=interval.hi.0].iter().sum()
    }
}

/// Smallest index attaining the maximum probability.
pub fn argmax_label(f: &ScoreVector) -> SeverityLabel {
    let mut best = 0;
    for (y, &p) in f.probs.iter().enumerate().skip(1) {
        if p > f.probs[best] {
            best = y;
        }
    }
    SeverityLabel(best)
}

/// A contiguous label range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelInterval {
    pub lo: SeverityLabel,
    pub hi: SeverityLabel,
}

impl LabelInterval {
    /// # Panics
    /// If `lo > hi`.
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "interval bounds out of order: [{lo}, {hi}]");
        LabelInterval {
            lo: SeverityLabel(lo),
            hi: SeverityLabel(hi),
        }
    }

    pub fn singleton(y: SeverityLabel) -> Self {
        LabelInterval { lo: y, hi: y }
    }

    pub fn full(k: usize) -> Self {
        LabelInterval::new(0, k - 1)
    }

    pub fn contains(&self, y: SeverityLabel) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn len(&self) -> usize {
        self.hi.0 - self.lo.0 + 1
    }

    /// Always false; intervals hold at least one label.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `hi - lo`, the quantity minimized by the exact interval search.
    pub fn width(&self) -> usize {
        self.hi.0 - self.lo.0
    }
}

impl fmt::Display for LabelInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An arbitrary, possibly non-contiguous, set of labels. Kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LabelSubset {
    members: Vec<SeverityLabel>,
}

impl LabelSubset {
    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        let mut members: Vec<SeverityLabel> = labels.into_iter().map(SeverityLabel).collect();
        members.sort_unstable();
        members.dedup();
        LabelSubset { members }
    }

    pub fn full(k: usize) -> Self {
        Self::from_labels(0..k)
    }

    pub fn contains(&self, y: SeverityLabel) -> bool {
        self.members.binary_search(&y).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[SeverityLabel] {
        &self.members
    }

    /// True when the members form an unbroken run of labels.
    pub fn is_contiguous(&self) -> bool {
        self.members.windows(2).all(|w| w[1].0 == w[0].0 + 1)
    }
}

/// A prediction set: an interval for the ordinal methods, a subset for LAC.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PredictionSet {
    Interval(LabelInterval),
    Subset(LabelSubset),
}

impl PredictionSet {
    pub fn contains(&self, y: SeverityLabel) -> bool {
        match self {
            PredictionSet::Interval(i) => i.contains(y),
            PredictionSet::Subset(s) => s.contains(y),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PredictionSet::Interval(i) => i.len(),
            PredictionSet::Subset(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members in ascending order.
    pub fn labels(&self) -> Vec<SeverityLabel> {
        match self {
            PredictionSet::Interval(i) => (i.lo.0..=i.hi.0).map(SeverityLabel).collect(),
            PredictionSet::Subset(s) => s.members.clone(),
        }
    }

    pub fn is_subset_of(&self, other: &PredictionSet) -> bool {
        match (self, other) {
            (PredictionSet::Interval(a), PredictionSet::Interval(b)) => b.lo <= a.lo && a.hi <= b.hi,
            (PredictionSet::Subset(a), _) => a.members.iter().all(|&y| other.contains(y)),
            (PredictionSet::Interval(a), _) => (a.lo.0..=a.hi.0).all(|y| other.contains(SeverityLabel(y))),
        }
    }
}

impl From<LabelInterval> for PredictionSet {
    fn from(i: LabelInterval) -> Self {
        PredictionSet::Interval(i)
    }
}

impl From<LabelSubset> for PredictionSet {
    fn from(s: LabelSubset) -> Self {
        PredictionSet::Subset(s)
    }
}

impl fmt::Display for PredictionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictionSet::Interval(i) => i.fmt(f),
            PredictionSet::Subset(s) => {
                let items: Vec<String> = s.members.iter().map(|y| y.to_string()).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

/// One labeled grading: model scores, ground truth, patient and group tags.
#[derive(Debug, Clone, PartialEq)]
pub struct GradingRecord {
    pub scores: ScoreVector,
    pub label: SeverityLabel,
    pub patient_id: String,
    /// Optional tags such as `disc_level` or `task`.
    pub groups: BTreeMap<String, String>,
}

impl GradingRecord {
    pub fn new(scores: ScoreVector, label: SeverityLabel, patient_id: impl Into<String>) -> Result<Self> {
        let patient_id = patient_id.into();
        if label.0 >= scores.k() {
            return Err(Error::LabelOutOfRange {
                label: label.0,
                k: scores.k(),
            });
        }
        if patient_id.is_empty() {
            return Err(Error::EmptyPatientId);
        }
        Ok(GradingRecord {
            scores,
            label,
            patient_id,
            groups: BTreeMap::new(),
        })
    }

    pub fn with_group(mut self, tag: impl Into<String>, value: impl Into<String>) -> Self {
        self.groups.insert(tag.into(), value.into());
        self
    }

    pub fn k(&self) -> usize {
        self.scores.k()
    }
}

/// Target error rate, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The error rates evaluated by default: 0.2, 0.15, 0.1, 0.05, 0.01.
pub fn default_alpha_grid() -> Vec<Alpha> {
    [0.2, 0.15, 0.1, 0.05, 0.01].into_iter().map(Alpha).collect()
}

/// Set-size threshold. `Full` means "emit every label" and orders above any
/// finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    Value(f64),
    Full,
}

impl Lambda {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Lambda::Value(value))
        } else {
            Err(Error::InvalidLambda(value))
        }
    }

    pub fn is_full(self) -> bool {
        matches!(self, Lambda::Full)
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Lambda::Value(v) => Some(v),
            Lambda::Full => None,
        }
    }

    /// Whether a conformal score falls inside the set at this threshold.
    pub fn admits(self, score: f64) -> bool {
        match self {
            Lambda::Value(v) => score <= v,
            Lambda::Full => true,
        }
    }
}

impl PartialOrd for Lambda {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Lambda::Full, Lambda::Full) => Some(Ordering::Equal),
            (Lambda::Full, Lambda::Value(_)) => Some(Ordering::Greater),
            (Lambda::Value(_), Lambda::Full) => Some(Ordering::Less),
            (Lambda::Value(a), Lambda::Value(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Value(v) => write!(f, "{v}"),
            Lambda::Full => f.write_str("FULL"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(p: &[f64]) -> ScoreVector {
        ScoreVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(argmax_label(&sv(&[0.1, 0.5, 0.3, 0.1])), SeverityLabel(1));
        assert_eq!(argmax_label(&sv(&[0.25, 0.25, 0.25, 0.25])), SeverityLabel(0));
        assert_eq!(argmax_label(&sv(&[0.05, 0.1, 0.25, 0.6])), SeverityLabel(3));
    }

    #[test]
    fn score_vector_validation() {
        assert!(matches!(ScoreVector::new(vec![1.0]), Err(Error::TooFewClasses(1))));
        assert!(matches!(
            ScoreVector::new(vec![0.5, -0.1, 0.6]),
            Err(Error::InvalidProbability { class: 1, .. })
        ));
        assert!(matches!(
            ScoreVector::new(vec![0.5, 0.4]),
            Err(Error::BadProbabilitySum { .. })
        ));
        assert!(ScoreVector::new(vec![0.5, f64::NAN]).is_err());
        let f = ScoreVector::new(vec![0.5, 0.5 + 5e-7]).unwrap();
        assert!((f.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let exact = vec![0.1, 0.5, 0.3, 0.1];
        assert_eq!(ScoreVector::new(exact.clone()).unwrap().probs(), exact.as_slice());
    }

    #[test]
    fn from_weights_normalizes() {
        let f = ScoreVector::from_weights(vec![0.8, 0.4, 0.4, 0.2]).unwrap();
        assert!((f.probs()[0] - 0.8 / 1.8).abs() < 1e-15);
        assert!(ScoreVector::from_weights(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn interval_and_subset_membership() {
        let i = LabelInterval::new(1, 3);
        assert_eq!(i.len(), 3);
        assert!(i.contains(SeverityLabel(1)) && i.contains(SeverityLabel(3)));
        assert!(!i.contains(SeverityLabel(0)));
        let s = LabelSubset::from_labels([2, 0, 2]);
        assert_eq!(s.len(), 2);
        assert!(!s.is_contiguous());
        assert!(PredictionSet::from(s).is_subset_of(&PredictionSet::from(LabelInterval::new(0, 2))));
    }

    #[test]
    fn record_invariants() {
        let f = sv(&[0.5, 0.5]);
        assert!(matches!(
            GradingRecord::new(f.clone(), SeverityLabel(2), "P1"),
            Err(Error::LabelOutOfRange { label: 2, k: 2 })
        ));
        assert!(matches!(GradingRecord::new(f, SeverityLabel(0), ""), Err(Error::EmptyPatientId)));
    }

    #[test]
    fn alpha_and_lambda_bounds() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.0).is_err());
        assert!(Alpha::new(0.1).is_ok());
        assert!(Lambda::new(1.2).is_err());
        assert!(Lambda::Full > Lambda::Value(1.0));
        assert!(Lambda::Value(0.2) < Lambda::Value(0.3));
        assert!(Lambda::Full.admits(5.0));
        assert!(!Lambda::Value(0.5).admits(0.6));
    }
}
