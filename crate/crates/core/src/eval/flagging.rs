use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{GradingRecord, PredictionSet};

/// A patient's uncertainty score: the mean prediction-set size over all of
/// their gradings.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientUncertainty {
    pub patient_id: String,
    pub mean_set_size: f64,
    pub n_gradings: usize,
}

/// One entry per patient, most uncertain first; ties go to the smaller id.
pub fn patient_uncertainty(sets: &[PredictionSet], records: &[GradingRecord]) -> Result<Vec<PatientUncertainty>> {
    if sets.len() != records.len() {
        return Err(Error::LengthMismatch {
            sets: sets.len(),
            labels: records.len(),
        });
    }
    let mut totals: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (set, r) in sets.iter().zip(records) {
        let e = totals.entry(r.patient_id.as_str()).or_default();
        e.0 += set.len();
        e.1 += 1;
    }
    let mut ranking: Vec<PatientUncertainty> = totals
        .into_iter()
        .map(|(id, (size, n))| PatientUncertainty {
            patient_id: id.to_string(),
            mean_set_size: size as f64 / n as f64,
            n_gradings: n,
        })
        .collect();
    ranking.sort_by(|a, b| {
        b.mean_set_size
            .total_cmp(&a.mean_set_size)
            .then_with(|| a.patient_id.cmp(&b.patient_id))
    });
    Ok(ranking)
}

/// Ids of the first `k` patients in `ranking`.
pub fn flag_top_k(ranking: &[PatientUncertainty], k: usize) -> Result<Vec<String>> {
    if k > ranking.len() {
        return Err(Error::FlagCountTooLarge { k, n: ranking.len() });
    }
    Ok(ranking[..k].iter().map(|p| p.patient_id.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{LabelInterval, ScoreVector, SeverityLabel};

    fn rec(id: &str) -> GradingRecord {
        GradingRecord::new(ScoreVector::new(vec![0.25; 4]).unwrap(), SeverityLabel(0), id).unwrap()
    }

    fn iv(lo: usize, hi: usize) -> PredictionSet {
        LabelInterval::new(lo, hi).into()
    }

    #[test]
    fn ranks_by_mean_size() {
        let records = [rec("B"), rec("A"), rec("A")];
        let sets = [iv(1, 1), iv(0, 3), iv(0, 3)];
        let ranking = patient_uncertainty(&sets, &records).unwrap();
        assert_eq!(ranking[0].patient_id, "A");
        assert_eq!(ranking[0].mean_set_size, 4.0);
        assert_eq!(ranking[0].n_gradings, 2);
        assert_eq!(ranking[1].mean_set_size, 1.0);
    }

    #[test]
    fn single_and_tied() {
        let ranking = patient_uncertainty(&[iv(2, 2)], &[rec("X")]).unwrap();
        assert_eq!(ranking[0].mean_set_size, 1.0);
        let ranking = patient_uncertainty(&[iv(0, 1), iv(2, 3)], &[rec("Z"), rec("Y")]).unwrap();
        assert_eq!(ranking[0].patient_id, "Y");
        assert_eq!(ranking[1].patient_id, "Z");
    }

    #[test]
    fn top_k() {
        let records = [rec("A"), rec("B"), rec("C")];
        let sets = [iv(0, 0), iv(0, 2), iv(0, 1)];
        let ranking = patient_uncertainty(&sets, &records).unwrap();
        assert!(flag_top_k(&ranking, 0).unwrap().is_empty());
        assert_eq!(flag_top_k(&ranking, 2).unwrap(), ["B", "C"]);
        assert_eq!(flag_top_k(&ranking, 3).unwrap().len(), 3);
        assert!(matches!(flag_top_k(&ranking, 4), Err(Error::FlagCountTooLarge { k: 4, n: 3 })));
    }
}
