//! Split-conformal calibration.
//!
//! Given calibration scores `s_1..s_n` and error rate `alpha`, the threshold
//! is the `k`-th smallest score with `k = ceil((n + 1)(1 - alpha))`, or the
//! full-set sentinel when `k > n`. Because every method's sets are nested and
//! each score is the smallest threshold covering its example, this order
//! statistic is exactly the smallest `lambda` covering at least `k`
//! calibration examples.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::methods::MethodKind;
use crate::types::{argmax_label, Alpha, GradingRecord, LabelSubset, Lambda, PredictionSet, ScoreVector};
use crate::util::{sig17, write_atomic};

/// `ceil((n + 1)(1 - alpha))`.
///
/// A relative slack of `1e-12` absorbs rounding in the product so that, for
/// example, `n = 9, alpha = 0.1` yields exactly 9.
pub fn conformal_rank(n: usize, alpha: Alpha) -> usize {
    let target = (n as f64 + 1.0) * (1.0 - alpha.value());
    (target - 1e-12 * target.max(1.0)).ceil().max(0.0) as usize
}

/// The conformal threshold for a set of calibration scores.
pub fn conformal_quantile(scores: &[f64], alpha: Alpha) -> Result<Lambda> {
    if scores.is_empty() {
        return Err(Error::EmptyCalibration);
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidLambda(bad));
    }
    let n = scores.len();
    let k = conformal_rank(n, alpha);
    if k > n {
        return Ok(Lambda::Full);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(Lambda::Value(sorted[k.max(1) - 1]))
}

/// A method together with its calibrated threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedPredictor {
    pub method: MethodKind,
    pub lambda_hat: Lambda,
    pub alpha: Alpha,
    pub n_cal: usize,
    /// Class count the predictor was calibrated on.
    pub k: usize,
}

/// Calibrates `method` on `cal` at error rate `alpha`.
pub fn calibrate(method: MethodKind, cal: &[GradingRecord], alpha: Alpha) -> Result<CalibratedPredictor> {
    if method == MethodKind::OrdinalApsExact {
        return Err(Error::ExactNotCalibratable);
    }
    let first = cal.first().ok_or(Error::EmptyCalibration)?;
    let k = first.k();
    let scores = cal
        .iter()
        .map(|r| {
            if r.k() != k {
                return Err(Error::ClassCountMismatch {
                    expected: k,
                    found: r.k(),
                });
            }
            method.score(&r.scores, r.label)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CalibratedPredictor {
        method,
        lambda_hat: conformal_quantile(&scores, alpha)?,
        alpha,
        n_cal: cal.len(),
        k,
    })
}

impl CalibratedPredictor {
    /// Prediction set for one score vector. Never empty: an empty LAC set
    /// is replaced by the argmax.
    pub fn predict(&self, f: &ScoreVector) -> Result<PredictionSet> {
        if f.k() != self.k {
            return Err(Error::ClassCountMismatch {
                expected: self.k,
                found: f.k(),
            });
        }
        let set = self.method.set(f, self.lambda_hat);
        Ok(match set {
            PredictionSet::Subset(s) if s.is_empty() => {
                LabelSubset::from_labels([argmax_label(f).index()]).into()
            }
            other => other,
        })
    }

    pub fn predict_records(&self, records: &[GradingRecord]) -> Result<Vec<PredictionSet>> {
        records.iter().map(|r| self.predict(&r.scores)).collect()
    }

    /// Text form: one `key=value` line per field in a fixed order.
    pub fn to_text(&self) -> String {
        let lambda = match self.lambda_hat {
            Lambda::Value(v) => sig17(v),
            Lambda::Full => "FULL".to_string(),
        };
        let mut out = String::new();
        let _ = writeln!(out, "method={}", self.method.name());
        let _ = writeln!(out, "lambda_hat={lambda}");
        let _ = writeln!(out, "alpha={}", sig17(self.alpha.value()));
        let _ = writeln!(out, "n_cal={}", self.n_cal);
        let _ = writeln!(out, "k={}", self.k);
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        const KEYS: [&str; 5] = ["method", "lambda_hat", "alpha", "n_cal", "k"];
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != KEYS.len() {
            return Err(format!("expected {} fields, found {}", KEYS.len(), lines.len()));
        }
        let mut values = Vec::with_capacity(KEYS.len());
        for (line, key) in lines.iter().zip(KEYS) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("malformed line '{line}'"))?;
            if k.trim() != key {
                return Err(format!("expected field '{key}', found '{}'", k.trim()));
            }
            values.push(v.trim());
        }
        let method: MethodKind = values[0].parse()?;
        let lambda_hat = match values[1] {
            "FULL" => Lambda::Full,
            v => {
                let x: f64 = v.parse().map_err(|_| format!("bad lambda_hat '{v}'"))?;
                if !x.is_finite() {
                    return Err(format!("bad lambda_hat '{v}'"));
                }
                Lambda::Value(x)
            }
        };
        let alpha = values[2]
            .parse::<f64>()
            .map_err(|_| format!("bad alpha '{}'", values[2]))
            .and_then(|a| Alpha::new(a).map_err(|e| e.to_string()))?;
        let n_cal = values[3]
            .parse()
            .map_err(|_| format!("bad n_cal '{}'", values[3]))?;
        let k: usize = values[4].parse().map_err(|_| format!("bad k '{}'", values[4]))?;
        if k < 2 {
            return Err(format!("k must be at least 2, got {k}"));
        }
        Ok(CalibratedPredictor {
            method,
            lambda_hat,
            alpha,
            n_cal,
            k,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_text(&text).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{LabelInterval, SeverityLabel};

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn sv(p: &[f64]) -> ScoreVector {
        ScoreVector::new(p.to_vec()).unwrap()
    }

    #[test]
    fn quantile_examples() {
        let scores: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        assert_eq!(conformal_quantile(&scores, alpha(0.1)).unwrap(), Lambda::Value(0.9));
        assert_eq!(
            conformal_quantile(&[0.3, 0.1, 0.5, 0.2], alpha(0.2)).unwrap(),
            Lambda::Value(0.5)
        );
        assert_eq!(conformal_quantile(&[0.3, 0.1, 0.5], alpha(0.1)).unwrap(), Lambda::Full);
        assert!(matches!(conformal_quantile(&[], alpha(0.1)), Err(Error::EmptyCalibration)));
    }

    #[test]
    fn rank_values() {
        assert_eq!(conformal_rank(9, alpha(0.1)), 9);
        assert_eq!(conformal_rank(4, alpha(0.2)), 4);
        assert_eq!(conformal_rank(3, alpha(0.05)), 4);
        assert_eq!(conformal_rank(99, alpha(0.1)), 90);
        assert_eq!(conformal_rank(1800, alpha(0.01)), 1783);
    }

    #[test]
    fn calibrate_aps_example() {
        // uniform over 10 classes: greedy order 0, 1, 2, ... with score 0.1 * y
        let f = ScoreVector::new(vec![0.1; 10]).unwrap();
        let cal: Vec<_> = [0, 0, 1, 2, 3, 4, 5, 6, 8]
            .iter()
            .map(|&y| GradingRecord::new(f.clone(), SeverityLabel(y), "p").unwrap())
            .collect();
        let p = calibrate(MethodKind::OrdinalApsGreedy, &cal, alpha(0.1)).unwrap();
        let top = crate::methods::aps_score(&f, SeverityLabel(8));
        assert!((top - 0.8).abs() < 1e-12);
        assert_eq!(p.lambda_hat, Lambda::Value(top));
        assert_eq!(p.n_cal, 9);
    }

    #[test]
    fn calibrate_lac_perfect_classifier() {
        let cal: Vec<_> = (0..20)
            .map(|i| GradingRecord::new(sv(&[0.0, 1.0, 0.0]), SeverityLabel(1), format!("p{i}")).unwrap())
            .collect();
        let p = calibrate(MethodKind::Lac, &cal, alpha(0.1)).unwrap();
        assert_eq!(p.lambda_hat, Lambda::Value(0.0));
    }

    #[test]
    fn calibrate_small_set_is_full() {
        let cal: Vec<_> = (0..3)
            .map(|i| GradingRecord::new(sv(&[0.5, 0.5]), SeverityLabel(0), format!("p{i}")).unwrap())
            .collect();
        let p = calibrate(MethodKind::OrdinalCdf, &cal, alpha(0.05)).unwrap();
        assert_eq!(p.lambda_hat, Lambda::Full);
    }

    #[test]
    fn calibrate_errors() {
        let a = GradingRecord::new(sv(&[0.5, 0.5]), SeverityLabel(0), "a").unwrap();
        let b = GradingRecord::new(sv(&[0.5, 0.25, 0.25]), SeverityLabel(0), "b").unwrap();
        assert!(matches!(
            calibrate(MethodKind::Lac, &[a.clone(), b], alpha(0.1)),
            Err(Error::ClassCountMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(calibrate(MethodKind::Lac, &[], alpha(0.1)), Err(Error::EmptyCalibration)));
        assert!(matches!(
            calibrate(MethodKind::OrdinalApsExact, &[a], alpha(0.1)),
            Err(Error::ExactNotCalibratable)
        ));
    }

    fn predictor(method: MethodKind, lambda_hat: Lambda) -> CalibratedPredictor {
        CalibratedPredictor {
            method,
            lambda_hat,
            alpha: alpha(0.1),
            n_cal: 100,
            k: 4,
        }
    }

    #[test]
    fn predict_examples() {
        let f = sv(&[0.1, 0.5, 0.3, 0.1]);
        let p = predictor(MethodKind::OrdinalApsGreedy, Lambda::Value(0.8));
        assert_eq!(p.predict(&f).unwrap(), LabelInterval::new(0, 2).into());
        for m in MethodKind::CALIBRATABLE {
            let set = predictor(m, Lambda::Full).predict(&f).unwrap();
            assert_eq!(set.len(), 4);
        }
        let p = predictor(MethodKind::Lac, Lambda::Value(0.55));
        let f = sv(&[0.45, 0.05, 0.45, 0.05]);
        assert_eq!(p.predict(&f).unwrap(), LabelSubset::from_labels([0, 2]).into());
    }

    #[test]
    fn predict_lac_never_empty() {
        let p = predictor(MethodKind::Lac, Lambda::Value(0.1));
        let f = sv(&[0.3, 0.2, 0.4, 0.1]);
        assert_eq!(p.predict(&f).unwrap(), LabelSubset::from_labels([2]).into());
    }

    #[test]
    fn predict_rejects_wrong_k() {
        let p = predictor(MethodKind::Lac, Lambda::Value(0.5));
        assert!(matches!(
            p.predict(&sv(&[0.5, 0.5])),
            Err(Error::ClassCountMismatch { expected: 4, found: 2 })
        ));
    }

    #[test]
    fn text_round_trip() {
        let p = CalibratedPredictor {
            method: MethodKind::OrdinalCdf,
            lambda_hat: Lambda::Value(0.1 + 0.2),
            alpha: alpha(0.15),
            n_cal: 321,
            k: 4,
        };
        let text = p.to_text();
        assert_eq!(
            text,
            "method=cdf\nlambda_hat=0.30000000000000004\nalpha=0.14999999999999999\nn_cal=321\nk=4\n"
        );
        assert_eq!(CalibratedPredictor::from_text(&text).unwrap(), p);
        let full = CalibratedPredictor {
            lambda_hat: Lambda::Full,
            ..p
        };
        assert_eq!(CalibratedPredictor::from_text(&full.to_text()).unwrap(), full);
        assert!(CalibratedPredictor::from_text("alpha=0.1\nmethod=aps\n").is_err());
    }
}
