//! Prediction-set constructions and their conformal scores.
//!
//! Every calibratable method pairs a nested set family `T_lambda(f)` with a
//! score `s(f, y)`, the smallest `lambda` whose set contains `y`, so that
//! `y in T_lambda(f)  <=>  s(f, y) <= lambda`. Smaller scores mean more
//! typical labels, and a single calibration routine serves every method.

mod aps;
mod cdf;
mod lac;

use std::fmt;
use std::str::FromStr;

pub use aps::{aps_score, exact_interval, greedy_interval, greedy_trace, GreedyTrace};
pub use cdf::{cdf_interval, cdf_score};
pub use lac::{lac_score, lac_set};

use crate::error::{Error, Result};
use crate::types::{Lambda, PredictionSet, ScoreVector, SeverityLabel};

/// Which prediction-set construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    /// Greedy Ordinal APS: contiguous sets grown outward from the argmax.
    OrdinalApsGreedy,
    /// Minimum-width contiguous interval by exhaustive search. Not calibratable.
    OrdinalApsExact,
    /// Least ambiguous set-valued classifier: thresholds each class probability.
    Lac,
    /// Interval around the argmax inflated in cumulative-probability space.
    OrdinalCdf,
}

impl MethodKind {
    /// The three methods compared by the evaluation harness.
    pub const CALIBRATABLE: [MethodKind; 3] =
        [MethodKind::OrdinalApsGreedy, MethodKind::Lac, MethodKind::OrdinalCdf];

    /// Short machine name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            MethodKind::OrdinalApsGreedy => "aps",
            MethodKind::OrdinalApsExact => "aps-exact",
            MethodKind::Lac => "lac",
            MethodKind::OrdinalCdf => "cdf",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            MethodKind::OrdinalApsGreedy => "Ordinal APS",
            MethodKind::OrdinalApsExact => "Ordinal APS (exact)",
            MethodKind::Lac => "Naive LAC",
            MethodKind::OrdinalCdf => "Ordinal CDF",
        }
    }

    /// Conformal score of label `y` under this method.
    pub fn score(self, f: &ScoreVector, y: SeverityLabel) -> Result<f64> {
        match self {
            MethodKind::OrdinalApsGreedy => Ok(aps_score(f, y)),
            MethodKind::Lac => Ok(lac_score(f, y)),
            MethodKind::OrdinalCdf => Ok(cdf_score(f, y)),
            MethodKind::OrdinalApsExact => Err(Error::ExactNotCalibratable),
        }
    }

    /// The raw set at threshold `lam`. LAC sets may be empty here.
    pub fn set(self, f: &ScoreVector, lam: Lambda) -> PredictionSet {
        match self {
            MethodKind::OrdinalApsGreedy => greedy_interval(f, lam).into(),
            MethodKind::OrdinalApsExact => exact_interval(f, lam).into(),
            MethodKind::Lac => lac_set(f, lam).into(),
            MethodKind::OrdinalCdf => cdf_interval(f, lam).into(),
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aps" | "ordinal-aps" => Ok(MethodKind::OrdinalApsGreedy),
            "aps-exact" => Ok(MethodKind::OrdinalApsExact),
            "lac" => Ok(MethodKind::Lac),
            "cdf" | "ordinal-cdf" => Ok(MethodKind::OrdinalCdf),
            other => Err(format!("unknown method '{other}' (expected aps, lac or cdf)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in [
            MethodKind::OrdinalApsGreedy,
            MethodKind::OrdinalApsExact,
            MethodKind::Lac,
            MethodKind::OrdinalCdf,
        ] {
            assert_eq!(m.name().parse::<MethodKind>().unwrap(), m);
        }
        assert!("raps".parse::<MethodKind>().is_err());
    }

    #[test]
    fn exact_has_no_score() {
        let f = ScoreVector::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            MethodKind::OrdinalApsExact.score(&f, SeverityLabel(0)),
            Err(Error::ExactNotCalibratable)
        ));
    }
}
