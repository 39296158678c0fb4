//! Repeated random-split evaluation.
//!
//! Each trial splits the records by patient, calibrates every requested
//! method at every error rate on the calibration side, and scores the sets
//! it predicts on the evaluation side. All methods share each trial's split.
//! Trials run in parallel; trial `t` uses seed [`trial_seed`]`(seed, t)` and
//! results are reduced in trial order, so output does not depend on the
//! thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::metrics::{Stratification, StratumKey, StratumStats};
use crate::calibrate::{conformal_quantile, CalibratedPredictor};
use crate::data::split_indices;
use crate::error::{Error, Result};
use crate::methods::MethodKind;
use crate::types::{default_alpha_grid, Alpha, GradingRecord, Lambda};

/// SplitMix64 finalizer applied to `master ^ trial`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut z = (master ^ trial as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub methods: Vec<MethodKind>,
    pub alpha_grid: Vec<Alpha>,
    pub n_trials: usize,
    pub cal_fraction: f64,
    pub seed: u64,
    pub strata: Vec<Stratification>,
}

impl Default for TrialConfig {
    /// Three methods, the default alpha grid, 100 trials, 5% of patients
    /// for calibration, no stratification.
    fn default() -> Self {
        TrialConfig {
            methods: MethodKind::CALIBRATABLE.to_vec(),
            alpha_grid: default_alpha_grid(),
            n_trials: 100,
            cal_fraction: 0.05,
            seed: 0,
            strata: Vec::new(),
        }
    }
}

/// Mean, population standard deviation and range of per-trial values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// # Panics
    /// On an empty slice.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "summary of no values");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Summary {
            mean: mean.clamp(min, max),
            std: var.sqrt(),
            min,
            max,
        }
    }
}

/// One trial of one (method, alpha) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub lambda_hat: Lambda,
    pub n_cal: usize,
    pub n_eval: usize,
    pub coverage: f64,
    pub mean_size: f64,
    pub strata: BTreeMap<StratumKey, StratumStats>,
}

/// Aggregate of one stratum over the trials in which it was non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumSummary {
    pub coverage: Summary,
    pub set_size: Summary,
    /// Records in this stratum summed over all trials.
    pub count: usize,
    /// Trials in which the stratum had at least one record.
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub method: MethodKind,
    pub alpha: Alpha,
    pub trials: Vec<TrialOutcome>,
    pub coverage: Summary,
    pub set_size: Summary,
    pub strata: BTreeMap<StratumKey, StratumSummary>,
}

impl TrialReport {
    fn from_trials(method: MethodKind, alpha: Alpha, trials: Vec<TrialOutcome>) -> Self {
        let coverage = Summary::of(&trials.iter().map(|t| t.coverage).collect::<Vec<_>>());
        let set_size = Summary::of(&trials.iter().map(|t| t.mean_size).collect::<Vec<_>>());
        let mut per_key: BTreeMap<&StratumKey, Vec<&StratumStats>> = BTreeMap::new();
        for t in &trials {
            for (key, stats) in &t.strata {
                per_key.entry(key).or_default().push(stats);
            }
        }
        let strata = per_key
            .into_iter()
            .map(|(key, cells)| {
                let cov: Vec<f64> = cells.iter().map(|s| s.coverage()).collect();
                let size: Vec<f64> = cells.iter().map(|s| s.mean_size()).collect();
                let summary = StratumSummary {
                    coverage: Summary::of(&cov),
                    set_size: Summary::of(&size),
                    count: cells.iter().map(|s| s.count).sum(),
                    trials: cells.len(),
                };
                (key.clone(), summary)
            })
            .collect();
        TrialReport {
            method,
            alpha,
            coverage,
            set_size,
            strata,
            trials,
        }
    }

    /// Evaluated records summed over trials.
    pub fn total_evaluated(&self) -> usize {
        self.trials.iter().map(|t| t.n_eval).sum()
    }

    /// Binomial standard error of the trial-mean coverage, driven by the
    /// calibration sample: `sqrt(alpha (1 - alpha) / n_cal) / sqrt(trials)`.
    pub fn coverage_standard_error(&self) -> f64 {
        let a = self.alpha.value();
        let n_cal = self.trials.iter().map(|t| t.n_cal).sum::<usize>() as f64 / self.trials.len() as f64;
        (a * (1.0 - a) / n_cal).sqrt() / (self.trials.len() as f64).sqrt()
    }

    /// Trial-mean coverage is at least `1 - alpha - 3 SE`.
    pub fn meets_coverage_guardrail(&self) -> bool {
        self.coverage.mean >= 1.0 - self.alpha.value() - 3.0 * self.coverage_standard_error()
    }
}

/// Reports for every (alpha, method) pair, alpha-major in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub config: TrialConfig,
    pub reports: Vec<TrialReport>,
}

impl Evaluation {
    pub fn get(&self, method: MethodKind, alpha: Alpha) -> Option<&TrialReport> {
        self.reports.iter().find(|r| r.method == method && r.alpha == alpha)
    }
}

/// Stratum keys resolved once per run: record-dependent cells per record,
/// plus a block of set-size cells.
struct StrataLayout {
    keys: Vec<StratumKey>,
    record_cells: Vec<Vec<usize>>,
    size_offset: Option<usize>,
}

impl StrataLayout {
    fn new(records: &[GradingRecord], strata: &[Stratification], k: usize) -> Result<Self> {
        let mut keys = Vec::new();
        let mut ids: BTreeMap<StratumKey, usize> = BTreeMap::new();
        let mut record_cells = vec![Vec::new(); records.len()];
        let mut size_offset = None;
        for s in strata {
            if *s == Stratification::SetSize {
                if size_offset.is_none() {
                    size_offset = Some(keys.len());
                    keys.extend((1..=k).map(StratumKey::SetSize));
                }
                continue;
            }
            for (r, cells) in records.iter().zip(&mut record_cells) {
                let key = s.record_key(r)?.expect("record-dependent stratification");
                let id = *ids.entry(key.clone()).or_insert_with(|| {
                    keys.push(key);
                    keys.len() - 1
                });
                cells.push(id);
            }
        }
        Ok(StrataLayout {
            keys,
            record_cells,
            size_offset,
        })
    }
}

// Outcomes of one trial, indexed [method][alpha].
fn run_one(
    records: &[GradingRecord],
    layout: &StrataLayout,
    cfg: &TrialConfig,
    trial: usize,
) -> Result<Vec<Vec<TrialOutcome>>> {
    let seed = trial_seed(cfg.seed, trial);
    let (cal_idx, eval_idx) = split_indices(records, cfg.cal_fraction, seed)?;
    if cal_idx.is_empty() {
        return Err(Error::EmptyCalibrationSplit { trial, seed });
    }
    if eval_idx.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = records[0].k();

    cfg.methods
        .iter()
        .map(|&method| {
            let scores = cal_idx
                .iter()
                .map(|&i| method.score(&records[i].scores, records[i].label))
                .collect::<Result<Vec<f64>>>()?;
            cfg.alpha_grid
                .iter()
                .map(|&alpha| {
                    let predictor = CalibratedPredictor {
                        method,
                        lambda_hat: conformal_quantile(&scores, alpha)?,
                        alpha,
                        n_cal: scores.len(),
                        k,
                    };
                    let mut overall = StratumStats::default();
                    let mut cells = vec![StratumStats::default(); layout.keys.len()];
                    for &i in &eval_idx {
                        let r = &records[i];
                        let set = predictor.predict(&r.scores)?;
                        overall.add(&set, r.label);
                        for &c in &layout.record_cells[i] {
                            cells[c].add(&set, r.label);
                        }
                        if let Some(offset) = layout.size_offset {
                            cells[offset + set.len() - 1].add(&set, r.label);
                        }
                    }
                    let strata = layout
                        .keys
                        .iter()
                        .zip(cells)
                        .filter(|(_, c)| c.count > 0)
                        .map(|(key, c)| (key.clone(), c))
                        .collect();
                    Ok(TrialOutcome {
                        trial,
                        seed,
                        lambda_hat: predictor.lambda_hat,
                        n_cal: scores.len(),
                        n_eval: overall.count,
                        coverage: overall.coverage(),
                        mean_size: overall.mean_size(),
                        strata,
                    })
                })
                .collect()
        })
        .collect()
}

/// Runs `cfg.n_trials` random patient-level splits over `records`.
pub fn run_trials(records: &[GradingRecord], cfg: &TrialConfig) -> Result<Evaluation> {
    if records.is_empty() || cfg.n_trials == 0 || cfg.methods.is_empty() || cfg.alpha_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(cfg.cal_fraction > 0.0 && cfg.cal_fraction < 1.0) {
        return Err(Error::InvalidFraction(cfg.cal_fraction));
    }
    let k = records[0].k();
    if let Some(r) = records.iter().find(|r| r.k() != k) {
        return Err(Error::ClassCountMismatch {
            expected: k,
            found: r.k(),
        });
    }
    if cfg.methods.contains(&MethodKind::OrdinalApsExact) {
        return Err(Error::ExactNotCalibratable);
    }

    let layout = StrataLayout::new(records, &cfg.strata, k)?;
    let per_trial: Vec<Vec<Vec<TrialOutcome>>> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| run_one(records, &layout, cfg, t))
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(cfg.alpha_grid.len() * cfg.methods.len());
    for (a, &alpha) in cfg.alpha_grid.iter().enumerate() {
        for (m, &method) in cfg.methods.iter().enumerate() {
            let outcomes = per_trial.iter().map(|t| t[m][a].clone()).collect();
            reports.push(TrialReport::from_trials(method, alpha, outcomes));
        }
    }
    Ok(Evaluation {
        config: cfg.clone(),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticSpec};
    use crate::types::{ScoreVector, SeverityLabel};

    #[test]
    fn summary_population_std() {
        let s = Summary::of(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
        assert_eq!((s.min, s.max), (1.0, 3.0));
    }

    #[test]
    fn seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|t| trial_seed(1, t)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn smallest_split() {
        let f = ScoreVector::new(vec![0.7, 0.3]).unwrap();
        let records = vec![
            GradingRecord::new(f.clone(), SeverityLabel(0), "A").unwrap(),
            GradingRecord::new(f.clone(), SeverityLabel(1), "A").unwrap(),
            GradingRecord::new(f, SeverityLabel(0), "B").unwrap(),
        ];
        let cfg = TrialConfig {
            methods: vec![MethodKind::Lac],
            alpha_grid: vec![Alpha::new(0.5).unwrap()],
            n_trials: 1,
            cal_fraction: 0.5,
            ..TrialConfig::default()
        };
        let ev = run_trials(&records, &cfg).unwrap();
        let t = &ev.reports[0].trials[0];
        assert_eq!(t.n_cal + t.n_eval, 3);
        assert!(t.n_cal == 1 || t.n_cal == 2);
    }

    #[test]
    fn reproducible_and_guarded() {
        let data = generate_synthetic(&SyntheticSpec::benchmark(60, 12, 5)).unwrap();
        let cfg = TrialConfig {
            n_trials: 10,
            cal_fraction: 0.3,
            seed: 17,
            strata: vec![Stratification::TrueClass],
            ..TrialConfig::default()
        };
        let a = run_trials(data.dataset.records(), &cfg).unwrap();
        let b = run_trials(data.dataset.records(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reports.len(), 15);
        for r in &a.reports {
            assert!(r.trials.iter().all(|t| (0.0..=1.0).contains(&t.coverage)));
            assert!(r.coverage.min <= r.coverage.mean && r.coverage.mean <= r.coverage.max);
            assert!(r.meets_coverage_guardrail(), "{} {}", r.method, r.alpha);
            let counted: usize = r.strata.values().map(|s| s.count).sum();
            assert_eq!(counted, r.total_evaluated());
        }
    }

    #[test]
    fn rejects_exact_method() {
        let data = generate_synthetic(&SyntheticSpec::benchmark(4, 2, 5)).unwrap();
        let cfg = TrialConfig {
            methods: vec![MethodKind::OrdinalApsExact],
            n_trials: 1,
            cal_fraction: 0.5,
            ..TrialConfig::default()
        };
        assert!(matches!(
            run_trials(data.dataset.records(), &cfg),
            Err(Error::ExactNotCalibratable)
        ));
    }
}
