//! Synthetic grading data with a known conditional distribution.
//!
//! For each grading a true conditional `pi ~ Dirichlet(concentration)` is
//! drawn, the label is sampled from `pi`, and the emitted scores are either
//! `pi` itself (a perfectly calibrated model) or `pi^(1/t)` renormalized
//! (temperature miscalibration, which preserves the argmax).
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; a seed
//! reproduces the same dataset within this crate.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use super::Dataset;
use crate::error::{Error, Result};
use crate::types::{GradingRecord, ScoreVector, SeverityLabel};

/// Disc levels cycled through a patient's gradings.
pub const DISC_LEVELS: [&str; 6] = ["T12-L1", "L1-L2", "L2-L3", "L3-L4", "L4-L5", "L5-S1"];
/// Grading tasks, advanced after each pass over the disc levels.
pub const TASKS: [&str; 3] = ["central", "left-foraminal", "right-foraminal"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Miscalibration {
    None,
    /// Scores proportional to `pi^(1/t)`; `t > 1` flattens, `t < 1` sharpens.
    Temperature(f64),
}

/// Whether each grading draws its own conditional or a patient's gradings
/// share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sharing {
    #[default]
    PerGrading,
    PerPatient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub k: usize,
    pub n_patients: usize,
    pub gradings_per_patient: usize,
    pub concentration: Vec<f64>,
    pub miscalibration: Miscalibration,
    pub sharing: Sharing,
    pub seed: u64,
}

impl SyntheticSpec {
    /// Four classes, Dirichlet(2, 1, 1, 0.5), well calibrated.
    pub fn benchmark(n_patients: usize, gradings_per_patient: usize, seed: u64) -> Self {
        SyntheticSpec {
            k: 4,
            n_patients,
            gradings_per_patient,
            concentration: vec![2.0, 1.0, 1.0, 0.5],
            miscalibration: Miscalibration::None,
            sharing: Sharing::PerGrading,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.n_patients == 0 {
            return bad("n_patients must be positive".into());
        }
        if self.gradings_per_patient == 0 {
            return bad("gradings_per_patient must be positive".into());
        }
        if self.concentration.len() != self.k {
            return bad(format!(
                "{} concentration entries for k = {}",
                self.concentration.len(),
                self.k
            ));
        }
        if self.concentration.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return bad("concentration entries must be positive".into());
        }
        if let Miscalibration::Temperature(t) = self.miscalibration {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("temperature must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

/// A generated dataset plus the true conditional behind every record.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub truth: Vec<Vec<f64>>,
}

/// Applies a miscalibration to a true conditional.
pub(crate) fn miscalibrate(pi: &ScoreVector, m: Miscalibration) -> ScoreVector {
    match m {
        Miscalibration::None => pi.clone(),
        Miscalibration::Temperature(t) => {
            let w = pi.probs().iter().map(|p| p.powf(1.0 / t)).collect();
            ScoreVector::from_weights(w).expect("powers of a distribution keep a positive sum")
        }
    }
}

fn draw_dirichlet(gammas: &[Gamma<f64>], rng: &mut ChaCha8Rng) -> ScoreVector {
    loop {
        let w: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
        // all components can underflow to zero for tiny concentrations
        if let Ok(pi) = ScoreVector::from_weights(w) {
            return pi;
        }
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let gammas: Vec<Gamma<f64>> = spec
        .concentration
        .iter()
        .map(|&c| Gamma::new(c, 1.0).map_err(|e| Error::InvalidSpec(e.to_string())))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let width = spec.n_patients.to_string().len().max(4);

    let total = spec.n_patients * spec.gradings_per_patient;
    let mut records = Vec::with_capacity(total);
    let mut truth = Vec::with_capacity(total);
    for patient in 0..spec.n_patients {
        let patient_id = format!("P{:0width$}", patient + 1);
        let shared = (spec.sharing == Sharing::PerPatient).then(|| draw_dirichlet(&gammas, &mut rng));
        for j in 0..spec.gradings_per_patient {
            let pi = match &shared {
                Some(pi) => pi.clone(),
                None => draw_dirichlet(&gammas, &mut rng),
            };
            let label = WeightedIndex::new(pi.probs())
                .expect("a normalized distribution is a valid weight vector")
                .sample(&mut rng);
            let scores = miscalibrate(&pi, spec.miscalibration);
            let record = GradingRecord::new(scores, SeverityLabel(label), patient_id.clone())?
                .with_group("disc_level", DISC_LEVELS[j % DISC_LEVELS.len()])
                .with_group("task", TASKS[(j / DISC_LEVELS.len()) % TASKS.len()]);
            records.push(record);
            truth.push(pi.probs().to_vec());
        }
    }
    Ok(SyntheticData {
        dataset: Dataset::new(spec.k, records, format!("synthetic:seed={}", spec.seed))?,
        truth,
    })
}
