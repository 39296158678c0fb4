#![allow(dead_code)]

use ordinal_conformal::{Lambda, MethodKind, PredictionSet, ScoreVector, SeverityLabel};
use rand::Rng;

/// Random probability vector. A third of the draws are quantized to
/// multiples of 1/8 so ties between labels and exact-boundary masses show up.
pub fn random_scores<R: Rng>(rng: &mut R, k: usize) -> ScoreVector {
    let mode = rng.random_range(0..3);
    let w: Vec<f64> = (0..k)
        .map(|_| match mode {
            0 => rng.random::<f64>(),
            1 => rng.random::<f64>().powi(4),
            _ => rng.random_range(0..4) as f64,
        })
        .collect();
    if w.iter().sum::<f64>() == 0.0 {
        let mut w = w;
        w[rng.random_range(0..k)] = 1.0;
        return ScoreVector::from_weights(w).unwrap();
    }
    ScoreVector::from_weights(w).unwrap()
}

/// Unimodal vector: strictly increasing up to a random mode, then strictly
/// decreasing.
pub fn random_unimodal<R: Rng>(rng: &mut R, k: usize) -> ScoreVector {
    let mode = rng.random_range(0..k);
    let mut w = vec![0.0; k];
    w[mode] = 1.0;
    for y in (0..mode).rev() {
        w[y] = w[y + 1] * rng.random_range(0.05..0.99);
    }
    for y in mode + 1..k {
        w[y] = w[y - 1] * rng.random_range(0.05..0.99);
    }
    ScoreVector::from_weights(w).unwrap()
}

/// A threshold that is either uniform on [0, 1] or exactly one of the
/// vector's scores under `method`.
pub fn random_lambda<R: Rng>(rng: &mut R, f: &ScoreVector, method: MethodKind) -> Lambda {
    if rng.random_bool(0.5) {
        Lambda::Value(rng.random::<f64>())
    } else {
        let y = SeverityLabel(rng.random_range(0..f.k()));
        Lambda::Value(method.score(f, y).unwrap())
    }
}

pub fn set_at(method: MethodKind, f: &ScoreVector, lam: Lambda) -> PredictionSet {
    method.set(f, lam)
}

/// Independent enumeration of every contiguous interval: keeps those with
/// mass >= lambda and picks the narrowest, then heaviest, then lowest.
pub fn exact_oracle(p: &[f64], lambda: f64) -> (usize, usize) {
    let k = p.len();
    let mut candidates = Vec::new();
    for l in 0..k {
        for u in l..k {
            let mass: f64 = p[l..=u].iter().sum();
            if mass >= lambda {
                candidates.push((u - l, mass, l, u));
            }
        }
    }
    if candidates.is_empty() {
        return (0, k - 1);
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
    (candidates[0].2, candidates[0].3)
}
