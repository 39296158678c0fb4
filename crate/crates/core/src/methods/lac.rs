use crate::types::{LabelSubset, Lambda, ScoreVector, SeverityLabel};

/// `1 - f[y]`, so that a larger score means a less plausible label.
pub fn lac_score(f: &ScoreVector, y: SeverityLabel) -> f64 {
    1.0 - f.prob(y)
}

/// `{ y : 1 - f[y] <= lam }`. May be empty or non-contiguous.
pub fn lac_set(f: &ScoreVector, lam: Lambda) -> LabelSubset {
    LabelSubset::from_labels(
        (0..f.k()).filter(|&y| lam.admits(lac_score(f, SeverityLabel(y)))),
    )
}
