//! Ordinal CDF sets: the argmax's cumulative span `[F(y^-1), F(y^)]` is
//! widened by `lambda` on each side in probability space, and every label
//! whose own span it reaches is included.

use crate::types::{argmax_label, LabelInterval, Lambda, ScoreVector, SeverityLabel};

fn score_with(cdf: &[f64], top: usize, y: usize) -> f64 {
    let before = |i: usize| if i == 0 { 0.0 } else { cdf[i - 1] };
    let below = before(top) - before(y);
    let above = cdf[y] - cdf[top];
    below.max(above).max(0.0)
}

/// `max(F(y^ - 1) - F(y - 1), F(y) - F(y^), 0)` with `F(-1) = 0`.
pub fn cdf_score(f: &ScoreVector, y: SeverityLabel) -> f64 {
    score_with(&f.cumulative(), argmax_label(f).0, y.0)
}

/// `{ y : cdf_score(f, y) <= lam }`, always an interval around the argmax.
pub fn cdf_interval(f: &ScoreVector, lam: Lambda) -> LabelInterval {
    if lam.is_full() {
        return LabelInterval::full(f.k());
    }
    let cdf = f.cumulative();
    let top = argmax_label(f).0;
    let admitted = |y: usize| lam.admits(score_with(&cdf, top, y));
    let lo = (0..top).find(|&y| admitted(y)).unwrap_or(top);
    let hi = (top + 1..f.k()).rev().find(|&y| admitted(y)).unwrap_or(top);
    LabelInterval::new(lo, hi)
}
