//! Ordinal adaptive prediction sets.
//!
//! The greedy construction starts from the argmax and repeatedly absorbs
//! the more probable of the two adjacent labels while the accumulated mass
//! is at most `lambda`. The running mass starts at the argmax's own
//! probability, so it always equals the mass of the current interval.

use crate::types::{argmax_label, LabelInterval, Lambda, ScoreVector, SeverityLabel};

/// Labels in greedy inclusion order with the interval mass accumulated
/// before each one joined.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    /// Inclusion order; `order[0]` is the argmax.
    pub order: Vec<SeverityLabel>,
    /// Indexed by label.
    pub cum_mass_before: Vec<f64>,
}

impl GreedyTrace {
    /// The set `{ y : cum_mass_before[y] <= lambda }`.
    pub fn interval(&self, lam: Lambda) -> LabelInterval {
        let mut lo = self.order[0];
        let mut hi = lo;
        for &y in &self.order {
            if !lam.admits(self.cum_mass_before[y.0]) {
                break;
            }
            lo = lo.min(y);
            hi = hi.max(y);
        }
        LabelInterval { lo, hi }
    }
}

/// Walks the greedy expansion, yielding `(label, mass before inclusion)`.
struct Expansion<'a> {
    probs: &'a [f64],
    lo: usize,
    hi: usize,
    mass: f64,
    seeded: bool,
}

impl<'a> Expansion<'a> {
    fn new(f: &'a ScoreVector) -> Self {
        let top = argmax_label(f).0;
        Expansion {
            probs: f.probs(),
            lo: top,
            hi: top,
            mass: f.probs()[top],
            seeded: false,
        }
    }
}

impl Iterator for Expansion<'_> {
    type Item = (SeverityLabel, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if !self.seeded {
            self.seeded = true;
            return Some((SeverityLabel(self.lo), 0.0));
        }
        let below = self.lo.checked_sub(1);
        let above = (self.hi + 1 < self.probs.len()).then_some(self.hi + 1);
        let y = match (below, above) {
            (None, None) => return None,
            (Some(l), None) => l,
            (None, Some(u)) => u,
            // ties expand downward
            (Some(l), Some(u)) => {
                if self.probs[u] > self.probs[l] {
                    u
                } else {
                    l
                }
            }
        };
        let before = self.mass;
        self.mass += self.probs[y];
        self.lo = self.lo.min(y);
        self.hi = self.hi.max(y);
        Some((SeverityLabel(y), before))
    }
}

/// Greedy Ordinal APS set at threshold `lam`. Always contains the argmax.
pub fn greedy_interval(f: &ScoreVector, lam: Lambda) -> LabelInterval {
    let Lambda::Value(limit) = lam else {
        return LabelInterval::full(f.k());
    };
    let mut steps = Expansion::new(f);
    let (top, _) = steps.next().expect("expansion always yields the argmax");
    let mut interval = LabelInterval::singleton(top);
    for (y, before) in steps {
        if before > limit {
            break;
        }
        interval.lo = interval.lo.min(y);
        interval.hi = interval.hi.max(y);
    }
    interval
}

/// Runs the greedy expansion to exhaustion.
pub fn greedy_trace(f: &ScoreVector) -> GreedyTrace {
    let mut order = Vec::with_capacity(f.k());
    let mut cum_mass_before = vec![0.0; f.k()];
    for (y, before) in Expansion::new(f) {
        order.push(y);
        cum_mass_before[y.0] = before;
    }
    GreedyTrace {
        order,
        cum_mass_before,
    }
}

/// Smallest `lambda` at which `y` enters the greedy set.
pub fn aps_score(f: &ScoreVector, y: SeverityLabel) -> f64 {
    Expansion::new(f)
        .find(|&(label, _)| label == y)
        .map(|(_, before)| before)
        .expect("greedy expansion covers every label")
}

/// Minimum-width contiguous interval with mass at least `lam`, found by
/// exhaustive search.
///
/// Width ties go to the larger mass, then to the lower start. If rounding
/// leaves every interval short of `lam` the full range is returned.
pub fn exact_interval(f: &ScoreVector, lam: Lambda) -> LabelInterval {
    let k = f.k();
    let Lambda::Value(target) = lam else {
        return LabelInterval::full(k);
    };
    let p = f.probs();
    let mut best: Option<(LabelInterval, f64)> = None;
    for lo in 0..k {
        let mut mass = 0.0;
        for (hi, &ph) in p.iter().enumerate().skip(lo) {
            mass += ph;
            if mass < target {
                continue;
            }
            let candidate = LabelInterval::new(lo, hi);
            let better = match best {
                None => true,
                Some((cur, cur_mass)) => {
                    candidate.width() < cur.width()
                        || (candidate.width() == cur.width() && mass > cur_mass)
                }
            };
            if better {
                best = Some((candidate, mass));
            }
            // wider intervals from this start cannot win
            break;
        }
    }
    best.map_or_else(|| LabelInterval::full(k), |(i, _)| i)
}
