//! Two-sided Fisher exact test for a 2x2 table.
//!
//! ```text
//!            outcome   no outcome
//! group 1       a          b
//! group 2       c          d
//! ```
//!
//! With all margins fixed, the top-left cell follows a hypergeometric law.
//! The p-value sums the probabilities of every table whose point probability
//! does not exceed that of the observed one.

use crate::error::{Error, Result};

/// Relative slack when comparing point probabilities.
const TIE_SLACK: f64 = 1e-12;

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

pub fn fisher_exact_2x2(a: u64, b: u64, c: u64, d: u64) -> Result<f64> {
    let n = a + b + c + d;
    if n == 0 {
        return Err(Error::EmptyTable);
    }
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;
    let lf = ln_factorials(n);
    let ln_choose = |n: u64, k: u64| lf[n as usize] - lf[k as usize] - lf[(n - k) as usize];
    let ln_p = |x: u64| ln_choose(row1, x) + ln_choose(row2, col1 - x) - ln_choose(n, col1);

    let observed = ln_p(a);
    let lo = col1.saturating_sub(row2);
    let hi = row1.min(col1);
    let threshold = observed + TIE_SLACK;
    let p: f64 = (lo..=hi)
        .map(ln_p)
        .filter(|&lp| lp <= threshold)
        .map(f64::exp)
        .sum();
    Ok(p.min(1.0))
}
