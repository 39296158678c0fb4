use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::metrics::StratumKey;
use super::trials::{Evaluation, Summary};
use crate::util::sig17;

/// Column header of [`report_csv`].
pub const CSV_HEADER: &str =
    "alpha,method,stratum_kind,stratum,coverage_mean,coverage_std,size_mean,size_std,count,trials";

/// One row per alpha x method x stratum. The `overall` row counts every
/// evaluated grading over all trials; stratum rows summarize only the trials
/// where the stratum was non-empty. Standard deviations are population
/// deviations over trials.
pub fn report_csv(ev: &Evaluation) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut row = |alpha: f64, method: &str, kind: &str, stratum: &str, cov: &Summary, size: &Summary, count: usize, trials: usize| {
        let _ = writeln!(
            out,
            "{},{method},{kind},{stratum},{},{},{},{},{count},{trials}",
            sig17(alpha),
            sig17(cov.mean),
            sig17(cov.std),
            sig17(size.mean),
            sig17(size.std),
        );
    };
    for r in &ev.reports {
        let a = r.alpha.value();
        let m = r.method.name();
        row(a, m, "overall", "all", &r.coverage, &r.set_size, r.total_evaluated(), r.trials.len());
        for (key, s) in &r.strata {
            row(a, m, key.kind(), &key.value(), &s.coverage, &s.set_size, s.count, s.trials);
        }
    }
    out
}

fn cell_coverage(s: &Summary) -> String {
    format!("{:.1}% ± {:.1}%", 100.0 * s.mean, 100.0 * s.std)
}

fn cell_size(s: &Summary) -> String {
    format!("{:.2} ± {:.2}", s.mean, s.std)
}

/// Aligned text table with one block per alpha: rows are group value x
/// method followed by `Total` rows, columns are coverage and set size
/// (mean ± population std over trials).
pub fn render_table(ev: &Evaluation, group: Option<&str>) -> String {
    let mut out = String::new();
    let tag = group.unwrap_or("group");
    let _ = writeln!(
        out,
        "# coverage and set size: mean ± population std over {} trials, calibration fraction {}",
        ev.config.n_trials, ev.config.cal_fraction
    );
    for &alpha in &ev.config.alpha_grid {
        let _ = writeln!(out, "\nalpha = {alpha}");
        let mut rows: Vec<[String; 4]> = vec![[
            tag.to_string(),
            "method".into(),
            "coverage".into(),
            "set size".into(),
        ]];
        let reports: Vec<_> = ev.reports.iter().filter(|r| r.alpha == alpha).collect();
        if let Some(tag) = group {
            let values: BTreeSet<String> = reports
                .iter()
                .flat_map(|r| r.strata.keys())
                .filter_map(|k| match k {
                    StratumKey::Group { tag: t, value } if t == tag => Some(value.clone()),
                    _ => None,
                })
                .collect();
            for value in &values {
                let key = StratumKey::Group {
                    tag: tag.to_string(),
                    value: value.clone(),
                };
                for r in &reports {
                    if let Some(s) = r.strata.get(&key) {
                        rows.push([
                            value.clone(),
                            r.method.display_name().into(),
                            cell_coverage(&s.coverage),
                            cell_size(&s.set_size),
                        ]);
                    }
                }
            }
        }
        for r in &reports {
            rows.push([
                "Total".into(),
                r.method.display_name().into(),
                cell_coverage(&r.coverage),
                cell_size(&r.set_size),
            ]);
        }
        let widths: Vec<usize> = (0..4)
            .map(|c| rows.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticSpec};
    use crate::eval::{run_trials, Stratification, TrialConfig};
    use crate::types::Alpha;

    fn evaluation() -> Evaluation {
        let data = generate_synthetic(&SyntheticSpec::benchmark(40, 12, 2)).unwrap();
        let cfg = TrialConfig {
            alpha_grid: vec![Alpha::new(0.1).unwrap()],
            n_trials: 5,
            cal_fraction: 0.3,
            strata: vec![Stratification::Group("disc_level".into())],
            ..TrialConfig::default()
        };
        run_trials(data.dataset.records(), &cfg).unwrap()
    }

    #[test]
    fn csv_shape() {
        let csv = report_csv(&evaluation());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        // 3 methods x (overall + 6 disc levels)
        assert_eq!(lines.len(), 1 + 3 * 7);
        assert!(lines[1].starts_with("0.10000000000000001,aps,overall,all,"));
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 10));
    }

    #[test]
    fn table_shape() {
        let table = render_table(&evaluation(), Some("disc_level"));
        assert!(table.contains("alpha = 0.1"));
        assert!(table.contains("L4-L5"));
        assert_eq!(table.lines().filter(|l| l.starts_with("Total")).count(), 3);
        assert!(table.lines().any(|l| l.starts_with("T12-L1") && l.contains("Ordinal CDF")));
    }
}
