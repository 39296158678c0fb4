//! Rank patients by mean prediction-set size, flag the most uncertain ones
//! and test whether flagging is associated with a hidden condition using
//! Fisher's exact test.

use std::collections::BTreeSet;

use ordinal_conformal::data::{generate_synthetic, split_by_patient, SyntheticSpec};
use ordinal_conformal::eval::{fisher_exact_2x2, flag_top_k, patient_uncertainty};
use ordinal_conformal::{calibrate, Alpha, MethodKind};

fn main() -> ordinal_conformal::Result<()> {
    let data = generate_synthetic(&SyntheticSpec::benchmark(300, 12, 21))?;
    let (cal, test) = split_by_patient(data.dataset.records(), 0.2, 4)?;
    let predictor = calibrate(MethodKind::OrdinalApsGreedy, &cal, Alpha::new(0.1)?)?;
    let sets = predictor.predict_records(&test)?;
    let ranking = patient_uncertainty(&sets, &test)?;

    println!("most uncertain patients:");
    for p in ranking.iter().take(5) {
        println!("  {} mean size {:.3} over {} gradings", p.patient_id, p.mean_set_size, p.n_gradings);
    }

    let k = ranking.len() / 4;
    let flagged: BTreeSet<String> = flag_top_k(&ranking, k)?.into_iter().collect();

    // Stand-in for a clinical finding: any grading at the top severity.
    let top = data.dataset.k() - 1;
    let condition: BTreeSet<&str> = test
        .iter()
        .filter(|r| r.label.0 == top)
        .map(|r| r.patient_id.as_str())
        .collect();

    let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
    for p in &ranking {
        match (flagged.contains(&p.patient_id), condition.contains(p.patient_id.as_str())) {
            (true, true) => a += 1,
            (true, false) => b += 1,
            (false, true) => c += 1,
            (false, false) => d += 1,
        }
    }
    println!("\n             condition  none");
    println!("flagged      {a:>9} {b:>5}");
    println!("not flagged  {c:>9} {d:>5}");
    println!("Fisher exact two-sided p = {:.3e}", fisher_exact_2x2(a, b, c, d)?);
    Ok(())
}
