//! Split a synthetic cohort by patient, calibrate every method at alpha = 0.1
//! and report coverage and mean set size on the held-out patients.

use ordinal_conformal::data::{generate_synthetic, split_by_patient, SyntheticSpec};
use ordinal_conformal::eval::{empirical_coverage, mean_set_size};
use ordinal_conformal::{calibrate, Alpha, MethodKind};

fn main() -> ordinal_conformal::Result<()> {
    let data = generate_synthetic(&SyntheticSpec::benchmark(400, 12, 7))?;
    let (cal, test) = split_by_patient(data.dataset.records(), 0.25, 11)?;
    let alpha = Alpha::new(0.1)?;
    let labels: Vec<_> = test.iter().map(|r| r.label).collect();

    println!("{} calibration gradings, {} test gradings", cal.len(), test.len());
    for method in MethodKind::CALIBRATABLE {
        let predictor = calibrate(method, &cal, alpha)?;
        let sets = predictor.predict_records(&test)?;
        println!(
            "{:<12} lambda_hat={:<22} coverage={:.3} mean size={:.3}",
            method.display_name(),
            format!("{:?}", predictor.lambda_hat),
            empirical_coverage(&sets, &labels)?,
            mean_set_size(&sets)?,
        );
    }

    let aps = calibrate(MethodKind::OrdinalApsGreedy, &cal, alpha)?;
    let first = &test[0];
    println!(
        "\npatient {} (label {}) scores {:?} -> {:?}",
        first.patient_id,
        first.label.0,
        first.scores.probs(),
        aps.predict(&first.scores)?.labels().iter().map(|y| y.0).collect::<Vec<_>>()
    );
    Ok(())
}
