//! Write a synthetic dataset and its true conditionals to CSV, read it back
//! and calibrate a predictor that is saved to and reloaded from disk.

use ordinal_conformal::data::{generate_synthetic, load_records, save_records, save_truth, truth_path, SyntheticSpec};
use ordinal_conformal::{calibrate, Alpha, CalibratedPredictor, MethodKind};

fn main() -> ordinal_conformal::Result<()> {
    let dir = std::env::temp_dir().join(format!("ordinal-conformal-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|source| ordinal_conformal::Error::Io { path: dir.clone(), source })?;
    let data_path = dir.join("gradings.csv");

    let data = generate_synthetic(&SyntheticSpec::benchmark(50, 6, 8))?;
    save_records(&data.dataset, &data_path)?;
    save_truth(&data.dataset, &data.truth, &truth_path(&data_path))?;

    let loaded = load_records(&data_path)?;
    assert_eq!(loaded.records(), data.dataset.records());
    println!("{} records, {} patients, tags {:?}", loaded.len(), loaded.patients().len(), loaded.group_tags());
    let head = std::fs::read_to_string(&data_path).unwrap_or_default();
    head.lines().take(3).for_each(|l| println!("  {l}"));

    let predictor = calibrate(MethodKind::OrdinalCdf, loaded.records(), Alpha::new(0.2)?)?;
    let model_path = dir.join("cdf.txt");
    predictor.save(&model_path)?;
    assert_eq!(CalibratedPredictor::load(&model_path)?, predictor);
    print!("\nsaved predictor:\n{}", predictor.to_text());

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
