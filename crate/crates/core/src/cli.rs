//! Command-line front end. Each subcommand parses its flags, calls into the
//! library and writes its artifacts; no statistics are computed here.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::calibrate::{calibrate, CalibratedPredictor};
use crate::data::{self, Dataset, Miscalibration, Sharing, SyntheticSpec};
use crate::error::Error;
use crate::eval::{self, Stratification, TrialConfig};
use crate::methods::MethodKind;
use crate::types::{default_alpha_grid, Alpha, PredictionSet};
use crate::util::{sig17, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "ordinal-conformal", version, about = "Conformal prediction sets for ordinal grading")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate one method on a dataset and save the predictor
    Calibrate(CalibrateArgs),
    /// Predict sets for every row of a dataset
    Predict(PredictArgs),
    /// Repeated random-split evaluation over an alpha grid
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset
    Simulate(SimulateArgs),
    /// Rank patients by mean set size and flag the top k
    Flag(FlagArgs),
    /// Two-sided Fisher exact test on a 2x2 table [[a, b], [c, d]]
    Fisher(FisherArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// aps, lac or cdf
    #[arg(long, default_value = "aps")]
    pub method: String,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Predictor file written by `calibrate`
    #[arg(long)]
    pub predictor: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// CSV report path; the text table goes next to it with a `.txt` extension
    #[arg(long)]
    pub output: PathBuf,
    /// aps, lac, cdf or all
    #[arg(long, default_value = "all")]
    pub method: String,
    /// Single error rate (shorthand for a one-entry grid)
    #[arg(long, conflicts_with = "alpha_grid")]
    pub alpha: Option<f64>,
    /// Comma-separated error rates [default: 0.2,0.15,0.1,0.05,0.01]
    #[arg(long, value_delimiter = ',')]
    pub alpha_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.05)]
    pub cal_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Group tag for the text table rows [default: disc_level when present]
    #[arg(long)]
    pub group: Option<String>,
    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub patients: usize,
    #[arg(long, default_value_t = 12)]
    pub gradings: usize,
    /// Comma-separated Dirichlet concentration, one entry per class
    #[arg(long, value_delimiter = ',', default_value = "2,1,1,0.5")]
    pub concentration: Vec<f64>,
    /// Emit scores proportional to pi^(1/t)
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Share one true conditional across all of a patient's gradings
    #[arg(long)]
    pub per_patient: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FlagArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub predictor: PathBuf,
    /// Number of patients to flag
    #[arg(long, default_value_t = 70)]
    pub k: usize,
    /// Ranking CSV
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli.command) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs a parsed subcommand, writing its files and returning what it would
/// print on stdout.
pub fn dispatch(cmd: &Command) -> Result<String, CliError> {
    match cmd {
        Command::Calibrate(a) => run_calibrate(a),
        Command::Predict(a) => run_predict(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Flag(a) => run_flag(a),
        Command::Fisher(a) => {
            let p = eval::fisher_exact_2x2(a.a, a.b, a.c, a.d)?;
            Ok(format!("{}\n", sig17(p)))
        }
    }
}

fn single_method(name: &str) -> Result<MethodKind, CliError> {
    let m: MethodKind = name.parse().map_err(CliError::Usage)?;
    if m == MethodKind::OrdinalApsExact {
        return Err(CliError::Usage("aps-exact cannot be calibrated".into()));
    }
    Ok(m)
}

fn methods(name: &str) -> Result<Vec<MethodKind>, CliError> {
    if name == "all" {
        Ok(MethodKind::CALIBRATABLE.to_vec())
    } else {
        Ok(vec![single_method(name)?])
    }
}

fn alpha(value: f64) -> Result<Alpha, CliError> {
    Alpha::new(value).map_err(|e| CliError::Usage(e.to_string()))
}

fn alpha_grid(values: &[f64]) -> Result<Vec<Alpha>, CliError> {
    let grid = values.iter().map(|&v| alpha(v)).collect::<Result<Vec<_>, _>>()?;
    for (i, a) in grid.iter().enumerate() {
        if grid[..i].contains(a) {
            return Err(CliError::Usage(format!("duplicate alpha {a} in grid")));
        }
    }
    if grid.is_empty() {
        return Err(CliError::Usage("empty alpha grid".into()));
    }
    Ok(grid)
}

fn load(path: &Path) -> Result<Dataset, CliError> {
    Ok(data::load_records(path)?)
}

fn members(set: &PredictionSet) -> String {
    set.labels().iter().map(|y| y.to_string()).collect::<Vec<_>>().join(";")
}

fn run_calibrate(a: &CalibrateArgs) -> Result<String, CliError> {
    let method = single_method(&a.method)?;
    let alpha = alpha(a.alpha)?;
    let ds = load(&a.input)?;
    let predictor = calibrate(method, ds.records(), alpha)?;
    predictor.save(&a.output)?;
    Ok(predictor.to_text())
}

fn run_predict(a: &PredictArgs) -> Result<String, CliError> {
    let predictor = CalibratedPredictor::load(&a.predictor)?;
    let ds = load(&a.input)?;
    let sets = predictor.predict_records(ds.records())?;
    let mut out = String::from("row,patient_id,label,lo,hi,members,size,covered\n");
    for (i, (r, set)) in ds.records().iter().zip(&sets).enumerate() {
        let labels = set.labels();
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            r.patient_id,
            r.label,
            labels[0],
            labels[labels.len() - 1],
            members(set),
            set.len(),
            u8::from(set.contains(r.label)),
        );
    }
    write_atomic(&a.output, out.as_bytes())?;
    let labels: Vec<_> = ds.records().iter().map(|r| r.label).collect();
    Ok(format!(
        "{} rows, coverage {}, mean set size {}\n",
        sets.len(),
        sig17(eval::empirical_coverage(&sets, &labels)?),
        sig17(eval::mean_set_size(&sets)?),
    ))
}

fn run_evaluate(a: &EvaluateArgs) -> Result<String, CliError> {
    let methods = methods(&a.method)?;
    let grid = match (&a.alpha, &a.alpha_grid) {
        (Some(v), _) => vec![alpha(*v)?],
        (None, Some(values)) => alpha_grid(values)?,
        (None, None) => default_alpha_grid(),
    };
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    if !(a.cal_fraction > 0.0 && a.cal_fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--cal-fraction must lie strictly between 0 and 1, got {}",
            a.cal_fraction
        )));
    }
    let ds = load(&a.input)?;
    // only tags that every record carries can partition the data
    let tags: Vec<String> = ds
        .group_tags()
        .into_iter()
        .filter(|t| ds.records().iter().all(|r| r.groups.contains_key(*t)))
        .map(str::to_string)
        .collect();
    let group = match &a.group {
        Some(g) if !tags.contains(g) => return Err(Error::UnknownGroupTag(g.clone()).into()),
        Some(g) => Some(g.clone()),
        None => tags.iter().find(|t| *t == "disc_level").cloned(),
    };
    let mut strata = vec![Stratification::TrueClass, Stratification::SetSize];
    strata.extend(tags.iter().cloned().map(Stratification::Group));
    let cfg = TrialConfig {
        methods,
        alpha_grid: grid,
        n_trials: a.trials,
        cal_fraction: a.cal_fraction,
        seed: a.seed,
        strata,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let ev = pool.install(|| eval::run_trials(ds.records(), &cfg))?;

    let table = eval::render_table(&ev, group.as_deref());
    write_atomic(&a.output, eval::report_csv(&ev).as_bytes())?;
    write_atomic(&a.output.with_extension("txt"), table.as_bytes())?;
    Ok(table)
}

fn run_simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let spec = SyntheticSpec {
        k: a.concentration.len(),
        n_patients: a.patients,
        gradings_per_patient: a.gradings,
        concentration: a.concentration.clone(),
        miscalibration: a.temperature.map_or(Miscalibration::None, Miscalibration::Temperature),
        sharing: if a.per_patient {
            Sharing::PerPatient
        } else {
            Sharing::PerGrading
        },
        seed: a.seed,
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let synth = data::generate_synthetic(&spec)?;
    let truth = data::truth_path(&a.output);
    data::save_records(&synth.dataset, &a.output)?;
    data::save_truth(&synth.dataset, &synth.truth, &truth)?;
    Ok(format!(
        "{} gradings from {} patients written to {} (truth: {})\n",
        synth.dataset.len(),
        spec.n_patients,
        a.output.display(),
        truth.display()
    ))
}

fn run_flag(a: &FlagArgs) -> Result<String, CliError> {
    let predictor = CalibratedPredictor::load(&a.predictor)?;
    let ds = load(&a.input)?;
    let sets = predictor.predict_records(ds.records())?;
    let ranking = eval::patient_uncertainty(&sets, ds.records())?;
    let flagged = eval::flag_top_k(&ranking, a.k)?;
    if let Some(path) = &a.output {
        let mut csv = String::from("rank,patient_id,mean_set_size,n_gradings,flagged\n");
        for (i, p) in ranking.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                i + 1,
                p.patient_id,
                sig17(p.mean_set_size),
                p.n_gradings,
                u8::from(i < a.k)
            );
        }
        write_atomic(path, csv.as_bytes())?;
    }
    Ok(flagged.iter().map(|id| format!("{id}\n")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("ordinal-conformal").chain(args.iter().copied()))
    }

    #[test]
    fn fisher_prints_p_value() {
        let cli = parse(&["fisher", "17", "53", "5", "65"]).unwrap();
        let out = dispatch(&cli.command).unwrap();
        let p: f64 = out.trim().parse().unwrap();
        assert!(p < 0.05);
    }

    #[test]
    fn grid_validation() {
        assert!(alpha_grid(&[0.1, 0.2]).is_ok());
        assert!(matches!(alpha_grid(&[0.1, 0.1]), Err(CliError::Usage(_))));
        assert!(matches!(alpha_grid(&[1.5]), Err(CliError::Usage(_))));
        assert!(matches!(methods("raps"), Err(CliError::Usage(_))));
        assert_eq!(methods("all").unwrap().len(), 3);
    }

    #[test]
    fn evaluate_defaults_follow_protocol() {
        let cli = parse(&["evaluate", "--input", "x.csv", "--output", "r.csv"]).unwrap();
        let Command::Evaluate(a) = cli.command else { panic!() };
        assert_eq!(a.trials, 100);
        assert_eq!(a.cal_fraction, 0.05);
        assert_eq!(a.method, "all");
        assert!(a.alpha_grid.is_none() && a.alpha.is_none());
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert!(parse(&["bogus"]).is_err());
        assert_eq!(run(["ordinal-conformal", "bogus"]), ExitCode::from(1));
    }

    #[test]
    fn missing_input_is_data_error() {
        let err = dispatch(
            &parse(&["calibrate", "--input", "/nonexistent.csv", "--output", "/tmp/never.txt"])
                .unwrap()
                .command,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
