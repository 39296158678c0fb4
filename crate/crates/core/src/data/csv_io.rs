//! Comma-separated grading files.
//!
//! Header: `patient_id,label,p0,...,p{K-1}` followed by any number of group
//! columns (`disc_level`, `task`, ...). An empty group cell means the record
//! carries no value for that tag.

use std::path::{Path, PathBuf};

use super::Dataset;
use crate::error::{Error, Result};
use crate::types::{GradingRecord, ScoreVector, SeverityLabel};
use crate::util::{sig17, write_atomic};

fn class_count(path: &Path, header: &csv::StringRecord) -> Result<usize> {
    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if header.get(0) != Some("patient_id") || header.get(1) != Some("label") {
        return Err(format_err("header must start with 'patient_id,label'".into()));
    }
    let k = header
        .iter()
        .skip(2)
        .enumerate()
        .take_while(|(i, name)| *name == format!("p{i}"))
        .count();
    if k < 2 {
        return Err(format_err(format!(
            "header needs probability columns p0..p{{K-1}} with K >= 2, found {k}"
        )));
    }
    Ok(k)
}

/// Reads a grading file. Probability rows are renormalized; every row error
/// reports its line number.
pub fn load_records(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let k = class_count(path, &header)?;
    let group_names: Vec<String> = header.iter().skip(2 + k).map(str::to_string).collect();

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(0, |p| p.line());
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let patient_id = row.get(0).unwrap_or("");
        if patient_id.is_empty() {
            return Err(parse_err("missing patient_id".into()));
        }
        let label: usize = row[1]
            .parse()
            .map_err(|_| parse_err(format!("bad label '{}'", &row[1])))?;
        let probs = (0..k)
            .map(|j| {
                let cell = &row[2 + j];
                cell.parse::<f64>()
                    .map_err(|_| parse_err(format!("bad probability '{cell}' in column p{j}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let scores = ScoreVector::new(probs).map_err(|e| parse_err(e.to_string()))?;
        let mut record = GradingRecord::new(scores, SeverityLabel(label), patient_id)
            .map_err(|e| parse_err(e.to_string()))?;
        for (name, value) in group_names.iter().zip(row.iter().skip(2 + k)) {
            if !value.is_empty() {
                record.groups.insert(name.clone(), value.to_string());
            }
        }
        records.push(record);
    }
    Dataset::new(k, records, format!("file:{}", path.display()))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        },
        _ => {
            let line = e.position().map_or(0, |p| p.line());
            Error::Parse {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        }
    }
}

fn to_bytes(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    writer
        .into_inner()
        .map_err(|e| Error::Csv(csv::Error::from(e.into_error())))
}

/// Writes a dataset in the format read by [`load_records`]. Probabilities
/// carry 17 significant digits so they reload bit-for-bit.
pub fn save_records(ds: &Dataset, path: &Path) -> Result<()> {
    let tags: Vec<&str> = ds.group_tags().into_iter().collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["patient_id".to_string(), "label".to_string()];
    header.extend((0..ds.k()).map(|j| format!("p{j}")));
    header.extend(tags.iter().map(|t| t.to_string()));
    w.write_record(&header)?;
    for r in ds.records() {
        let mut row = vec![r.patient_id.clone(), r.label.to_string()];
        row.extend(r.scores.probs().iter().map(|&p| sig17(p)));
        row.extend(tags.iter().map(|t| r.groups.get(*t).cloned().unwrap_or_default()));
        w.write_record(&row)?;
    }
    write_atomic(path, &to_bytes(w)?)
}

/// Sidecar path for hidden true conditionals: `data.csv` -> `data.truth.csv`.
pub fn truth_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.truth.csv"))
}

/// Writes one row per record: `row,patient_id,pi0..pi{K-1}`.
pub fn save_truth(ds: &Dataset, truth: &[Vec<f64>], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["row".to_string(), "patient_id".to_string()];
    header.extend((0..ds.k()).map(|j| format!("pi{j}")));
    w.write_record(&header)?;
    for (i, (r, pi)) in ds.records().iter().zip(truth).enumerate() {
        let mut row = vec![i.to_string(), r.patient_id.clone()];
        row.extend(pi.iter().map(|&p| sig17(p)));
        w.write_record(&row)?;
    }
    write_atomic(path, &to_bytes(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_row_with_groups() {
        let f = write_tmp(
            "patient_id,label,p0,p1,p2,p3,disc_level,task\nP001,2,0.05,0.15,0.60,0.20,L4-L5,central\n",
        );
        let ds = load_records(f.path()).unwrap();
        assert_eq!(ds.k(), 4);
        let r = &ds.records()[0];
        assert_eq!(r.label, SeverityLabel(2));
        assert_eq!(r.patient_id, "P001");
        assert_eq!(r.scores.probs(), &[0.05, 0.15, 0.60, 0.20]);
        assert_eq!(r.groups["disc_level"], "L4-L5");
        assert_eq!(r.groups["task"], "central");
    }

    fn expect_line(contents: &str, want: u64) -> String {
        let f = write_tmp(contents);
        match load_records(f.path()) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, want, "{message}");
                message
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn row_errors_name_line() {
        let head = "patient_id,label,p0,p1,p2,p3\nP1,0,0.25,0.25,0.25,0.25\n";
        let msg = expect_line(&format!("{head}P2,1,0.2,0.2,0.3,0.2\n"), 3);
        assert!(msg.contains("sum"), "{msg}");
        expect_line(&format!("{head}P2,1,-0.1,0.5,0.3,0.3\n"), 3);
        expect_line(&format!("{head}P2,4,0.25,0.25,0.25,0.25\n"), 3);
        expect_line(&format!("{head}P3,1,0.25,0.25,0.25,0.25\n,1,0.25,0.25,0.25,0.25\n"), 4);
    }

    #[test]
    fn rejects_bad_header() {
        let f = write_tmp("id,label,p0,p1\nP1,0,0.5,0.5\n");
        assert!(matches!(load_records(f.path()), Err(Error::Format { .. })));
        let f = write_tmp("patient_id,label,p0\nP1,0,1.0\n");
        assert!(matches!(load_records(f.path()), Err(Error::Format { .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_records(Path::new("/nonexistent/grades.csv")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn truth_sidecar_name() {
        assert_eq!(truth_path(Path::new("out/data.csv")), PathBuf::from("out/data.truth.csv"));
    }
}
