//! CSV ingestion: pick the outcome and predictor columns by name, parse
//! numerically, and skip (while reporting) rows with missing or
//! non-numeric cells.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::{Array1, Array2};

use cpm_core::Dataset;

#[derive(Debug)]
pub struct IngestedData {
    pub data: Dataset,
    pub outcome_name: String,
    pub predictor_names: Vec<String>,
    /// 1-based data-row numbers that were rejected.
    pub skipped_rows: Vec<usize>,
}

fn resolve_column(headers: &[String], name: &str, path: &Path) -> Result<usize> {
    match headers.iter().position(|h| h == name) {
        Some(idx) => Ok(idx),
        None => bail!(
            "column `{name}` not found in {}; available columns: {}",
            path.display(),
            headers.join(", ")
        ),
    }
}

/// Read the named columns of a headered CSV file into a dataset.
/// `predictors` may be the single entry `all` to select every column other
/// than the outcome.
pub fn ingest_csv(path: &Path, outcome_col: &str, predictors: &[String]) -> Result<IngestedData> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .context("reading CSV header")?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let outcome_idx = resolve_column(&headers, outcome_col, path)?;
    let predictor_names: Vec<String> =
        if predictors.len() == 1 && predictors[0].eq_ignore_ascii_case("all") {
            headers
                .iter()
                .filter(|h| h.as_str() != outcome_col)
                .cloned()
                .collect()
        } else {
            predictors.to_vec()
        };
    let predictor_idx: Vec<usize> = predictor_names
        .iter()
        .map(|name| resolve_column(&headers, name, path))
        .collect::<Result<_>>()?;

    let mut y = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut skipped_rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("reading data row {}", i + 1))?;
        let parse = |idx: usize| -> Option<f64> {
            record
                .get(idx)
                .and_then(|cell| cell.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
        };
        let outcome = parse(outcome_idx);
        let mut predictors_ok = Vec::with_capacity(predictor_idx.len());
        let mut bad = outcome.is_none();
        for &idx in &predictor_idx {
            match parse(idx) {
                Some(v) => predictors_ok.push(v),
                None => {
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            skipped_rows.push(i + 1);
        } else {
            y.push(outcome.unwrap());
            rows.push(predictors_ok);
        }
    }

    if y.is_empty() {
        bail!("no usable rows in {}", path.display());
    }
    let n = y.len();
    let p = predictor_idx.len();
    let mut x = Array2::<f64>::zeros((n, p));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    let data = Dataset::new(Array1::from_vec(y), x)?;
    Ok(IngestedData {
        data,
        outcome_name: outcome_col.to_string(),
        predictor_names,
        skipped_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_csv(contents: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, contents).unwrap();
        (dir, path)
    }

    #[test]
    fn ingests_selected_columns() {
        let (_dir, path) = write_csv("y,a,b,c\n1.0,2,3,9\n2.0,4,5,9\n3.0,6,7,9\n");
        let got = ingest_csv(&path, "y", &["a".into(), "b".into()]).unwrap();
        assert_eq!(got.data.n(), 3);
        assert_eq!(got.data.p(), 2);
        assert_eq!(got.predictor_names, vec!["a", "b"]);
        assert!(got.skipped_rows.is_empty());
        assert_eq!(got.data.x[[2, 1]], 7.0);
    }

    #[test]
    fn all_selects_everything_but_the_outcome() {
        let (_dir, path) = write_csv("a,y,b\n1,10,2\n3,20,4\n");
        let got = ingest_csv(&path, "y", &["all".into()]).unwrap();
        assert_eq!(got.predictor_names, vec!["a", "b"]);
    }

    #[test]
    fn bad_rows_are_skipped_with_row_numbers() {
        let (_dir, path) = write_csv("y,a\n1.0,2\n,3\n2.5,oops\n3.5,4\n");
        let got = ingest_csv(&path, "y", &["a".into()]).unwrap();
        assert_eq!(got.data.n(), 2);
        assert_eq!(got.skipped_rows, vec![2, 3]);
    }

    #[test]
    fn missing_column_names_candidates() {
        let (_dir, path) = write_csv("y,alpha,beta\n1,2,3\n2,3,4\n");
        let err = ingest_csv(&path, "y", &["gamma".into()]).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("gamma"));
        assert!(msg.contains("alpha"));
        assert!(msg.contains("beta"));
    }

    #[test]
    fn zero_usable_rows_is_an_error() {
        let (_dir, path) = write_csv("y,a\nNaN,1\n,2\n");
        assert!(ingest_csv(&path, "y", &["a".into()]).is_err());
    }
}
