//! On-disk artifacts of a run: estimate tables as TSV, metadata and the
//! beta covariance as JSON. Numbers are written with Rust's shortest
//! round-trip formatting, so identical runs produce byte-identical files.
//! If a run fails partway, every file it already wrote is removed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ndarray::Array2;
use serde_json::json;

use cpm_core::inference::FittedModel;
use cpm_core::LinkFamily;

/// Output directory that cleans up partial results unless committed.
pub struct OutputDir {
    dir: PathBuf,
    created: Vec<PathBuf>,
    committed: bool,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            created: Vec::new(),
            committed: false,
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?;
        self.created.push(path.clone());
        Ok(path)
    }

    /// Keep everything written so far.
    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if !self.committed {
            for path in &self.created {
                let _ = std::fs::remove_file(path);
            }
        }
    }
}

/// Alpha estimates table: one row per interior cut, non-decreasing alpha.
pub fn alpha_table(distinct: &[f64], alpha: &[f64], alpha_se: &[f64]) -> String {
    let mut out = String::from("y\talpha\talpha_se\n");
    for j in 0..alpha.len() {
        out.push_str(&format!("{}\t{}\t{}\n", distinct[j], alpha[j], alpha_se[j]));
    }
    out
}

/// Beta estimates table.
pub fn beta_table(names: &[String], beta: &[f64], se: &[f64]) -> String {
    let mut out = String::from("name\testimate\tse\n");
    for j in 0..beta.len() {
        out.push_str(&format!("{}\t{}\t{}\n", names[j], beta[j], se[j]));
    }
    out
}

pub fn beta_cov_json(cov: &Array2<f64>) -> serde_json::Value {
    let rows: Vec<Vec<f64>> = (0..cov.nrows())
        .map(|i| (0..cov.ncols()).map(|j| cov[[i, j]]).collect())
        .collect();
    json!(rows)
}

/// A model reconstructed from fit artifacts, enough for prediction.
pub struct LoadedModel {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub grid: Vec<f64>,
    pub link: LinkFamily,
    pub predictor_names: Vec<String>,
}

impl FittedModel for LoadedModel {
    fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    fn beta(&self) -> &[f64] {
        &self.beta
    }

    fn outcome_grid(&self) -> &[f64] {
        &self.grid
    }

    fn link(&self) -> LinkFamily {
        self.link
    }
}

fn parse_tsv(path: &Path, expect_cols: usize) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split('\t').map(|c| c.to_string()).collect();
        if cells.len() != expect_cols {
            bail!("{}: row {} has {} columns, expected {expect_cols}", path.display(), i, cells.len());
        }
        rows.push(cells);
    }
    Ok(rows)
}

/// Load a model from a fit output directory (`meta.json`, `alpha.tsv`,
/// `beta.tsv`).
pub fn load_model(dir: &Path) -> Result<LoadedModel> {
    let meta_text = std::fs::read_to_string(dir.join("meta.json"))
        .with_context(|| format!("reading {}", dir.join("meta.json").display()))?;
    let meta: serde_json::Value = serde_json::from_str(&meta_text).context("parsing meta.json")?;
    let link: LinkFamily = meta["link"]
        .as_str()
        .context("meta.json: missing link")?
        .parse()?;
    let y_max = meta["y_max"]
        .as_f64()
        .context("meta.json: missing y_max")?;

    let mut alpha = Vec::new();
    let mut grid = Vec::new();
    for row in parse_tsv(&dir.join("alpha.tsv"), 3)? {
        grid.push(row[0].parse::<f64>().context("alpha.tsv: bad y")?);
        alpha.push(row[1].parse::<f64>().context("alpha.tsv: bad alpha")?);
    }
    grid.push(y_max);

    let mut beta = Vec::new();
    let mut predictor_names = Vec::new();
    for row in parse_tsv(&dir.join("beta.tsv"), 3)? {
        predictor_names.push(row[0].clone());
        beta.push(row[1].parse::<f64>().context("beta.tsv: bad estimate")?);
    }

    Ok(LoadedModel {
        alpha,
        beta,
        grid,
        link,
        predictor_names,
    })
}
