//! Implementations of the CLI subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use serde_json::json;

use cpm_bench::{
    enumerate_cells, fit_loglog_model, run_cell, run_grid, CellSpec, GridSpec, PredictorVar,
    ResponseVar, RunnerCmd,
};
use cpm_core::discretize::{bin_equal_quantile, choose_rounding, rounding_report, RoundingMode};
use cpm_core::divide::{fit_divide_combine, CombinedFit};
use cpm_core::inference::{
    conditional_distribution, conditional_mean, conditional_median, FittedModel,
};
use cpm_core::rng::{stream_rng, Stream};
use cpm_core::simulate::{simulate_dataset, AlphaTruth, Residual, ScenarioSpec, Transform};
use cpm_core::{fit_cpm, index_outcomes, CpmFit, Dataset, FitOptions, LinkFamily};
use ndarray::Array1;

use crate::artifacts::{alpha_table, beta_cov_json, beta_table, load_model, OutputDir};
use crate::ingest::ingest_csv;
use crate::{BenchArgs, CellArgs, DiscretizeArgs, FitArgs, PredictArgs, SimulateArgs};

/// Fitting strategy selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    Whole,
    DivideCombine,
    Bin,
    RoundDecimal,
    RoundSigdigit,
}

impl std::str::FromStr for Approach {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "whole" => Ok(Approach::Whole),
            "divide-combine" | "divide_combine" => Ok(Approach::DivideCombine),
            "bin" => Ok(Approach::Bin),
            "round-decimal" | "round_decimal" => Ok(Approach::RoundDecimal),
            "round-sigdigit" | "round_sigdigit" => Ok(Approach::RoundSigdigit),
            other => bail!(
                "unknown approach `{other}` (expected whole, divide-combine, bin, \
                 round-decimal, or round-sigdigit)"
            ),
        }
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::Whole => "whole",
            Approach::DivideCombine => "divide-combine",
            Approach::Bin => "bin",
            Approach::RoundDecimal => "round-decimal",
            Approach::RoundSigdigit => "round-sigdigit",
        })
    }
}

enum FitResult {
    Single(CpmFit),
    Combined(CombinedFit),
}

impl FitResult {
    fn model(&self) -> &dyn FittedModel {
        match self {
            FitResult::Single(f) => f,
            FitResult::Combined(f) => f,
        }
    }

    fn alpha_se(&self) -> Vec<f64> {
        match self {
            FitResult::Single(f) => f.alpha_se(),
            FitResult::Combined(f) => f.alpha_se(),
        }
    }

    fn beta_se(&self) -> Vec<f64> {
        match self {
            FitResult::Single(f) => f.beta_se(),
            FitResult::Combined(f) => f.beta_se(),
        }
    }

    fn beta_cov_json(&self) -> serde_json::Value {
        match self {
            FitResult::Single(f) => beta_cov_json(&f.beta_cov),
            FitResult::Combined(f) => beta_cov_json(&f.beta_cov),
        }
    }

    fn convergence_json(&self) -> serde_json::Value {
        match self {
            FitResult::Single(f) => json!({
                "converged": f.converged,
                "iterations": f.iterations,
                "max_score": f.diagnostics.max_score,
            }),
            FitResult::Combined(f) => json!({
                "converged": true,
                "subsets": f.subset_fits.iter().map(|s| json!({
                    "subset": s.subset,
                    "size": s.size,
                    "m": s.m,
                    "iterations": s.iterations,
                    "converged": s.converged,
                })).collect::<Vec<_>>(),
            }),
        }
    }
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad {what} entry `{s}`: {e}"))
        })
        .collect()
}

fn warn_skipped(skipped: &[usize]) {
    if skipped.is_empty() {
        return;
    }
    let shown: Vec<String> = skipped.iter().take(20).map(|r| r.to_string()).collect();
    let suffix = if skipped.len() > 20 { ", ..." } else { "" };
    eprintln!(
        "warning: skipped {} rows with missing or non-numeric cells (rows {}{suffix})",
        skipped.len(),
        shown.join(", ")
    );
}

pub fn cmd_fit(mut args: FitArgs) -> Result<()> {
    if let Some(cfg_path) = &args.config {
        let cfg = crate::config::ConfigFile::load(cfg_path)?;
        cfg.fill(&mut args.input, "input")?;
        cfg.fill(&mut args.outcome, "outcome")?;
        cfg.fill(&mut args.predictors, "predictors")?;
        cfg.fill(&mut args.link, "link")?;
        cfg.fill(&mut args.approach, "approach")?;
        cfg.fill(&mut args.subsets, "subsets")?;
        cfg.fill(&mut args.target, "target")?;
        cfg.fill(&mut args.seed, "seed")?;
        cfg.fill(&mut args.workers, "workers")?;
        cfg.fill(&mut args.score_tol, "score-tol")?;
        cfg.fill(&mut args.ll_tol, "ll-tol")?;
        cfg.fill(&mut args.max_iter, "max-iter")?;
        cfg.fill(&mut args.out, "out")?;
        cfg.fill(&mut args.predict_at, "predict-at")?;
        cfg.fill(&mut args.report_edges, "report-edges")?;
    }

    let input = args.input.context("--input is required")?;
    let outcome = args.outcome.context("--outcome is required")?;
    let predictors_raw = args.predictors.context("--predictors is required")?;
    let out_dir = args.out.context("--out is required")?;
    let link: LinkFamily = args.link.as_deref().unwrap_or("logit").parse()?;
    let approach: Approach = args
        .approach
        .as_deref()
        .unwrap_or("whole")
        .parse::<Approach>()?;
    let seed = args.seed.unwrap_or(0);
    let workers = args
        .workers
        .or_else(|| {
            std::env::var("CPM_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);

    let mut opts = FitOptions::default();
    if let Some(v) = args.score_tol {
        opts.score_tol = v;
    }
    if let Some(v) = args.ll_tol {
        opts.ll_tol = v;
    }
    if let Some(v) = args.max_iter {
        opts.max_iter = v;
    }

    match approach {
        Approach::DivideCombine => {
            if args.subsets.is_none() {
                bail!("--approach divide-combine requires --subsets");
            }
        }
        Approach::Bin | Approach::RoundDecimal | Approach::RoundSigdigit => {
            if args.target.is_none() {
                bail!("--approach {approach} requires --target");
            }
        }
        Approach::Whole => {}
    }
    if args.seed_sweep.is_some() && approach != Approach::DivideCombine {
        bail!("--seed-sweep only applies to --approach divide-combine");
    }

    let predictors: Vec<String> = parse_list(&predictors_raw, "predictor")?;
    let total_start = Instant::now();
    let ingested = ingest_csv(&input, &outcome, &predictors)?;
    warn_skipped(&ingested.skipped_rows);
    let data = ingested.data;
    let original_index = index_outcomes(data.y.as_slice().expect("contiguous outcome"))?;
    let original_m = original_index.m();

    let mut out = OutputDir::create(&out_dir)?;
    let mut discretization = serde_json::Value::Null;
    let mut transformed_y: Option<Vec<f64>> = None;
    let mut warnings: Vec<String> = Vec::new();

    let fit_start = Instant::now();
    let result = match approach {
        Approach::Whole => FitResult::Single(fit_cpm(&data, link, &opts)?),
        Approach::DivideCombine => {
            let k = args.subsets.unwrap();
            let combined = fit_divide_combine(&data, link, k, seed, workers, &opts)?;
            warnings.extend(combined.warnings.iter().cloned());
            if let Some(sweep) = args.seed_sweep {
                let table = seed_sweep_table(&data, link, k, seed, sweep, workers, &opts,
                    &ingested.predictor_names)?;
                out.write("seed_sweep.tsv", &table)?;
            }
            FitResult::Combined(combined)
        }
        Approach::Bin => {
            let m_b = args.target.unwrap();
            let mut rng = stream_rng(seed, Stream::Binning);
            let binned =
                bin_equal_quantile(data.y.as_slice().expect("contiguous outcome"), m_b, &mut rng)?;
            discretization = json!({
                "method": "bin",
                "requested": m_b,
                "achieved": binned.achieved,
            });
            let fit_data = Dataset::new(Array1::from_vec(binned.y_b.clone()), data.x.clone())?;
            transformed_y = Some(binned.y_b);
            FitResult::Single(fit_cpm(&fit_data, link, &opts)?)
        }
        Approach::RoundDecimal | Approach::RoundSigdigit => {
            let m_r = args.target.unwrap();
            let mode = if approach == Approach::RoundDecimal {
                RoundingMode::Decimal
            } else {
                RoundingMode::SigDigit
            };
            let (scheme, y_r) =
                choose_rounding(data.y.as_slice().expect("contiguous outcome"), m_r, mode)?;
            if scheme.target_missed {
                warnings.push(format!(
                    "rounding search could not get within 1% of the target: achieved {} for {}",
                    scheme.achieved, m_r
                ));
            }
            if scheme.signed_extension {
                warnings.push(
                    "significant-digit rounding applied to non-positive outcomes via the \
                     signed extension"
                        .to_string(),
                );
            }
            discretization = json!({
                "method": format!("round-{}", scheme.mode),
                "requested": m_r,
                "achieved": scheme.achieved,
                "s": scheme.s,
                "t": scheme.t,
                "target_missed": scheme.target_missed,
                "signed_extension": scheme.signed_extension,
            });
            let fit_data = Dataset::new(Array1::from_vec(y_r.clone()), data.x.clone())?;
            transformed_y = Some(y_r);
            FitResult::Single(fit_cpm(&fit_data, link, &opts)?)
        }
    };
    let fit_seconds = fit_start.elapsed().as_secs_f64();
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let model = result.model();
    out.write(
        "alpha.tsv",
        &alpha_table(model.outcome_grid(), model.alpha(), &result.alpha_se()),
    )?;
    out.write(
        "beta.tsv",
        &beta_table(&ingested.predictor_names, model.beta(), &result.beta_se()),
    )?;

    if let Some(edges_raw) = &args.report_edges {
        let edges: Vec<f64> = parse_list(edges_raw, "region edge")?;
        let y_after = transformed_y
            .as_deref()
            .unwrap_or_else(|| data.y.as_slice().expect("contiguous outcome"));
        let report = rounding_report(
            data.y.as_slice().expect("contiguous outcome"),
            y_after,
            &edges,
        )?;
        out.write("discretize_report.tsv", &report.to_string())?;
    }

    if let Some(at) = &args.predict_at {
        let (table, dist_table) = predictions(model, at, &ingested.predictor_names)?;
        out.write("predictions.tsv", &table)?;
        if args.emit_distributions {
            out.write("distributions.tsv", &dist_table)?;
        }
    }

    let meta = json!({
        "approach": approach.to_string(),
        "link": link.to_string(),
        "input": input.display().to_string(),
        "outcome": ingested.outcome_name,
        "predictors": ingested.predictor_names,
        "n": data.n(),
        "p": data.p(),
        "m": original_m,
        "m_achieved": model.outcome_grid().len(),
        "y_max": model.outcome_grid().last().copied().unwrap(),
        "seed": seed,
        "workers": workers,
        "skipped_rows": ingested.skipped_rows.len(),
        "convergence": result.convergence_json(),
        "discretization": discretization,
        "beta_cov": result.beta_cov_json(),
        "timings": {
            "fit_s": fit_seconds,
            "total_s": total_start.elapsed().as_secs_f64(),
        },
        "warnings": warnings,
    });
    out.write("meta.json", &format!("{:#}\n", meta))?;
    out.commit();
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn seed_sweep_table(
    data: &Dataset,
    link: LinkFamily,
    k: usize,
    seed: u64,
    sweep: usize,
    workers: usize,
    opts: &FitOptions,
    names: &[String],
) -> Result<String> {
    let mut table = String::from("seed\tname\testimate\tse\n");
    for offset in 0..sweep {
        let s = seed + offset as u64;
        let combined = fit_divide_combine(data, link, k, s, workers, opts)?;
        let se = combined.beta_se();
        for j in 0..combined.p() {
            table.push_str(&format!("{s}\t{}\t{}\t{}\n", names[j], combined.beta[j], se[j]));
        }
    }
    Ok(table)
}

/// Per-row conditional summaries plus the full distributions in long form.
fn predictions(
    model: &dyn FittedModel,
    at: &Path,
    names: &[String],
) -> Result<(String, String)> {
    let rows = covariate_rows(at, names)?;
    let mut table = String::from("row\tmean\tmedian\n");
    let mut dist_table = String::from("row\ty\tcdf\tpmf\n");
    for (i, x0) in rows.iter().enumerate() {
        let dist = conditional_distribution(model, x0)?;
        let mean = conditional_mean(&dist);
        let median = conditional_median(&dist);
        table.push_str(&format!("{i}\t{mean}\t{median}\n"));
        for j in 0..dist.grid.len() {
            dist_table.push_str(&format!(
                "{i}\t{}\t{}\t{}\n",
                dist.grid[j], dist.cdf[j], dist.pmf[j]
            ));
        }
    }
    Ok((table, dist_table))
}

/// Read covariate rows from a headered CSV, matching the model's predictor
/// names.
fn covariate_rows(path: &Path, names: &[String]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .context("reading covariate header")?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == n)
                .with_context(|| format!("covariate file is missing column `{n}`"))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(idx.len());
        for &j in &idx {
            let cell = record.get(j).unwrap_or("");
            let v: f64 = cell
                .trim()
                .parse()
                .with_context(|| format!("row {}: bad value `{cell}`", i + 1))?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no covariate rows in {}", path.display());
    }
    Ok(rows)
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let transform: Transform = args.transform.parse()?;
    let residual: Residual = args.residual.parse()?;
    let beta = match &args.beta {
        Some(raw) => Some(parse_list::<f64>(raw, "beta")?),
        None => None,
    };
    let spec = ScenarioSpec {
        n: args.n,
        p: args.p,
        transform,
        residual,
        beta,
        seed: args.seed,
    };
    let sim = simulate_dataset(&spec)?;

    let mut csv_text = String::from("y");
    for j in 1..=args.p {
        csv_text.push_str(&format!(",x{j}"));
    }
    csv_text.push('\n');
    for i in 0..sim.data.n() {
        csv_text.push_str(&format!("{}", sim.data.y[i]));
        for j in 0..args.p {
            csv_text.push_str(&format!(",{}", sim.data.x[[i, j]]));
        }
        csv_text.push('\n');
    }
    std::fs::write(&args.out, csv_text)
        .with_context(|| format!("writing {}", args.out.display()))?;

    let alpha_truth = match sim.alpha_truth {
        AlphaTruth::Identity => json!({"form": "identity"}),
        AlphaTruth::Log => json!({"form": "log"}),
        AlphaTruth::ExpShift { shift } => json!({"form": "exp-shift", "shift": shift}),
    };
    let truth = json!({
        "n": args.n,
        "p": args.p,
        "transform": transform.to_string(),
        "residual": residual.to_string(),
        "seed": args.seed,
        "beta_truth": sim.beta_truth.to_vec(),
        "alpha_truth": alpha_truth,
        "shift": sim.shift,
    });
    let truth_path = sidecar_path(&args.out);
    std::fs::write(&truth_path, format!("{:#}\n", truth))
        .with_context(|| format!("writing {}", truth_path.display()))?;
    Ok(())
}

/// `data.csv` -> `data.truth.json`.
fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "simulated".to_string());
    name.push_str(".truth.json");
    out.with_file_name(name)
}

pub fn cmd_discretize(args: DiscretizeArgs) -> Result<()> {
    let mut reader = csv::Reader::from_path(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?;
    let headers: Vec<String> = reader
        .headers()
        .context("reading CSV header")?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let outcome_idx = headers
        .iter()
        .position(|h| *h == args.outcome)
        .with_context(|| {
            format!(
                "column `{}` not found; available columns: {}",
                args.outcome,
                headers.join(", ")
            )
        })?;

    let mut records: Vec<csv::StringRecord> = Vec::new();
    let mut y = Vec::new();
    let mut skipped = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        match record
            .get(outcome_idx)
            .and_then(|c| c.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite())
        {
            Some(v) => {
                y.push(v);
                records.push(record);
            }
            None => skipped.push(i + 1),
        }
    }
    warn_skipped(&skipped);
    if y.is_empty() {
        bail!("no usable rows in {}", args.input.display());
    }

    let approach: Approach = args.approach.parse()?;
    let (y_new, summary) = match approach {
        Approach::Bin => {
            let mut rng = stream_rng(args.seed, Stream::Binning);
            let binned = bin_equal_quantile(&y, args.target, &mut rng)?;
            let summary = json!({
                "method": "bin",
                "requested": args.target,
                "achieved": binned.achieved,
            });
            (binned.y_b, summary)
        }
        Approach::RoundDecimal | Approach::RoundSigdigit => {
            let mode = if approach == Approach::RoundDecimal {
                RoundingMode::Decimal
            } else {
                RoundingMode::SigDigit
            };
            let (scheme, y_r) = choose_rounding(&y, args.target, mode)?;
            if scheme.target_missed {
                eprintln!(
                    "warning: rounding search achieved {} for target {}",
                    scheme.achieved, args.target
                );
            }
            let summary = json!({
                "method": format!("round-{}", scheme.mode),
                "requested": args.target,
                "achieved": scheme.achieved,
                "s": scheme.s,
                "t": scheme.t,
                "target_missed": scheme.target_missed,
                "signed_extension": scheme.signed_extension,
            });
            (y_r, summary)
        }
        Approach::Whole | Approach::DivideCombine => {
            bail!("discretize expects --approach bin, round-decimal, or round-sigdigit")
        }
    };

    let mut out_text = headers.join(",");
    out_text.push('\n');
    for (record, &v) in records.iter().zip(&y_new) {
        let cells: Vec<String> = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                if j == outcome_idx {
                    format!("{v}")
                } else {
                    cell.to_string()
                }
            })
            .collect();
        out_text.push_str(&cells.join(","));
        out_text.push('\n');
    }
    std::fs::write(&args.out, out_text)
        .with_context(|| format!("writing {}", args.out.display()))?;

    println!("{:#}", summary);
    if let Some(edges_raw) = &args.report_edges {
        let edges: Vec<f64> = parse_list(edges_raw, "region edge")?;
        let report = rounding_report(&y, &y_new, &edges)?;
        print!("{report}");
        if let Some(report_out) = &args.report_out {
            std::fs::write(report_out, report.to_string())
                .with_context(|| format!("writing {}", report_out.display()))?;
        }
    }
    Ok(())
}

pub fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let (table, dist_table) = predictions(&model, &args.at, &model.predictor_names)?;
    std::fs::write(&args.out, table)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(dist_out) = &args.distribution_out {
        std::fs::write(dist_out, dist_table)
            .with_context(|| format!("writing {}", dist_out.display()))?;
    }
    Ok(())
}

pub fn cmd_bench(args: BenchArgs) -> Result<()> {
    let grid = GridSpec {
        ns: parse_list(&args.ns, "N")?,
        ms: parse_list(&args.ms, "M")?,
        ps: parse_list(&args.ps, "p")?,
        seed: args.seed,
    };
    let cells = enumerate_cells(&grid);
    if cells.is_empty() {
        bail!("benchmark grid has no feasible cells (need M <= N)");
    }
    eprintln!("running {} benchmark cells sequentially...", cells.len());

    let exe = std::env::current_exe().context("locating own executable")?;
    let runner = RunnerCmd::with_prefix(exe, &["bench-cell"]);
    let records = run_grid(&grid, &runner)?;

    let mut out = OutputDir::create(&args.out)?;
    let mut csv_text =
        String::from("n,m_requested,m_achieved,p,time_s,peak_mem_bytes,converged\n");
    for r in &records {
        csv_text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.m_requested, r.m_achieved, r.p, r.time_s, r.peak_mem_bytes, r.converged
        ));
    }
    out.write("records.csv", &csv_text)?;

    let good: Vec<_> = records
        .iter()
        .filter(|r| r.converged && r.time_s > 0.0 && r.peak_mem_bytes > 0)
        .cloned()
        .collect();
    let time_model = fit_loglog_model(
        &good,
        ResponseVar::Time,
        &[
            PredictorVar::SampleSize,
            PredictorVar::DistinctCount,
            PredictorVar::PredictorCount,
        ],
    );
    let mem_records: Vec<_> = good
        .iter()
        .filter(|r| r.m_achieved >= args.memory_min_m)
        .cloned()
        .collect();
    let memory_model = fit_loglog_model(
        &mem_records,
        ResponseVar::Memory,
        &[PredictorVar::CombinedDimension],
    );

    let model_json = |m: &cpm_bench::Result<cpm_bench::LogLogFit>| match m {
        Ok(fit) => json!({
            "constant": fit.constant,
            "exponents": fit.exponents.iter().cloned().collect::<std::collections::BTreeMap<_, _>>(),
            "r_squared": fit.r_squared,
        }),
        Err(e) => json!({"error": e.to_string()}),
    };
    let models = json!({
        "time": model_json(&time_model),
        "memory": model_json(&memory_model),
        "memory_min_m": args.memory_min_m,
        "cells_total": records.len(),
        "cells_converged": good.len(),
    });
    out.write("models.json", &format!("{:#}\n", models))?;

    let mut tsv = String::from(
        "n\tm_achieved\tp\tdim\ttime_s\tpeak_mem_bytes\tlog10_n\tlog10_m\tlog10_p\tlog10_dim\tlog10_time\tlog10_mem\n",
    );
    for r in &good {
        let dim = (r.m_achieved - 1 + r.p) as f64;
        tsv.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.n,
            r.m_achieved,
            r.p,
            dim,
            r.time_s,
            r.peak_mem_bytes,
            (r.n as f64).log10(),
            (r.m_achieved as f64).log10(),
            (r.p as f64).log10(),
            dim.log10(),
            r.time_s.log10(),
            (r.peak_mem_bytes as f64).log10(),
        ));
    }
    out.write("loglog.tsv", &tsv)?;
    out.commit();

    if let Ok(fit) = &time_model {
        eprintln!(
            "time model: constant {:.3e}, exponents {:?}, R^2 {:.4}",
            fit.constant, fit.exponents, fit.r_squared
        );
    }
    if let Ok(fit) = &memory_model {
        eprintln!(
            "memory model: constant {:.3e}, exponents {:?}, R^2 {:.4}",
            fit.constant, fit.exponents, fit.r_squared
        );
    }
    Ok(())
}

pub fn cmd_bench_cell(args: CellArgs) -> Result<()> {
    let outcome = run_cell(&CellSpec {
        n: args.n,
        m: args.m,
        p: args.p,
        seed: args.seed,
    });
    println!("{}", serde_json::to_string(&outcome)?);
    Ok(())
}
