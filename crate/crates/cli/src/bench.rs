//! Benchmark campaigns: repeated sample-estimate-score trials with
//! derived per-trial seeds, plus CSV/JSON/grid emission.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use graphon_core::graphon::{sample_latents, GraphonSpec};
use graphon_core::matrix::Matrix;
use graphon_core::metrics::compute_metrics;
use graphon_core::power_iter::{power_iteration_estimate, PowerIterationConfig};
use graphon_core::rank1::{estimate_p_rank1, fit_rank1};
use graphon_core::rankr::{estimate_p_rankr, Counting};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rho {
    /// Dense regime, multiplier 1.
    Dense,
    /// Sparse regime, multiplier `n^(-1/2)`.
    AutoSparse,
}

impl Rho {
    pub fn value(&self, n: usize) -> f64 {
        match self {
            Rho::Dense => 1.0,
            Rho::AutoSparse => 1.0 / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rank1,
    Rankr,
    PowerIteration,
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub graphon_id: u32,
    pub n: usize,
    pub rho: Rho,
    pub trials: usize,
    pub method: Method,
    /// Rank for `rankr` / `power_iteration`; ignored by `rank1`.
    pub r: usize,
    pub counting: Counting,
    pub base_seed: u64,
    /// When false (the default for emission determinism), runtime_s is
    /// reported as zero.
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub graphon_id: u32,
    pub n: usize,
    pub rho: f64,
    pub method: Method,
    pub r: usize,
    pub trial: usize,
    pub seed: u64,
    pub mse: Option<f64>,
    pub max_error: Option<f64>,
    pub runtime_s: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub trials: usize,
    pub failures: usize,
    pub mean_mse: Option<f64>,
    pub std_mse: Option<f64>,
    pub mean_max_error: Option<f64>,
    pub std_max_error: Option<f64>,
    pub mean_runtime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Campaign {
    pub records: Vec<TrialRecord>,
    pub summary: CampaignSummary,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    (Some(mean), Some(var.sqrt()))
}

fn run_trial(config: &CampaignConfig, spec: &GraphonSpec, trial: usize) -> TrialRecord {
    let seed = config.base_seed + trial as u64;
    let rho = config.rho.value(config.n);
    let mut record = TrialRecord {
        graphon_id: config.graphon_id,
        n: config.n,
        rho,
        method: config.method,
        r: if config.method == Method::Rank1 { 1 } else { config.r },
        trial,
        seed,
        mse: None,
        max_error: None,
        runtime_s: 0.0,
        failed: true,
    };
    // distinct streams for latents and edges within a trial
    let latents = match sample_latents(config.n, seed * 2) {
        Ok(l) => l,
        Err(_) => return record,
    };
    let (p_true, adj) = match (spec.probability_matrix(&latents), spec.sample_graph(&latents, seed * 2 + 1)) {
        (Ok(p), Ok(a)) => (p, a),
        _ => return record,
    };
    let start = Instant::now();
    let p_hat: Result<Matrix, graphon_core::Error> = match config.method {
        Method::Rank1 => fit_rank1(&adj).map(|fit| estimate_p_rank1(&fit)),
        Method::Rankr => {
            estimate_p_rankr(&adj, config.r, config.counting).map(|res| res.p_hat)
        }
        Method::PowerIteration => {
            let (mut p, _) = power_iteration_estimate(&adj, &PowerIterationConfig::new(config.r));
            // comparability: the baseline's diagonal is an artifact
            for i in 0..config.n {
                p.set(i, i, 0.0);
            }
            Ok(p)
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    if let Ok(p_hat) = p_hat {
        if let Ok(m) = compute_metrics(&p_hat, &p_true) {
            record.mse = Some(m.mse);
            record.max_error = Some(m.max_error);
            record.failed = false;
            if config.timing {
                record.runtime_s = runtime;
            }
        }
    }
    record
}

pub fn run_campaign(config: &CampaignConfig) -> Result<Campaign, CliError> {
    if config.trials < 1 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    if config.n < 10 {
        return Err(CliError::Usage("n must be at least 10".into()));
    }
    if config.method != Method::Rank1 && config.r < 1 {
        return Err(CliError::Usage("r must be at least 1".into()));
    }
    let spec = GraphonSpec::builtin(config.graphon_id)?
        .with_sparsity(config.rho.value(config.n))?;
    let mut records: Vec<TrialRecord> =
        (0..config.trials).into_par_iter().map(|t| run_trial(config, &spec, t)).collect();
    records.sort_by_key(|r| r.trial);
    let ok: Vec<&TrialRecord> = records.iter().filter(|r| !r.failed).collect();
    let (mean_mse, std_mse) = mean_std(&ok.iter().map(|r| r.mse.unwrap()).collect::<Vec<_>>());
    let (mean_max_error, std_max_error) =
        mean_std(&ok.iter().map(|r| r.max_error.unwrap()).collect::<Vec<_>>());
    let (mean_runtime_s, _) = mean_std(&ok.iter().map(|r| r.runtime_s).collect::<Vec<_>>());
    let summary = CampaignSummary {
        trials: config.trials,
        failures: config.trials - ok.len(),
        mean_mse,
        std_mse,
        mean_max_error,
        std_max_error,
        mean_runtime_s,
    };
    Ok(Campaign { records, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

pub fn results_to_csv(records: &[TrialRecord]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        // header-only output
        w.write_record([
            "graphon_id", "n", "rho", "method", "r", "trial", "seed", "mse", "max_error",
            "runtime_s", "failed",
        ])
        .map_err(|e| CliError::Data(e.to_string()))?;
    }
    for r in records {
        w.serialize(r).map_err(|e| CliError::Data(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Data(e.to_string()))?)
        .map_err(|e| CliError::Data(e.to_string()))
}

pub fn parse_results_csv(text: &str) -> Result<Vec<TrialRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize()
        .collect::<Result<Vec<TrialRecord>, _>>()
        .map_err(|e| CliError::Data(e.to_string()))
}

pub fn emit_results(
    campaign: &Campaign,
    path: &Path,
    format: OutputFormat,
) -> Result<(), CliError> {
    let text = match format {
        OutputFormat::Csv => results_to_csv(&campaign.records)?,
        OutputFormat::Json => serde_json::to_string_pretty(campaign)
            .map_err(|e| CliError::Data(e.to_string()))?,
    };
    std::fs::write(path, text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Plain-text grid: one matrix row per line, comma-separated.
pub fn emit_matrix_grid(matrix: &Matrix, path: &Path) -> Result<(), CliError> {
    if matrix.n() == 0 {
        return Err(CliError::Data("cannot emit an empty matrix".into()));
    }
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    write_matrix_grid(matrix, &mut out).map_err(|e| CliError::Data(e.to_string()))
}

pub fn write_matrix_grid<W: Write>(matrix: &Matrix, out: &mut W) -> std::io::Result<()> {
    for i in 0..matrix.n() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn parse_matrix_grid(text: &str) -> Result<Matrix, CliError> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in &rows {
        let vals: Result<Vec<f64>, _> = row.split(',').map(|v| v.trim().parse::<f64>()).collect();
        let vals = vals.map_err(|e| CliError::Data(e.to_string()))?;
        if vals.len() != n {
            return Err(CliError::Data("grid is not square".into()));
        }
        data.extend(vals);
    }
    if n == 0 {
        return Err(CliError::Data("empty grid".into()));
    }
    Ok(Matrix::from_rows(n, data))
}
