//! Seeded experiment sweeps, aggregation and log-log regression.

use std::path::Path;
use std::time::Instant;

use rand::Rng;

use crate::adversarial::{worst_case_filtration, WorstCaseParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::flagfilt::{boundary_matrix, n_edges, n_triangles, Filtration};
use crate::randmodels::{sample_order, Model, Seed};
use crate::svg;
use crate::z2core::{check_cost_bound, reduce};

pub const CSV_HEADER: &str = "model,n,trials,mean_fillup,sd_fillup,mean_cost,sd_cost,mean_wallclock_ms";

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: Model,
    /// Vertex counts, or group sizes `p` for the worst-case model.
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: Seed,
    pub exec: Execution,
    /// Measure wall-clock time of each reduction. When off the timing column
    /// is written as zero and the CSV is a pure function of the config.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("sizes must be non-empty and strictly increasing".into()));
        }
        match self.model {
            Model::Worst => {
                for &p in &self.sizes {
                    WorstCaseParams::new(p)?;
                }
            }
            Model::Vr { dim: 0 } => return Err(Error::Config("vr needs dim >= 1".into())),
            _ => {
                if self.sizes[0] < 3 {
                    return Err(Error::Config("random models need n >= 3".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub model: String,
    pub n: usize,
    pub trials: usize,
    pub mean_fillup: f64,
    pub sd_fillup: f64,
    pub mean_cost: f64,
    pub sd_cost: f64,
    pub mean_wallclock_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub n: usize,
    pub fill_up: u64,
    pub cost: u64,
    pub wallclock_ms: f64,
}

/// Builds, reduces and checks a single filtration.
///
/// Fails if the reduced matrix breaks the fill-up lower bound
/// `C(n,2) - n` or the cost bound `cost <= c · fill_up`.
pub fn run_trial(model: Model, size: usize, seed: Seed, trial: u64, timing: bool) -> Result<TrialResult> {
    let f = match model {
        Model::Worst => {
            let trial_seed = Seed::new(seed.rng("experiment/worst", trial).gen());
            worst_case_filtration(WorstCaseParams::new(size)?, trial_seed)?.filtration
        }
        _ => Filtration::with_default_ties(sample_order(model, size, seed, "experiment", trial)?),
    };
    let n = f.n();
    let d = boundary_matrix(&f);
    let start = timing.then(Instant::now);
    let (_, stats) = reduce(&d)?;
    let wallclock_ms = start.map_or(0.0, |s| s.elapsed().as_secs_f64() * 1e3);

    let lower = (n_edges(n) as u64).saturating_sub(n as u64);
    if stats.fill_up < lower {
        return Err(Error::Invariant(format!(
            "{} n={n} trial {trial}: fill-up {} below C(n,2)-n = {lower}",
            model.tag(),
            stats.fill_up
        )));
    }
    if !check_cost_bound(&stats, n_triangles(n)) {
        return Err(Error::Invariant(format!(
            "{} n={n} trial {trial}: cost {} exceeds c·fill-up",
            model.tag(),
            stats.cost
        )));
    }
    Ok(TrialResult {
        n,
        fill_up: stats.fill_up,
        cost: stats.cost,
        wallclock_ms,
    })
}

fn mean_sd(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let k = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / k;
    let var = if k > 1.0 {
        xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Runs `trials` filtrations per size. Trials are independent jobs with
/// derived seeds; aggregation folds them in fixed order, so the table does
/// not depend on the execution mode.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|&s| (0..cfg.trials as u64).map(move |t| (s, t)))
        .collect();
    let results = cfg
        .exec
        .map(&jobs, |&(size, t)| run_trial(cfg.model, size, cfg.seed, t, cfg.timing));

    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for (k, chunk) in results.chunks(cfg.trials).enumerate() {
        let trials: Vec<TrialResult> = chunk
            .iter()
            .map(|r| r.as_ref().map(|t| *t).map_err(|e| Error::Invariant(format!(
                "row {} ({} size {}) aborted: {e}",
                k,
                cfg.model.tag(),
                cfg.sizes[k]
            ))))
            .collect::<Result<_>>()?;
        let (mean_fillup, sd_fillup) = mean_sd(trials.iter().map(|t| t.fill_up as f64));
        let (mean_cost, sd_cost) = mean_sd(trials.iter().map(|t| t.cost as f64));
        let (mean_wallclock_ms, _) = mean_sd(trials.iter().map(|t| t.wallclock_ms));
        rows.push(ExperimentRow {
            model: cfg.model.tag(),
            n: trials[0].n,
            trials: cfg.trials,
            mean_fillup,
            sd_fillup,
            mean_cost,
            sd_cost,
            mean_wallclock_ms,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub lambda: f64,
    pub exponent: f64,
    /// Sum of squared residuals in log space.
    pub residual: f64,
}

impl FitResult {
    /// `λ·n^e` annotation used in plots and summaries.
    pub fn annotation(&self, var: &str) -> String {
        format!("{:.4e}·{var}^{:.3}", self.lambda, self.exponent)
    }
}

/// Ordinary least squares on `(ln x, ln y)`: `y ≈ λ·x^e`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::DegenerateFit("all coordinates must be positive and finite".into()));
    }
    let first = points.first().map(|p| p.0);
    if points.len() < 2 || points.iter().all(|p| Some(p.0) == first) {
        return Err(Error::DegenerateFit("need at least two distinct x values".into()));
    }
    let k = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum();
    Ok(FitResult {
        lambda: intercept.exp(),
        exponent,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    FillUp,
    Cost,
}

impl Metric {
    pub fn column(&self) -> &'static str {
        match self {
            Metric::FillUp => "mean_fillup",
            Metric::Cost => "mean_cost",
        }
    }

    fn value(&self, row: &ExperimentRow) -> f64 {
        match self {
            Metric::FillUp => row.mean_fillup,
            Metric::Cost => row.mean_cost,
        }
    }
}

pub fn fit_table(table: &[ExperimentRow], metric: Metric) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = table.iter().map(|r| (r.n as f64, metric.value(r))).collect();
    loglog_fit(&pts)
}

pub fn to_csv(table: &[ExperimentRow]) -> Result<String> {
    if table.is_empty() {
        return Err(Error::Config("empty experiment table".into()));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in table {
        out.push_str(&format!(
            "{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3}\n",
            r.model, r.n, r.trials, r.mean_fillup, r.sd_fillup, r.mean_cost, r.sd_cost, r.mean_wallclock_ms
        ));
    }
    Ok(out)
}

pub fn emit_csv(table: &[ExperimentRow], path: &Path) -> Result<()> {
    let csv = to_csv(table)?;
    std::fs::write(path, csv).map_err(|e| Error::io(path, e))
}

pub fn render_svg(table: &[ExperimentRow], fit: &FitResult, metric: Metric) -> Result<String> {
    if table.is_empty() {
        return Err(Error::Config("empty experiment table".into()));
    }
    let pts: Vec<(f64, f64)> = table.iter().map(|r| (r.n as f64, metric.value(r))).collect();
    let title = format!("{} {}", table[0].model, metric.column());
    Ok(svg::loglog_scatter(&title, "n", metric.column(), &pts, fit))
}

pub fn emit_svg(table: &[ExperimentRow], fit: &FitResult, metric: Metric, path: &Path) -> Result<()> {
    let doc = render_svg(table, fit, metric)?;
    std::fs::write(path, doc).map_err(|e| Error::io(path, e))
}

/// Reads `(x, y)` pairs from two named columns of a CSV file with a header.
pub fn read_csv_columns(text: &str, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse { line: 1, reason: e.to_string() })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("no column named {name:?}")))
    };
    let (xi, yi) = (col(x)?, col(y)?);
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse { line, reason: e.to_string() })?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse { line, reason: format!("column {i} is not a number") })
        };
        out.push((num(xi)?, num(yi)?));
    }
    Ok(out)
}
