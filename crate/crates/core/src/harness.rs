//! Benchmark runs, parameter sweeps and CSV/JSON artifacts.
//!
//! Every run solves one seeded minimax-distance instance with `M = 1` and a
//! canonical frame at the ball center. Seeds are `base_seed + run index`.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{large_s_expansion, log_factor};
use crate::error::{usage, Result};
use crate::klein::LorentzFrame;
use crate::oracle::{make_minimax_instance, minimax_oracle, MinimaxParams};
use crate::solver::{certify_gap, solve, SolverConfig, SolverResult, Termination};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parameters of one benchmark run. The ball radius is `r = s / kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub d: usize,
    pub kappa: f64,
    pub s: f64,
    pub eps: f64,
    pub tau: f64,
    pub fraction: f64,
    pub seed: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            d: 4,
            kappa: 1.0,
            s: 2.0,
            eps: 1e-3,
            tau: 0.8,
            fraction: 0.55,
            seed: 0,
        }
    }
}

impl RunParams {
    pub fn r(&self) -> f64 {
        self.s / self.kappa
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        Ok(SolverConfig::new(self.d, self.kappa, self.r(), self.eps, 1.0)?.with_trace(true))
    }

    pub fn instance_params(&self) -> MinimaxParams {
        MinimaxParams {
            d: self.d,
            kappa: self.kappa,
            s: self.s,
            tau: self.tau,
            fraction: self.fraction,
            seed: self.seed,
        }
    }
}

/// One CSV row: `sweep,value,seed,queries,gap_norm,theorem_n,terminated_by`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub sweep: String,
    pub value: f64,
    pub seed: u64,
    /// Oracle calls until the best normalized gap first reaches `eps`; empty if never.
    pub queries: Option<usize>,
    pub gap_norm: f64,
    pub theorem_n: u64,
    pub terminated_by: Termination,
}

/// A run together with its per-query best-gap history.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub row: RunRow,
    pub result: SolverResult,
    /// Best normalized gap after each oracle call.
    pub best_gaps: Vec<f64>,
}

pub fn run_single(params: &RunParams, sweep: &str, value: f64) -> Result<RunOutcome> {
    let config = params.solver_config()?;
    let instance = make_minimax_instance(params.instance_params())?;
    let frame = LorentzFrame::canonical(params.d, params.kappa)?;
    let result = solve(&config, &frame, &minimax_oracle(&instance))?;

    let scale = config.lipschitz_m * config.r;
    let mut best = f64::INFINITY;
    let mut best_gaps = Vec::with_capacity(result.queries_used);
    let mut queries = None;
    for value in result.trace.iter().filter_map(|rec| rec.value) {
        best = best.min(value);
        let gap = (best - instance.fstar()) / scale;
        best_gaps.push(gap);
        if queries.is_none() && gap <= params.eps {
            queries = Some(best_gaps.len());
        }
    }
    let row = RunRow {
        sweep: sweep.to_string(),
        value,
        seed: params.seed,
        queries,
        gap_norm: certify_gap(&result, instance.fstar(), &config),
        theorem_n: result.theorem_bound,
        terminated_by: result.terminated_by,
    };
    Ok(RunOutcome { row, result, best_gaps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    Dimension,
    Radius,
    Accuracy,
}

impl Sweep {
    pub fn label(&self) -> &'static str {
        match self {
            Sweep::Dimension => "d",
            Sweep::Radius => "s",
            Sweep::Accuracy => "eps",
        }
    }

    /// Values of the published reference sweep.
    pub fn reference_values(&self) -> Vec<f64> {
        match self {
            Sweep::Dimension => vec![2.0, 4.0, 8.0, 16.0],
            Sweep::Radius => vec![0.1, 0.3, 1.0, 2.0, 4.0, 8.0],
            Sweep::Accuracy => vec![1e-1, 1e-2, 1e-3, 1e-4],
        }
    }

    fn apply(&self, fixed: &RunParams, value: f64) -> Result<RunParams> {
        let mut p = *fixed;
        match self {
            Sweep::Dimension => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(usage(format!(
                        "dimension values must be positive integers, got {value}"
                    )));
                }
                p.d = value as usize;
            }
            Sweep::Radius => p.s = value,
            Sweep::Accuracy => p.eps = value,
        }
        Ok(p)
    }
}

/// Published `(mean, std, max, N)` for a reference sweep value.
pub fn published_reference(sweep: Sweep, value: f64) -> Option<(f64, f64, usize, u64)> {
    const ROWS: [(Sweep, f64, f64, f64, usize, u64); 14] = [
        (Sweep::Dimension, 2.0, 26.0, 5.3, 32, 140),
        (Sweep::Dimension, 4.0, 62.8, 10.5, 80, 465),
        (Sweep::Dimension, 8.0, 75.0, 34.8, 129, 1671),
        (Sweep::Dimension, 16.0, 56.7, 5.9, 66, 6311),
        (Sweep::Radius, 0.1, 49.9, 13.0, 67, 388),
        (Sweep::Radius, 0.3, 54.8, 10.7, 75, 390),
        (Sweep::Radius, 1.0, 64.5, 10.1, 79, 412),
        (Sweep::Radius, 2.0, 62.8, 10.5, 80, 465),
        (Sweep::Radius, 4.0, 46.0, 7.7, 56, 597),
        (Sweep::Radius, 8.0, 29.9, 7.4, 42, 889),
        (Sweep::Accuracy, 1e-1, 3.9, 0.4, 4, 280),
        (Sweep::Accuracy, 1e-2, 10.1, 1.7, 13, 372),
        (Sweep::Accuracy, 1e-3, 62.8, 10.5, 80, 465),
        (Sweep::Accuracy, 1e-4, 121.7, 11.6, 141, 557),
    ];
    ROWS.iter()
        .find(|row| row.0 == sweep && row.1 == value)
        .map(|row| (row.2, row.3, row.4, row.5))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub swept: Sweep,
    pub values: Vec<f64>,
    /// Non-swept parameters; `seed` is ignored.
    pub fixed: RunParams,
    pub num_seeds: usize,
    pub base_seed: u64,
}

impl SweepSpec {
    /// Reference protocol: `d = 4`, `s = 2`, `eps = 1e-3` away from the swept axis.
    pub fn reference(swept: Sweep, num_seeds: usize) -> Self {
        Self {
            swept,
            values: swept.reference_values(),
            fixed: RunParams::default(),
            num_seeds,
            base_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(usage("sweep needs at least one value"));
        }
        if self.num_seeds == 0 {
            return Err(usage("sweep needs at least one seed"));
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.num_seeds as u64).map(|i| self.base_seed + i).collect()
    }
}

/// Per-value statistics of queries to threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep: String,
    pub value: f64,
    pub runs: usize,
    /// Runs that never reached the threshold; excluded from the statistics.
    pub unreached: usize,
    pub mean: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
    pub max: usize,
    pub theorem_n: u64,
    pub max_gap: f64,
}

/// A summary mean that is more than 75% away from its published counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftFlag {
    pub sweep: String,
    pub value: f64,
    pub mean: f64,
    pub reference_mean: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    pub soft_flags: Vec<SoftFlag>,
    pub outcomes: Vec<RunOutcome>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let label = spec.swept.label();
    let mut jobs = Vec::new();
    for &value in &spec.values {
        let base = spec.swept.apply(&spec.fixed, value)?;
        for seed in spec.seeds() {
            jobs.push((value, RunParams { seed, ..base }));
        }
    }
    let mut outcomes = jobs
        .par_iter()
        .map(|(value, params)| run_single(params, label, *value))
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by(|a, b| a.row.value.total_cmp(&b.row.value).then(a.row.seed.cmp(&b.row.seed)));

    let rows: Vec<RunRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    let summary = summarize(&rows);
    let soft_flags = summary
        .iter()
        .filter_map(|s| {
            let (reference_mean, ..) = published_reference(spec.swept, s.value)?;
            ((s.mean - reference_mean).abs() > 0.75 * reference_mean).then(|| SoftFlag {
                sweep: s.sweep.clone(),
                value: s.value,
                mean: s.mean,
                reference_mean,
            })
        })
        .collect();
    Ok(SweepReport {
        spec: spec.clone(),
        rows,
        summary,
        soft_flags,
        outcomes,
    })
}

/// Groups consecutive rows with equal `(sweep, value)`.
pub fn summarize(rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for group in rows.chunk_by(|a, b| a.sweep == b.sweep && a.value == b.value) {
        let reached: Vec<f64> = group.iter().filter_map(|r| r.queries).map(|q| q as f64).collect();
        let n = reached.len() as f64;
        let mean = reached.iter().sum::<f64>() / n;
        let std = if reached.len() > 1 {
            (reached.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(SummaryRow {
            sweep: group[0].sweep.clone(),
            value: group[0].value,
            runs: group.len(),
            unreached: group.len() - reached.len(),
            mean,
            std,
            max: group.iter().filter_map(|r| r.queries).max().unwrap_or(0),
            theorem_n: group.iter().map(|r| r.theorem_n).max().unwrap_or(0),
            max_gap: group.iter().map(|r| r.gap_norm).fold(f64::NEG_INFINITY, f64::max),
        });
    }
    out
}

/// Median and interquartile range of the best normalized gap per oracle call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub query: usize,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

/// Runs shorter than the longest one keep their final gap.
pub fn convergence_profile(outcomes: &[RunOutcome]) -> Vec<ConvergenceRow> {
    let len = outcomes.iter().map(|o| o.best_gaps.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let mut gaps: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.best_gaps.get(k).or(o.best_gaps.last()).copied())
                .collect();
            gaps.sort_by(f64::total_cmp);
            ConvergenceRow {
                query: k + 1,
                q25: quantile(&gaps, 0.25),
                median: quantile(&gaps, 0.5),
                q75: quantile(&gaps, 0.75),
            }
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub s: f64,
    pub eps: f64,
    pub log_factor: f64,
    pub large_s_expansion: f64,
}

/// Writes `l(s, eps)` and its large-`s` expansion over the grid product.
pub fn emit_complexity_surface<W: Write>(s_grid: &[f64], eps_grid: &[f64], out: W) -> Result<Vec<SurfaceRow>> {
    if s_grid.is_empty() || eps_grid.is_empty() {
        return Err(usage("complexity surface needs nonempty s and eps grids"));
    }
    let mut rows = Vec::with_capacity(s_grid.len() * eps_grid.len());
    for &s in s_grid {
        for &eps in eps_grid {
            rows.push(SurfaceRow {
                s,
                eps,
                log_factor: log_factor(s, eps)?,
                large_s_expansion: large_s_expansion(s, eps)?,
            });
        }
    }
    write_csv(out, &rows)?;
    Ok(rows)
}

/// Derived quantities of one configuration, as recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedEntry {
    pub value: f64,
    pub d: usize,
    pub s: f64,
    pub r: f64,
    pub klein_radius: f64,
    pub pullback_lipschitz: f64,
    pub target_gap: f64,
    pub theorem_n: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub spec: SweepSpec,
    pub seed_rule: String,
    pub seeds: Vec<u64>,
    pub derived: Vec<DerivedEntry>,
}

impl Manifest {
    pub fn for_spec(spec: &SweepSpec) -> Result<Self> {
        spec.validate()?;
        let derived = spec
            .values
            .iter()
            .map(|&value| {
                let p = spec.swept.apply(&spec.fixed, value)?;
                let cfg = p.solver_config()?;
                Ok(DerivedEntry {
                    value,
                    d: p.d,
                    s: cfg.s(),
                    r: cfg.r,
                    klein_radius: cfg.klein_radius(),
                    pullback_lipschitz: cfg.pullback_lipschitz(),
                    target_gap: cfg.target_gap(),
                    theorem_n: cfg.theorem_bound()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            version: ARTIFACT_VERSION.to_string(),
            spec: spec.clone(),
            seed_rule: "seed = base_seed + run index".to_string(),
            seeds: spec.seeds(),
            derived,
        })
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<RunRow>, _>>()?)
}
