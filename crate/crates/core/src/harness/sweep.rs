use rayon::prelude::*;

use crate::controller::{run_trajectory, TrajectoryRecord};
use crate::error::Result;
use crate::harness::config::ResolvedConfig;
use crate::harness::setup::build_scenario;

/// Outcome of one `(helper count, seed)` run.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub helper_count: usize,
    pub seed: u64,
    pub outcome: std::result::Result<TrajectoryRecord, String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub helper_count: usize,
    pub step: usize,
    pub median_rate: f64,
    pub q25: f64,
    pub q75: f64,
    pub r_sup: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ResolvedConfig,
    pub helper_counts: Vec<usize>,
    /// Ordered by helper count, then seed, as listed in the config.
    pub cells: Vec<CellResult>,
    pub aggregate: Vec<AggregateRow>,
}

impl ExperimentResult {
    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.outcome.is_err())
    }

    pub fn has_failures(&self) -> bool {
        self.failures().next().is_some()
    }

    pub fn aggregate_for(&self, helper_count: usize) -> Vec<AggregateRow> {
        self.aggregate
            .iter()
            .filter(|a| a.helper_count == helper_count)
            .copied()
            .collect()
    }
}

/// Linear-interpolation quantile of sorted data (`q ∈ [0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Per-step median and quartiles of the signed secrecy rate over successful seeds.
pub fn aggregate(cells: &[CellResult], helper_counts: &[usize]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &count in helper_counts {
        let records: Vec<&TrajectoryRecord> = cells
            .iter()
            .filter(|c| c.helper_count == count)
            .filter_map(|c| c.outcome.as_ref().ok())
            .collect();
        let Some(first) = records.first() else {
            continue;
        };
        let r_sup = first.initial().rate.rate_supremum;
        for step in 0..first.states.len() {
            let mut rates: Vec<f64> = records
                .iter()
                .map(|r| r.states[step].rate.secrecy_rate)
                .collect();
            rates.sort_by(f64::total_cmp);
            rows.push(AggregateRow {
                helper_count: count,
                step,
                median_rate: quantile_sorted(&rates, 0.5),
                q25: quantile_sorted(&rates, 0.25),
                q75: quantile_sorted(&rates, 0.75),
                r_sup,
            });
        }
    }
    rows
}

pub fn run_cell(
    config: &ResolvedConfig,
    helper_count: usize,
    seed: u64,
) -> Result<TrajectoryRecord> {
    let cfg = config.with_helper_count(helper_count);
    let scenario = build_scenario(&cfg, seed)?;
    run_trajectory(&scenario, cfg.steps)
}

/// Runs every `(helper count, seed)` cell. Cells run in parallel on the
/// current rayon pool; results are ordered independently of scheduling.
pub fn run_sweep(config: &ResolvedConfig, helper_counts: &[usize]) -> Result<ExperimentResult> {
    config.validate()?;
    let jobs: Vec<(usize, u64)> = helper_counts
        .iter()
        .flat_map(|&n| config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|&(helper_count, seed)| CellResult {
            helper_count,
            seed,
            outcome: run_cell(config, helper_count, seed).map_err(|e| e.to_string()),
        })
        .collect();
    let aggregate = aggregate(&cells, helper_counts);
    Ok(ExperimentResult {
        config: config.clone(),
        helper_counts: helper_counts.to_vec(),
        cells,
        aggregate,
    })
}
