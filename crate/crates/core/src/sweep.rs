//! Monte Carlo sweep driver: run every (policy × load × repetition) cell of a
//! benchmark grid and reduce the results.
//!
//! Cell seeds derive from (base seed, load, repetition) only — never the
//! policy — so competing policies inside one cell face byte-identical demand.
//! Cells are embarrassingly parallel; [`run_cells`] fans them out with rayon
//! while [`run_cells_seq`] walks the same order single-threaded, and both
//! return rows in planning order so output bytes never depend on thread
//! scheduling. Aggregation is sum-then-divide, immune to reduction order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{metrics_for_run, MetricsReport, CSV_COLUMNS};
use crate::model::WorkingMode;
use crate::scenario::{derive_seed, generate_scenario, ScenarioConfig};
use crate::scheduler::{run_horizon, Policy, SchedulerConfig};

// --- plan ---------------------------------------------------------------------

/// One benchmark grid: which policies, which precision-target loads, how many
/// repetitions, and the scenario/scheduler knobs shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepPlan {
    /// Template scenario; each cell overrides `n_precision` and `seed`.
    pub scenario: ScenarioConfig,
    pub scheduler: SchedulerConfig,
    pub policies: Vec<Policy>,
    /// Precision-target load axis: `from..=to` stepping by `step`.
    pub precision_from: usize,
    pub precision_to: usize,
    pub precision_step: usize,
    /// Repetitions (fresh seed each) per load.
    pub reps: usize,
    /// Root of the per-cell seed derivation.
    pub base_seed: u64,
    /// Yield-penalty coefficient forwarded to the metrics.
    pub yield_k: f64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            scheduler: SchedulerConfig::default(),
            policies: Policy::ALL.to_vec(),
            precision_from: 0,
            precision_to: 200,
            precision_step: 40,
            reps: 20,
            base_seed: 1,
            yield_k: 0.5,
        }
    }
}

impl SweepPlan {
    /// Structural sanity: ordered bounds, positive step and reps, at least
    /// one policy, valid nested configs.
    pub fn validate(&self) -> Result<()> {
        if self.precision_from > self.precision_to {
            return Err(Error::InvalidConfig(format!(
                "sweep bounds must be ordered, got {}..{}",
                self.precision_from, self.precision_to
            )));
        }
        if self.precision_step == 0 || self.reps == 0 {
            return Err(Error::InvalidConfig(
                "sweep step and repetitions must be at least 1".into(),
            ));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("no policies selected".into()));
        }
        if !(self.yield_k >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "yield coefficient must be non-negative, got {}",
                self.yield_k
            )));
        }
        self.scenario.validate()?;
        self.scheduler.validate()
    }

    /// The load axis, materialized.
    pub fn loads(&self) -> Vec<usize> {
        (self.precision_from..=self.precision_to)
            .step_by(self.precision_step)
            .collect()
    }
}

// --- cells ----------------------------------------------------------------------

/// One grid point: a policy at a load, one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepCell {
    pub policy: Policy,
    pub n_precision: usize,
    pub rep: usize,
    /// Scenario seed; a pure function of (base seed, load, rep).
    pub seed: u64,
}

/// Seed for one cell. Policies share it on purpose: head-to-head comparisons
/// must see identical demand.
pub fn cell_seed(base_seed: u64, n_precision: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(base_seed, n_precision as u64), rep as u64)
}

/// Materializes the grid in output order: load-major, then repetition, then
/// policy.
pub fn plan_cells(plan: &SweepPlan) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &n in &plan.loads() {
        for rep in 0..plan.reps {
            for &policy in &plan.policies {
                cells.push(SweepCell {
                    policy,
                    n_precision: n,
                    rep,
                    seed: cell_seed(plan.base_seed, n, rep),
                });
            }
        }
    }
    cells
}

/// A finished cell: the grid point plus its metric report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub metrics: MetricsReport,
}

impl SweepRow {
    /// CSV fields, parallel to [`sweep_csv_header`].
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![
            self.cell.policy.label().to_string(),
            self.cell.n_precision.to_string(),
            self.cell.rep.to_string(),
            self.cell.seed.to_string(),
        ];
        out.extend(self.metrics.csv_fields());
        out
    }
}

/// Header for per-cell sweep CSVs.
pub fn sweep_csv_header() -> String {
    let mut cols = vec!["policy", "n_precision", "rep", "seed"];
    cols.extend(CSV_COLUMNS);
    cols.join(",")
}

/// Renders rows (with header) into one CSV string.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = sweep_csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_fields().join(","));
        out.push('\n');
    }
    out
}

/// Runs one cell: regenerate its scenario, run the horizon, reduce to
/// metrics.
pub fn run_cell(plan: &SweepPlan, cell: &SweepCell) -> Result<SweepRow> {
    let scenario_cfg = ScenarioConfig {
        n_precision: cell.n_precision,
        seed: cell.seed,
        ..plan.scenario.clone()
    };
    let tasks = generate_scenario(&scenario_cfg);
    let run = run_horizon(&tasks, scenario_cfg.horizon, &plan.scheduler, cell.policy)?;
    let metrics = metrics_for_run(&tasks, &run, scenario_cfg.horizon, plan.yield_k);
    Ok(SweepRow { cell: *cell, metrics })
}

/// Runs the whole grid sequentially, in planning order.
pub fn run_cells_seq(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    plan_cells(plan).iter().map(|c| run_cell(plan, c)).collect()
}

/// Runs the whole grid across threads; rows come back in planning order, so
/// the bytes match [`run_cells_seq`] exactly.
#[cfg(feature = "parallel")]
pub fn run_cells(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    plan.validate()?;
    plan_cells(plan)
        .par_iter()
        .map(|c| run_cell(plan, c))
        .collect()
}

/// Preferred entry point: parallel when the feature is on, sequential
/// otherwise. Output is identical either way.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    #[cfg(feature = "parallel")]
    {
        run_cells(plan)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_cells_seq(plan)
    }
}

// --- aggregation -----------------------------------------------------------------

/// Mean and sample standard deviation of one metric across repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    MeanStd { mean, std }
}

/// One (policy, load) grid line reduced over its repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub policy: Policy,
    pub n_precision: usize,
    pub reps: usize,
    pub ssr: MeanStd,
    pub tur: MeanStd,
    pub atsr: MeanStd,
    pub syr: MeanStd,
    pub failure: MeanStd,
    /// Mean per-mode failure, indexed like [`WorkingMode::ALL`].
    pub mode_failure: [f64; 5],
}

/// Reduces rows over repetitions, preserving (load, policy) planning order.
pub fn aggregate(rows: &[SweepRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(usize, Policy)> = Vec::new();
    for r in rows {
        let key = (r.cell.n_precision, r.cell.policy);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.iter()
        .map(|&(n, policy)| {
            let group: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.cell.n_precision == n && r.cell.policy == policy)
                .collect();
            let pick = |f: fn(&MetricsReport) -> f64| -> Vec<f64> {
                group.iter().map(|r| f(&r.metrics)).collect()
            };
            let mut mode_failure = [0.0; 5];
            for (i, mode) in WorkingMode::ALL.iter().enumerate() {
                mode_failure[i] = group
                    .iter()
                    .map(|r| r.metrics.per_mode_failure.get(mode).copied().unwrap_or(0.0))
                    .sum::<f64>()
                    / group.len() as f64;
            }
            AggregateRow {
                policy,
                n_precision: n,
                reps: group.len(),
                ssr: mean_std(&pick(|m| m.ssr)),
                tur: mean_std(&pick(|m| m.tur)),
                atsr: mean_std(&pick(|m| m.atsr)),
                syr: mean_std(&pick(|m| m.syr)),
                failure: mean_std(&pick(|m| m.failure)),
                mode_failure,
            }
        })
        .collect()
}

/// Header for aggregate CSVs.
pub fn aggregate_csv_header() -> String {
    let mut cols: Vec<String> = ["policy", "n_precision", "reps"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for metric in ["ssr", "tur", "atsr", "syr", "failure"] {
        cols.push(format!("mean_{metric}"));
        cols.push(format!("std_{metric}"));
    }
    // Per-mode failure columns, in the same order and spelling as the
    // per-cell rows.
    for col in &CSV_COLUMNS[5..10] {
        cols.push(format!("mean_{col}"));
    }
    cols.join(",")
}

/// Renders aggregates (with header) into one CSV string.
pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = aggregate_csv_header();
    out.push('\n');
    for r in rows {
        let mut fields = vec![
            r.policy.label().to_string(),
            r.n_precision.to_string(),
            r.reps.to_string(),
        ];
        for ms in [r.ssr, r.tur, r.atsr, r.syr, r.failure] {
            fields.push(ms.mean.to_string());
            fields.push(ms.std.to_string());
        }
        for v in r.mode_failure {
            fields.push(v.to_string());
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

// --- policy comparison --------------------------------------------------------------

/// Candidate-minus-baseline gaps at one load. Absolute gaps are plain
/// differences (percentage points when the metric is a ratio); relative gaps
/// divide by the baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub n_precision: usize,
    pub candidate: Policy,
    pub baseline: Policy,
    /// tur(candidate) − tur(baseline).
    pub tur_delta: f64,
    /// (atsr(candidate) − atsr(baseline)) / atsr(baseline); negative is better.
    pub atsr_rel: f64,
    /// (syr(candidate) − syr(baseline)) / syr(baseline).
    pub syr_rel: f64,
    /// failure(candidate) − failure(baseline); negative is better.
    pub failure_delta: f64,
}

/// Pairs aggregates of two policies load by load. Relative gaps fall back to
/// 0 when the baseline metric is 0.
pub fn compare(aggregates: &[AggregateRow], candidate: Policy, baseline: Policy) -> Vec<CompareRow> {
    let find = |policy: Policy, n: usize| {
        aggregates
            .iter()
            .find(|a| a.policy == policy && a.n_precision == n)
    };
    let mut loads: Vec<usize> = aggregates
        .iter()
        .filter(|a| a.policy == candidate)
        .map(|a| a.n_precision)
        .collect();
    loads.dedup();
    loads
        .into_iter()
        .filter_map(|n| {
            let c = find(candidate, n)?;
            let b = find(baseline, n)?;
            let rel = |cv: f64, bv: f64| if bv == 0.0 { 0.0 } else { (cv - bv) / bv };
            Some(CompareRow {
                n_precision: n,
                candidate,
                baseline,
                tur_delta: c.tur.mean - b.tur.mean,
                atsr_rel: rel(c.atsr.mean, b.atsr.mean),
                syr_rel: rel(c.syr.mean, b.syr.mean),
                failure_delta: c.failure.mean - b.failure.mean,
            })
        })
        .collect()
}

/// Header for comparison CSVs.
pub fn compare_csv_header() -> String {
    "n_precision,candidate,baseline,tur_delta,atsr_rel,syr_rel,failure_delta".to_string()
}

/// Renders comparison rows (with header) into one CSV string.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = compare_csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n_precision,
            r.candidate.label(),
            r.baseline.label(),
            r.tur_delta,
            r.atsr_rel,
            r.syr_rel,
            r.failure_delta
        ));
    }
    out
}

// --- tests ------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    /// Small grid that still exercises interleaving: short horizon, a few
    /// chains per mode.
    fn small_plan() -> SweepPlan {
        SweepPlan {
            scenario: ScenarioConfig {
                horizon: 400.0,
                n_general: 4,
                ..ScenarioConfig::default()
            },
            precision_from: 0,
            precision_to: 8,
            precision_step: 8,
            reps: 2,
            base_seed: 7,
            ..SweepPlan::default()
        }
    }

    #[test]
    fn seeds_depend_on_load_and_rep_not_policy() {
        let rows = plan_cells(&small_plan());
        // Grid: 2 loads × 2 reps × 3 policies.
        assert_eq!(rows.len(), 12);
        for w in rows.chunks(3) {
            assert!(w.iter().all(|c| c.seed == w[0].seed), "policies share a cell seed");
        }
        assert_ne!(rows[0].seed, rows[3].seed, "reps differ");
        assert_ne!(rows[0].seed, rows[6].seed, "loads differ");
    }

    #[test]
    fn sweep_rows_come_back_in_planning_order() {
        let plan = small_plan();
        let rows = run_cells_seq(&plan).unwrap();
        let cells = plan_cells(&plan);
        assert_eq!(rows.len(), cells.len());
        for (row, cell) in rows.iter().zip(&cells) {
            assert_eq!(&row.cell, cell);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_to_the_byte() {
        let plan = small_plan();
        let par = run_cells(&plan).unwrap();
        let seq = run_cells_seq(&plan).unwrap();
        assert_eq!(sweep_csv(&par), sweep_csv(&seq));
    }

    #[test]
    fn aggregate_means_and_stds_match_hand_arithmetic() {
        let plan = small_plan();
        let mut rows = run_cells_seq(&plan).unwrap();
        // Overwrite two reps of one (policy, load) with known numbers.
        rows.truncate(0);
        for (rep, ssr) in [(0usize, 0.2f64), (1, 0.4)] {
            let mut row = run_cell(
                &plan,
                &SweepCell {
                    policy: Policy::HpedfPointer,
                    n_precision: 0,
                    rep,
                    seed: cell_seed(7, 0, rep),
                },
            )
            .unwrap();
            row.metrics.ssr = ssr;
            rows.push(row);
        }
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].reps, 2);
        assert!((agg[0].ssr.mean - 0.3).abs() < 1e-12);
        assert!((agg[0].ssr.std - 0.1414213562373095).abs() < 1e-12);
    }

    #[test]
    fn compare_pairs_loads_between_policies() {
        let plan = SweepPlan {
            policies: vec![Policy::SynthesisInterleave, Policy::HpedfPointer],
            ..small_plan()
        };
        let rows = run_cells_seq(&plan).unwrap();
        let agg = aggregate(&rows);
        let cmp = compare(&agg, Policy::SynthesisInterleave, Policy::HpedfPointer);
        assert_eq!(cmp.len(), 2, "one row per load");
        assert!(cmp.iter().all(|c| c.n_precision == 0 || c.n_precision == 8));
    }

    #[test]
    fn csv_headers_match_field_counts() {
        let plan = small_plan();
        let rows = run_cells_seq(&plan).unwrap();
        let header_cols = sweep_csv_header().split(',').count();
        assert_eq!(rows[0].csv_fields().len(), header_cols);
        let agg = aggregate(&rows);
        let agg_csv = aggregate_csv(&agg);
        let mut lines = agg_csv.lines();
        let head = lines.next().unwrap().split(',').count();
        assert!(lines.all(|l| l.split(',').count() == head));
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let mut plan = small_plan();
        plan.precision_from = 10;
        plan.precision_to = 0;
        assert!(plan.validate().is_err());
        let mut plan = small_plan();
        plan.reps = 0;
        assert!(plan.validate().is_err());
        let mut plan = small_plan();
        plan.policies.clear();
        assert!(plan.validate().is_err());
    }
}
