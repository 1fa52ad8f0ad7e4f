//! Benchmark metrics for one horizon run.
//!
//! Four headline ratios — scheduling success, time utilization, mean absolute
//! time shift, and priority-weighted yield — plus failure ratios overall and
//! per working mode. Requests still inside their windows when the horizon
//! closed are censored: they count in no numerator and no denominator, so a
//! run is judged only on demand it had a full chance to serve.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;

use crate::model::{Placement, RadarTask, WorkingMode};
use crate::scheduler::HorizonOutcome;

/// Headline ratios plus failure breakdown; all ratios dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// Scheduled over requested.
    pub ssr: f64,
    /// Transmit-plus-receive occupancy over the horizon length.
    pub tur: f64,
    /// Mean |t_s − t_e| / l over scheduled tasks.
    pub atsr: f64,
    /// Priority-weighted yield: achieved over ideal.
    pub syr: f64,
    /// Deleted over requested.
    pub failure: f64,
    /// Deleted over requested, per working mode (0 for unrequested modes).
    pub per_mode_failure: BTreeMap<WorkingMode, f64>,
    /// M: resolved requests.
    pub n_requests: usize,
    /// N: scheduled requests.
    pub n_scheduled: usize,
}

impl MetricsReport {
    /// True when the run had no resolved demand at all.
    pub fn is_empty(&self) -> bool {
        self.n_requests == 0
    }

    fn zeroed() -> Self {
        Self {
            ssr: 0.0,
            tur: 0.0,
            atsr: 0.0,
            syr: 0.0,
            failure: 0.0,
            per_mode_failure: WorkingMode::ALL.iter().map(|&m| (m, 0.0)).collect(),
            n_requests: 0,
            n_scheduled: 0,
        }
    }
}

/// Metric column names, in the order [`csv_fields`](MetricsReport::csv_fields)
/// emits them.
pub const CSV_COLUMNS: [&str; 13] = [
    "ssr",
    "tur",
    "atsr",
    "syr",
    "failure",
    "fail_low_search",
    "fail_high_search",
    "fail_general",
    "fail_precision",
    "fail_verify",
    "n_requests",
    "n_scheduled",
    "n_failed",
];

impl MetricsReport {
    /// Metric block of a CSV row, parallel to [`CSV_COLUMNS`]. Floats print
    /// in shortest round-trip form, so equal bits mean equal bytes.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![
            self.ssr.to_string(),
            self.tur.to_string(),
            self.atsr.to_string(),
            self.syr.to_string(),
            self.failure.to_string(),
        ];
        for mode in WorkingMode::ALL {
            out.push(self.per_mode_failure.get(&mode).copied().unwrap_or(0.0).to_string());
        }
        out.push(self.n_requests.to_string());
        out.push(self.n_scheduled.to_string());
        out.push((self.n_requests - self.n_scheduled).to_string());
        out
    }
}

/// Computes the report for a timeline against its resolved request ledger.
///
/// `requests` must hold every request that was either scheduled or failed —
/// censored ones are the caller's job to filter (see [`metrics_for_run`]).
/// Every placement must reference a request by id. `k` softens the yield
/// penalty per unit of time shift.
pub fn compute_metrics(
    timeline: &[Placement],
    requests: &[RadarTask],
    horizon: (f64, f64),
    k: f64,
) -> MetricsReport {
    let (t0, t1) = horizon;
    debug_assert!(t1 > t0, "degenerate horizon [{t0}, {t1}]");
    let m = requests.len();
    if m == 0 {
        return MetricsReport::zeroed();
    }

    let by_id: HashMap<u64, &RadarTask> = requests.iter().map(|t| (t.id, t)).collect();
    let mut requested: BTreeMap<WorkingMode, usize> =
        WorkingMode::ALL.iter().map(|&md| (md, 0)).collect();
    let mut scheduled: BTreeMap<WorkingMode, usize> = requested.clone();
    for t in requests {
        *requested.get_mut(&t.mode).expect("all modes present") += 1;
    }

    let n = timeline.len();
    let mut occupancy = 0.0;
    let mut shift_sum = 0.0;
    let mut achieved_yield = 0.0;
    // Busy time is measured inside the observation window: a guest receive
    // that legally spills past the horizon only counts up to it, keeping
    // utilization a true fraction of the window.
    let clipped = |start: f64, end: f64| (end.min(t1) - start.max(t0)).max(0.0);
    for p in timeline {
        let task = by_id
            .get(&p.task_id)
            .expect("placement references a request");
        *scheduled.get_mut(&p.mode).expect("all modes present") += 1;
        occupancy += clipped(p.transmit.start, p.transmit.end) + clipped(p.receive.start, p.receive.end);
        let shift = (p.t_s - task.t_e).abs() / task.template.window;
        shift_sum += shift;
        let w = 1.0 - k * shift;
        achieved_yield += task.mode.static_priority() as f64 * w * w;
    }
    let ideal_yield: f64 = requests
        .iter()
        .map(|t| t.mode.static_priority() as f64)
        .sum();

    let per_mode_failure = requested
        .iter()
        .map(|(&mode, &req)| {
            let fail = if req == 0 {
                0.0
            } else {
                (req - scheduled[&mode]) as f64 / req as f64
            };
            (mode, fail)
        })
        .collect();

    MetricsReport {
        ssr: n as f64 / m as f64,
        tur: occupancy / (t1 - t0),
        atsr: if n == 0 { 0.0 } else { shift_sum / n as f64 },
        syr: achieved_yield / ideal_yield,
        failure: (m - n) as f64 / m as f64,
        per_mode_failure,
        n_requests: m,
        n_scheduled: n,
    }
}

/// Joins a horizon outcome back to its scenario: censored requests drop out
/// of the ledger, then [`compute_metrics`] does the arithmetic.
pub fn metrics_for_run(
    scenario: &[RadarTask],
    run: &HorizonOutcome,
    horizon: f64,
    k: f64,
) -> MetricsReport {
    let censored: HashSet<u64> = run.censored.iter().map(|t| t.id).collect();
    let resolved: Vec<RadarTask> = scenario
        .iter()
        .filter(|t| !censored.contains(&t.id))
        .cloned()
        .collect();
    debug_assert_eq!(
        resolved.len(),
        run.placements.len() + run.deleted.len(),
        "placements, failures, and censored requests partition the scenario"
    );
    compute_metrics(&run.placements, &resolved, (0.0, horizon), k)
}

// --- tests ----------------------------------------------------------------------
