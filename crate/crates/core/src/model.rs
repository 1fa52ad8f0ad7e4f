//! Core task and dwell model.
//!
//! A dwell is one radar action: transmit for `t_x`, wait `t_w` for the echo,
//! then receive for `t_r`. All times are milliseconds on a single clock that
//! starts at zero. A request asks for a dwell near its expected execution
//! time `t_e`, and may be shifted anywhere inside a symmetric window of
//! half-width `l` as long as the dwell still completes by the deadline
//! `t_e + l`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// --------------------------------------------------------------------------
// time intervals
// --------------------------------------------------------------------------

/// Half-open span of simulation time, in milliseconds.
///
/// Overlap tests are strict: two intervals that merely touch at an endpoint
/// (one ends exactly when the other begins) do not overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    /// Length in milliseconds.
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// True when the interiors intersect; touching endpoints are allowed.
    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }
}

// --------------------------------------------------------------------------
// working modes
// --------------------------------------------------------------------------

/// Radar working mode. Static priority rises from search to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkingMode {
    LowPrioritySearch,
    HighPrioritySearch,
    GeneralTracking,
    PrecisionTracking,
    Verify,
}

impl WorkingMode {
    pub const ALL: [WorkingMode; 5] = [
        WorkingMode::LowPrioritySearch,
        WorkingMode::HighPrioritySearch,
        WorkingMode::GeneralTracking,
        WorkingMode::PrecisionTracking,
        WorkingMode::Verify,
    ];

    /// Fixed mode importance, 1 (lowest) through 5 (highest).
    pub fn static_priority(&self) -> u32 {
        match self {
            WorkingMode::LowPrioritySearch => 1,
            WorkingMode::HighPrioritySearch => 2,
            WorkingMode::GeneralTracking => 3,
            WorkingMode::PrecisionTracking => 4,
            WorkingMode::Verify => 5,
        }
    }

    /// Tracking dwells keep their wait interval open for guests.
    pub fn is_tracking(&self) -> bool {
        matches!(
            self,
            WorkingMode::GeneralTracking | WorkingMode::PrecisionTracking
        )
    }

    /// Search dwells take the discounted time-shift factor.
    pub fn is_search(&self) -> bool {
        matches!(
            self,
            WorkingMode::LowPrioritySearch | WorkingMode::HighPrioritySearch
        )
    }

    /// Stable lowercase name used in files and CSV columns.
    pub fn label(&self) -> &'static str {
        match self {
            WorkingMode::LowPrioritySearch => "low_priority_search",
            WorkingMode::HighPrioritySearch => "high_priority_search",
            WorkingMode::GeneralTracking => "general_tracking",
            WorkingMode::PrecisionTracking => "precision_tracking",
            WorkingMode::Verify => "verify",
        }
    }
}

impl std::fmt::Display for WorkingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for WorkingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        WorkingMode::ALL
            .iter()
            .copied()
            .find(|m| m.label() == s)
            .ok_or_else(|| format!("unknown working mode `{s}`"))
    }
}

// --------------------------------------------------------------------------
// dwell templates and tasks
// --------------------------------------------------------------------------

/// Per-mode dwell shape and request cadence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DwellTemplate {
    /// Transmit duration (ms).
    pub t_x: f64,
    /// Echo wait duration (ms).
    pub t_w: f64,
    /// Receive duration (ms).
    pub t_r: f64,
    /// Shift window half-width `l` (ms); deadline is `t_e + l`.
    pub window: f64,
    /// Revisit spacing between consecutive requests of one stream (ms).
    pub revisit: f64,
    /// Drive amplitude fed into the transmitter power model.
    pub amplitude: f64,
}

impl DwellTemplate {
    /// Full dwell length `t_x + t_w + t_r` (ms).
    pub fn dwell_len(&self) -> f64 {
        self.t_x + self.t_w + self.t_r
    }
}

/// One dwell request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadarTask {
    /// Unique id; also the final tie-break everywhere.
    pub id: u64,
    pub mode: WorkingMode,
    pub template: DwellTemplate,
    /// Expected execution time (ms).
    pub t_e: f64,
    /// Target lineage for tracking chains; search streams carry none.
    pub target_id: Option<u64>,
}

impl RadarTask {
    /// Hard completion deadline `t_e + l` (ms).
    pub fn deadline(&self) -> f64 {
        self.t_e + self.template.window
    }
}

// --------------------------------------------------------------------------
// placements
// --------------------------------------------------------------------------

/// How a committed dwell was placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementKind {
    /// Own slot on the timeline.
    Standalone,
    /// Transmit inside the host wait, receive after the host receive.
    ExternalGuest,
    /// Entire dwell inside the host wait.
    InternalGuest,
}

impl PlacementKind {
    pub fn label(&self) -> &'static str {
        match self {
            PlacementKind::Standalone => "standalone",
            PlacementKind::ExternalGuest => "external_guest",
            PlacementKind::InternalGuest => "internal_guest",
        }
    }
}

impl std::fmt::Display for PlacementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A committed dwell: concrete transmit/wait/receive spans for one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub task_id: u64,
    pub mode: WorkingMode,
    /// Actual start of transmit (ms).
    pub t_s: f64,
    pub transmit: TimeInterval,
    pub wait: TimeInterval,
    pub receive: TimeInterval,
    /// Host dwell when this one rode inside another's wait.
    pub host_id: Option<u64>,
    pub kind: PlacementKind,
}

impl Placement {
    /// End of the whole dwell, i.e. end of receive (ms).
    pub fn dwell_end(&self) -> f64 {
        self.receive.end
    }
}

/// Result of scheduling one batch interval.
#[derive(Debug, Clone, Default)]
pub struct ScheduleOutcome {
    /// Dwells committed this interval, in commit order.
    pub executed: Vec<Placement>,
    /// Unplaced tasks whose deadline survives past the interval end.
    pub delayed: Vec<RadarTask>,
    /// Unplaced tasks that can no longer meet their deadline.
    pub deleted: Vec<RadarTask>,
}

// --------------------------------------------------------------------------
// operations
// --------------------------------------------------------------------------

/// Expand a dwell starting at `t_s` into its transmit/wait/receive spans.
pub fn dwell_intervals(template: &DwellTemplate, t_s: f64) -> (TimeInterval, TimeInterval, TimeInterval) {
    let tx_end = t_s + template.t_x;
    let w_end = tx_end + template.t_w;
    let r_end = w_end + template.t_r;
    (
        TimeInterval::new(t_s, tx_end),
        TimeInterval::new(tx_end, w_end),
        TimeInterval::new(w_end, r_end),
    )
}

/// Feasible start times for a task: every `t_s` here finishes by the deadline.
///
/// The window is `[t_e - l, t_e + l - dwell_len]`; it is empty when the dwell
/// is longer than `2 l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EligibilityWindow {
    pub lo: f64,
    pub hi: f64,
}

impl EligibilityWindow {
    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// Compute the start-time window for a task.
pub fn eligibility_window(task: &RadarTask) -> EligibilityWindow {
    let l = task.template.window;
    EligibilityWindow {
        lo: task.t_e - l,
        hi: task.t_e + l - task.template.dwell_len(),
    }
}

/// Split unplaced tasks at an interval boundary: keep those whose deadline
/// still lies at or past `t_end`, drop the rest as scheduling failures.
pub fn classify_unscheduled(tasks: Vec<RadarTask>, t_end: f64) -> (Vec<RadarTask>, Vec<RadarTask>) {
    let mut delayed = Vec::new();
    let mut deleted = Vec::new();
    for task in tasks {
        if task.deadline() >= t_end {
            delayed.push(task);
        } else {
            deleted.push(task);
        }
    }
    (delayed, deleted)
}

/// Validate a batch interval argument.
pub fn check_interval(t0: f64, t_end: f64) -> Result<()> {
    if t_end <= t0 {
        return Err(Error::MalformedInterval { start: t0, end: t_end });
    }
    Ok(())
}
