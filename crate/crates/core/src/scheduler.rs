//! The online time-pointer scheduling loop, parameterized by policy.
//!
//! Time advances through a pointer `tp`. At each decision point the scheduler
//! ranks every task whose eligibility window contains `tp`, takes the winner,
//! and tries the cheapest home for it: riding an open wait (guest modes),
//! else a standalone dwell pushed clear of committed receives and transmitter
//! heat. Failing both, the pointer steps forward by `dt` and the field is
//! re-ranked from scratch — priorities are dynamic, so every decision gets a
//! fresh ranking.
//!
//! Scheduling happens in fixed intervals (`si` long). Tasks that stay
//! unplaced but still have time left re-enter the next interval; tasks whose
//! deadline the pointer has passed are failures. Transmitter state and the
//! committed-receive frontier are the only things carried across intervals.

use serde::{Deserialize, Serialize};

use crate::energy::{min_cooling_time, pulse_update, EnergyConfig, TransmitterState};
use crate::error::{Error, Result};
use crate::interleave::{best_placement, update_context, InterleaveContext};
use crate::model::{
    check_interval, classify_unscheduled, dwell_intervals, eligibility_window, Placement,
    PlacementKind, RadarTask, ScheduleOutcome,
};
use crate::priority::{select_best, PriorityConfig};

// --- policies ---------------------------------------------------------------

/// Scheduling policy under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Synthesis priority (importance–urgency blend times the time-shift
    /// factor) with both interleaving modes enabled.
    SynthesisInterleave,
    /// Importance–urgency ranking only (time-shift factor pinned to 1),
    /// interleaving still enabled.
    HpedfInterleave,
    /// Importance–urgency ranking, no interleaving: every dwell is standalone
    /// and the pointer walks full dwell lengths.
    HpedfPointer,
}

impl Policy {
    pub const ALL: [Policy; 3] = [
        Policy::SynthesisInterleave,
        Policy::HpedfInterleave,
        Policy::HpedfPointer,
    ];

    /// Whether ranking multiplies in the time-shift factor.
    pub fn use_timeliness(&self) -> bool {
        matches!(self, Policy::SynthesisInterleave)
    }

    /// Whether dwells may ride inside an open wait.
    pub fn interleave_enabled(&self) -> bool {
        !matches!(self, Policy::HpedfPointer)
    }

    /// Stable lower-case name (CLI arguments, CSV columns).
    pub fn label(&self) -> &'static str {
        match self {
            Policy::SynthesisInterleave => "synthesis_interleave",
            Policy::HpedfInterleave => "hpedf_interleave",
            Policy::HpedfPointer => "hpedf_pointer",
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "synthesis_interleave" | "synthesis" => Ok(Policy::SynthesisInterleave),
            "hpedf_interleave" => Ok(Policy::HpedfInterleave),
            "hpedf_pointer" | "pointer" => Ok(Policy::HpedfPointer),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

// --- configuration ------------------------------------------------------------

/// Loop constants plus the nested energy and priority knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerConfig {
    /// Scheduling interval length, ms.
    pub si: f64,
    /// Minimum time-pointer step when nothing can be placed, ms.
    pub dt: f64,
    pub energy: EnergyConfig,
    pub priority: PriorityConfig,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            si: 50.0,
            dt: 0.1,
            energy: EnergyConfig::default(),
            priority: PriorityConfig::default(),
        }
    }
}

impl SchedulerConfig {
    /// Structural sanity: positive interval, positive step smaller than the
    /// interval.
    pub fn validate(&self) -> Result<()> {
        if !(self.si > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "scheduling interval must be positive, got {}",
                self.si
            )));
        }
        if !(self.dt > 0.0 && self.dt < self.si) {
            return Err(Error::InvalidConfig(format!(
                "pointer step must satisfy 0 < dt < si, got dt={} si={}",
                self.dt, self.si
            )));
        }
        Ok(())
    }
}

/// State carried between consecutive intervals: transmitter heat and the end
/// of the last committed receive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerState {
    pub tx: TransmitterState,
    pub frontier: f64,
}

impl SchedulerState {
    /// Cold transmitter, clear timeline.
    pub fn cold() -> Self {
        Self {
            tx: TransmitterState::cold(0.0),
            frontier: 0.0,
        }
    }
}

// --- one scheduling interval ---------------------------------------------------

/// Runs the pointer loop over `[t0, t_end)`.
///
/// Every committed standalone dwell both starts and ends inside the interval;
/// guest dwells live inside their host's structure and may overhang the
/// boundary, which the carried frontier keeps safe. Unplaced tasks come back
/// classified: still-viable ones as `delayed`, expired ones as `deleted`.
pub fn schedule_interval(
    pending: Vec<RadarTask>,
    t0: f64,
    t_end: f64,
    cfg: &SchedulerConfig,
    policy: Policy,
    carry: SchedulerState,
) -> Result<(ScheduleOutcome, SchedulerState)> {
    check_interval(t0, t_end)?;
    let mut live = pending;
    let mut out = ScheduleOutcome::default();
    let mut ctx = InterleaveContext::closed(carry.frontier);
    let mut tx = carry.tx;
    let mut tp = t0;

    while tp <= t_end && !live.is_empty() {
        // Windows the pointer has passed can never be served.
        let mut i = 0;
        while i < live.len() {
            if eligibility_window(&live[i]).hi < tp {
                out.deleted.push(live.swap_remove(i));
            } else {
                i += 1;
            }
        }

        let elig_idx: Vec<usize> = (0..live.len())
            .filter(|&i| eligibility_window(&live[i]).contains(tp))
            .collect();
        if elig_idx.is_empty() {
            if live.is_empty() {
                break;
            }
            tp += cfg.dt;
            continue;
        }

        let chosen = {
            let eligible: Vec<&RadarTask> = elig_idx.iter().map(|&i| &live[i]).collect();
            select_best(&eligible, tp, &cfg.priority, policy.use_timeliness())?
        };
        let live_idx = elig_idx[chosen.index];
        let task = live[live_idx].clone();
        let tpl = task.template;

        // First choice: ride the open wait.
        if policy.interleave_enabled() && ctx.has_open_nest() {
            if let Some(pl) = best_placement(&ctx, &task, &tx, &cfg.energy, tp) {
                tx = pulse_update(
                    &tx,
                    pl.transmit.start - tx.t_last_tx_end,
                    tpl.t_x,
                    tpl.amplitude,
                    &cfg.energy,
                )?;
                tp = pl.transmit.end;
                ctx = update_context(ctx, &pl, &task);
                out.executed.push(pl);
                live.swap_remove(live_idx);
                continue;
            }
        }

        // Fallback: standalone, pushed clear of committed receives and heat.
        let t_c = match min_cooling_time(&tx, tpl.t_x, tpl.amplitude, &cfg.energy) {
            Ok(v) => v,
            Err(_) => {
                // No cooling time makes this pulse drivable; the request can
                // never run on this transmitter.
                out.deleted.push(live.swap_remove(live_idx));
                continue;
            }
        };
        let t_s = tp.max(ctx.frontier()).max(tx.t_last_tx_end + t_c);
        let win = eligibility_window(&task);
        if t_s <= win.hi && t_s + tpl.dwell_len() <= t_end {
            tx = pulse_update(
                &tx,
                t_s - tx.t_last_tx_end,
                tpl.t_x,
                tpl.amplitude,
                &cfg.energy,
            )?;
            let (transmit, wait, receive) = dwell_intervals(&tpl, t_s);
            let pl = Placement {
                task_id: task.id,
                mode: task.mode,
                t_s,
                transmit,
                wait,
                receive,
                host_id: None,
                kind: PlacementKind::Standalone,
            };
            // Tracking dwells open their wait to guests, so the pointer stops
            // at the transmit end; everything else walks the full dwell.
            tp = if policy.interleave_enabled() && task.mode.is_tracking() {
                pl.transmit.end
            } else {
                pl.dwell_end()
            };
            ctx = update_context(ctx, &pl, &task);
            out.executed.push(pl);
            live.swap_remove(live_idx);
        } else {
            tp += cfg.dt;
        }
    }

    let (delayed, deleted) = classify_unscheduled(live, t_end);
    out.delayed = delayed;
    out.deleted.extend(deleted);
    Ok((
        out,
        SchedulerState {
            tx,
            frontier: ctx.frontier(),
        },
    ))
}

// --- full-horizon runs -----------------------------------------------------------

/// Everything a horizon run produces, ready for metric extraction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HorizonOutcome {
    /// Committed placements in commit order.
    pub placements: Vec<Placement>,
    /// Requests whose windows expired unserved: the scheduling failures.
    pub deleted: Vec<RadarTask>,
    /// Requests still inside their windows when the horizon closed; counted
    /// neither as served nor as failed.
    pub censored: Vec<RadarTask>,
}

/// Drives [`schedule_interval`] over consecutive `si` slices of `[0, horizon)`.
///
/// A request is admitted to the first interval its eligibility window opens
/// in; unplaced-but-viable tasks flow into the next interval's pool.
/// Deterministic: same scenario, config, and policy — same outcome.
pub fn run_horizon(
    scenario: &[RadarTask],
    horizon: f64,
    cfg: &SchedulerConfig,
    policy: Policy,
) -> Result<HorizonOutcome> {
    cfg.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "horizon must be positive, got {horizon}"
        )));
    }

    // Admission order: by window opening, not request time (long windows open
    // early), with ids breaking exact ties.
    let mut order: Vec<usize> = (0..scenario.len()).collect();
    order.sort_by(|&a, &b| {
        let (ta, tb) = (&scenario[a], &scenario[b]);
        (ta.t_e - ta.template.window)
            .total_cmp(&(tb.t_e - tb.template.window))
            .then(ta.id.cmp(&tb.id))
    });

    let mut outcome = HorizonOutcome::default();
    let mut carry = SchedulerState::cold();
    let mut backlog: Vec<RadarTask> = Vec::new();
    let mut cursor = 0usize;
    let intervals = (horizon / cfg.si).ceil() as usize;
    for k in 0..intervals {
        let t0 = k as f64 * cfg.si;
        let t_end = (t0 + cfg.si).min(horizon);
        while cursor < order.len() {
            let task = &scenario[order[cursor]];
            if task.t_e - task.template.window < t_end {
                backlog.push(task.clone());
                cursor += 1;
            } else {
                break;
            }
        }
        let (out, next) = schedule_interval(
            std::mem::take(&mut backlog),
            t0,
            t_end,
            cfg,
            policy,
            carry,
        )?;
        carry = next;
        outcome.placements.extend(out.executed);
        outcome.deleted.extend(out.deleted);
        backlog = out.delayed;
    }
    // Whatever still waits has its deadline beyond the horizon.
    outcome.censored = backlog;
    Ok(outcome)
}

// --- tests -----------------------------------------------------------------------
