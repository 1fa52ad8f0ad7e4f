//! Second opinions for the fast paths: a ground-rules timeline validator and
//! a brute-force grid search for guest feasibility.
//!
//! Everything here re-derives legality from first principles — pairwise
//! interval geometry, window containment, and a pulse-by-pulse power replay —
//! so the scheduler and the interleaving search have something independent to
//! answer to in tests.

use std::collections::{HashMap, HashSet};

use crate::energy::{min_cooling_time, pulse_update, EnergyConfig, TransmitterState};
use crate::interleave::InterleaveContext;
use crate::model::{
    dwell_intervals, eligibility_window, Placement, PlacementKind, RadarTask, TimeInterval,
};

/// Default geometric and power slack accepted by the validator.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Replays a timeline against the ground rules and returns every violation
/// found (empty means valid):
///
/// - all transmit and receive intervals pairwise disjoint (waits are free);
/// - each placement's intervals rebuild exactly from its task's template;
/// - each start time inside its task's eligibility window;
/// - guest placements point at a committed host, standalone ones at none;
/// - pulse-by-pulse power replay never exceeds the ceiling.
pub fn validate_timeline(
    timeline: &[Placement],
    requests: &[RadarTask],
    energy: &EnergyConfig,
    tol: f64,
) -> Vec<String> {
    let mut faults = Vec::new();
    let by_id: HashMap<u64, &RadarTask> = requests.iter().map(|t| (t.id, t)).collect();
    let committed: HashSet<u64> = timeline.iter().map(|p| p.task_id).collect();

    // --- busy intervals pairwise disjoint --------------------------------
    let mut busy: Vec<(TimeInterval, &'static str, u64)> = Vec::with_capacity(timeline.len() * 2);
    for p in timeline {
        busy.push((p.transmit, "transmit", p.task_id));
        busy.push((p.receive, "receive", p.task_id));
    }
    busy.sort_by(|a, b| {
        a.0.start
            .total_cmp(&b.0.start)
            .then(a.0.end.total_cmp(&b.0.end))
    });
    let mut reach = f64::NEG_INFINITY;
    let mut reach_owner = ("", 0u64);
    for &(iv, kind, id) in &busy {
        if iv.start < reach - tol {
            faults.push(format!(
                "{kind} of task {id} [{:.6}, {:.6}] overlaps {} of task {} ending {:.6}",
                iv.start, iv.end, reach_owner.0, reach_owner.1, reach
            ));
        }
        if iv.end > reach {
            reach = iv.end;
            reach_owner = (kind, id);
        }
    }

    // --- per-placement structure ------------------------------------------
    for p in timeline {
        let Some(task) = by_id.get(&p.task_id) else {
            faults.push(format!("placement of task {} has no request", p.task_id));
            continue;
        };
        let (transmit, wait, receive) = dwell_intervals(&task.template, p.t_s);
        for (got, want, part) in [
            (p.transmit, transmit, "transmit"),
            (p.wait, wait, "wait"),
            (p.receive, receive, "receive"),
        ] {
            if (got.start - want.start).abs() > tol || (got.end - want.end).abs() > tol {
                faults.push(format!(
                    "task {} {part} [{:.6}, {:.6}] does not rebuild from its template",
                    p.task_id, got.start, got.end
                ));
            }
        }
        let win = eligibility_window(task);
        if p.t_s < win.lo - tol || p.t_s > win.hi + tol {
            faults.push(format!(
                "task {} starts at {:.6} outside its window [{:.6}, {:.6}]",
                p.task_id, p.t_s, win.lo, win.hi
            ));
        }
        match p.kind {
            PlacementKind::Standalone => {
                if p.host_id.is_some() {
                    faults.push(format!("standalone task {} carries a host", p.task_id));
                }
            }
            PlacementKind::ExternalGuest | PlacementKind::InternalGuest => match p.host_id {
                Some(host) if committed.contains(&host) => {}
                Some(host) => faults.push(format!(
                    "guest task {} names host {host} which never committed",
                    p.task_id
                )),
                None => faults.push(format!("guest task {} has no host", p.task_id)),
            },
        }
    }

    // --- power replay -------------------------------------------------------
    let mut order: Vec<&Placement> = timeline.iter().collect();
    order.sort_by(|a, b| a.transmit.start.total_cmp(&b.transmit.start));
    let mut state = TransmitterState::cold(0.0);
    for p in &order {
        let Some(task) = by_id.get(&p.task_id) else {
            continue; // already reported above
        };
        let idle = (p.transmit.start - state.t_last_tx_end).max(0.0);
        match pulse_update(
            &state,
            idle,
            task.template.t_x,
            task.template.amplitude,
            energy,
        ) {
            Ok(next) => {
                if next.p_out > energy.p_max + tol {
                    faults.push(format!(
                        "task {} pulse at {:.6} drives power to {:.9} over ceiling {}",
                        p.task_id, p.transmit.start, next.p_out, energy.p_max
                    ));
                }
                state = next;
            }
            Err(e) => faults.push(format!(
                "task {} pulse at {:.6} cannot replay: {e}",
                p.task_id, p.transmit.start
            )),
        }
    }

    faults
}

/// Brute-force guest feasibility: walk start times across the open budget at
/// `step` resolution and check the raw legality rules for both ride modes.
///
/// External legality at a grid start: transmit ends inside the budget, the
/// receive clears the host receive and every committed receive. Internal
/// legality: the whole dwell ends inside the budget. Both require the start
/// to sit past the decision time, the cooled point, and inside the guest's
/// window. Returns `true` as soon as any grid point admits either mode.
///
/// Fits are judged with the same [`DEFAULT_TOL`] slack the planner publishes:
/// the stock template table makes some rides exactly flush (transmit against
/// the budget end, receive against the host receive), and a slack-free
/// comparison would flip those verdicts on one-ulp float noise.
pub fn guest_feasible_by_grid(
    ctx: &InterleaveContext,
    guest: &RadarTask,
    tx_state: &TransmitterState,
    energy: &EnergyConfig,
    tp: f64,
    step: f64,
) -> bool {
    let Some(nest) = ctx.nest() else {
        return false;
    };
    let budget_end = nest.budget_end();
    let mut k = 0u64;
    loop {
        let t_s = nest.o1_start + step * k as f64;
        if t_s > budget_end {
            return false;
        }
        k += 1;
        if guest_feasible_at(ctx, guest, tx_state, energy, tp, t_s) {
            return true;
        }
    }
}

/// Raw-rule legality of a guest dwell starting exactly at `t_s`, judged with
/// the planner's published slack. This is the grid search's inner loop,
/// exposed so tests can probe individual start times around a disagreement.
pub fn guest_feasible_at(
    ctx: &InterleaveContext,
    guest: &RadarTask,
    tx_state: &TransmitterState,
    energy: &EnergyConfig,
    tp: f64,
    t_s: f64,
) -> bool {
    let Some(nest) = ctx.nest() else {
        return false;
    };
    let tpl = &guest.template;
    let win = eligibility_window(guest);
    if win.is_empty() {
        return false;
    }
    let Ok(t_c) = min_cooling_time(tx_state, tpl.t_x, tpl.amplitude, energy) else {
        return false;
    };
    let budget_end = nest.budget_end();
    let host_rx = nest.host.receive;
    let earliest = tp.max(win.lo).max(nest.o1_start + t_c);
    if t_s < earliest - DEFAULT_TOL || t_s > win.hi + DEFAULT_TOL || t_s > budget_end {
        return false;
    }
    if t_s + tpl.t_x <= budget_end + DEFAULT_TOL {
        let rx_start = t_s + tpl.t_x + tpl.t_w;
        let rx = TimeInterval::new(rx_start, rx_start + tpl.t_r);
        let clears = |pr: &TimeInterval| {
            rx.start >= pr.end - DEFAULT_TOL || rx.end <= pr.start + DEFAULT_TOL
        };
        if rx.start >= host_rx.end - DEFAULT_TOL && nest.pending_rx.iter().all(clears) {
            return true;
        }
    }
    t_s + tpl.dwell_len() <= budget_end + DEFAULT_TOL
}

// --- tests -----------------------------------------------------------------------
