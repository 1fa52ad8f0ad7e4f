//! Pulse interleaving: riding one dwell inside another's wait.
//!
//! When a tracking dwell is committed, its wait interval opens as a nest.
//! A guest can ride the nest two ways:
//!
//! * external: the guest transmits inside the remaining wait budget and
//!   receives after the host's receive has finished, so the host receive
//!   sits inside the guest's wait;
//! * internal: the guest's whole dwell fits inside the budget, placed as
//!   late as possible so its receive ends flush against the host's receive
//!   start.
//!
//! Only the most recent open wait accepts guests; committing a guest either
//! shrinks the budget (external) or replaces the nest with the guest's own
//! wait (internal). Every returned placement keeps all transmit and receive
//! intervals pairwise disjoint against the committed timeline and respects
//! the transmitter power ceiling and the guest's eligibility window.

use crate::energy::{min_cooling_time, EnergyConfig, TransmitterState};
use crate::model::{
    dwell_intervals, eligibility_window, Placement, PlacementKind, RadarTask, TimeInterval,
};

// --------------------------------------------------------------------------
// context
// --------------------------------------------------------------------------

/// The open nest: one wait interval currently accepting guests.
#[derive(Debug, Clone, PartialEq)]
pub struct Nest {
    /// Most recent dwell whose wait is open.
    pub host: Placement,
    /// Start of the remaining budget; always the end of the last committed
    /// transmit.
    pub o1_start: f64,
    /// Remaining in-wait budget (ms); the budget interval is
    /// `[o1_start, o1_start + o1]` and ends at the host wait end.
    pub o1: f64,
    /// Committed receive intervals at or after the budget end, sorted by
    /// start. A new external guest's receive must dodge all of them.
    pub pending_rx: Vec<TimeInterval>,
}

impl Nest {
    pub fn budget_end(&self) -> f64 {
        self.o1_start + self.o1
    }
}

/// Interleaving state carried by the scheduler between placement decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleaveContext {
    nest: Option<Nest>,
    /// End of every committed receive so far: the earliest time a standalone
    /// dwell may start without touching the committed timeline.
    frontier: f64,
}

impl InterleaveContext {
    /// No nest open; standalone dwells may start from `frontier`.
    pub fn closed(frontier: f64) -> Self {
        Self { nest: None, frontier }
    }

    pub fn nest(&self) -> Option<&Nest> {
        self.nest.as_ref()
    }

    pub fn has_open_nest(&self) -> bool {
        self.nest.is_some()
    }

    /// Earliest standalone start time.
    pub fn frontier(&self) -> f64 {
        self.frontier
    }

    /// Remaining in-wait budget; zero with no nest open.
    pub fn o1(&self) -> f64 {
        self.nest.as_ref().map_or(0.0, |n| n.o1)
    }
}

// --------------------------------------------------------------------------
// feasibility
// --------------------------------------------------------------------------

/// Slack tolerated on budget boundaries to absorb float noise from interval
/// arithmetic; well below any dwell duration.
const EDGE: f64 = 1e-9;

fn guest_placement(guest: &RadarTask, t_s: f64, host_id: u64, kind: PlacementKind) -> Placement {
    let (transmit, wait, receive) = dwell_intervals(&guest.template, t_s);
    Placement {
        task_id: guest.id,
        mode: guest.mode,
        t_s,
        transmit,
        wait,
        receive,
        host_id: Some(host_id),
        kind,
    }
}

/// Try the external ride: guest transmit inside the remaining budget, guest
/// receive after the host's receive and clear of every committed receive.
/// `tp` is the decision time; the transmit cannot start before it.
///
/// The transmit start is the earliest point satisfying cooling, the
/// host-receive clearance, and the committed-receive dodging; `None` when
/// that point pushes the transmit past the budget or the guest's window.
pub fn feasible_external(
    ctx: &InterleaveContext,
    guest: &RadarTask,
    tx_state: &TransmitterState,
    energy: &EnergyConfig,
    tp: f64,
) -> Option<Placement> {
    let nest = ctx.nest.as_ref()?;
    let tpl = &guest.template;
    let t_c_min = min_cooling_time(tx_state, tpl.t_x, tpl.amplitude, energy).ok()?;
    let win = eligibility_window(guest);
    if win.is_empty() {
        return None;
    }

    // Receive must clear the host receive end; transmit must clear cooling.
    let mut t_s = tp
        .max(win.lo)
        .max(nest.o1_start + t_c_min)
        .max(nest.host.receive.end - tpl.t_x - tpl.t_w);

    // Dodge committed receives: push the guest receive past each blocker.
    for pr in &nest.pending_rx {
        let rx_start = t_s + tpl.t_x + tpl.t_w;
        let rx = TimeInterval::new(rx_start, rx_start + tpl.t_r);
        if rx.overlaps(pr) {
            t_s = pr.end - tpl.t_x - tpl.t_w;
        }
    }

    if t_s + tpl.t_x > nest.budget_end() + EDGE || t_s > win.hi {
        return None;
    }
    Some(guest_placement(guest, t_s, nest.host.task_id, PlacementKind::ExternalGuest))
}

/// Try the internal ride: the whole guest dwell inside the budget, flush
/// against the budget end so the guest receive ends where the host receive
/// begins. Slides earlier only if the guest's window demands it.
pub fn feasible_internal(
    ctx: &InterleaveContext,
    guest: &RadarTask,
    tx_state: &TransmitterState,
    energy: &EnergyConfig,
    tp: f64,
) -> Option<Placement> {
    let nest = ctx.nest.as_ref()?;
    let tpl = &guest.template;
    let t_c_min = min_cooling_time(tx_state, tpl.t_x, tpl.amplitude, energy).ok()?;
    let win = eligibility_window(guest);
    if win.is_empty() {
        return None;
    }

    let t_s = (nest.budget_end() - tpl.dwell_len()).min(win.hi);
    let earliest = tp.max(win.lo).max(nest.o1_start + t_c_min);
    if t_s + EDGE < earliest {
        return None;
    }
    debug_assert!(nest.pending_rx.iter().all(|r| r.start + EDGE >= nest.budget_end()));
    Some(guest_placement(guest, t_s, nest.host.task_id, PlacementKind::InternalGuest))
}

/// Pick the ride that packs the guest receive closest to the host receive;
/// equal gaps fall to external. `None` when neither mode fits.
pub fn best_placement(
    ctx: &InterleaveContext,
    guest: &RadarTask,
    tx_state: &TransmitterState,
    energy: &EnergyConfig,
    tp: f64,
) -> Option<Placement> {
    let nest = ctx.nest.as_ref()?;
    let host_rx = nest.host.receive;
    let external = feasible_external(ctx, guest, tx_state, energy, tp);
    let internal = feasible_internal(ctx, guest, tx_state, energy, tp);
    match (external, internal) {
        (Some(e), Some(i)) => {
            let gap_e = e.receive.start - host_rx.end;
            let gap_i = host_rx.start - i.receive.end;
            // Gaps equal within float noise count as a tie, which goes
            // external.
            Some(if gap_i + EDGE < gap_e { i } else { e })
        }
        (Some(e), None) => Some(e),
        (None, Some(i)) => Some(i),
        (None, None) => None,
    }
}

// --------------------------------------------------------------------------
// context updates
// --------------------------------------------------------------------------

/// Fold a committed placement into the context.
///
/// Standalone tracking dwells open a fresh nest over their wait; standalone
/// non-tracking dwells close the nest. External guests consume budget and
/// add their receive to the dodge list; internal guests hand the nest to
/// their own wait. Standalone commits must start at or past the frontier.
pub fn update_context(ctx: InterleaveContext, placement: &Placement, task: &RadarTask) -> InterleaveContext {
    let frontier = ctx.frontier.max(placement.receive.end);
    match placement.kind {
        PlacementKind::Standalone => {
            debug_assert!(placement.t_s + EDGE >= ctx.frontier, "standalone dwell before frontier");
            if task.mode.is_tracking() {
                InterleaveContext {
                    nest: Some(Nest {
                        host: placement.clone(),
                        o1_start: placement.transmit.end,
                        o1: task.template.t_w,
                        pending_rx: vec![placement.receive],
                    }),
                    frontier,
                }
            } else {
                InterleaveContext { nest: None, frontier }
            }
        }
        PlacementKind::ExternalGuest => {
            let mut nest = ctx.nest.expect("external guest without an open nest");
            nest.o1 = nest.budget_end() - placement.transmit.end;
            nest.o1_start = placement.transmit.end;
            let at = nest
                .pending_rx
                .partition_point(|r| r.start <= placement.receive.start);
            nest.pending_rx.insert(at, placement.receive);
            InterleaveContext { nest: Some(nest), frontier }
        }
        PlacementKind::InternalGuest => {
            let old = ctx.nest.expect("internal guest without an open nest");
            let mut pending_rx = old.pending_rx;
            let at = pending_rx.partition_point(|r| r.start <= placement.receive.start);
            pending_rx.insert(at, placement.receive);
            InterleaveContext {
                nest: Some(Nest {
                    host: placement.clone(),
                    o1_start: placement.transmit.end,
                    o1: task.template.t_w,
                    pending_rx,
                }),
                frontier,
            }
        }
    }
}
