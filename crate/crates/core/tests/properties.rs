//! Randomized invariants across the library: power recurrences, ranking,
//! guest placement legality, stream generation, and whole scheduler runs.

use proptest::prelude::*;

use dwellsim::energy::{
    decay, min_cooling_time, pulse_update, smoothed_power_oracle, EnergyConfig, TransmitterState,
};
use dwellsim::interleave::{best_placement, update_context, InterleaveContext};
use dwellsim::metrics::metrics_for_run;
use dwellsim::model::{
    dwell_intervals, Placement, PlacementKind, RadarTask, WorkingMode,
};
use dwellsim::oracle::{guest_feasible_by_grid, validate_timeline};
use dwellsim::priority::{rank_candidates, select_best, timeliness, PriorityConfig};
use dwellsim::scenario::{generate_scenario, table_template, ScenarioConfig, WaitMode};
use dwellsim::scheduler::{run_horizon, Policy, SchedulerConfig};

// --- strategies -----------------------------------------------------------------

fn arb_mode() -> impl Strategy<Value = WorkingMode> {
    (0usize..WorkingMode::ALL.len()).prop_map(|i| WorkingMode::ALL[i])
}

fn arb_task(max_te: f64) -> impl Strategy<Value = (WorkingMode, f64)> {
    (arb_mode(), 0.0..max_te)
}

fn task_from(id: u64, mode: WorkingMode, t_e: f64) -> RadarTask {
    RadarTask {
        id,
        mode,
        template: table_template(mode),
        t_e,
        target_id: None,
    }
}

fn arb_scenario_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        600.0..1500.0f64,
        0usize..10,
        0usize..28,
        0.0..4.0f64,
        0usize..3,
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(
            |(horizon, n_general, n_precision, verify_rate_hz, search_streams, ranged, seed)| {
                ScenarioConfig {
                    horizon,
                    n_general,
                    n_precision,
                    verify_rate_hz,
                    search_streams,
                    wait_mode: if ranged { WaitMode::RangeDerived } else { WaitMode::TableFixed },
                    seed,
                    ..ScenarioConfig::default()
                }
            },
        )
}

// --- transmitter power -------------------------------------------------------------

proptest! {
    /// Cooling for t1 then t2 is the same as cooling for t1 + t2.
    #[test]
    fn decay_composes(p in 0.0..1.0f64, dt1 in 0.0..20.0f64, dt2 in 0.0..20.0f64) {
        let cfg = EnergyConfig::default();
        let two_steps = decay(decay(p, dt1, &cfg).unwrap(), dt2, &cfg).unwrap();
        let one_step = decay(p, dt1 + dt2, &cfg).unwrap();
        prop_assert!((two_steps - one_step).abs() < 1e-12);
    }

    /// The iterated recurrence agrees with the closed-form convolution over
    /// whole pulse trains.
    #[test]
    fn pulse_trains_match_the_integral_oracle(
        train in prop::collection::vec((0.2..2.0f64, 0.5..4.0f64, 0.0..10.0f64), 1..20)
    ) {
        let cfg = EnergyConfig { p_max: f64::INFINITY, ..EnergyConfig::default() };
        let mut state = TransmitterState::cold(0.0);
        let mut pulses = Vec::new();
        let mut t = 0.0;
        for &(t_x, a, idle) in &train {
            t += idle;
            pulses.push((t, t + t_x, a));
            t += t_x;
            state = pulse_update(&state, idle, t_x, a, &cfg).unwrap();
        }
        let oracle = smoothed_power_oracle(&pulses, t, &cfg);
        prop_assert!(
            (state.p_out - oracle).abs() <= 1e-9 * oracle.max(1.0),
            "recurrence {} vs oracle {}", state.p_out, oracle
        );
    }

    /// Hotter states and stronger drives never shorten the required cooling.
    #[test]
    fn cooling_grows_with_heat_and_drive(
        p1 in 0.0..1.0f64, p2 in 0.0..1.0f64,
        t_x in 0.2..2.0f64,
        a1 in 0.2..1.9f64, a2 in 0.2..1.9f64,
    ) {
        let cfg = EnergyConfig::default();
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let cooler = TransmitterState { p_out: lo, t_last_tx_end: 0.0 };
        let hotter = TransmitterState { p_out: hi, t_last_tx_end: 0.0 };
        let c_lo = min_cooling_time(&cooler, t_x, a1, &cfg).unwrap();
        let c_hi = min_cooling_time(&hotter, t_x, a1, &cfg).unwrap();
        prop_assert!(c_lo <= c_hi + 1e-12);

        let (wa, sa) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let weak = min_cooling_time(&hotter, t_x, wa, &cfg).unwrap();
        let strong = min_cooling_time(&hotter, t_x, sa, &cfg).unwrap();
        prop_assert!(weak <= strong + 1e-12);
    }

    /// Waiting exactly the published cooling time lands at or under the
    /// ceiling; waiting measurably less overshoots it.
    #[test]
    fn cooling_time_is_tight(p in 0.3..1.0f64, t_x in 0.2..2.0f64, a in 0.5..1.9f64) {
        let cfg = EnergyConfig::default();
        let state = TransmitterState { p_out: p, t_last_tx_end: 0.0 };
        let t_c = min_cooling_time(&state, t_x, a, &cfg).unwrap();
        let at = pulse_update(&state, t_c, t_x, a, &cfg).unwrap();
        prop_assert!(at.p_out <= cfg.p_max + 1e-9);
        if t_c > 1e-3 {
            let early = pulse_update(&state, t_c * (1.0 - 1e-3), t_x, a, &cfg).unwrap();
            prop_assert!(early.p_out > cfg.p_max);
        }
    }
}

// --- priority ranking ----------------------------------------------------------------

proptest! {
    /// Importance and urgency ranks are both permutations of 1..Q, and a
    /// task's ranks do not depend on where it sits in the candidate slice.
    #[test]
    fn ranks_are_order_free_permutations(
        specs in prop::collection::vec(arb_task(500.0), 1..8),
        rot in 0usize..8,
    ) {
        let tasks: Vec<RadarTask> = specs
            .iter()
            .enumerate()
            .map(|(i, &(mode, t_e))| task_from(i as u64, mode, t_e))
            .collect();
        let refs: Vec<&RadarTask> = tasks.iter().collect();
        let ranks = rank_candidates(&refs).unwrap();

        let q = refs.len();
        let mut seen_p: Vec<usize> = ranks.iter().map(|r| r.0).collect();
        let mut seen_d: Vec<usize> = ranks.iter().map(|r| r.1).collect();
        seen_p.sort_unstable();
        seen_d.sort_unstable();
        prop_assert_eq!(&seen_p, &(1..=q).collect::<Vec<_>>());
        prop_assert_eq!(&seen_d, &(1..=q).collect::<Vec<_>>());

        let mut rotated: Vec<&RadarTask> = refs.clone();
        rotated.rotate_left(rot % q);
        let again = rank_candidates(&rotated).unwrap();
        for (slot, r) in again.iter().enumerate() {
            let original_slot = refs.iter().position(|t| t.id == rotated[slot].id).unwrap();
            prop_assert_eq!(*r, ranks[original_slot], "ranks follow the task, not the slot");
        }
    }

    /// The argmax of the synthesis priority is slice-order independent.
    #[test]
    fn selection_ignores_candidate_order(
        specs in prop::collection::vec(arb_task(500.0), 1..8),
        rot in 0usize..8,
        tp in 0.0..500.0f64,
        timely in any::<bool>(),
    ) {
        let cfg = PriorityConfig::default();
        let tasks: Vec<RadarTask> = specs
            .iter()
            .enumerate()
            .map(|(i, &(mode, t_e))| task_from(i as u64, mode, t_e))
            .collect();
        let refs: Vec<&RadarTask> = tasks.iter().collect();
        let first = select_best(&refs, tp, &cfg, timely).unwrap();
        let mut rotated = refs.clone();
        rotated.rotate_left(rot % refs.len());
        let second = select_best(&rotated, tp, &cfg, timely).unwrap();
        prop_assert_eq!(first.task_id, second.task_id);
    }

    /// More shift, less timeliness; and with the default softening, a late
    /// start never scores below an equally shifted early one.
    #[test]
    fn timeliness_decays_with_shift(
        mode_idx in 0usize..5,
        s1 in 0.0..1.0f64,
        s2 in 0.0..1.0f64,
    ) {
        let cfg = PriorityConfig::default();
        let (near, far) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let mode = WorkingMode::ALL[mode_idx];
        let l = table_template(mode).window;
        let task = task_from(0, mode, 1000.0);

        let g_near_early = timeliness(&task, 1000.0 - near * l, &cfg);
        let g_far_early = timeliness(&task, 1000.0 - far * l, &cfg);
        prop_assert!(g_near_early >= g_far_early - 1e-12);
        if far - near > 1e-9 {
            prop_assert!(g_near_early > g_far_early, "early branch strictly decays");
        }

        let g_late = timeliness(&task, 1000.0 + near * l, &cfg);
        prop_assert!(g_late >= g_near_early - 1e-12, "late shifts are softened");
    }
}

// --- guest placement -----------------------------------------------------------------

/// Standalone placement for `task` at `t_s`, as the scheduler would commit it.
fn standalone(task: &RadarTask, t_s: f64) -> Placement {
    let (transmit, wait, receive) = dwell_intervals(&task.template, t_s);
    Placement {
        task_id: task.id,
        mode: task.mode,
        t_s,
        transmit,
        wait,
        receive,
        host_id: None,
        kind: PlacementKind::Standalone,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Whatever `best_placement` emits obeys every rule the grid oracle
    /// checks, and whenever the coarse grid finds a slot the analytic search
    /// cannot miss it.
    #[test]
    fn guest_rides_stay_inside_the_law(
        host_mode_idx in 0usize..2,
        guest in arb_task(8.0),
        host_te in 0.0..4.0f64,
        heat in 0.0..0.9f64,
    ) {
        // Only tracking dwells open their waits to guests.
        let host_mode = [
            WorkingMode::GeneralTracking,
            WorkingMode::PrecisionTracking,
        ][host_mode_idx];
        let host = task_from(100, host_mode, host_te);
        let host_placed = standalone(&host, host_te);
        let ctx = update_context(InterleaveContext::closed(0.0), &host_placed, &host);
        prop_assert!(ctx.has_open_nest());

        let (guest_mode, guest_te) = guest;
        let guest = task_from(101, guest_mode, guest_te);
        let tx_state = TransmitterState { p_out: heat, t_last_tx_end: host_placed.transmit.end };
        let energy = EnergyConfig::default();
        let tp = host_placed.transmit.end;

        let analytic = best_placement(&ctx, &guest, &tx_state, &energy, tp);
        let nest = ctx.nest().unwrap();
        if let Some(p) = &analytic {
            let win_lo = guest.t_e - guest.template.window;
            let win_hi = guest.t_e + guest.template.window - guest.template.dwell_len();
            prop_assert!(p.t_s >= win_lo - 1e-9 && p.t_s <= win_hi + 1e-9, "window holds");
            prop_assert!(p.t_s + 1e-9 >= tp, "no placement behind the pointer");
            match p.kind {
                PlacementKind::ExternalGuest => {
                    prop_assert!(p.transmit.start >= nest.o1_start - 1e-9);
                    prop_assert!(p.transmit.end <= nest.budget_end() + 1e-9, "transmit fits the budget");
                    prop_assert!(p.receive.start >= host_placed.receive.end - 1e-9, "receive queues after the host");
                }
                PlacementKind::InternalGuest => {
                    prop_assert!(p.t_s >= nest.o1_start - 1e-9);
                    prop_assert!(p.dwell_end() <= nest.budget_end() + 1e-9, "whole dwell fits the budget");
                }
                PlacementKind::Standalone => prop_assert!(false, "guests are never standalone"),
            }
            let idle = p.transmit.start - tx_state.t_last_tx_end;
            let after = pulse_update(&tx_state, idle, guest.template.t_x, guest.template.amplitude, &energy).unwrap();
            prop_assert!(after.p_out <= energy.p_max + 1e-9, "power ceiling holds");
        }

        // One-sided agreement is exact: a feasible grid point proves the
        // feasible set is non-empty, so the analytic search must succeed.
        if guest_feasible_by_grid(&ctx, &guest, &tx_state, &energy, tp, 0.01) {
            prop_assert!(analytic.is_some(), "grid found a slot the analytic search missed");
        }
    }
}

// --- stream generation ----------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Streams come out sorted, uniquely numbered, inside the horizon, and
    /// tracking chains keep their template cadence.
    #[test]
    fn generated_streams_are_well_formed(cfg in arb_scenario_config()) {
        let tasks = generate_scenario(&cfg);
        let mut ids = std::collections::HashSet::new();
        for t in &tasks {
            prop_assert!(ids.insert(t.id), "duplicate id {}", t.id);
            prop_assert!(t.t_e >= 0.0 && t.t_e < cfg.horizon);
        }
        for w in tasks.windows(2) {
            prop_assert!(w[0].t_e <= w[1].t_e, "sorted by request time");
        }

        // Per-target tracking cadence: consecutive requests one revisit apart.
        let mut by_target: std::collections::HashMap<u64, Vec<&dwellsim::model::RadarTask>> =
            std::collections::HashMap::new();
        for t in tasks.iter().filter(|t| t.mode.is_tracking()) {
            by_target.entry(t.target_id.unwrap()).or_default().push(t);
        }
        for chain in by_target.values() {
            for w in chain.windows(2) {
                prop_assert!(
                    (w[1].t_e - w[0].t_e - w[0].template.revisit).abs() < 1e-9,
                    "chain cadence"
                );
            }
        }
    }

    /// Range-derived waits only touch tracking and confirmation dwells, and
    /// stay inside the waits implied by the configured range bounds.
    #[test]
    fn range_waits_respect_their_bounds(seed in any::<u64>()) {
        let cfg = ScenarioConfig {
            horizon: 2_000.0,
            n_general: 5,
            n_precision: 5,
            wait_mode: WaitMode::RangeDerived,
            seed,
            ..ScenarioConfig::default()
        };
        let c_km_per_ms = 299_792.458 / 1000.0;
        let lo = 2.0 * cfg.range_km.0 / c_km_per_ms;
        let hi = 2.0 * cfg.range_km.1 / c_km_per_ms;
        for t in generate_scenario(&cfg) {
            if t.mode.is_search() {
                prop_assert_eq!(t.template.t_w, table_template(t.mode).t_w);
            } else {
                prop_assert!(t.template.t_w >= lo - 1e-12 && t.template.t_w <= hi + 1e-12);
            }
        }
    }
}

// --- whole scheduler runs ---------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Every policy, on any stream: the timeline passes the independent
    /// validator, requests resolve exactly once, starts never regress, and
    /// the ratio metrics stay inside their bounds.
    #[test]
    fn scheduler_runs_are_lawful(cfg in arb_scenario_config()) {
        let scheduler = SchedulerConfig::default();
        let tasks = generate_scenario(&cfg);
        for policy in Policy::ALL {
            let run = run_horizon(&tasks, cfg.horizon, &scheduler, policy).unwrap();

            let faults = validate_timeline(&run.placements, &tasks, &scheduler.energy, 1e-9);
            prop_assert!(faults.is_empty(), "{policy}: {faults:?}");

            let mut resolved = std::collections::HashSet::new();
            for id in run
                .placements.iter().map(|p| p.task_id)
                .chain(run.deleted.iter().map(|t| t.id))
                .chain(run.censored.iter().map(|t| t.id))
            {
                prop_assert!(resolved.insert(id), "{policy}: id {id} resolved twice");
            }
            prop_assert_eq!(resolved.len(), tasks.len(), "every request resolves");

            for w in run.placements.windows(2) {
                prop_assert!(w[0].t_s <= w[1].t_s + 1e-12, "commit order follows start order");
            }

            let report = metrics_for_run(&tasks, &run, cfg.horizon, 0.5);
            for (name, v) in [
                ("ssr", report.ssr),
                ("tur", report.tur),
                ("atsr", report.atsr),
                ("syr", report.syr),
                ("failure", report.failure),
            ] {
                prop_assert!((0.0..=1.0).contains(&v), "{policy}: {name} = {v} out of bounds");
            }
        }
    }

    /// The no-interleave baseline cannot oversubscribe a scheduling interval:
    /// dwell lengths committed inside one interval sum to at most the
    /// interval.
    #[test]
    fn pointer_occupancy_fits_each_interval(cfg in arb_scenario_config()) {
        let scheduler = SchedulerConfig::default();
        let tasks = generate_scenario(&cfg);
        let run = run_horizon(&tasks, cfg.horizon, &scheduler, Policy::HpedfPointer).unwrap();
        let intervals = (cfg.horizon / scheduler.si).ceil() as usize;
        let mut per_interval = vec![0.0f64; intervals];
        for p in &run.placements {
            prop_assert!(p.host_id.is_none(), "pointer baseline never interleaves");
            let k = (p.t_s / scheduler.si) as usize;
            per_interval[k] += p.dwell_end() - p.t_s;
        }
        for (k, &o) in per_interval.iter().enumerate() {
            prop_assert!(o <= scheduler.si + 1e-9, "interval {k} oversubscribed: {o}");
        }
    }
}
