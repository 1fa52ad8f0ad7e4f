//! Seeded request-stream generation: tracking revisit chains, periodic
//! search scans, and Poisson-arrival confirmation dwells.
//!
//! The stream is a pure function of [`ScenarioConfig`] — same config, same
//! bytes — so sweep cells can be regenerated at will and runs replayed
//! exactly. Tracking chains are pre-generated at their nominal revisit
//! cadence; the scheduler consumes the stream but never mutates it, which
//! keeps every policy inside a sweep cell looking at identical demand.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DwellTemplate, RadarTask, WorkingMode};

// --- built-in dwell parameter table ----------------------------------------

/// Speed of light, km per ms (range → round-trip wait conversion).
const C_KM_PER_MS: f64 = 299_792.458 / 1000.0;

/// Default transmit drive level for tracking and confirmation dwells.
///
/// Sized so that sustained high-load operation pays sub-millisecond cooling
/// gaps: the power ceiling binds often enough to matter without freezing the
/// timeline outright.
pub const AMP_TRACKING: f64 = 1.6;
/// Default transmit drive level for search dwells (longer pulses, lower drive).
pub const AMP_SEARCH: f64 = 1.2;

/// Canonical per-mode dwell template: durations and window in ms, revisit
/// interval in ms (1000 / rate in Hz).
pub fn table_template(mode: WorkingMode) -> DwellTemplate {
    let (t_x, t_w, t_r, window, revisit, amplitude) = match mode {
        WorkingMode::LowPrioritySearch => (1.0, 2.0, 1.0, 100.0, 20.0, AMP_SEARCH),
        WorkingMode::HighPrioritySearch => (0.5, 1.5, 0.5, 50.0, 20.0, AMP_SEARCH),
        WorkingMode::GeneralTracking => (0.5, 0.9, 0.5, 50.0, 500.0, AMP_TRACKING),
        WorkingMode::PrecisionTracking => (0.5, 0.5, 0.5, 30.0, 200.0, AMP_TRACKING),
        WorkingMode::Verify => (1.0, 1.5, 1.0, 30.0, 500.0, AMP_TRACKING),
    };
    DwellTemplate { t_x, t_w, t_r, window, revisit, amplitude }
}

/// The full per-mode template table, overridable row by row from a config
/// file. Defaults to [`table_template`] for every mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemplateSet {
    pub low_priority_search: DwellTemplate,
    pub high_priority_search: DwellTemplate,
    pub general_tracking: DwellTemplate,
    pub precision_tracking: DwellTemplate,
    pub verify: DwellTemplate,
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self {
            low_priority_search: table_template(WorkingMode::LowPrioritySearch),
            high_priority_search: table_template(WorkingMode::HighPrioritySearch),
            general_tracking: table_template(WorkingMode::GeneralTracking),
            precision_tracking: table_template(WorkingMode::PrecisionTracking),
            verify: table_template(WorkingMode::Verify),
        }
    }
}

impl TemplateSet {
    /// Template for one working mode.
    pub fn get(&self, mode: WorkingMode) -> DwellTemplate {
        match mode {
            WorkingMode::LowPrioritySearch => self.low_priority_search,
            WorkingMode::HighPrioritySearch => self.high_priority_search,
            WorkingMode::GeneralTracking => self.general_tracking,
            WorkingMode::PrecisionTracking => self.precision_tracking,
            WorkingMode::Verify => self.verify,
        }
    }

    /// Durations positive, windows long enough to hold their own dwell.
    pub fn validate(&self) -> Result<()> {
        for mode in WorkingMode::ALL {
            let t = self.get(mode);
            if !(t.t_x > 0.0 && t.t_w >= 0.0 && t.t_r > 0.0 && t.amplitude > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{mode} template durations and drive must be positive"
                )));
            }
            if !(t.window >= t.dwell_len()) || !(t.revisit > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{mode} template needs window >= dwell length and a positive revisit"
                )));
            }
        }
        Ok(())
    }
}

// --- configuration ----------------------------------------------------------

/// How per-task wait durations are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaitMode {
    /// Every task keeps its template wait.
    TableFixed,
    /// Tracking and confirmation waits become 2R/c for a per-target range R
    /// drawn uniformly from the configured bounds; search waits are part of
    /// the scan pattern and stay fixed.
    RangeDerived,
}

impl WaitMode {
    /// Stable lower-case name (config files, CSV metadata).
    pub fn label(&self) -> &'static str {
        match self {
            WaitMode::TableFixed => "table_fixed",
            WaitMode::RangeDerived => "range_derived",
        }
    }
}

impl std::fmt::Display for WaitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for WaitMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "table_fixed" | "fixed" => Ok(WaitMode::TableFixed),
            "range_derived" | "range" => Ok(WaitMode::RangeDerived),
            other => Err(format!("unknown wait mode `{other}`")),
        }
    }
}

impl Default for WaitMode {
    fn default() -> Self {
        WaitMode::TableFixed
    }
}

/// Knobs for one generated request stream. All times ms, rates Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Simulated span, ms.
    pub horizon: f64,
    /// Coarse tracking targets.
    pub n_general: usize,
    /// Fine tracking targets (the load axis in sweeps).
    pub n_precision: usize,
    /// Confirmation arrivals per second, before the false-alarm surcharge.
    pub verify_rate_hz: f64,
    /// Extra confirmation arrivals, as a fraction of the true rate.
    pub false_alarm_ratio: f64,
    /// Periodic scan streams per search mode.
    pub search_streams: usize,
    /// Target range bounds, km (only read under `WaitMode::RangeDerived`).
    pub range_km: (f64, f64),
    /// Wait-duration policy.
    pub wait_mode: WaitMode,
    /// Stream seed; every derived RNG is a pure function of it.
    pub seed: u64,
    /// Per-mode dwell templates.
    pub templates: TemplateSet,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            horizon: 12_000.0,
            n_general: 40,
            n_precision: 40,
            verify_rate_hz: 2.0,
            false_alarm_ratio: 0.2,
            search_streams: 1,
            range_km: (50.0, 300.0),
            wait_mode: WaitMode::TableFixed,
            seed: 1,
            templates: TemplateSet::default(),
        }
    }
}

impl ScenarioConfig {
    /// Structural sanity: positive horizon, ordered positive range bounds,
    /// non-negative rates.
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.range_km.0 > 0.0 && self.range_km.0 <= self.range_km.1) {
            return Err(Error::InvalidConfig(format!(
                "range bounds must satisfy 0 < lo <= hi, got [{}, {}]",
                self.range_km.0, self.range_km.1
            )));
        }
        if !(self.verify_rate_hz >= 0.0) || !(self.false_alarm_ratio >= 0.0) {
            return Err(Error::InvalidConfig(
                "verify rate and false-alarm ratio must be non-negative".into(),
            ));
        }
        self.templates.validate()
    }
}

// --- seeding ----------------------------------------------------------------

/// splitmix64 finalizer; the standard 64-bit avalanche mix.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent sub-seed for one labelled stream component. Components draw
/// from disjoint RNGs so that, e.g., adding precision targets leaves the
/// search and confirmation streams untouched.
pub(crate) fn derive_seed(base: u64, tag: u64) -> u64 {
    splitmix64(base ^ splitmix64(tag))
}

const TAG_GENERAL: u64 = 1;
const TAG_PRECISION: u64 = 2;
const TAG_SEARCH_LOW: u64 = 3;
const TAG_SEARCH_HIGH: u64 = 4;
const TAG_VERIFY: u64 = 5;

// --- generation ---------------------------------------------------------------

/// Round-trip wait for a target at `r_km`, in ms.
fn range_wait(r_km: f64) -> f64 {
    2.0 * r_km / C_KM_PER_MS
}

fn tracking_chains(
    cfg: &ScenarioConfig,
    mode: WorkingMode,
    count: usize,
    tag: u64,
    next_id: &mut u64,
    next_target: &mut u64,
    out: &mut Vec<RadarTask>,
) {
    if count == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, tag));
    let base = cfg.templates.get(mode);
    for _ in 0..count {
        let target = *next_target;
        *next_target += 1;
        let mut template = base;
        if cfg.wait_mode == WaitMode::RangeDerived {
            template.t_w = range_wait(rng.gen_range(cfg.range_km.0..=cfg.range_km.1));
        }
        let mut t_e = rng.gen_range(0.0..base.revisit);
        while t_e < cfg.horizon {
            out.push(RadarTask {
                id: *next_id,
                mode,
                template,
                t_e,
                target_id: Some(target),
            });
            *next_id += 1;
            t_e += base.revisit;
        }
    }
}

fn search_streams(
    cfg: &ScenarioConfig,
    mode: WorkingMode,
    tag: u64,
    next_id: &mut u64,
    out: &mut Vec<RadarTask>,
) {
    if cfg.search_streams == 0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, tag));
    let template = cfg.templates.get(mode);
    for _ in 0..cfg.search_streams {
        let mut t_e = rng.gen_range(0.0..template.revisit);
        while t_e < cfg.horizon {
            out.push(RadarTask {
                id: *next_id,
                mode,
                template,
                t_e,
                target_id: None,
            });
            *next_id += 1;
            t_e += template.revisit;
        }
    }
}

fn verify_arrivals(
    cfg: &ScenarioConfig,
    next_id: &mut u64,
    next_target: &mut u64,
    out: &mut Vec<RadarTask>,
) {
    let rate_hz = cfg.verify_rate_hz * (1.0 + cfg.false_alarm_ratio);
    if rate_hz <= 0.0 {
        return;
    }
    let per_ms = rate_hz / 1000.0;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, TAG_VERIFY));
    let base = cfg.templates.get(WorkingMode::Verify);
    let mut t = 0.0;
    loop {
        // Exponential inter-arrival via inverse CDF; 1−u keeps ln away from 0.
        let u: f64 = rng.gen();
        t += -(1.0 - u).ln() / per_ms;
        if t >= cfg.horizon {
            return;
        }
        let mut template = base;
        if cfg.wait_mode == WaitMode::RangeDerived {
            template.t_w = range_wait(rng.gen_range(cfg.range_km.0..=cfg.range_km.1));
        }
        let target = *next_target;
        *next_target += 1;
        out.push(RadarTask {
            id: *next_id,
            mode: WorkingMode::Verify,
            template,
            t_e: t,
            target_id: Some(target),
        });
        *next_id += 1;
    }
}

/// Generates the full request stream for one run, sorted by `(t_e, id)`.
///
/// Component order (and therefore id assignment) is fixed: coarse tracking
/// chains, fine tracking chains, low-rate search, high-rate search,
/// confirmations. Each component owns a derived RNG.
pub fn generate_scenario(cfg: &ScenarioConfig) -> Vec<RadarTask> {
    debug_assert!(cfg.validate().is_ok(), "invalid scenario config: {cfg:?}");
    let mut out = Vec::new();
    let mut next_id = 0u64;
    let mut next_target = 0u64;
    tracking_chains(
        cfg,
        WorkingMode::GeneralTracking,
        cfg.n_general,
        TAG_GENERAL,
        &mut next_id,
        &mut next_target,
        &mut out,
    );
    tracking_chains(
        cfg,
        WorkingMode::PrecisionTracking,
        cfg.n_precision,
        TAG_PRECISION,
        &mut next_id,
        &mut next_target,
        &mut out,
    );
    search_streams(cfg, WorkingMode::LowPrioritySearch, TAG_SEARCH_LOW, &mut next_id, &mut out);
    search_streams(cfg, WorkingMode::HighPrioritySearch, TAG_SEARCH_HIGH, &mut next_id, &mut out);
    verify_arrivals(cfg, &mut next_id, &mut next_target, &mut out);
    out.sort_by(|a, b| a.t_e.total_cmp(&b.t_e).then(a.id.cmp(&b.id)));
    out
}

// --- revisit chains -----------------------------------------------------------

/// How the previous request of a lineage was resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RevisitFrom {
    /// The dwell ran with its transmit starting at this time (ms).
    PlacedAt(f64),
    /// The request was deleted without running.
    Dropped,
}

/// Next request in a revisit chain. A placed dwell re-anchors the cadence on
/// its actual start time; a dropped one keeps the nominal cadence so scheduler
/// failures never shift the revisit clock.
pub fn next_revisit(prev: &RadarTask, from: RevisitFrom, new_id: u64) -> RadarTask {
    let t_e = match from {
        RevisitFrom::PlacedAt(t_s) => t_s + prev.template.revisit,
        RevisitFrom::Dropped => prev.t_e + prev.template.revisit,
    };
    RadarTask {
        id: new_id,
        t_e,
        ..prev.clone()
    }
}

// --- scenario files -------------------------------------------------------------

/// Writes a replayable scenario file: `#` comment header, then one
/// `id,mode,t_e,t_x,t_w,t_r,window,revisit,amplitude,target` line per task.
/// Floats use the shortest round-trip form, so read-back is bit-exact.
pub fn write_scenario<W: Write>(w: &mut W, cfg: &ScenarioConfig, tasks: &[RadarTask]) -> Result<()> {
    writeln!(
        w,
        "# dwell request stream: seed={} precision={} general={} horizon={} wait={}",
        cfg.seed, cfg.n_precision, cfg.n_general, cfg.horizon, cfg.wait_mode
    )?;
    writeln!(w, "# id,mode,t_e,t_x,t_w,t_r,window,revisit,amplitude,target")?;
    for t in tasks {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            t.id,
            t.mode.label(),
            t.t_e,
            t.template.t_x,
            t.template.t_w,
            t.template.t_r,
            t.template.window,
            t.template.revisit,
            t.template.amplitude,
            t.target_id.map(|v| v.to_string()).unwrap_or_default(),
        )?;
    }
    Ok(())
}

/// Reads a scenario file written by [`write_scenario`]. Blank lines and `#`
/// comments are skipped; anything else must parse exactly.
pub fn read_scenario<R: BufRead>(r: R) -> Result<Vec<RadarTask>> {
    let mut tasks = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        tasks.push(parse_task_line(line).map_err(|msg| Error::Parse { line: idx + 1, msg })?);
    }
    Ok(tasks)
}

fn parse_task_line(line: &str) -> std::result::Result<RadarTask, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 10 {
        return Err(format!("expected 10 fields, got {}", fields.len()));
    }
    let num = |i: usize, name: &str| -> std::result::Result<f64, String> {
        fields[i]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("{name}: {e}"))
    };
    let id = fields[0].trim().parse::<u64>().map_err(|e| format!("id: {e}"))?;
    let mode: WorkingMode = fields[1].trim().parse().map_err(|e| format!("mode: {e}"))?;
    let template = DwellTemplate {
        t_x: num(3, "t_x")?,
        t_w: num(4, "t_w")?,
        t_r: num(5, "t_r")?,
        window: num(6, "window")?,
        revisit: num(7, "revisit")?,
        amplitude: num(8, "amplitude")?,
    };
    let target_id = match fields[9].trim() {
        "" => None,
        s => Some(s.parse::<u64>().map_err(|e| format!("target: {e}"))?),
    };
    Ok(RadarTask {
        id,
        mode,
        template,
        t_e: num(2, "t_e")?,
        target_id,
    })
}

/// [`read_scenario`] over a file path.
pub fn load_scenario_file(path: &Path) -> Result<Vec<RadarTask>> {
    let file = std::fs::File::open(path)?;
    read_scenario(std::io::BufReader::new(file))
}

/// [`write_scenario`] over a file path.
pub fn save_scenario_file(path: &Path, cfg: &ScenarioConfig, tasks: &[RadarTask]) -> Result<()> {
    let mut out = Vec::new();
    write_scenario(&mut out, cfg, tasks)?;
    std::fs::write(path, out)?;
    Ok(())
}

// --- tests ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(cfg: ScenarioConfig) -> ScenarioConfig {
        ScenarioConfig {
            n_general: 0,
            n_precision: 0,
            verify_rate_hz: 0.0,
            search_streams: 0,
            ..cfg
        }
    }

    #[test]
    fn templates_fit_their_windows() {
        for mode in WorkingMode::ALL {
            let t = table_template(mode);
            assert!(t.dwell_len() < t.window, "{mode}: dwell must fit its window");
            assert!(t.revisit > 0.0);
            assert!(t.amplitude > 0.0);
        }
        assert!((table_template(WorkingMode::GeneralTracking).dwell_len() - 1.9).abs() < 1e-12);
        assert!((table_template(WorkingMode::PrecisionTracking).dwell_len() - 1.5).abs() < 1e-12);
        assert!((table_template(WorkingMode::LowPrioritySearch).revisit - 20.0).abs() < 1e-12);
    }

    #[test]
    fn empty_config_empty_stream() {
        let cfg = quiet(ScenarioConfig::default());
        assert!(generate_scenario(&cfg).is_empty());
    }

    #[test]
    fn search_stream_counts_and_spacing() {
        let cfg = ScenarioConfig {
            search_streams: 1,
            ..quiet(ScenarioConfig::default())
        };
        let tasks = generate_scenario(&cfg);
        let high: Vec<&RadarTask> = tasks
            .iter()
            .filter(|t| t.mode == WorkingMode::HighPrioritySearch)
            .collect();
        // 12 s at one request per 20 ms.
        assert_eq!(high.len(), 600);
        assert_eq!(
            tasks.len() - high.len(),
            600,
            "low-rate stream has the same cadence"
        );
        for pair in high.windows(2) {
            assert!((pair[1].t_e - pair[0].t_e - 20.0).abs() < 1e-9);
        }
        assert!(high[0].t_e >= 0.0 && high[0].t_e < 20.0);
    }

    #[test]
    fn streams_are_deterministic_per_seed() {
        let cfg = ScenarioConfig::default();
        assert_eq!(generate_scenario(&cfg), generate_scenario(&cfg));
        let other = ScenarioConfig { seed: 2, ..cfg };
        assert_ne!(generate_scenario(&cfg), generate_scenario(&other));
    }

    #[test]
    fn stream_is_sorted_with_unique_ids_inside_horizon() {
        let cfg = ScenarioConfig::default();
        let tasks = generate_scenario(&cfg);
        assert!(!tasks.is_empty());
        let mut ids: Vec<u64> = tasks.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), tasks.len(), "ids are unique");
        for pair in tasks.windows(2) {
            assert!(pair[0].t_e <= pair[1].t_e, "sorted by request time");
        }
        for t in &tasks {
            assert!(t.t_e >= 0.0 && t.t_e < cfg.horizon);
        }
    }

    #[test]
    fn tracking_chains_keep_cadence() {
        let cfg = ScenarioConfig {
            n_general: 3,
            ..quiet(ScenarioConfig::default())
        };
        let tasks = generate_scenario(&cfg);
        // Each target: first request inside [0, ΔT), then exactly horizon/ΔT visits.
        for target in 0..3u64 {
            let chain: Vec<&RadarTask> = tasks
                .iter()
                .filter(|t| t.target_id == Some(target))
                .collect();
            assert_eq!(chain.len(), 24, "12 s at one visit per 500 ms");
            assert!(chain[0].t_e < 500.0);
            for pair in chain.windows(2) {
                assert!((pair[1].t_e - pair[0].t_e - 500.0).abs() < 1e-9);
                assert_eq!(pair[0].template, pair[1].template, "template fixed per target");
            }
        }
    }

    #[test]
    fn next_revisit_placed_and_dropped() {
        let prev = RadarTask {
            id: 7,
            mode: WorkingMode::PrecisionTracking,
            template: DwellTemplate {
                revisit: 200.0,
                ..table_template(WorkingMode::PrecisionTracking)
            },
            t_e: 100.0,
            target_id: Some(3),
        };
        let placed = next_revisit(&prev, RevisitFrom::PlacedAt(100.0), 8);
        assert!((placed.t_e - 300.0).abs() < 1e-12);
        assert_eq!(placed.id, 8);
        assert_eq!(placed.target_id, Some(3));
        let dropped = next_revisit(&prev, RevisitFrom::Dropped, 9);
        assert!((dropped.t_e - 300.0).abs() < 1e-12, "cadence survives a drop");
    }

    #[test]
    fn verify_arrival_rate_matches_mean() {
        // Law of large numbers over seeds: mean count ≈ horizon·rate·(1+ratio).
        let mut total = 0usize;
        let seeds = 200u64;
        for seed in 0..seeds {
            let cfg = ScenarioConfig {
                verify_rate_hz: 2.0,
                seed,
                ..quiet(ScenarioConfig::default())
            };
            total += generate_scenario(&cfg).len();
        }
        let mean = total as f64 / seeds as f64;
        let expected = 12.0 * 2.0 * 1.2; // 28.8 per run
        assert!(
            (mean - expected).abs() < 0.05 * expected,
            "mean {mean:.2} vs expected {expected:.2}"
        );
    }

    #[test]
    fn range_derived_waits_stay_in_bounds() {
        let cfg = ScenarioConfig {
            wait_mode: WaitMode::RangeDerived,
            ..ScenarioConfig::default()
        };
        let (lo, hi) = (range_wait(50.0), range_wait(300.0));
        assert!((lo - 0.3336).abs() < 1e-3 && (hi - 2.0014).abs() < 1e-3);
        for t in generate_scenario(&cfg) {
            if t.mode.is_search() {
                assert_eq!(t.template.t_w, table_template(t.mode).t_w, "scan waits stay fixed");
            } else {
                assert!(t.template.t_w >= lo - 1e-12 && t.template.t_w <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn scenario_file_round_trips_bit_exact() {
        let cfg = ScenarioConfig {
            n_general: 2,
            n_precision: 1,
            horizon: 2_000.0,
            wait_mode: WaitMode::RangeDerived,
            ..ScenarioConfig::default()
        };
        let tasks = generate_scenario(&cfg);
        let mut buf = Vec::new();
        write_scenario(&mut buf, &cfg, &tasks).unwrap();
        let back = read_scenario(buf.as_slice()).unwrap();
        assert_eq!(tasks, back);
    }

    #[test]
    fn malformed_lines_name_the_line() {
        let text = "# header\n0,general_tracking,1.0,0.5,0.9,0.5,50,500,1.6,0\nnot,enough,fields\n";
        match read_scenario(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_mode = "0,cruise_missile,1.0,0.5,0.9,0.5,50,500,1.6,0\n";
        assert!(read_scenario(bad_mode.as_bytes()).is_err());
    }

    #[test]
    fn config_validation_rejects_nonsense() {
        let mut cfg = ScenarioConfig::default();
        cfg.horizon = 0.0;
        assert!(cfg.validate().is_err());
        cfg = ScenarioConfig::default();
        cfg.range_km = (300.0, 50.0);
        assert!(cfg.validate().is_err());
        assert!(ScenarioConfig::default().validate().is_ok());
    }
}
