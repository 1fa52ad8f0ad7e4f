//! Run configuration: one TOML document covering every tunable constant.
//!
//! Sections map one-to-one onto the library config types. Every key is
//! optional — an omitted key falls back to its built-in default, so the empty
//! string parses to the stock setup — but unknown keys are rejected so typos
//! fail loudly instead of silently running the defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dwellsim::scenario::ScenarioConfig;
use dwellsim::scheduler::{Policy, SchedulerConfig};
use dwellsim::sweep::SweepPlan;
use dwellsim::{Error, Result};

/// Everything a run, sweep, or comparison needs, in file form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Policies exercised by `sweep`; `compare` picks two explicitly.
    pub policies: Vec<Policy>,
    pub scheduler: SchedulerConfig,
    pub scenario: ScenarioConfig,
    pub metrics: MetricsSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            policies: Policy::ALL.to_vec(),
            scheduler: SchedulerConfig::default(),
            scenario: ScenarioConfig::default(),
            metrics: MetricsSection::default(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Metric knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    /// Quadratic shift-penalty coefficient in the yield metric.
    pub yield_k: f64,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self { yield_k: 0.5 }
    }
}

/// The benchmark grid: fine-tracking load axis and repetition count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub precision_from: usize,
    pub precision_to: usize,
    /// Desk-scale default; the full-resolution grid is `--full` away.
    pub precision_step: usize,
    pub reps: usize,
    /// Root of the per-cell seed derivation.
    pub base_seed: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            precision_from: 0,
            precision_to: 200,
            precision_step: 40,
            reps: 20,
            base_seed: 1,
        }
    }
}

/// Where artifacts land. File names are joined onto `dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub raw_csv: String,
    pub aggregate_csv: String,
    pub compare_csv: String,
    pub scenario_file: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            raw_csv: "sweep_rows.csv".into(),
            aggregate_csv: "sweep_aggregate.csv".into(),
            compare_csv: "compare.csv".into(),
            scenario_file: "scenario.txt".into(),
        }
    }
}

impl OutputSection {
    /// Default destination for generated scenarios.
    pub fn scenario_path(&self) -> PathBuf {
        Path::new(&self.dir).join(&self.scenario_file)
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, parses, and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    /// Serializes back to TOML (defaults included); round-trip checks.
    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Structural sanity across all sections.
    pub fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("policy list is empty".into()));
        }
        self.sweep_plan().validate()
    }

    /// Assembles the sweep grid from the relevant sections.
    pub fn sweep_plan(&self) -> SweepPlan {
        SweepPlan {
            scenario: self.scenario.clone(),
            scheduler: self.scheduler.clone(),
            policies: self.policies.clone(),
            precision_from: self.sweep.precision_from,
            precision_to: self.sweep.precision_to,
            precision_step: self.sweep.precision_step,
            reps: self.sweep.reps,
            base_seed: self.sweep.base_seed,
            yield_k: self.metrics.yield_k,
        }
    }
}

// --- tests -------------------------------------------------------------------
