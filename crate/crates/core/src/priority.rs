//! Synthesis priority: who transmits next.
//!
//! Every placement decision re-ranks the current candidates from scratch.
//! Two rank permutations are built over the Q candidates: `n_p` orders by
//! mode importance and `n_d` by deadline urgency, both assigning Q to the
//! best and 1 to the worst. A weight `eta` blends them into an
//! importance-urgency score
//!
//! ```text
//! f = ((Q + 2 - eta) * n_d + eta * n_p) / (Q + 1)
//! ```
//!
//! which is then scaled by a quadratic time-shift factor `g` that prefers
//! executing close to the expected time, forgives late starts more than
//! early ones, and discounts search modes. Larger `f * g` wins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RadarTask;

// --------------------------------------------------------------------------
// configuration
// --------------------------------------------------------------------------

/// Importance weight `eta`, either fixed or balanced at `(Q + 2) / 2`
/// (clamped into `[1, Q]`) so both rank terms carry equal coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Eta {
    Balanced(BalancedTag),
    Fixed(f64),
}

/// Serde marker so `eta = "balanced"` parses next to a plain number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalancedTag {
    Balanced,
}

impl Eta {
    pub const BALANCED: Eta = Eta::Balanced(BalancedTag::Balanced);

    /// Concrete weight for a candidate set of size `q`.
    pub fn resolve(&self, q: usize) -> f64 {
        match self {
            Eta::Balanced(_) => ((q as f64 + 2.0) / 2.0).clamp(1.0, q as f64),
            Eta::Fixed(v) => *v,
        }
    }
}

/// Priority-engine constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorityConfig {
    /// Blend weight between urgency and importance ranks.
    pub eta: Eta,
    /// Late-shift softening coefficient `a` in the time-shift factor.
    pub late_shift_coeff: f64,
    /// Multiplier `b` applied to search-mode time-shift factors.
    pub search_discount: f64,
}

impl Default for PriorityConfig {
    fn default() -> Self {
        Self {
            eta: Eta::BALANCED,
            late_shift_coeff: 0.5,
            search_discount: 0.8,
        }
    }
}

// --------------------------------------------------------------------------
// ranking
// --------------------------------------------------------------------------

/// Ranked candidate with its score breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    /// Index into the candidate slice handed to the ranking call.
    pub index: usize,
    pub task_id: u64,
    /// Importance rank: Q = most important mode.
    pub n_p: usize,
    /// Urgency rank: Q = earliest deadline.
    pub n_d: usize,
    /// Importance-urgency score.
    pub f: f64,
    /// Time-shift factor at the decision time.
    pub g: f64,
    /// Synthesis priority `f * g`.
    pub p: f64,
}

/// Build the importance and urgency rank permutations for `candidates`.
/// Returns `(n_p, n_d)` per candidate, parallel to the input slice.
///
/// Importance ties break toward the earlier deadline; urgency ties break
/// toward the higher static priority; both end at the lower task id.
pub fn rank_candidates(candidates: &[&RadarTask]) -> Result<Vec<(usize, usize)>> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let q = candidates.len();
    let mut by_importance: Vec<usize> = (0..q).collect();
    by_importance.sort_by(|&i, &j| {
        let (a, b) = (candidates[i], candidates[j]);
        b.mode
            .static_priority()
            .cmp(&a.mode.static_priority())
            .then(a.deadline().total_cmp(&b.deadline()))
            .then(a.id.cmp(&b.id))
    });
    let mut by_urgency: Vec<usize> = (0..q).collect();
    by_urgency.sort_by(|&i, &j| {
        let (a, b) = (candidates[i], candidates[j]);
        a.deadline()
            .total_cmp(&b.deadline())
            .then(b.mode.static_priority().cmp(&a.mode.static_priority()))
            .then(a.id.cmp(&b.id))
    });
    let mut ranks = vec![(0usize, 0usize); q];
    for (pos, &i) in by_importance.iter().enumerate() {
        ranks[i].0 = q - pos;
    }
    for (pos, &i) in by_urgency.iter().enumerate() {
        ranks[i].1 = q - pos;
    }
    Ok(ranks)
}

/// Blend the two ranks into the importance-urgency score.
pub fn importance_urgency(q: usize, n_p: usize, n_d: usize, eta: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::EmptyCandidates);
    }
    for rank in [n_p, n_d] {
        if rank < 1 || rank > q {
            return Err(Error::RankOutOfRange { rank, q });
        }
    }
    let qf = q as f64;
    Ok(((qf + 2.0 - eta) * n_d as f64 + eta * n_p as f64) / (qf + 1.0))
}

/// Quadratic time-shift factor at decision time `tp`.
///
/// With shift ratio `s = |t_e - tp| / l`: late starts give `(1 - a*s)^2`,
/// early starts `(1 - s)^2`; search modes are further scaled by `b`.
/// Callers only evaluate inside the eligibility window, so `s <= 1`.
pub fn timeliness(task: &RadarTask, tp: f64, cfg: &PriorityConfig) -> f64 {
    let l = task.template.window;
    let s = (task.t_e - tp).abs() / l;
    let base = if tp >= task.t_e {
        1.0 - cfg.late_shift_coeff * s
    } else {
        1.0 - s
    };
    let g = base * base;
    if task.mode.is_search() {
        cfg.search_discount * g
    } else {
        g
    }
}

/// Score every candidate at `tp`. `use_timeliness = false` pins `g = 1`,
/// which turns the score into a pure importance-urgency rank blend.
pub fn evaluate(candidates: &[&RadarTask], tp: f64, cfg: &PriorityConfig, use_timeliness: bool) -> Result<Vec<RankedCandidate>> {
    let ranks = rank_candidates(candidates)?;
    let q = candidates.len();
    let eta = cfg.eta.resolve(q);
    let mut out = Vec::with_capacity(q);
    for (index, (task, &(n_p, n_d))) in candidates.iter().zip(&ranks).enumerate() {
        let f = importance_urgency(q, n_p, n_d, eta)?;
        let g = if use_timeliness { timeliness(task, tp, cfg) } else { 1.0 };
        out.push(RankedCandidate {
            index,
            task_id: task.id,
            n_p,
            n_d,
            f,
            g,
            p: f * g,
        });
    }
    Ok(out)
}

/// Pick the candidate with the largest synthesis priority. Ties fall to the
/// higher static priority, then the earlier deadline, then the lower id.
pub fn select_best(candidates: &[&RadarTask], tp: f64, cfg: &PriorityConfig, use_timeliness: bool) -> Result<RankedCandidate> {
    let scored = evaluate(candidates, tp, cfg, use_timeliness)?;
    let mut best = 0;
    for i in 1..scored.len() {
        if prefer(&scored[i], &scored[best], candidates) {
            best = i;
        }
    }
    Ok(scored.into_iter().nth(best).expect("non-empty"))
}

fn prefer(a: &RankedCandidate, b: &RankedCandidate, candidates: &[&RadarTask]) -> bool {
    use std::cmp::Ordering;
    let (ta, tb) = (candidates[a.index], candidates[b.index]);
    let ord = a
        .p
        .total_cmp(&b.p)
        .then(ta.mode.static_priority().cmp(&tb.mode.static_priority()))
        .then(tb.deadline().total_cmp(&ta.deadline()))
        .then(tb.id.cmp(&ta.id));
    ord == Ordering::Greater
}
