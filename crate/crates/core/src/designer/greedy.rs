//! Greedy profile design: start from pruned full row-space feedback and keep
//! applying the highest-priority update that stays feasible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{counting_check, rank_test, FeasibilityReport, Verdict};
use crate::netcfg::{generate_channels, NetworkConfig};
use crate::profile::{feedback_dimension, FeedbackProfile, LinkStrategy};

use super::strategy::{apply_strategy, strategy_effect, strategy_space, UpdateStrategy};

/// Feasibility oracle consulted before every accepted update.
pub type Gate<'a> = dyn Fn(&FeedbackProfile) -> Result<FeasibilityReport> + 'a;

/// An accepted update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignStep {
    /// The update.
    pub strategy: UpdateStrategy,
    /// Feedback reduction.
    pub delta_d: i64,
    /// Slack consumed.
    pub delta_v: i64,
    /// Priority at the time of acceptance.
    pub priority: f64,
    /// Feedback dimension after the update.
    pub dimension: i64,
}

/// A candidate that failed the gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedTrial {
    /// Number of updates accepted before this trial.
    pub step: usize,
    /// The update.
    pub strategy: UpdateStrategy,
    /// Failed condition reported by the gate.
    pub reason: String,
}

/// Audit record of a greedy run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignTrace {
    /// Feedback dimension of the starting profile.
    pub initial_dimension: i64,
    /// Accepted updates in order.
    pub accepted: Vec<DesignStep>,
    /// Rejected candidates in order.
    pub rejected: Vec<RejectedTrial>,
    /// Number of gate calls on candidates.
    pub trials: usize,
    /// Upper bound on `trials` for this network.
    pub trial_bound: usize,
}

impl DesignTrace {
    /// Feedback dimension of the returned profile.
    pub fn final_dimension(&self) -> i64 {
        self.accepted.last().map_or(self.initial_dimension, |s| s.dimension)
    }
}

/// Full row-space feedback with submatrices capped at the total stream count:
/// `M_j^s = min(M_j, sum d)` and `N_i^s = min(N_i, sum d)`.
pub fn pruned_profile(cfg: &NetworkConfig) -> FeedbackProfile {
    let sd = cfg.total_streams();
    let rx = cfg.rx_antennas().iter().map(|&m| m.min(sd)).collect();
    let tx = cfg.tx_antennas().iter().map(|&n| n.min(sd)).collect();
    FeedbackProfile::uniform(rx, tx, LinkStrategy::RowSpace).expect("shape follows the config")
}

/// Largest number of gate calls a greedy run can make:
/// `(3K(K-1) + 3K) (K(K-1) + 2K max(M, N))`.
pub fn trial_bound(cfg: &NetworkConfig) -> usize {
    let k = cfg.users();
    let widest = cfg.rx_antennas().iter().chain(cfg.tx_antennas()).copied().max().unwrap_or(0);
    (3 * k * k.saturating_sub(1) + 3 * k) * (k * k.saturating_sub(1) + 2 * k * widest)
}

/// Gate that runs subset counting first and the rank test on one channel
/// draw second. Counting is necessary for the rank test to pass, so the
/// verdict equals the rank test's; the cheap check only avoids building
/// large matrices for candidates that fail by counting alone.
pub fn rank_gate(cfg: &NetworkConfig, seed: u64, tol: f64) -> impl Fn(&FeedbackProfile) -> Result<FeasibilityReport> + '_ {
    let h = generate_channels(cfg, seed);
    move |p: &FeedbackProfile| {
        let counts = counting_check(cfg, p)?;
        if counts.verdict == Verdict::Infeasible {
            return Ok(counts);
        }
        rank_test(cfg, p, &h, tol)
    }
}

/// Runs the greedy design from `initial` (or [`pruned_profile`]).
///
/// Each round ranks every applicable update with non-negative priority,
/// highest first, ties broken by kind, receiver, transmitter. Updates that
/// leave the profile unchanged are skipped. The first candidate passing
/// `gate` is accepted; the run ends when none passes.
pub fn greedy_design(
    cfg: &NetworkConfig,
    gate: &Gate<'_>,
    initial: Option<FeedbackProfile>,
) -> Result<(FeedbackProfile, DesignTrace)> {
    let mut profile = initial.unwrap_or_else(|| pruned_profile(cfg));
    profile.validate(cfg)?;
    let start = gate(&profile)?;
    if !start.is_feasible() {
        return Err(Error::Infeasible(format!(
            "the starting profile is not feasible ({})",
            start.failed_condition.unwrap_or_else(|| "inconclusive".into())
        )));
    }
    let mut trace = DesignTrace {
        initial_dimension: feedback_dimension(cfg, &profile)?,
        accepted: Vec::new(),
        rejected: Vec::new(),
        trials: 0,
        trial_bound: trial_bound(cfg),
    };
    loop {
        let mut ranked = Vec::new();
        for s in strategy_space(cfg, &profile) {
            let next = apply_strategy(cfg, &profile, &s)?;
            if next == profile {
                continue;
            }
            let effect = strategy_effect(cfg, &profile, &s)?;
            if effect.priority >= 0.0 {
                ranked.push((s, effect, next));
            }
        }
        ranked.sort_by(|a, b| b.1.priority.total_cmp(&a.1.priority).then_with(|| a.0.order_key().cmp(&b.0.order_key())));

        let mut accepted = None;
        for (s, effect, next) in ranked {
            trace.trials += 1;
            if trace.trials > trace.trial_bound {
                return Err(Error::InvalidState(format!("greedy exceeded its trial bound of {}", trace.trial_bound)));
            }
            let verdict = gate(&next)?;
            if verdict.is_feasible() {
                accepted = Some((s, effect, next));
                break;
            }
            trace.rejected.push(RejectedTrial {
                step: trace.accepted.len(),
                strategy: s,
                reason: verdict.failed_condition.unwrap_or_else(|| "inconclusive".into()),
            });
        }
        let Some((strategy, effect, next)) = accepted else { break };
        let dimension = trace.final_dimension() - effect.delta_d;
        debug_assert_eq!(dimension, feedback_dimension(cfg, &next)?);
        trace.accepted.push(DesignStep {
            strategy,
            delta_d: effect.delta_d,
            delta_v: effect.delta_v,
            priority: effect.priority,
            dimension,
        });
        profile = next;
    }
    Ok((profile, trace))
}
