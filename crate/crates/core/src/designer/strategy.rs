//! Update strategies that shrink a feedback profile one step at a time, and
//! the priority used to order them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::variable_counts;
use crate::netcfg::NetworkConfig;
use crate::profile::{derive, feedback_dimension, FeedbackProfile, LinkStrategy};

/// The six update kinds, in tie-breaking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Stop reporting link `(j, i)` (row space to strategy I).
    #[serde(rename = "S_I")]
    DropLink,
    /// Absorb link `(j, i)` at the receiver (row space to strategy II).
    #[serde(rename = "S_II")]
    AbsorbLink,
    /// Report the null space of link `(j, i)` (row space to strategy III).
    #[serde(rename = "S_III")]
    NullSpaceLink,
    /// Shrink transmitter `i` to `N_i^s = d_i` and absorb it at every receiver reporting its row space.
    #[serde(rename = "S_IV")]
    ShrinkAndAbsorb,
    /// Decrement `M_i^s`.
    #[serde(rename = "S_V")]
    ShrinkRx,
    /// Decrement `N_i^s`.
    #[serde(rename = "S_VI")]
    ShrinkTx,
}

impl StrategyKind {
    /// True for the kinds acting on one link `(j, i)`.
    pub fn is_pairwise(self) -> bool {
        matches!(self, StrategyKind::DropLink | StrategyKind::AbsorbLink | StrategyKind::NullSpaceLink)
    }
}

/// One candidate update. Pairwise kinds carry `(rx, tx)`; the others carry `tx` only,
/// which names the user whose submatrix is changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpdateStrategy {
    /// Kind of update.
    pub kind: StrategyKind,
    /// Receiver `j` (pairwise kinds only).
    pub rx: Option<usize>,
    /// Transmitter or user index `i`.
    pub tx: Option<usize>,
}

impl UpdateStrategy {
    /// A pairwise update on link `(j, i)`.
    pub fn pair(kind: StrategyKind, j: usize, i: usize) -> Self {
        debug_assert!(kind.is_pairwise());
        Self { kind, rx: Some(j), tx: Some(i) }
    }

    /// An update on user `i`.
    pub fn unary(kind: StrategyKind, i: usize) -> Self {
        debug_assert!(!kind.is_pairwise());
        Self { kind, rx: None, tx: Some(i) }
    }

    /// Sort key for deterministic tie-breaking: kind, then `j`, then `i`.
    pub fn order_key(&self) -> (StrategyKind, usize, usize) {
        (self.kind, self.rx.unwrap_or(0), self.tx.unwrap_or(0))
    }
}

impl fmt::Display for UpdateStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            StrategyKind::DropLink => "S_I",
            StrategyKind::AbsorbLink => "S_II",
            StrategyKind::NullSpaceLink => "S_III",
            StrategyKind::ShrinkAndAbsorb => "S_IV",
            StrategyKind::ShrinkRx => "S_V",
            StrategyKind::ShrinkTx => "S_VI",
        };
        match (self.rx, self.tx) {
            (Some(j), Some(i)) => write!(f, "{name}({},{})", j + 1, i + 1),
            (None, Some(i)) => write!(f, "{name}({})", i + 1),
            _ => write!(f, "{name}(?)"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyWire {
    kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rx: Option<usize>,
    tx: usize,
}

impl Serialize for UpdateStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StrategyWire { kind: self.kind, rx: self.rx.map(|j| j + 1), tx: self.tx.map_or(0, |i| i + 1) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UpdateStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = StrategyWire::deserialize(d)?;
        let one_based = |x: usize| x.checked_sub(1).ok_or_else(|| serde::de::Error::custom("indices are 1-based"));
        let tx = Some(one_based(w.tx)?);
        let rx = w.rx.map(one_based).transpose()?;
        if w.kind.is_pairwise() != rx.is_some() {
            return Err(serde::de::Error::custom("pairwise strategies need rx, unary ones must omit it"));
        }
        Ok(Self { kind: w.kind, rx, tx })
    }
}

/// Every strategy applicable to `profile`: three pairwise kinds per row-space
/// link, then `S_IV(i)` for every user, `S_V(i)` where `M_i^s > 1` and
/// `S_VI(i)` where `N_i^s > 1`. Ordered by [`UpdateStrategy::order_key`].
pub fn strategy_space(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Vec<UpdateStrategy> {
    let mut out = Vec::new();
    let pairs = profile.pairs(LinkStrategy::RowSpace);
    for kind in [StrategyKind::DropLink, StrategyKind::AbsorbLink, StrategyKind::NullSpaceLink] {
        out.extend(pairs.iter().map(|&(j, i)| UpdateStrategy::pair(kind, j, i)));
    }
    for i in 0..cfg.users() {
        out.push(UpdateStrategy::unary(StrategyKind::ShrinkAndAbsorb, i));
    }
    for i in 0..cfg.users() {
        if profile.rx_sub()[i] > 1 {
            out.push(UpdateStrategy::unary(StrategyKind::ShrinkRx, i));
        }
    }
    for i in 0..cfg.users() {
        if profile.tx_sub()[i] > 1 {
            out.push(UpdateStrategy::unary(StrategyKind::ShrinkTx, i));
        }
    }
    out
}

/// Applies `s` to a copy of `profile`.
pub fn apply_strategy(cfg: &NetworkConfig, profile: &FeedbackProfile, s: &UpdateStrategy) -> Result<FeedbackProfile> {
    let k = profile.users();
    let bad = |why: &str| Error::InvalidStrategy(format!("{s}: {why}"));
    let i = s.tx.filter(|&i| i < k).ok_or_else(|| bad("user index out of range"))?;
    let mut out = profile.clone();
    if s.kind.is_pairwise() {
        let j = s.rx.filter(|&j| j < k && j != i).ok_or_else(|| bad("receiver index out of range"))?;
        if profile.strategy(j, i) != Some(LinkStrategy::RowSpace) {
            return Err(bad("link is not reported by row space"));
        }
        let target = match s.kind {
            StrategyKind::DropLink => LinkStrategy::NoFeedback,
            StrategyKind::AbsorbLink => LinkStrategy::Absorbed,
            _ => LinkStrategy::NullSpace,
        };
        out.set_strategy(j, i, target);
        return Ok(out);
    }
    if s.rx.is_some() {
        return Err(bad("unary strategy carries a receiver"));
    }
    match s.kind {
        StrategyKind::ShrinkAndAbsorb => {
            out.set_tx_sub(i, cfg.streams()[i].min(profile.tx_sub()[i]));
            for j in 0..k {
                if j != i && profile.strategy(j, i) == Some(LinkStrategy::RowSpace) {
                    out.set_strategy(j, i, LinkStrategy::Absorbed);
                }
            }
        }
        StrategyKind::ShrinkRx => {
            let m = profile.rx_sub()[i];
            if m <= 1 {
                return Err(bad("M^s is already 1"));
            }
            out.set_rx_sub(i, m - 1);
        }
        StrategyKind::ShrinkTx => {
            let n = profile.tx_sub()[i];
            if n <= 1 {
                return Err(bad("N^s is already 1"));
            }
            out.set_tx_sub(i, n - 1);
        }
        _ => unreachable!("pairwise kinds handled above"),
    }
    Ok(out)
}

/// Slack of free variables over row-space constraints:
/// `V(L) = sum U_j + sum V_i - sum over row-space links of d_j^0 d_i`.
pub fn slack_variables(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<i64> {
    let der = derive(cfg, profile)?;
    let counts = variable_counts(cfg, &der);
    let constraints: i64 = profile
        .pairs(LinkStrategy::RowSpace)
        .iter()
        .map(|&(j, i)| (der.d0[j] * cfg.streams()[i]) as i64)
        .sum();
    Ok(counts.u.iter().sum::<i64>() + counts.v.iter().sum::<i64>() - constraints)
}

/// Effect of one strategy: feedback reduction `delta_d = D(L) - D(L|s)` and
/// slack consumption `delta_v = V(L) - V(L|s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyEffect {
    /// Reduction of the feedback dimension.
    pub delta_d: i64,
    /// Slack consumed.
    pub delta_v: i64,
    /// Priority.
    pub priority: f64,
}

/// Weight putting strategies that reduce feedback without consuming slack
/// ahead of every ratio: `K (sum d)^2`.
pub fn priority_weight(cfg: &NetworkConfig) -> f64 {
    let sd = cfg.total_streams() as f64;
    cfg.users() as f64 * sd * sd
}

/// Priority of a strategy with reduction `delta_d` and consumption `delta_v`.
///
/// `delta_d (1 - delta_v) alpha` when nothing is consumed, `delta_d / delta_v`
/// when slack is consumed, and `-1` (never tried) when feedback would grow.
pub fn priority_value(delta_d: i64, delta_v: i64, alpha: f64) -> f64 {
    if delta_d < 0 {
        -1.0
    } else if delta_v <= 0 {
        delta_d as f64 * (1 - delta_v) as f64 * alpha
    } else {
        delta_d as f64 / delta_v as f64
    }
}

/// Reduction, consumption and priority of applying `s` to `profile`.
pub fn strategy_effect(cfg: &NetworkConfig, profile: &FeedbackProfile, s: &UpdateStrategy) -> Result<StrategyEffect> {
    let next = apply_strategy(cfg, profile, s)?;
    let delta_d = feedback_dimension(cfg, profile)? - feedback_dimension(cfg, &next)?;
    let delta_v = slack_variables(cfg, profile)? - slack_variables(cfg, &next)?;
    Ok(StrategyEffect { delta_d, delta_v, priority: priority_value(delta_d, delta_v, priority_weight(cfg)) })
}

/// Priority of applying `s` to `profile`.
pub fn priority(cfg: &NetworkConfig, profile: &FeedbackProfile, s: &UpdateStrategy) -> Result<f64> {
    Ok(strategy_effect(cfg, profile, s)?.priority)
}
