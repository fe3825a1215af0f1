//! Feedback profile construction.
//!
//! Designers are selected by name through a [`DesignerRegistry`]:
//!
//! * `greedy`: priority-ordered updates gated by the rank test.
//! * `exhaustive`: minimum-dimension search over every profile (tiny networks).
//! * `symmetric`: closed form for symmetric networks with `N = K M / 2`.

mod exhaustive;
mod greedy;
mod strategy;
mod symmetric;

pub use exhaustive::{exhaustive_design, SearchSpace, EXHAUSTIVE_MAX_CANDIDATES};
pub use greedy::{greedy_design, pruned_profile, rank_gate, trial_bound, DesignStep, DesignTrace, Gate, RejectedTrial};
pub use strategy::{
    apply_strategy, priority, priority_value, priority_weight, slack_variables, strategy_effect, strategy_space,
    StrategyEffect, StrategyKind, UpdateStrategy,
};
pub use symmetric::{symmetric_dimension, symmetric_family, symmetric_profile, SymmetricDesign};

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;
use crate::profile::{feedback_dimension, FeedbackProfile};

/// Inputs shared by all designers.
#[derive(Debug, Clone, Copy)]
pub struct DesignContext<'a> {
    /// The network.
    pub cfg: &'a NetworkConfig,
    /// Seed of the channel draw used by the feasibility gate.
    pub seed: u64,
    /// Relative rank tolerance of the gate.
    pub tol: f64,
    /// Optional starting profile (greedy only).
    pub initial: Option<&'a FeedbackProfile>,
}

/// A designed profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutcome {
    /// The profile.
    pub profile: FeedbackProfile,
    /// Its feedback dimension.
    pub dimension: i64,
    /// Step-by-step record, when the designer keeps one.
    pub trace: Option<DesignTrace>,
}

/// A named profile designer.
pub trait ProfileDesigner: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// Designs a profile for `cx.cfg`.
    fn design(&self, cx: &DesignContext<'_>) -> Result<DesignOutcome>;
}

/// Greedy design.
pub struct GreedyDesigner;

impl ProfileDesigner for GreedyDesigner {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn design(&self, cx: &DesignContext<'_>) -> Result<DesignOutcome> {
        let gate = rank_gate(cx.cfg, cx.seed, cx.tol);
        let (profile, trace) = greedy_design(cx.cfg, &gate, cx.initial.cloned())?;
        Ok(DesignOutcome { dimension: trace.final_dimension(), profile, trace: Some(trace) })
    }
}

/// Exhaustive search over all sizes and partitions.
pub struct ExhaustiveDesigner;

impl ProfileDesigner for ExhaustiveDesigner {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn design(&self, cx: &DesignContext<'_>) -> Result<DesignOutcome> {
        let gate = rank_gate(cx.cfg, cx.seed, cx.tol);
        let profile = exhaustive_design(cx.cfg, &SearchSpace::all_sizes(cx.cfg), &gate)?;
        Ok(DesignOutcome { dimension: feedback_dimension(cx.cfg, &profile)?, profile, trace: None })
    }
}

/// Closed form for symmetric networks.
pub struct SymmetricDesigner;

impl ProfileDesigner for SymmetricDesigner {
    fn name(&self) -> &'static str {
        "symmetric"
    }

    fn design(&self, cx: &DesignContext<'_>) -> Result<DesignOutcome> {
        let cfg = cx.cfg;
        let k = cfg.users();
        let (m, n, d) = (cfg.rx_antennas()[0], cfg.tx_antennas()[0], cfg.streams()[0]);
        let symmetric = cfg.rx_antennas().iter().all(|&x| x == m)
            && cfg.tx_antennas().iter().all(|&x| x == n)
            && cfg.streams().iter().all(|&x| x == d);
        if !symmetric || 2 * n != k * m {
            return Err(Error::UnsupportedCase("closed form needs a symmetric network with N = K M / 2".into()));
        }
        let s = symmetric_profile(k, m, d)?;
        Ok(DesignOutcome { profile: s.profile, dimension: s.dimension, trace: None })
    }
}

/// Designers addressable by name, in registration order.
pub struct DesignerRegistry {
    designers: Vec<Box<dyn ProfileDesigner>>,
}

impl Default for DesignerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GreedyDesigner));
        r.register(Box::new(ExhaustiveDesigner));
        r.register(Box::new(SymmetricDesigner));
        r
    }
}

impl DesignerRegistry {
    /// A registry without designers.
    pub fn empty() -> Self {
        Self { designers: Vec::new() }
    }

    /// Adds a designer, replacing any with the same name.
    pub fn register(&mut self, designer: Box<dyn ProfileDesigner>) {
        self.designers.retain(|d| d.name() != designer.name());
        self.designers.push(designer);
    }

    /// Looks a designer up by name.
    pub fn get(&self, name: &str) -> Result<&dyn ProfileDesigner> {
        self.designers
            .iter()
            .find(|d| d.name() == name)
            .map(|d| d.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown designer '{name}' (available: {})", self.names().join(", "))))
    }

    /// Registered names in order.
    pub fn names(&self) -> Vec<&'static str> {
        self.designers.iter().map(|d| d.name()).collect()
    }
}
