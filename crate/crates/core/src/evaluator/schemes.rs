//! Feedback schemes compared in experiments, selectable by name.

use serde::Serialize;

use crate::designer::{greedy_design, rank_gate};
use crate::error::{Error, Result};
use crate::netcfg::{ChannelRealization, NetworkConfig};
use crate::profile::{evaluate_feedback, feedback_dimension, full_direction_feedback, FedCSI, FeedbackProfile};

use super::baselines::{baseline1_dimension, baseline2_profile, baseline3_profile};

/// How a prepared scheme turns channels into feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// Subspaces selected by the profile.
    Profile,
    /// Direction of every full cross-link matrix.
    FullDirection,
}

/// A scheme resolved for one network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreparedScheme {
    /// Scheme name.
    pub name: String,
    /// Profile the solver runs on.
    pub profile: FeedbackProfile,
    /// Feedback produced per channel draw.
    pub mode: FeedbackMode,
    /// Feedback dimension per channel draw.
    pub feedback_dimension: usize,
}

impl PreparedScheme {
    /// Scheme reporting the subspaces of `profile`.
    pub fn from_profile(name: &str, cfg: &NetworkConfig, profile: FeedbackProfile) -> Result<Self> {
        let dim = feedback_dimension(cfg, &profile)?;
        let feedback_dimension = usize::try_from(dim)
            .map_err(|_| Error::InvalidProfile(format!("profile has negative feedback dimension {dim}")))?;
        Ok(Self { name: name.to_string(), profile, mode: FeedbackMode::Profile, feedback_dimension })
    }

    /// Feedback for one channel draw.
    pub fn feedback(&self, cfg: &NetworkConfig, h: &ChannelRealization) -> Result<FedCSI> {
        match self.mode {
            FeedbackMode::Profile => evaluate_feedback(cfg, &self.profile, h, None),
            FeedbackMode::FullDirection => full_direction_feedback(cfg, h),
        }
    }
}

/// Inputs for resolving a scheme.
#[derive(Debug, Clone, Copy)]
pub struct SchemeContext<'a> {
    /// The network.
    pub cfg: &'a NetworkConfig,
    /// Seed of the channel draw used by feasibility gates.
    pub seed: u64,
    /// Relative rank tolerance of the gates.
    pub tol: f64,
}

/// A named feedback scheme.
pub trait FeedbackScheme: Send + Sync {
    /// Registry name.
    fn name(&self) -> &str;
    /// Resolves the scheme for `cx.cfg`.
    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme>;
}

/// Greedy-designed profile.
pub struct Proposed;

impl FeedbackScheme for Proposed {
    fn name(&self) -> &str {
        "proposed"
    }

    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme> {
        let gate = rank_gate(cx.cfg, cx.seed, cx.tol);
        let (profile, _) = greedy_design(cx.cfg, &gate, None)?;
        PreparedScheme::from_profile(self.name(), cx.cfg, profile)
    }
}

/// Full cross-link directions.
pub struct Baseline1;

impl FeedbackScheme for Baseline1 {
    fn name(&self) -> &str {
        "baseline1"
    }

    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme> {
        Ok(PreparedScheme {
            name: self.name().to_string(),
            profile: baseline2_profile(cx.cfg),
            mode: FeedbackMode::FullDirection,
            feedback_dimension: baseline1_dimension(cx.cfg),
        })
    }
}

/// Row spaces of full cross links.
pub struct Baseline2;

impl FeedbackScheme for Baseline2 {
    fn name(&self) -> &str {
        "baseline2"
    }

    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme> {
        PreparedScheme::from_profile(self.name(), cx.cfg, baseline2_profile(cx.cfg))
    }
}

/// Row spaces of minimally truncated cross links.
pub struct Baseline3;

impl FeedbackScheme for Baseline3 {
    fn name(&self) -> &str {
        "baseline3"
    }

    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme> {
        let gate = rank_gate(cx.cfg, cx.seed, cx.tol);
        PreparedScheme::from_profile(self.name(), cx.cfg, baseline3_profile(cx.cfg, &gate)?)
    }
}

/// A fixed, user-supplied profile.
pub struct FixedProfile(pub FeedbackProfile);

impl FeedbackScheme for FixedProfile {
    fn name(&self) -> &str {
        "profile"
    }

    fn prepare(&self, cx: &SchemeContext<'_>) -> Result<PreparedScheme> {
        self.0.validate(cx.cfg)?;
        PreparedScheme::from_profile(self.name(), cx.cfg, self.0.clone())
    }
}

/// Schemes addressable by name, in registration order.
pub struct SchemeRegistry {
    schemes: Vec<Box<dyn FeedbackScheme>>,
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Proposed));
        r.register(Box::new(Baseline1));
        r.register(Box::new(Baseline2));
        r.register(Box::new(Baseline3));
        r
    }
}

impl SchemeRegistry {
    /// A registry without schemes.
    pub fn empty() -> Self {
        Self { schemes: Vec::new() }
    }

    /// Adds a scheme, replacing any with the same name.
    pub fn register(&mut self, scheme: Box<dyn FeedbackScheme>) {
        self.schemes.retain(|s| s.name() != scheme.name());
        self.schemes.push(scheme);
    }

    /// Looks a scheme up by name.
    pub fn get(&self, name: &str) -> Result<&dyn FeedbackScheme> {
        self.schemes
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown scheme '{name}' (available: {})", self.names().join(", "))))
    }

    /// Registered names in order.
    pub fn names(&self) -> Vec<&str> {
        self.schemes.iter().map(|s| s.name()).collect()
    }

    /// Resolves the named schemes in the given order.
    pub fn prepare(&self, names: &[String], cx: &SchemeContext<'_>) -> Result<Vec<PreparedScheme>> {
        names.iter().map(|n| self.get(n)?.prepare(cx)).collect()
    }
}
