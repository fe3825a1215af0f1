//! Feasibility verdicts for a feedback profile.
//!
//! Four checkers are available behind the [`FeasibilityChecker`] trait and
//! can be selected by name through a [`CheckerRegistry`]:
//!
//! * `necessary`: dimension counting per user.
//! * `brute_subset`: counting over every subset of row-space links.
//! * `rank_test`: generic linear independence of the linearized alignment equations.
//! * `maxflow`: integer max flow on the constraint/variable graph (equal stream counts only).

mod counting;
mod maxflow;
mod rank;

pub use counting::{brute_subset_check, is_divisible, necessary_check, variable_counts, VariableCounts, BRUTE_SUBSET_MAX_PAIRS};
pub use maxflow::{counting_check, maxflow_analyze, maxflow_check, maxflow_check_with, violating_subset_from_cut, FlowNode, FlowOutcome, FlowState, PRange};
pub use rank::{rank_test, rank_test_with_transform};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::netcfg::{ChannelRealization, NetworkConfig};
use crate::profile::FeedbackProfile;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Alignment is achievable for almost every channel draw.
    Feasible,
    /// Alignment is impossible.
    Infeasible,
    /// The check is inconclusive.
    Unknown,
}

/// Which test produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Per-user dimension counting.
    #[serde(rename = "necessary")]
    Necessary,
    /// Generic rank test.
    #[serde(rename = "rank_test")]
    RankTest,
    /// Max-flow test.
    #[serde(rename = "maxflow")]
    MaxFlow,
    /// Subset counting.
    #[serde(rename = "brute_subset")]
    BruteSubset,
}

/// A verdict with its justification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    /// The verdict.
    pub verdict: Verdict,
    /// The test that produced it.
    pub method: Method,
    /// Which condition failed (always present when infeasible).
    pub failed_condition: Option<String>,
    /// Row-space links `(rx, tx)` whose constraints cannot all be met (0-based; 1-based in JSON).
    #[serde(serialize_with = "one_based_pairs")]
    pub violating_subset: Option<Vec<(usize, usize)>>,
}

fn one_based_pairs<S: Serializer>(pairs: &Option<Vec<(usize, usize)>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    pairs.as_ref().map(|v| v.iter().map(|&(j, i)| (j + 1, i + 1)).collect::<Vec<_>>()).serialize(s)
}

impl FeasibilityReport {
    pub(crate) fn feasible(method: Method) -> Self {
        Self { verdict: Verdict::Feasible, method, failed_condition: None, violating_subset: None }
    }

    pub(crate) fn unknown(method: Method) -> Self {
        Self { verdict: Verdict::Unknown, method, failed_condition: None, violating_subset: None }
    }

    pub(crate) fn infeasible(method: Method, condition: String) -> Self {
        Self { verdict: Verdict::Infeasible, method, failed_condition: Some(condition), violating_subset: None }
    }

    pub(crate) fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// True iff the verdict is feasible.
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }
}

/// Inputs shared by all checkers.
#[derive(Debug, Clone, Copy)]
pub struct CheckContext<'a> {
    /// The network.
    pub cfg: &'a NetworkConfig,
    /// The profile under test.
    pub profile: &'a FeedbackProfile,
    /// Channel draw used by tests that need one.
    pub channels: &'a ChannelRealization,
    /// Relative rank tolerance.
    pub tol: f64,
    /// Stream-index range of the max-flow graph.
    pub p_range: PRange,
}

/// A named feasibility test.
pub trait FeasibilityChecker: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// Runs the test.
    fn check(&self, cx: &CheckContext<'_>) -> Result<FeasibilityReport>;
}

/// Counting conditions on each user alone.
pub struct NecessaryChecker;

impl FeasibilityChecker for NecessaryChecker {
    fn name(&self) -> &'static str {
        "necessary"
    }

    fn check(&self, cx: &CheckContext<'_>) -> Result<FeasibilityReport> {
        necessary_check(cx.cfg, cx.profile)
    }
}

/// Per-user counting followed by subset counting. On divisible instances the
/// two are jointly sufficient, so a pass is reported as feasible there and as
/// unknown elsewhere.
pub struct SubsetChecker;

impl FeasibilityChecker for SubsetChecker {
    fn name(&self) -> &'static str {
        "brute_subset"
    }

    fn check(&self, cx: &CheckContext<'_>) -> Result<FeasibilityReport> {
        let nec = necessary_check(cx.cfg, cx.profile)?;
        if nec.verdict == Verdict::Infeasible {
            return Ok(nec.with_method(Method::BruteSubset));
        }
        let report = brute_subset_check(cx.cfg, cx.profile)?;
        if report.verdict == Verdict::Unknown && is_divisible(cx.cfg, cx.profile) {
            return Ok(FeasibilityReport::feasible(Method::BruteSubset));
        }
        Ok(report)
    }
}

/// Generic rank test on one channel draw.
pub struct RankTestChecker;

impl FeasibilityChecker for RankTestChecker {
    fn name(&self) -> &'static str {
        "rank_test"
    }

    fn check(&self, cx: &CheckContext<'_>) -> Result<FeasibilityReport> {
        rank_test(cx.cfg, cx.profile, cx.channels, cx.tol)
    }
}

/// Max-flow test for divisible instances.
pub struct MaxFlowChecker;

impl FeasibilityChecker for MaxFlowChecker {
    fn name(&self) -> &'static str {
        "maxflow"
    }

    fn check(&self, cx: &CheckContext<'_>) -> Result<FeasibilityReport> {
        maxflow_check_with(cx.cfg, cx.profile, cx.p_range)
    }
}

/// Checkers addressable by name, in registration order.
pub struct CheckerRegistry {
    checkers: Vec<Box<dyn FeasibilityChecker>>,
}

impl Default for CheckerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(NecessaryChecker));
        r.register(Box::new(SubsetChecker));
        r.register(Box::new(RankTestChecker));
        r.register(Box::new(MaxFlowChecker));
        r
    }
}

impl CheckerRegistry {
    /// A registry without checkers.
    pub fn empty() -> Self {
        Self { checkers: Vec::new() }
    }

    /// Adds a checker, replacing any with the same name.
    pub fn register(&mut self, checker: Box<dyn FeasibilityChecker>) {
        self.checkers.retain(|c| c.name() != checker.name());
        self.checkers.push(checker);
    }

    /// Looks a checker up by name.
    pub fn get(&self, name: &str) -> Result<&dyn FeasibilityChecker> {
        self.checkers
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Config(format!("unknown checker '{name}' (available: {})", self.names().join(", "))))
    }

    /// Registered names in order.
    pub fn names(&self) -> Vec<&'static str> {
        self.checkers.iter().map(|c| c.name()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one;
    use crate::netcfg::generate_channels;

    #[test]
    fn registry_lists_builtins() {
        let r = CheckerRegistry::default();
        assert_eq!(r.names(), vec!["necessary", "brute_subset", "rank_test", "maxflow"]);
        assert!(r.get("nope").is_err());
    }

    #[test]
    fn registry_dispatches_by_name() {
        let (cfg, p) = example_one();
        let h = generate_channels(&cfg, 1);
        let cx = CheckContext { cfg: &cfg, profile: &p, channels: &h, tol: 1e-9, p_range: PRange::Streams };
        let r = CheckerRegistry::default();
        assert_eq!(r.get("necessary").unwrap().check(&cx).unwrap().verdict, Verdict::Unknown);
        assert_eq!(r.get("rank_test").unwrap().check(&cx).unwrap().verdict, Verdict::Feasible);
        assert_eq!(r.get("brute_subset").unwrap().check(&cx).unwrap().verdict, Verdict::Feasible);
        assert_eq!(r.get("maxflow").unwrap().check(&cx).unwrap().verdict, Verdict::Feasible);
    }

    #[test]
    fn report_json_is_one_based() {
        let mut r = FeasibilityReport::infeasible(Method::MaxFlow, "x".into());
        r.violating_subset = Some(vec![(0, 1)]);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["violating_subset"], serde_json::json!([[1, 2]]));
        assert_eq!(v["method"], "maxflow");
        assert_eq!(v["verdict"], "infeasible");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn counting_flow_agrees_with_enumeration((cfg, p) in crate::test_support::small_profile_strategy()) {
            let flow = counting_check(&cfg, &p).unwrap();
            let nec = necessary_check(&cfg, &p).unwrap();
            let expected = if nec.verdict == Verdict::Infeasible { nec.verdict } else { brute_subset_check(&cfg, &p).unwrap().verdict };
            proptest::prop_assert_eq!(flow.verdict, expected);
        }

        #[test]
        fn rank_test_implies_counting((cfg, p) in crate::test_support::small_profile_strategy(), seed in 0u64..1000) {
            let h = generate_channels(&cfg, seed);
            if rank_test(&cfg, &p, &h, 1e-9).unwrap().is_feasible() {
                proptest::prop_assert_ne!(counting_check(&cfg, &p).unwrap().verdict, Verdict::Infeasible);
            }
        }
    }
}
