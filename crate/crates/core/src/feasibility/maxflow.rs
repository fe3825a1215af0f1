//! Max-flow feasibility test for divisible instances.
//!
//! Every constraint row `(j, i, p, q)` of a row-space link must be matched
//! to one free variable, either on receiver `j` (stream index `p`) or on
//! transmitter `i` (stream index `q`). The rows of one `(j, i, p)` triple
//! always carry equal flow across `q`, so the `d` replicas are merged into
//! one node whose incident capacities are scaled by `d`. The profile is
//! feasible iff the maximum flow saturates every constraint.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;
use crate::profile::{derive, FeedbackProfile, LinkStrategy};

use super::counting::{is_divisible, necessary_check, variable_counts};
use super::{FeasibilityReport, Method, Verdict};

/// Range of the receiver stream index `p` in the constraint graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PRange {
    /// `p` in `1..=d_j^0`, matching the per-link constraint count `d_j^0 d`.
    #[default]
    Streams,
    /// `p` in `1..=d + d_j^0`, for comparison with the wider index range.
    Extended,
}

/// Node of the constraint graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowNode {
    /// Source.
    Source,
    /// Sink.
    Sink,
    /// Receiver variables of stream index `p`.
    Rx { j: usize, p: usize },
    /// Transmitter variables (all stream indices merged).
    Tx { i: usize },
    /// Constraint rows of link `(j, i)` and receiver stream `p` (all `q` merged).
    Constraint { j: usize, i: usize, p: usize },
}

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    flow: i64,
}

/// Constraint graph with the flow left by the max-flow computation.
#[derive(Debug, Clone)]
pub struct FlowState {
    d: usize,
    nodes: Vec<FlowNode>,
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    max_flow: i64,
    demand: i64,
}

const SOURCE: usize = 0;
const SINK: usize = 1;

impl FlowState {
    fn new(d: usize) -> Self {
        Self { d, nodes: vec![FlowNode::Source, FlowNode::Sink], adj: vec![Vec::new(), Vec::new()], edges: Vec::new(), max_flow: 0, demand: 0 }
    }

    fn add_node(&mut self, node: FlowNode) -> usize {
        self.nodes.push(node);
        self.adj.push(Vec::new());
        self.nodes.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, flow: 0 });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0, flow: 0 });
    }

    fn residual(&self, e: usize) -> i64 {
        self.edges[e].cap - self.edges[e].flow
    }

    fn bfs_levels(&self) -> Option<Vec<usize>> {
        let mut level = vec![usize::MAX; self.nodes.len()];
        level[SOURCE] = 0;
        let mut queue = VecDeque::from([SOURCE]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.edges[e].to;
                if level[w] == usize::MAX && self.residual(e) > 0 {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        (level[SINK] != usize::MAX).then_some(level)
    }

    fn augment(&mut self, v: usize, pushed: i64, level: &[usize], next: &mut [usize]) -> i64 {
        if v == SINK {
            return pushed;
        }
        while next[v] < self.adj[v].len() {
            let e = self.adj[v][next[v]];
            let w = self.edges[e].to;
            if level[w] == level[v] + 1 && self.residual(e) > 0 {
                let got = self.augment(w, pushed.min(self.residual(e)), level, next);
                if got > 0 {
                    self.edges[e].flow += got;
                    self.edges[e ^ 1].flow -= got;
                    return got;
                }
            }
            next[v] += 1;
        }
        0
    }

    fn run_dinic(&mut self) -> i64 {
        let mut total = 0;
        while let Some(level) = self.bfs_levels() {
            let mut next = vec![0; self.nodes.len()];
            loop {
                let f = self.augment(SOURCE, i64::MAX, &level, &mut next);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        self.max_flow = total;
        total
    }

    fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[SOURCE] = true;
        let mut queue = VecDeque::from([SOURCE]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.edges[e].to;
                if !seen[w] && self.residual(e) > 0 {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Value of the maximum flow.
    pub fn max_flow(&self) -> i64 {
        self.max_flow
    }

    /// Total number of constraint rows, the flow needed for feasibility.
    pub fn demand(&self) -> i64 {
        self.demand
    }

    /// Common stream count.
    pub fn streams(&self) -> usize {
        self.d
    }

    /// Capacity of the source edge into `node`.
    fn supply(&self, node: usize) -> i64 {
        self.adj[SOURCE].iter().find(|&&e| self.edges[e].to == node).map_or(0, |&e| self.edges[e].cap)
    }

    /// Flow from a constraint node into the sink.
    fn served(&self, node: usize) -> i64 {
        self.adj[node].iter().find(|&&e| self.edges[e].to == SINK && e % 2 == 0).map_or(0, |&e| self.edges[e].flow)
    }

    /// Forward edges `(variable node, flow)` entering a constraint node.
    fn suppliers(&self, node: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.adj[node].iter().filter(|&&e| e % 2 == 1).map(move |&e| (self.edges[e].to, self.edges[e ^ 1].flow))
    }

    /// Forward edges `(constraint node, flow)` leaving a variable node.
    fn consumers(&self, node: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.adj[node].iter().filter(|&&e| e % 2 == 0).map(move |&e| (self.edges[e].to, self.edges[e].flow))
    }
}

/// Max-flow verdict together with the final graph state.
#[derive(Debug, Clone)]
pub struct FlowOutcome {
    /// The verdict.
    pub report: FeasibilityReport,
    /// Graph state; absent when the per-user conditions already fail.
    pub state: Option<FlowState>,
}

/// Builds the constraint graph, runs max flow and reports the verdict.
pub fn maxflow_analyze(cfg: &NetworkConfig, profile: &FeedbackProfile, p_range: PRange) -> Result<FlowOutcome> {
    if !is_divisible(cfg, profile) {
        return Err(Error::UnsupportedCase(
            "max-flow test needs equal stream counts dividing every submatrix size".into(),
        ));
    }
    let nec = necessary_check(cfg, profile)?;
    if nec.verdict == Verdict::Infeasible {
        return Ok(FlowOutcome { report: nec.with_method(Method::MaxFlow), state: None });
    }
    let der = derive(cfg, profile)?;
    let counts = variable_counts(cfg, &der);
    let d = cfg.streams()[0];
    let k = cfg.users();
    let pairs = profile.pairs(LinkStrategy::RowSpace);

    let mut g = FlowState::new(d);
    let p_count = |j: usize| match p_range {
        PRange::Streams => der.d0[j],
        PRange::Extended => d + der.d0[j],
    };
    let mut rx_nodes: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut tx_node: Vec<Option<usize>> = vec![None; k];
    for &(j, i) in &pairs {
        if rx_nodes[j].is_empty() {
            for p in 0..p_count(j) {
                let n = g.add_node(FlowNode::Rx { j, p });
                g.add_edge(SOURCE, n, der.me[j] - der.d0[j] as i64);
                rx_nodes[j].push(n);
            }
        }
        if tx_node[i].is_none() {
            let n = g.add_node(FlowNode::Tx { i });
            g.add_edge(SOURCE, n, counts.v[i]);
            tx_node[i] = Some(n);
        }
    }
    let dd = d as i64;
    for &(j, i) in &pairs {
        let v = tx_node[i].expect("created above");
        for p in 0..p_count(j) {
            let c = g.add_node(FlowNode::Constraint { j, i, p });
            let u = rx_nodes[j][p];
            g.add_edge(u, c, dd * (der.me[j] - der.d0[j] as i64));
            g.add_edge(v, c, dd * (der.ne[i] - dd));
            g.add_edge(c, SINK, dd);
            g.demand += dd;
        }
    }
    let flow = g.run_dinic();
    let report = if flow == g.demand {
        FeasibilityReport::feasible(Method::MaxFlow)
    } else {
        let rows = violating_subset_from_cut(&g)?;
        let pairs: BTreeSet<(usize, usize)> = rows.iter().map(|&(j, i, _, _)| (j, i)).collect();
        let mut r = FeasibilityReport::infeasible(
            Method::MaxFlow,
            format!("max-flow: flow {flow} cannot serve all {} constraint rows", g.demand),
        );
        r.violating_subset = Some(pairs.into_iter().collect());
        r
    };
    Ok(FlowOutcome { report, state: Some(g) })
}

/// Per-user conditions plus subset counting for arbitrary sizes, decided by
/// one max flow.
///
/// Each row-space link demands `C_ji = d_j^0 d_i` units from the variables
/// of its receiver and transmitter. By max-flow/min-cut the demand is met iff
/// no subset of links needs more constraints than the variables it touches,
/// which is exactly the condition [`super::brute_subset_check`] enumerates.
/// Returns unknown when every count passes.
pub fn counting_check(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<FeasibilityReport> {
    let nec = necessary_check(cfg, profile)?;
    if nec.verdict == Verdict::Infeasible {
        return Ok(nec);
    }
    let der = derive(cfg, profile)?;
    let counts = variable_counts(cfg, &der);
    let k = cfg.users();
    let pairs = profile.pairs(LinkStrategy::RowSpace);
    let cost: Vec<i64> = pairs.iter().map(|&(j, i)| (der.d0[j] * cfg.streams()[i]) as i64).collect();
    let unbounded: i64 = cost.iter().sum::<i64>() + 1;

    let mut g = FlowState::new(1);
    let rx: Vec<usize> = (0..k).map(|j| g.add_node(FlowNode::Rx { j, p: 0 })).collect();
    let tx: Vec<usize> = (0..k).map(|i| g.add_node(FlowNode::Tx { i })).collect();
    for j in 0..k {
        g.add_edge(SOURCE, rx[j], counts.u[j]);
        g.add_edge(SOURCE, tx[j], counts.v[j]);
    }
    let mut links = Vec::with_capacity(pairs.len());
    for (&(j, i), &c) in pairs.iter().zip(&cost) {
        let node = g.add_node(FlowNode::Constraint { j, i, p: 0 });
        g.add_edge(rx[j], node, unbounded);
        g.add_edge(tx[i], node, unbounded);
        g.add_edge(node, SINK, c);
        g.demand += c;
        links.push(node);
    }
    let flow = g.run_dinic();
    if flow == g.demand {
        return Ok(FeasibilityReport::unknown(Method::Necessary));
    }
    // Links the source cannot reach in the residual graph form a set whose
    // neighbouring variables are all cut off, so they are short of supply.
    let reached = g.reachable_from_source();
    let subset: Vec<(usize, usize)> =
        pairs.iter().zip(&links).filter(|&(_, &n)| !reached[n]).map(|(&p, _)| p).collect();
    let mut r = FeasibilityReport::infeasible(
        Method::Necessary,
        format!("subset-count: {} links need more constraints than the variables they touch", subset.len()),
    );
    r.violating_subset = Some(subset);
    Ok(r)
}

/// Max-flow verdict with the default stream-index range.
pub fn maxflow_check(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<FeasibilityReport> {
    maxflow_check_with(cfg, profile, PRange::Streams)
}

/// Max-flow verdict with an explicit stream-index range.
pub fn maxflow_check_with(cfg: &NetworkConfig, profile: &FeedbackProfile, p_range: PRange) -> Result<FeasibilityReport> {
    Ok(maxflow_analyze(cfg, profile, p_range)?.report)
}

/// Extracts a set of constraint rows `(j, i, p, q)` (0-based) that the
/// variables they touch cannot cover.
///
/// Starting from an unsaturated constraint node, the set alternately absorbs
/// every variable node adjacent to a collected constraint node, and every
/// constraint node receiving flow from a collected variable node. All
/// collected variable nodes are then saturated and send all their flow into
/// the collected constraints, so their supply falls short of the demand.
pub fn violating_subset_from_cut(state: &FlowState) -> Result<Vec<(usize, usize, usize, usize)>> {
    if state.max_flow >= state.demand {
        return Err(Error::InvalidState("the instance is feasible; there is no violating subset".into()));
    }
    let d = state.d as i64;
    let start = (0..state.nodes.len())
        .find(|&n| matches!(state.nodes[n], FlowNode::Constraint { .. }) && state.served(n) < d)
        .ok_or_else(|| Error::InvalidState("no unsaturated constraint found".into()))?;
    let mut constraints = BTreeSet::from([start]);
    let mut variables = BTreeSet::new();
    loop {
        let before = (constraints.len(), variables.len());
        for &c in &constraints {
            variables.extend(state.suppliers(c).map(|(z, _)| z));
        }
        for &z in &variables {
            constraints.extend(state.consumers(z).filter(|&(_, f)| f > 0).map(|(c, _)| c));
        }
        if (constraints.len(), variables.len()) == before {
            break;
        }
    }
    let supply: i64 = variables.iter().map(|&z| state.supply(z)).sum();
    let demand = d * constraints.len() as i64;
    if supply >= demand {
        return Err(Error::InvalidState(format!(
            "closure supply {supply} does not fall short of its demand {demand}"
        )));
    }
    let mut rows = Vec::new();
    for &c in &constraints {
        if let FlowNode::Constraint { j, i, p } = state.nodes[c] {
            rows.extend((0..state.d).map(|q| (j, i, p, q)));
        }
    }
    rows.sort_unstable();
    Ok(rows)
}
