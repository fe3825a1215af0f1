//! Alternating leakage minimization on the effective channels, and
//! reconstruction of full precoders and decorrelators.
//!
//! [`solve_inner`] sees only a [`FedCSI`]: the precoding subspaces and the
//! effective channels rebuilt from reported subspaces. Raw cross-link
//! channels enter only in [`reconstruct`], on the receiver side.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matproc::{orthonormalize, singular_values, smallest_eigvecs, CMatrix};
use crate::netcfg::{ChannelRealization, NetworkConfig};
use crate::profile::{FedCSI, FeedbackProfile, LinkStrategy};
use crate::seeding::{gaussian_matrix, substream, TAG_SOLVER_INIT};

/// Slack allowed when checking that leakage never increases between sweeps.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Stopping rules and seeding of the alternating minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Largest number of sweeps per attempt.
    pub max_iters: usize,
    /// Leakage below which the run counts as converged.
    pub leak_tol: f64,
    /// After converging, sweeps continue until leakage falls below this
    /// value or stops decreasing. Leakage is a squared norm, so the
    /// alignment residual of a run stopped at `leak_tol` is about
    /// `sqrt(leak_tol)`; polishing brings it well below verification tolerances.
    pub polish_tol: f64,
    /// Seed of the random initial precoders.
    pub seed: u64,
    /// Extra attempts from fresh initial points when an attempt does not converge.
    pub restarts: usize,
    /// Stop an attempt early when leakage improved by less than this
    /// relative amount over the last [`STALL_WINDOW`] sweeps.
    pub stall_tol: Option<f64>,
}

/// Sweeps compared by the stall rule.
pub const STALL_WINDOW: usize = 50;

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iters: 5000, leak_tol: 1e-9, polish_tol: 1e-16, seed: 0, restarts: 0, stall_tol: None }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.leak_tol > 0.0) || !(self.polish_tol > 0.0) {
            return Err(Error::InvalidInput("solver needs max_iters >= 1, leak_tol > 0 and polish_tol > 0".into()));
        }
        if self.stall_tol.is_some_and(|s| !(s >= 0.0)) {
            return Err(Error::InvalidInput("stall_tol must be non-negative".into()));
        }
        Ok(())
    }
}

/// Result of the alternating minimization, optionally completed by [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct IASolution {
    /// `N_i^e x d_i` orthonormal precoders on the effective channels.
    pub v_a: Vec<CMatrix>,
    /// `M_j^e x d_j^0` orthonormal decorrelators on the effective channels.
    pub u_b: Vec<CMatrix>,
    /// `N_i x d_i` full precoders (empty until reconstructed).
    pub v: Vec<CMatrix>,
    /// `M_j x d_j` full decorrelators (empty until reconstructed).
    pub u: Vec<CMatrix>,
    /// Leakage after the first decorrelator update, then after every sweep.
    pub leakage_trace: Vec<f64>,
    /// Whether the final leakage is below the tolerance.
    pub converged: bool,
    /// Whether leakage never rose by more than [`MONOTONE_SLACK`] between sweeps.
    pub monotone: bool,
    /// Index of the attempt that produced this solution.
    pub attempt: usize,
}

impl IASolution {
    /// Final leakage.
    pub fn final_leakage(&self) -> f64 {
        self.leakage_trace.last().copied().unwrap_or(0.0)
    }

    /// Writes the leakage trace as CSV with columns `iteration,leakage`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "leakage"])?;
        for (t, l) in self.leakage_trace.iter().enumerate() {
            w.write_record([t.to_string(), format!("{l:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Problem<'a> {
    links: Vec<(usize, usize, &'a CMatrix)>,
    ne: Vec<usize>,
    me: Vec<usize>,
    d: Vec<usize>,
    d0: Vec<usize>,
}

impl Problem<'_> {
    fn update_u(&self, v_a: &[CMatrix]) -> Result<Vec<CMatrix>> {
        let mut e: Vec<CMatrix> = self.me.iter().map(|&m| CMatrix::zeros(m, m)).collect();
        for &(j, i, g) in &self.links {
            let gv = g * &v_a[i];
            e[j] += &gv * gv.adjoint();
        }
        e.iter().zip(&self.d0).map(|(e, &d0)| smallest_eigvecs(e, d0)).collect()
    }

    fn update_v(&self, u_b: &[CMatrix]) -> Result<Vec<CMatrix>> {
        let mut t: Vec<CMatrix> = self.ne.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        for &(j, i, g) in &self.links {
            let gu = g.adjoint() * &u_b[j];
            t[i] += &gu * gu.adjoint();
        }
        t.iter().zip(&self.d).map(|(t, &d)| smallest_eigvecs(t, d)).collect()
    }

    fn leakage(&self, u_b: &[CMatrix], v_a: &[CMatrix]) -> f64 {
        self.links.iter().map(|&(j, i, g)| (u_b[j].adjoint() * g * &v_a[i]).norm_squared()).fold(0.0, |a, x| a + x)
    }
}

/// Minimizes `sum over row-space links of ||U_j^b^H G_ji V_i^a||_F^2` by
/// alternating eigenvector updates of decorrelators and precoders.
///
/// Precoders start as orthonormalized Gaussian frames. The trace records
/// the leakage after the first decorrelator update and after every
/// precoder-then-decorrelator sweep. A run converges once leakage drops
/// below `leak_tol`, then polishes towards `polish_tol`; every run stops
/// after `max_iters` sweeps.
pub fn solve_inner(cfg: &NetworkConfig, profile: &FeedbackProfile, fed: &FedCSI, opts: &SolverOptions) -> Result<IASolution> {
    opts.validate()?;
    if &fed.profile != profile || fed.streams != cfg.streams() {
        return Err(Error::InvalidInput("feedback was produced for a different profile or network".into()));
    }
    let der = &fed.derived;
    let k = cfg.users();
    for i in 0..k {
        if der.ne[i] < cfg.streams()[i] as i64 || der.me[i] < der.d0[i] as i64 {
            return Err(Error::InvalidInput(format!(
                "user {}: effective sizes M^e = {}, N^e = {} cannot carry d^0 = {}, d = {}",
                i + 1,
                der.me[i],
                der.ne[i],
                der.d0[i],
                cfg.streams()[i]
            )));
        }
    }
    let ne: Vec<usize> = der.ne.iter().map(|&x| x as usize).collect();
    let me: Vec<usize> = der.me.iter().map(|&x| x as usize).collect();
    let mut links = Vec::new();
    for (j, i) in profile.pairs(LinkStrategy::RowSpace) {
        let g = fed
            .view
            .g
            .get(&(j, i))
            .ok_or_else(|| Error::InvalidInput(format!("no effective channel for link ({}, {})", j + 1, i + 1)))?;
        if g.shape() != (me[j], ne[i]) {
            return Err(Error::InvalidInput(format!(
                "effective channel ({}, {}) has shape {:?}, expected {}x{}",
                j + 1,
                i + 1,
                g.shape(),
                me[j],
                ne[i]
            )));
        }
        links.push((j, i, g));
    }
    let problem = Problem { links, ne, me, d: cfg.streams().to_vec(), d0: der.d0.clone() };

    let mut best: Option<IASolution> = None;
    for attempt in 0..=opts.restarts {
        let sol = run_attempt(&problem, opts, attempt)?;
        if sol.converged {
            return Ok(sol);
        }
        if best.as_ref().is_none_or(|b| sol.final_leakage() < b.final_leakage()) {
            best = Some(sol);
        }
    }
    Ok(best.expect("at least one attempt runs"))
}

fn run_attempt(problem: &Problem<'_>, opts: &SolverOptions, attempt: usize) -> Result<IASolution> {
    let mut v_a: Vec<CMatrix> = problem
        .ne
        .iter()
        .zip(&problem.d)
        .enumerate()
        .map(|(i, (&n, &d))| {
            let mut rng = substream(opts.seed, TAG_SOLVER_INIT, i as u64, attempt as u64);
            orthonormalize(&gaussian_matrix(n, d, &mut rng))
        })
        .collect();
    let mut u_b = problem.update_u(&v_a)?;
    let mut trace = vec![problem.leakage(&u_b, &v_a)];
    let mut monotone = true;
    let target = opts.leak_tol.min(opts.polish_tol);
    while trace.len() <= opts.max_iters && trace[trace.len() - 1] >= target {
        let before = trace[trace.len() - 1];
        let next_v = problem.update_v(&u_b)?;
        let next_u = problem.update_u(&next_v)?;
        let leak = problem.leakage(&next_u, &next_v);
        if before < opts.leak_tol && leak >= before {
            // Polishing reached the numerical floor; keep the better point.
            break;
        }
        v_a = next_v;
        u_b = next_u;
        monotone &= leak <= before + MONOTONE_SLACK;
        trace.push(leak);
        if let Some(stall) = opts.stall_tol {
            let n = trace.len();
            if n > STALL_WINDOW {
                let old = trace[n - 1 - STALL_WINDOW];
                if old - leak <= stall * old {
                    break;
                }
            }
        }
    }
    let converged = trace[trace.len() - 1] < opts.leak_tol;
    Ok(IASolution { v_a, u_b, v: Vec::new(), u: Vec::new(), leakage_trace: trace, converged, monotone, attempt })
}

/// Fills the full precoders `V_i = [S_i^t V_i^a; 0]` and the decorrelators
/// `U_j`, the `d_j` least-interfered directions of
/// `sum_{i != j} (H_ji V_i)(H_ji V_i)^H` computed from the receiver's own channels.
pub fn reconstruct(cfg: &NetworkConfig, h: &ChannelRealization, fed: &FedCSI, sol: &IASolution) -> Result<IASolution> {
    let k = cfg.users();
    if sol.v_a.len() != k || h.users() != k {
        return Err(Error::InvalidInput("solution does not match the network".into()));
    }
    let mut v = Vec::with_capacity(k);
    for i in 0..k {
        let inner = &fed.view.s_t[i] * &sol.v_a[i];
        let mut full = CMatrix::zeros(cfg.tx_antennas()[i], cfg.streams()[i]);
        full.view_mut((0, 0), inner.shape()).copy_from(&inner);
        v.push(full);
    }
    let mut u = Vec::with_capacity(k);
    for j in 0..k {
        let m = cfg.rx_antennas()[j];
        let mut q = CMatrix::zeros(m, m);
        for i in (0..k).filter(|&i| i != j) {
            let hv = h.link(j, i) * &v[i];
            q += &hv * hv.adjoint();
        }
        u.push(smallest_eigvecs(&q, cfg.streams()[j])?);
    }
    Ok(IASolution { v, u, ..sol.clone() })
}

/// Residuals of the original alignment conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IaReport {
    /// `max_{i != j} ||U_j^H H_ji V_i||_F`.
    pub max_cross_residual: f64,
    /// Smallest singular value of any `U_j^H H_jj V_j`.
    pub min_direct_singular: f64,
    /// Both conditions hold at the tolerance.
    pub pass: bool,
}

/// Checks zero interference on every cross link and full rank on every direct link.
pub fn verify_ia(cfg: &NetworkConfig, h: &ChannelRealization, v: &[CMatrix], u: &[CMatrix], tol: f64) -> Result<IaReport> {
    let k = cfg.users();
    if v.len() != k || u.len() != k {
        return Err(Error::InvalidInput("need one precoder and one decorrelator per user".into()));
    }
    let mut max_cross: f64 = 0.0;
    let mut min_direct = f64::INFINITY;
    for j in 0..k {
        for i in 0..k {
            let m = u[j].adjoint() * h.link(j, i) * &v[i];
            if i == j {
                let sv = singular_values(&m)?;
                let smallest = if sv.len() < cfg.streams()[j] { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
                min_direct = min_direct.min(smallest);
            } else {
                max_cross = max_cross.max(m.norm());
            }
        }
    }
    if k == 0 {
        min_direct = 0.0;
    }
    Ok(IaReport {
        max_cross_residual: max_cross,
        min_direct_singular: min_direct,
        pass: max_cross < tol && min_direct > tol,
    })
}

/// Evaluates feedback, solves and reconstructs in one call.
pub fn solve_full(
    cfg: &NetworkConfig,
    profile: &FeedbackProfile,
    h: &ChannelRealization,
    fed: &FedCSI,
    opts: &SolverOptions,
) -> Result<IASolution> {
    let sol = solve_inner(cfg, profile, fed, opts)?;
    reconstruct(cfg, h, fed, &sol)
}
