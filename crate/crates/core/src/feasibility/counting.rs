//! Counting conditions: per-user dimension checks and subset counting over
//! row-space links.

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;
use crate::profile::{derive, DerivedProfile, FeedbackProfile, LinkStrategy};

use super::{FeasibilityReport, Method};

/// Largest number of row-space links [`brute_subset_check`] will enumerate.
pub const BRUTE_SUBSET_MAX_PAIRS: usize = 20;

/// Free variables per receiver and transmitter after fixing the alignment structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableCounts {
    /// `U_j = d_j^0 (M_j^e - d_j^0)`.
    pub u: Vec<i64>,
    /// `V_i = d_i (N_i^e - d_i)`.
    pub v: Vec<i64>,
}

/// Computes `U_j` and `V_i`.
pub fn variable_counts(cfg: &NetworkConfig, der: &DerivedProfile) -> VariableCounts {
    let u = (0..cfg.users()).map(|j| der.d0[j] as i64 * (der.me[j] - der.d0[j] as i64)).collect();
    let v = (0..cfg.users())
        .map(|i| {
            let d = cfg.streams()[i] as i64;
            d * (der.ne[i] - d)
        })
        .collect();
    VariableCounts { u, v }
}

/// True when every user has the same stream count `d` and every submatrix size is a multiple of `d`.
pub fn is_divisible(cfg: &NetworkConfig, profile: &FeedbackProfile) -> bool {
    let d = cfg.streams()[0];
    cfg.streams().iter().all(|&x| x == d)
        && profile.rx_sub().iter().all(|&m| m % d == 0)
        && profile.tx_sub().iter().all(|&n| n % d == 0)
}

/// Checks `N_i^e >= d_i` for every transmitter and `M_j^e >= d_j^0` for every receiver.
///
/// Returns infeasible on a violation and unknown otherwise, since the subset
/// condition is checked separately.
pub fn necessary_check(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<FeasibilityReport> {
    let der = derive(cfg, profile)?;
    for i in 0..cfg.users() {
        if der.ne[i] < cfg.streams()[i] as i64 {
            return Ok(FeasibilityReport::infeasible(
                Method::Necessary,
                format!("transmit-dimension: N^e of user {} is {} < d = {}", i + 1, der.ne[i], cfg.streams()[i]),
            ));
        }
    }
    for j in 0..cfg.users() {
        if der.me[j] < der.d0[j] as i64 {
            return Ok(FeasibilityReport::infeasible(
                Method::Necessary,
                format!("receive-dimension: M^e of user {} is {} < d^0 = {}", j + 1, der.me[j], der.d0[j]),
            ));
        }
    }
    Ok(FeasibilityReport::unknown(Method::Necessary))
}

/// Enumerates every subset of row-space links and checks that the variables
/// touched by the subset are at least as many as its constraints
/// `C_ji = d_j^0 d_i`. Reports the first violating subset, otherwise unknown.
pub fn brute_subset_check(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<FeasibilityReport> {
    let pairs = profile.pairs(LinkStrategy::RowSpace);
    if pairs.len() > BRUTE_SUBSET_MAX_PAIRS {
        return Err(Error::UnsupportedSize(format!(
            "{} row-space links exceed the subset enumeration limit of {BRUTE_SUBSET_MAX_PAIRS}",
            pairs.len()
        )));
    }
    let der = derive(cfg, profile)?;
    let counts = variable_counts(cfg, &der);
    let k = cfg.users();
    let cost: Vec<i64> = pairs.iter().map(|&(j, i)| der.d0[j] as i64 * cfg.streams()[i] as i64).collect();
    for mask in 1u64..(1u64 << pairs.len()) {
        let mut rx_used = vec![false; k];
        let mut tx_used = vec![false; k];
        let mut constraints = 0i64;
        for (b, &(j, i)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                rx_used[j] = true;
                tx_used[i] = true;
                constraints += cost[b];
            }
        }
        let variables: i64 = (0..k)
            .map(|x| if rx_used[x] { counts.u[x] } else { 0 } + if tx_used[x] { counts.v[x] } else { 0 })
            .sum();
        if variables < constraints {
            let subset: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
            let mut report = FeasibilityReport::infeasible(
                Method::BruteSubset,
                format!("subset-count: {} links need {constraints} constraints but touch {variables} variables", subset.len()),
            );
            report.violating_subset = Some(subset);
            return Ok(report);
        }
    }
    Ok(FeasibilityReport::unknown(Method::BruteSubset))
}
