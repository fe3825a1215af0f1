//! Exhaustive minimum-feedback search for very small networks.

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;
use crate::profile::{feedback_dimension, FeedbackProfile, LinkStrategy};

use super::greedy::Gate;

/// Largest number of candidate profiles the search will enumerate.
pub const EXHAUSTIVE_MAX_CANDIDATES: u128 = 1_000_000;

/// Candidate submatrix sizes per user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpace {
    /// Allowed `M_j^s` values per receiver.
    pub rx_sub: Vec<Vec<usize>>,
    /// Allowed `N_i^s` values per transmitter.
    pub tx_sub: Vec<Vec<usize>>,
}

impl SearchSpace {
    /// Every size from 1 to the antenna count.
    pub fn all_sizes(cfg: &NetworkConfig) -> Self {
        Self {
            rx_sub: cfg.rx_antennas().iter().map(|&m| (1..=m).collect()).collect(),
            tx_sub: cfg.tx_antennas().iter().map(|&n| (1..=n).collect()).collect(),
        }
    }

    /// Sizes fixed to the given values; only the partition is searched.
    pub fn fixed(rx_sub: &[usize], tx_sub: &[usize]) -> Self {
        Self { rx_sub: rx_sub.iter().map(|&m| vec![m]).collect(), tx_sub: tx_sub.iter().map(|&n| vec![n]).collect() }
    }

    /// Number of candidate profiles, `prod |sizes| * 4^(K(K-1))`.
    pub fn candidates(&self) -> u128 {
        let k = self.rx_sub.len() as u32;
        let sizes: u128 = self.rx_sub.iter().chain(&self.tx_sub).map(|v| v.len() as u128).product();
        sizes.saturating_mul(4u128.saturating_pow(k * k.saturating_sub(1)))
    }
}

fn mixed_radix(mut index: u128, radices: &[usize]) -> Vec<usize> {
    radices
        .iter()
        .map(|&r| {
            let digit = (index % r as u128) as usize;
            index /= r as u128;
            digit
        })
        .collect()
}

/// Returns a minimum-dimension profile passing `gate` over every size
/// combination in `space` and every partition of the cross links.
///
/// Candidates are visited by increasing dimension, ties in enumeration
/// order, and the first that passes the gate is returned.
pub fn exhaustive_design(cfg: &NetworkConfig, space: &SearchSpace, gate: &Gate<'_>) -> Result<FeedbackProfile> {
    let k = cfg.users();
    if space.rx_sub.len() != k || space.tx_sub.len() != k || space.rx_sub.iter().chain(&space.tx_sub).any(Vec::is_empty) {
        return Err(Error::InvalidInput("search space does not match the network".into()));
    }
    let total = space.candidates();
    if total > EXHAUSTIVE_MAX_CANDIDATES {
        return Err(Error::UnsupportedSize(format!(
            "{total} candidate profiles exceed the limit of {EXHAUSTIVE_MAX_CANDIDATES}"
        )));
    }
    let links: Vec<(usize, usize)> = cfg.cross_links().collect();
    let mut radices: Vec<usize> = space.rx_sub.iter().chain(&space.tx_sub).map(Vec::len).collect();
    radices.extend(std::iter::repeat_n(4, links.len()));

    let mut scored = Vec::new();
    for index in 0..total {
        let digits = mixed_radix(index, &radices);
        let rx = (0..k).map(|j| space.rx_sub[j][digits[j]]).collect();
        let tx = (0..k).map(|i| space.tx_sub[i][digits[k + i]]).collect();
        let mut table = vec![vec![None; k]; k];
        for (n, &(j, i)) in links.iter().enumerate() {
            table[j][i] = Some(LinkStrategy::ALL[digits[2 * k + n]]);
        }
        let p = FeedbackProfile::new(rx, tx, table)?;
        if p.validate(cfg).is_err() {
            continue;
        }
        let d = feedback_dimension(cfg, &p)?;
        if d >= 0 {
            scored.push((d, index, p));
        }
    }
    scored.sort_by_key(|(d, index, _)| (*d, *index));
    for (_, _, p) in scored {
        if gate(&p)?.is_feasible() {
            return Ok(p);
        }
    }
    Err(Error::Infeasible("no profile in the search space passes the gate".into()))
}
