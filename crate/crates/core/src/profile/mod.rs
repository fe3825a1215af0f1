//! Feedback profiles: which part of each cross link is reported and how,
//! the quantities derived from that choice, and the feedback dimension.

mod feedback;

pub use feedback::{
    evaluate_feedback, full_direction_feedback, random_transforms, transmitter_view, FedCSI, FedKind,
    FedSubspace, TransmitterView,
};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;

/// How receiver `j` handles the cross link from transmitter `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkStrategy {
    /// No feedback; the interference is left to the receiver's spare dimensions.
    #[serde(rename = "I")]
    NoFeedback,
    /// Zero-forced at the receiver through its left null space.
    #[serde(rename = "II")]
    Absorbed,
    /// The transmitter is told the null space of the link and precodes inside it.
    #[serde(rename = "III")]
    NullSpace,
    /// Reported jointly through the row space of the concatenated links.
    #[serde(rename = "IV")]
    RowSpace,
}

impl LinkStrategy {
    /// All four strategies in canonical order.
    pub const ALL: [LinkStrategy; 4] =
        [LinkStrategy::NoFeedback, LinkStrategy::Absorbed, LinkStrategy::NullSpace, LinkStrategy::RowSpace];

    /// Roman-numeral label.
    pub fn label(self) -> &'static str {
        match self {
            LinkStrategy::NoFeedback => "I",
            LinkStrategy::Absorbed => "II",
            LinkStrategy::NullSpace => "III",
            LinkStrategy::RowSpace => "IV",
        }
    }
}

impl fmt::Display for LinkStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Submatrix sizes and the per-receiver partition of cross links.
///
/// Indices are 0-based in the API and 1-based in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ProfileWire", into = "ProfileWire")]
pub struct FeedbackProfile {
    rx_sub: Vec<usize>,
    tx_sub: Vec<usize>,
    links: Vec<Vec<Option<LinkStrategy>>>,
}

impl FeedbackProfile {
    /// Builds a profile from submatrix sizes and a full strategy table `links[j][i]` (`None` on the diagonal).
    pub fn new(rx_sub: Vec<usize>, tx_sub: Vec<usize>, links: Vec<Vec<Option<LinkStrategy>>>) -> Result<Self> {
        let k = rx_sub.len();
        if tx_sub.len() != k || links.len() != k {
            return Err(Error::InvalidProfile("list lengths differ from the user count".into()));
        }
        for (j, row) in links.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidProfile(format!("receiver {} has {} link entries", j + 1, row.len())));
            }
            for (i, s) in row.iter().enumerate() {
                if (i == j) != s.is_none() {
                    return Err(Error::InvalidProfile(format!(
                        "receiver {}: link {} must {}be assigned",
                        j + 1,
                        i + 1,
                        if i == j { "not " } else { "" }
                    )));
                }
            }
        }
        Ok(Self { rx_sub, tx_sub, links })
    }

    /// Every cross link gets `strategy`; submatrix sizes as given.
    pub fn uniform(rx_sub: Vec<usize>, tx_sub: Vec<usize>, strategy: LinkStrategy) -> Result<Self> {
        let k = rx_sub.len();
        let links = (0..k)
            .map(|j| (0..k).map(|i| if i == j { None } else { Some(strategy) }).collect())
            .collect();
        Self::new(rx_sub, tx_sub, links)
    }

    /// Full submatrices with all cross links reported by row space.
    pub fn truncated_full(cfg: &NetworkConfig) -> Self {
        Self::uniform(cfg.rx_antennas().to_vec(), cfg.tx_antennas().to_vec(), LinkStrategy::RowSpace)
            .expect("shape follows the config")
    }

    /// Number of users.
    pub fn users(&self) -> usize {
        self.rx_sub.len()
    }

    /// Receive submatrix sizes M_j^s.
    pub fn rx_sub(&self) -> &[usize] {
        &self.rx_sub
    }

    /// Transmit submatrix sizes N_i^s.
    pub fn tx_sub(&self) -> &[usize] {
        &self.tx_sub
    }

    /// Strategy of link `(j, i)`; `None` when `i == j`.
    pub fn strategy(&self, j: usize, i: usize) -> Option<LinkStrategy> {
        self.links[j][i]
    }

    /// Sets the strategy of cross link `(j, i)`.
    pub fn set_strategy(&mut self, j: usize, i: usize, s: LinkStrategy) {
        assert_ne!(i, j, "direct links carry no strategy");
        self.links[j][i] = Some(s);
    }

    /// Sets M_j^s.
    pub fn set_rx_sub(&mut self, j: usize, value: usize) {
        self.rx_sub[j] = value;
    }

    /// Sets N_i^s.
    pub fn set_tx_sub(&mut self, i: usize, value: usize) {
        self.tx_sub[i] = value;
    }

    /// Transmitters whose link to receiver `j` uses strategy `s`, ascending.
    pub fn omega(&self, j: usize, s: LinkStrategy) -> Vec<usize> {
        (0..self.users()).filter(|&i| self.links[j][i] == Some(s)).collect()
    }

    /// All `(j, i)` pairs using strategy `s`, ordered by `j` then `i`.
    pub fn pairs(&self, s: LinkStrategy) -> Vec<(usize, usize)> {
        (0..self.users()).flat_map(|j| self.omega(j, s).into_iter().map(move |i| (j, i))).collect()
    }

    /// Checks sizes against the network: `1 <= M_j^s <= M_j` and `1 <= N_i^s <= N_i`.
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        if self.users() != cfg.users() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} users, network has {}",
                self.users(),
                cfg.users()
            )));
        }
        for j in 0..self.users() {
            if self.rx_sub[j] == 0 || self.rx_sub[j] > cfg.rx_antennas()[j] {
                return Err(Error::InvalidProfile(format!(
                    "M^s of user {} is {} (antennas {})",
                    j + 1,
                    self.rx_sub[j],
                    cfg.rx_antennas()[j]
                )));
            }
            if self.tx_sub[j] == 0 || self.tx_sub[j] > cfg.tx_antennas()[j] {
                return Err(Error::InvalidProfile(format!(
                    "N^s of user {} is {} (antennas {})",
                    j + 1,
                    self.tx_sub[j],
                    cfg.tx_antennas()[j]
                )));
            }
        }
        Ok(())
    }
}

/// JSON shape of a profile with 1-based index sets per receiver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileWire {
    rx_sub: Vec<usize>,
    tx_sub: Vec<usize>,
    partition: Vec<BTreeMap<LinkStrategy, Vec<usize>>>,
}

impl TryFrom<ProfileWire> for FeedbackProfile {
    type Error = Error;

    fn try_from(w: ProfileWire) -> Result<Self> {
        let k = w.rx_sub.len();
        if w.partition.len() != k {
            return Err(Error::InvalidProfile(format!(
                "partition lists {} receivers for {k} users",
                w.partition.len()
            )));
        }
        let mut links = vec![vec![None; k]; k];
        for (j, sets) in w.partition.iter().enumerate() {
            for (&s, members) in sets {
                for &one_based in members {
                    if one_based == 0 || one_based > k || one_based == j + 1 {
                        return Err(Error::InvalidProfile(format!(
                            "receiver {}: index {one_based} in set {s} is not a cross link",
                            j + 1
                        )));
                    }
                    let slot = &mut links[j][one_based - 1];
                    if slot.is_some() {
                        return Err(Error::InvalidProfile(format!(
                            "receiver {}: transmitter {one_based} appears in two sets",
                            j + 1
                        )));
                    }
                    *slot = Some(s);
                }
            }
            if let Some(i) = (0..k).find(|&i| i != j && links[j][i].is_none()) {
                return Err(Error::InvalidProfile(format!(
                    "receiver {}: transmitter {} is not assigned to any set",
                    j + 1,
                    i + 1
                )));
            }
        }
        FeedbackProfile::new(w.rx_sub, w.tx_sub, links)
    }
}

impl From<FeedbackProfile> for ProfileWire {
    fn from(p: FeedbackProfile) -> Self {
        let partition = (0..p.users())
            .map(|j| {
                LinkStrategy::ALL
                    .iter()
                    .map(|&s| (s, p.omega(j, s).into_iter().map(|i| i + 1).collect()))
                    .collect()
            })
            .collect();
        ProfileWire { rx_sub: p.rx_sub, tx_sub: p.tx_sub, partition }
    }
}

/// Effective dimensions implied by a profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivedProfile {
    /// `M_j^e = M_j^s - sum of N_i^s over absorbed links`.
    pub me: Vec<i64>,
    /// `N_i^e = N_i^s - sum of M_j^e over receivers reporting a null space of link i`.
    pub ne: Vec<i64>,
    /// `d_j^0 = d_j + sum of d_i over unreported links`.
    pub d0: Vec<usize>,
}

/// Computes `M^e`, `N^e` and `d^0`. Values may be negative; feasibility is the caller's concern.
pub fn derive(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<DerivedProfile> {
    profile.validate(cfg)?;
    let k = cfg.users();
    let ms = profile.rx_sub();
    let ns = profile.tx_sub();
    let me: Vec<i64> = (0..k)
        .map(|j| {
            let absorbed: usize = profile.omega(j, LinkStrategy::Absorbed).iter().map(|&i| ns[i]).sum();
            ms[j] as i64 - absorbed as i64
        })
        .collect();
    let mut ne: Vec<i64> = ns.iter().map(|&n| n as i64).collect();
    for (j, i) in profile.pairs(LinkStrategy::NullSpace) {
        ne[i] -= me[j];
    }
    let d0 = (0..k)
        .map(|j| {
            cfg.streams()[j]
                + profile.omega(j, LinkStrategy::NoFeedback).iter().map(|&i| cfg.streams()[i]).sum::<usize>()
        })
        .collect();
    Ok(DerivedProfile { me, ne, d0 })
}

/// Total feedback dimension of a profile.
///
/// Each receiver contributes `M^e (sum of N^s over row-space links - M^e)^+`
/// plus `M^e (N_i^s - M^e)` for every null-space link. The result is
/// non-negative whenever `N^e >= 0` and `M^e >= 0`.
pub fn feedback_dimension(cfg: &NetworkConfig, profile: &FeedbackProfile) -> Result<i64> {
    let der = derive(cfg, profile)?;
    let ns = profile.tx_sub();
    let mut total = 0i64;
    for j in 0..cfg.users() {
        let me = der.me[j];
        let width: i64 = profile.omega(j, LinkStrategy::RowSpace).iter().map(|&i| ns[i] as i64).sum();
        total += me * (width - me).max(0);
        for i in profile.omega(j, LinkStrategy::NullSpace) {
            total += me * (ns[i] as i64 - me);
        }
    }
    Ok(total)
}

/// Dimension of reporting the direction of every full cross-link matrix: `sum (M_j N_i - 1)`.
pub fn full_direction_dimension(cfg: &NetworkConfig) -> usize {
    cfg.cross_links().map(|(j, i)| cfg.rx_antennas()[j] * cfg.tx_antennas()[i] - 1).sum()
}
