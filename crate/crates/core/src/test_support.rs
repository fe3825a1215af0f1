//! Shared generators for unit and property tests.

use proptest::prelude::*;

use crate::netcfg::NetworkConfig;
use crate::profile::{FeedbackProfile, LinkStrategy};

/// Random networks with up to three users and four antennas per node, paired
/// with an arbitrary profile (which need not be feasible).
pub fn small_profile_strategy() -> impl Strategy<Value = (NetworkConfig, FeedbackProfile)> {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                proptest::collection::vec((1usize..=4, 1usize..=4, 1usize..=4, 0usize..64, 0usize..64), k),
                proptest::collection::vec(0usize..4, k * k),
            )
        })
        .prop_map(|(users, strat)| {
            let k = users.len();
            let n: Vec<usize> = users.iter().map(|u| u.0).collect();
            let m: Vec<usize> = users.iter().map(|u| u.1).collect();
            let d: Vec<usize> = users.iter().map(|u| u.2.min(u.0).min(u.1)).collect();
            let ms: Vec<usize> = users.iter().map(|u| 1 + u.3 % u.1).collect();
            let ns: Vec<usize> = users.iter().map(|u| 1 + u.4 % u.0).collect();
            let links = (0..k)
                .map(|j| (0..k).map(|i| (i != j).then(|| LinkStrategy::ALL[strat[j * k + i]])).collect())
                .collect();
            let cfg = NetworkConfig::new(n, m, d).expect("valid by construction");
            (cfg, FeedbackProfile::new(ms, ns, links).expect("valid by construction"))
        })
}
