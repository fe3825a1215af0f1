//! Reference networks and profiles used by tests, examples and the CLI.

use crate::netcfg::NetworkConfig;
use crate::profile::{FeedbackProfile, LinkStrategy};

/// Four users with unequal antennas: N = [5,4,4,3], M = [4,3,2,4], d = [2,1,1,1].
pub fn network_a() -> NetworkConfig {
    NetworkConfig::new(vec![5, 4, 4, 3], vec![4, 3, 2, 4], vec![2, 1, 1, 1]).expect("valid network")
}

/// Four users with three antennas at every node and one stream each.
pub fn network_b() -> NetworkConfig {
    NetworkConfig::symmetric(4, 3, 3, 1).expect("valid network")
}

/// Three users, M = 4, N = 6, d = 2. Receiver `j` reports the null space of
/// its link from transmitter `j+1` and ignores transmitter `j+2` (cyclically).
pub fn example_one() -> (NetworkConfig, FeedbackProfile) {
    let cfg = NetworkConfig::symmetric(3, 4, 6, 2).expect("valid network");
    let mut links = vec![vec![None; 3]; 3];
    for j in 0..3 {
        links[j][(j + 1) % 3] = Some(LinkStrategy::NullSpace);
        links[j][(j + 2) % 3] = Some(LinkStrategy::NoFeedback);
    }
    let p = FeedbackProfile::new(vec![4; 3], vec![6; 3], links).expect("valid profile");
    (cfg, p)
}

/// Three users, N = [6,6,2], M = [4,4,2], d = 2. Receivers 1 and 2 absorb
/// transmitter 3 and report a null space of each other's link; receiver 3
/// reports null spaces of both links.
pub fn example_two() -> (NetworkConfig, FeedbackProfile) {
    let cfg = NetworkConfig::new(vec![6, 6, 2], vec![4, 4, 2], vec![2, 2, 2]).expect("valid network");
    use LinkStrategy::{Absorbed, NullSpace};
    let links = vec![
        vec![None, Some(NullSpace), Some(Absorbed)],
        vec![Some(NullSpace), None, Some(Absorbed)],
        vec![Some(NullSpace), Some(NullSpace), None],
    ];
    let p = FeedbackProfile::new(vec![4, 4, 2], vec![6, 6, 2], links).expect("valid profile");
    (cfg, p)
}

/// Three users, M = 5, N = 4, d = 2, with every cross link reported by row
/// space on 4 x 4 submatrices.
pub fn example_three() -> (NetworkConfig, FeedbackProfile) {
    let cfg = NetworkConfig::symmetric(3, 5, 4, 2).expect("valid network");
    let p = FeedbackProfile::uniform(vec![4; 3], vec![4; 3], LinkStrategy::RowSpace).expect("valid profile");
    (cfg, p)
}
