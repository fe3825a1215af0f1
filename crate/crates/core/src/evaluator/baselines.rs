//! Reference feedback schemes.

use crate::designer::Gate;
use crate::error::Result;
use crate::netcfg::NetworkConfig;
use crate::profile::{full_direction_dimension, FeedbackProfile};

/// Feedback dimension of reporting every full cross-link direction.
pub fn baseline1_dimension(cfg: &NetworkConfig) -> usize {
    full_direction_dimension(cfg)
}

/// Row-space feedback of every full cross link.
pub fn baseline2_profile(cfg: &NetworkConfig) -> FeedbackProfile {
    FeedbackProfile::truncated_full(cfg)
}

/// Row-space feedback of every cross link on the smallest submatrices that
/// still pass `gate`.
///
/// Starting from [`baseline2_profile`], the largest remaining submatrix size
/// is reduced by one (receivers before transmitters, then lower index) as
/// long as the result passes the gate; a size whose reduction fails, or that
/// has reached its stream count, is frozen. If the starting profile fails
/// the gate it is returned unchanged.
pub fn baseline3_profile(cfg: &NetworkConfig, gate: &Gate<'_>) -> Result<FeedbackProfile> {
    let mut profile = baseline2_profile(cfg);
    if !gate(&profile)?.is_feasible() {
        return Ok(profile);
    }
    let k = cfg.users();
    let d = cfg.streams();
    // Entry `e < k` is receiver `e`, entry `k + i` transmitter `i`.
    let mut frozen = vec![false; 2 * k];
    loop {
        let size = |p: &FeedbackProfile, e: usize| if e < k { p.rx_sub()[e] } else { p.tx_sub()[e - k] };
        let next = (0..2 * k)
            .filter(|&e| !frozen[e] && size(&profile, e) > d[e % k])
            .max_by_key(|&e| (size(&profile, e), std::cmp::Reverse(e)));
        let Some(e) = next else { break };
        let mut trial = profile.clone();
        if e < k {
            trial.set_rx_sub(e, size(&profile, e) - 1);
        } else {
            trial.set_tx_sub(e - k, size(&profile, e) - 1);
        }
        if trial.validate(cfg).is_ok() && gate(&trial)?.is_feasible() {
            profile = trial;
        } else {
            frozen[e] = true;
        }
    }
    Ok(profile)
}
