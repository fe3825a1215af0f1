//! Closed-form profiles for symmetric networks with `N = K M / 2`.

use crate::error::{Error, Result};
use crate::netcfg::NetworkConfig;
use crate::profile::{FeedbackProfile, LinkStrategy};

/// A closed-form design together with its network.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricDesign {
    /// The symmetric network `(K, M, N = K M / 2, d)`.
    pub cfg: NetworkConfig,
    /// The profile.
    pub profile: FeedbackProfile,
    /// Its feedback dimension.
    pub dimension: i64,
}

/// Checks the parameter domain: `2 | M`, `M <= 2K + 1`, `d | M`, `d < M`, `K >= 2`.
fn check_domain(k: usize, m: usize, d: usize) -> Result<()> {
    let ok = k >= 2 && m >= 2 && m % 2 == 0 && m <= 2 * k + 1 && d >= 1 && m % d == 0 && d < m;
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedCase(format!(
            "closed form needs K >= 2, even M <= 2K+1 and d a proper divisor of M (got K={k}, M={m}, d={d})"
        )))
    }
}

/// Closed-form feedback dimension: `0` when `d <= M/K`, otherwise
/// `((K+1) d^2 - M d) (K-1)^2`.
pub fn symmetric_dimension(k: usize, m: usize, d: usize) -> Result<i64> {
    check_domain(k, m, d)?;
    if d * k <= m {
        return Ok(0);
    }
    let (k, m, d) = (k as i64, m as i64, d as i64);
    Ok(((k + 1) * d * d - m * d) * (k - 1) * (k - 1))
}

/// Builds the closed-form profile.
///
/// With `d <= M/K` every cross link is left unreported and `N^s = d`.
/// Otherwise `kappa = K - M/d`; users `1..=kappa+1` keep `M^s = M` with
/// `N^s = K d`, the rest use `M^s = M - d` with `N^s = d`. Every receiver
/// absorbs the small transmitters and reports null spaces of the large ones.
pub fn symmetric_profile(k: usize, m: usize, d: usize) -> Result<SymmetricDesign> {
    check_domain(k, m, d)?;
    let cfg = NetworkConfig::symmetric(k, m, k * m / 2, d)?;
    let profile = if d * k <= m {
        FeedbackProfile::uniform(vec![m; k], vec![d; k], LinkStrategy::NoFeedback)?
    } else {
        let large = k - m / d + 1;
        let rx = (0..k).map(|i| if i < large { m } else { m - d }).collect();
        let tx = (0..k).map(|i| if i < large { k * d } else { d }).collect();
        let links = (0..k)
            .map(|j| {
                (0..k)
                    .map(|i| {
                        (i != j).then_some(if i < large { LinkStrategy::NullSpace } else { LinkStrategy::Absorbed })
                    })
                    .collect()
            })
            .collect();
        FeedbackProfile::new(rx, tx, links)?
    };
    Ok(SymmetricDesign { cfg, profile, dimension: symmetric_dimension(k, m, d)? })
}

/// Every `(K, M, d)` with `K` in `ks` inside the closed form's domain.
pub fn symmetric_family(ks: &[usize]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &k in ks {
        for m in (2..=2 * k + 1).step_by(2) {
            for d in (1..m).filter(|d| m % d == 0) {
                out.push((k, m, d));
            }
        }
    }
    out
}
