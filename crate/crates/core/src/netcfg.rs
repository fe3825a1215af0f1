//! Network configuration and i.i.d. Rayleigh channel generation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matproc::CMatrix;
use crate::seeding::{gaussian_matrix, substream, TAG_CHANNEL};

/// A K-user MIMO interference network: antennas per node and streams per user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawNetworkConfig")]
pub struct NetworkConfig {
    tx_antennas: Vec<usize>,
    rx_antennas: Vec<usize>,
    streams: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetworkConfig {
    tx_antennas: Vec<usize>,
    rx_antennas: Vec<usize>,
    streams: Vec<usize>,
}

impl TryFrom<RawNetworkConfig> for NetworkConfig {
    type Error = Error;

    fn try_from(raw: RawNetworkConfig) -> Result<Self> {
        NetworkConfig::new(raw.tx_antennas, raw.rx_antennas, raw.streams)
    }
}

impl NetworkConfig {
    /// Validates and builds a configuration. Index `i` describes Tx `i`, Rx `i` and user `i`'s streams.
    pub fn new(tx_antennas: Vec<usize>, rx_antennas: Vec<usize>, streams: Vec<usize>) -> Result<Self> {
        let k = streams.len();
        if k == 0 {
            return Err(Error::InvalidInput("network needs at least one user".into()));
        }
        if tx_antennas.len() != k || rx_antennas.len() != k {
            return Err(Error::InvalidInput(format!(
                "list lengths differ: {} tx, {} rx, {} stream entries",
                tx_antennas.len(),
                rx_antennas.len(),
                k
            )));
        }
        for i in 0..k {
            let d = streams[i];
            if d == 0 || tx_antennas[i] < d || rx_antennas[i] < d {
                return Err(Error::InvalidInput(format!(
                    "user {} needs N >= d >= 1 and M >= d (N={}, M={}, d={d})",
                    i + 1,
                    tx_antennas[i],
                    rx_antennas[i]
                )));
            }
        }
        Ok(Self { tx_antennas, rx_antennas, streams })
    }

    /// K users with `m` receive antennas, `n` transmit antennas and `d` streams each.
    pub fn symmetric(k: usize, m: usize, n: usize, d: usize) -> Result<Self> {
        Self::new(vec![n; k], vec![m; k], vec![d; k])
    }

    /// Number of users K.
    pub fn users(&self) -> usize {
        self.streams.len()
    }

    /// Transmit antenna counts N_i.
    pub fn tx_antennas(&self) -> &[usize] {
        &self.tx_antennas
    }

    /// Receive antenna counts M_j.
    pub fn rx_antennas(&self) -> &[usize] {
        &self.rx_antennas
    }

    /// Stream counts d_i.
    pub fn streams(&self) -> &[usize] {
        &self.streams
    }

    /// Total number of streams across users.
    pub fn total_streams(&self) -> usize {
        self.streams.iter().sum()
    }

    /// Ordered cross-link pairs `(rx, tx)` with `rx != tx`.
    pub fn cross_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.users();
        (0..k).flat_map(move |j| (0..k).filter(move |&i| i != j).map(move |i| (j, i)))
    }
}

/// One channel draw: `H[j][i]` maps Tx `i` to Rx `j` and has shape `M_j x N_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    seed: u64,
    users: usize,
    links: Vec<CMatrix>,
}

impl ChannelRealization {
    /// Builds a realization from explicit matrices indexed `[j][i]`.
    pub fn from_matrices(cfg: &NetworkConfig, seed: u64, links: Vec<Vec<CMatrix>>) -> Result<Self> {
        let k = cfg.users();
        if links.len() != k || links.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidInput("channel list must be K x K".into()));
        }
        let mut flat = Vec::with_capacity(k * k);
        for (j, row) in links.into_iter().enumerate() {
            for (i, h) in row.into_iter().enumerate() {
                if h.shape() != (cfg.rx_antennas()[j], cfg.tx_antennas()[i]) {
                    return Err(Error::InvalidInput(format!(
                        "H[{}][{}] has shape {:?}, expected {}x{}",
                        j + 1,
                        i + 1,
                        h.shape(),
                        cfg.rx_antennas()[j],
                        cfg.tx_antennas()[i]
                    )));
                }
                crate::matproc::check_finite(&h, "channel")?;
                flat.push(h);
            }
        }
        Ok(Self { seed, users: k, links: flat })
    }

    /// Seed the realization was generated from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of users.
    pub fn users(&self) -> usize {
        self.users
    }

    /// Channel from Tx `i` to Rx `j` (0-based).
    pub fn link(&self, j: usize, i: usize) -> &CMatrix {
        &self.links[j * self.users + i]
    }
}

/// Draws every `H_ji` with i.i.d. unit-variance circularly-symmetric Gaussian entries.
///
/// Each ordered pair uses its own substream keyed by `(seed, j, i)`.
pub fn generate_channels(cfg: &NetworkConfig, seed: u64) -> ChannelRealization {
    let k = cfg.users();
    let mut links = Vec::with_capacity(k * k);
    for j in 0..k {
        for i in 0..k {
            let mut rng = substream(seed, TAG_CHANNEL, j as u64, i as u64);
            links.push(gaussian_matrix(cfg.rx_antennas()[j], cfg.tx_antennas()[i], &mut rng));
        }
    }
    ChannelRealization { seed, users: k, links }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_shape() {
        let cfg = NetworkConfig::new(vec![2], vec![2], vec![1]).unwrap();
        let h = generate_channels(&cfg, 1);
        assert_eq!(h.link(0, 0).shape(), (2, 2));
    }

    #[test]
    fn shapes_follow_config() {
        let cfg = NetworkConfig::new(vec![5, 4, 4, 3], vec![4, 3, 2, 4], vec![2, 1, 1, 1]).unwrap();
        let h = generate_channels(&cfg, 9);
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(h.link(j, i).shape(), (cfg.rx_antennas()[j], cfg.tx_antennas()[i]));
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = NetworkConfig::symmetric(3, 2, 2, 1).unwrap();
        assert_eq!(generate_channels(&cfg, 5), generate_channels(&cfg, 5));
        assert_ne!(generate_channels(&cfg, 5), generate_channels(&cfg, 6));
    }

    #[test]
    fn adding_users_keeps_existing_links() {
        let small = NetworkConfig::symmetric(2, 2, 3, 1).unwrap();
        let big = NetworkConfig::symmetric(3, 2, 3, 1).unwrap();
        let a = generate_channels(&small, 4);
        let b = generate_channels(&big, 4);
        for j in 0..2 {
            for i in 0..2 {
                assert_eq!(a.link(j, i), b.link(j, i));
            }
        }
    }

    #[test]
    fn entry_statistics() {
        let cfg = NetworkConfig::new(vec![1], vec![1], vec![1]).unwrap();
        let n = 10_000;
        let samples: Vec<_> = (0..n).map(|s| generate_channels(&cfg, s).link(0, 0)[(0, 0)]).collect();
        let mean = samples.iter().sum::<num_complex::Complex64>() / n as f64;
        let var = samples.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
        // Mean of n unit-variance complex samples has standard deviation 1/sqrt(n) per component pair.
        assert!(mean.norm() < 3.0 / (n as f64).sqrt() * 2f64.sqrt());
        let re_var = samples.iter().map(|z| (z.re - mean.re).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((re_var - 0.5).abs() < 0.05);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(NetworkConfig::new(vec![], vec![], vec![]).is_err());
        assert!(NetworkConfig::new(vec![1], vec![2], vec![2]).is_err());
        assert!(NetworkConfig::new(vec![2, 2], vec![2], vec![1, 1]).is_err());
        assert!(NetworkConfig::new(vec![2], vec![2], vec![0]).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = NetworkConfig::new(vec![5, 4, 4, 3], vec![4, 3, 2, 4], vec![2, 1, 1, 1]).unwrap();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: NetworkConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(cfg, back);
        let bad = r#"{"tx_antennas":[1],"rx_antennas":[1],"streams":[2]}"#;
        assert!(serde_json::from_str::<NetworkConfig>(bad).is_err());
    }

    #[test]
    fn cross_link_count() {
        let cfg = NetworkConfig::symmetric(4, 3, 3, 1).unwrap();
        assert_eq!(cfg.cross_links().count(), 12);
    }
}
