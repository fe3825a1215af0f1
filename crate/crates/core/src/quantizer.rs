//! Limited feedback: every reported subspace is replaced by its nearest
//! neighbour in a random Grassmannian codebook.
//!
//! Codebook entries are drawn one after another from a substream keyed by
//! the subspace index, so the codebook for `b` bits is a prefix of the one
//! for `b + 1` bits. Codebooks beyond [`QuantizerOptions::max_search_bits`]
//! are too large to search; their quantization error is drawn from the
//! distribution of the nearest-neighbour distance of a random codebook of
//! that size, and the subspace is moved that far along a random geodesic.

use nalgebra::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::matproc::{chordal_distance, orthonormalize, CMatrix, SubspaceBasis};
use crate::profile::{FedCSI, FedSubspace};
use crate::seeding::{gaussian_matrix, substream, TAG_CODEBOOK, TAG_CODEBOOK_MODEL};

/// Splits `total_bits` across subspaces in proportion to their manifold
/// dimensions with largest-remainder rounding (ties go to the lower index).
/// Zero-dimensional subspaces get no bits.
pub fn allocate_bits(dims: &[usize], total_bits: u32) -> Result<Vec<u32>> {
    let positive = dims.iter().filter(|&&d| d > 0).count();
    if (total_bits as usize) < positive {
        return Err(Error::InvalidInput(format!(
            "{total_bits} bits cannot cover {positive} subspaces of positive dimension"
        )));
    }
    let sum: u128 = dims.iter().map(|&d| d as u128).sum();
    if sum == 0 {
        return Ok(vec![0; dims.len()]);
    }
    let total = total_bits as u128;
    let mut bits: Vec<u32> = dims.iter().map(|&d| (total * d as u128 / sum) as u32).collect();
    let mut order: Vec<usize> = (0..dims.len()).collect();
    order.sort_by_key(|&k| (std::cmp::Reverse(total * dims[k] as u128 % sum), k));
    let leftover = total_bits - bits.iter().sum::<u32>();
    for &k in order.iter().take(leftover as usize) {
        bits[k] += 1;
    }
    Ok(bits)
}

/// A random codebook on G(A, B).
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    /// Subspace dimension A.
    pub rank: usize,
    /// Ambient dimension B.
    pub ambient: usize,
    /// Entries; `2^bits` of them.
    pub entries: Vec<SubspaceBasis>,
    /// Seed the entries were drawn from.
    pub seed: u64,
}

impl Codebook {
    /// Draws `2^bits` isotropic entries from the substream of subspace `id`.
    pub fn random(rank: usize, ambient: usize, bits: u32, seed: u64, id: u64) -> Result<Self> {
        if rank > ambient {
            return Err(Error::InvalidInput(format!("G({rank},{ambient}) is empty")));
        }
        if bits >= usize::BITS {
            return Err(Error::UnsupportedSize(format!("{bits}-bit codebook cannot be stored")));
        }
        let mut rng = substream(seed, TAG_CODEBOOK, id, 0);
        let entries = (0..1usize << bits)
            .map(|_| SubspaceBasis::from_orthonormal(orthonormalize(&gaussian_matrix(ambient, rank, &mut rng))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rank, ambient, entries, seed })
    }

    /// Index of the entry closest to `target`, ranking by `A - ||S^H Y||_F^2`.
    pub fn nearest(&self, target: &SubspaceBasis) -> Result<usize> {
        if target.rank() != self.rank || target.ambient_dim() != self.ambient {
            return Err(Error::InvalidInput("target lies on a different Grassmannian".into()));
        }
        let mut best = (f64::INFINITY, 0);
        for (k, e) in self.entries.iter().enumerate() {
            let score = self.rank as f64 - (target.basis().adjoint() * e.basis()).norm_squared();
            if score < best.0 {
                best = (score, k);
            }
        }
        Ok(best.1)
    }
}

/// Quantizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantizerOptions {
    /// Largest per-subspace bit count searched with an explicit codebook.
    pub max_search_bits: u32,
    /// Test hook: place the true subspace at entry 0 of every codebook.
    pub oracle: bool,
}

impl Default for QuantizerOptions {
    fn default() -> Self {
        Self { max_search_bits: 10, oracle: false }
    }
}

/// Feedback after quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedFedCSI {
    /// Feedback with every subspace replaced and the transmitter view rebuilt.
    pub fed: FedCSI,
    /// Bits spent on each subspace.
    pub bits: Vec<u32>,
    /// Chordal distance between each true and quantized subspace.
    pub distortion: Vec<f64>,
}

/// Log of the constant `c` in `P(d_c^2 <= x) ~ c x^D` for one random point
/// and a fixed point of G(A, B), `D = A (B - A)`.
pub fn ball_log_constant(rank: usize, ambient: usize) -> f64 {
    let dim = (rank * (ambient - rank)) as f64;
    let mut log_c = -ln_gamma(dim + 1.0);
    for i in 1..=rank {
        log_c += ln_gamma((ambient - i + 1) as f64) - ln_gamma((rank - i + 1) as f64);
    }
    log_c
}

/// Squared chordal distance to the nearest of `2^bits` random entries,
/// drawn by inverting `1 - (1 - c x^D)^(2^bits)` at `u`.
pub fn model_squared_distortion(rank: usize, ambient: usize, bits: u32, u: f64) -> f64 {
    let dim = rank * (ambient - rank);
    if dim == 0 {
        return 0.0;
    }
    let y = (-u).ln_1p() * (-(bits as f64)).exp2();
    let p = -y.exp_m1();
    if p <= 0.0 {
        return 0.0;
    }
    let x = ((p.ln() - ball_log_constant(rank, ambient)) / dim as f64).exp();
    x.min(rank.min(ambient - rank) as f64)
}

/// Moves `s` along a random geodesic until its squared chordal distance to
/// `s` reaches `target` (or the farthest point of the geodesic).
fn perturb_along_geodesic<R: Rng + ?Sized>(s: &SubspaceBasis, target: f64, rng: &mut R) -> Result<SubspaceBasis> {
    let (b, a) = (s.ambient_dim(), s.rank());
    if target <= 0.0 || a == 0 || a == b {
        return Ok(s.clone());
    }
    let basis = s.basis();
    let z = gaussian_matrix(b, a, rng);
    let tangent = &z - basis * (basis.adjoint() * &z);
    let svd = tangent.svd(true, true);
    let w = svd.u.expect("requested");
    let y = svd.v_t.expect("requested").adjoint();
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(s.clone());
    }
    let rates: Vec<f64> = sigma.iter().map(|x| x / top).collect();
    let dist2 = |t: f64| rates.iter().map(|r| (r * t).sin().powi(2)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    if dist2(hi) > target {
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if dist2(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let t = hi;
    let cos = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        rates.len(),
        rates.iter().map(|r| Complex::new((r * t).cos(), 0.0)),
    ));
    let sin = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        rates.len(),
        rates.iter().map(|r| Complex::new((r * t).sin(), 0.0)),
    ));
    let moved = basis * &y * cos * y.adjoint() + w * sin * y.adjoint();
    SubspaceBasis::from_orthonormal(orthonormalize(&moved))
}

/// Quantizes one subspace with `bits` bits. `id` selects its codebook stream.
pub fn quantize_subspace(
    s: &SubspaceBasis,
    bits: u32,
    seed: u64,
    id: u64,
    opts: &QuantizerOptions,
) -> Result<SubspaceBasis> {
    if opts.oracle {
        return Ok(s.clone());
    }
    if s.manifold_dim() == 0 {
        return Ok(s.clone());
    }
    if bits <= opts.max_search_bits {
        let book = Codebook::random(s.rank(), s.ambient_dim(), bits, seed, id)?;
        let k = book.nearest(s)?;
        return Ok(book.entries[k].clone());
    }
    let mut rng = substream(seed, TAG_CODEBOOK_MODEL, id, 0);
    let u: f64 = rng.random();
    let x = model_squared_distortion(s.rank(), s.ambient_dim(), bits, u);
    perturb_along_geodesic(s, x, &mut rng)
}

/// Quantizes every reported subspace of `fed` with the bits in `allocation`
/// and rebuilds the transmitter view from the quantized subspaces.
pub fn quantize(fed: &FedCSI, allocation: &[u32], seed: u64, opts: &QuantizerOptions) -> Result<QuantizedFedCSI> {
    if allocation.len() != fed.subspaces.len() {
        return Err(Error::InvalidInput(format!(
            "allocation has {} entries for {} subspaces",
            allocation.len(),
            fed.subspaces.len()
        )));
    }
    let mut replaced = Vec::with_capacity(fed.subspaces.len());
    let mut distortion = Vec::with_capacity(fed.subspaces.len());
    for (id, (sub, &bits)) in fed.subspaces.iter().zip(allocation).enumerate() {
        let q = quantize_subspace(&sub.subspace, bits, seed, id as u64, opts)?;
        distortion.push(chordal_distance(&sub.subspace, &q)?);
        replaced.push(FedSubspace { rx: sub.rx, kind: sub.kind.clone(), subspace: q });
    }
    Ok(QuantizedFedCSI { fed: fed.with_subspaces(replaced)?, bits: allocation.to_vec(), distortion })
}
