//! Evaluation of the feedback functions: from channels and a profile to the
//! subspaces each receiver reports, and from reported subspaces to the
//! effective channels the transmitters work with.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matproc::{column_space, hstack, left_null_space, null_space, vstack, CMatrix, SubspaceBasis, DEFAULT_RANK_TOL};
use crate::netcfg::{ChannelRealization, NetworkConfig};
use crate::seeding::{gaussian_matrix, substream, TAG_TRANSFORM};

use super::{derive, DerivedProfile, FeedbackProfile, LinkStrategy};

/// What a reported subspace describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FedKind {
    /// Row space of `S_j^r^H H_ji^s`; the transmitter precodes in its orthogonal complement.
    NullSpace { tx: usize },
    /// Row space of the concatenation `S_j^r^H [H_ji^s]` over the listed transmitters (ascending).
    RowSpace { txs: Vec<usize> },
    /// Direction of the whole `rows x cols` matrix `H_ji`, vectorized column-major.
    Direction { tx: usize, rows: usize, cols: usize },
}

/// One reported subspace, a point of G(A, B).
///
/// Row spaces are stored as column spans of the conjugate transpose, so a
/// `k x B` matrix with row space `R` is represented by a `B x A` orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FedSubspace {
    /// Reporting receiver.
    pub rx: usize,
    /// Meaning of the subspace.
    pub kind: FedKind,
    /// Orthonormal basis.
    pub subspace: SubspaceBasis,
}

impl FedSubspace {
    /// Grassmannian parameters `(A, B)`.
    pub fn params(&self) -> (usize, usize) {
        (self.subspace.rank(), self.subspace.ambient_dim())
    }

    /// Manifold dimension `A (B - A)`.
    pub fn manifold_dim(&self) -> usize {
        self.subspace.manifold_dim()
    }
}

/// The quantities a transmitter may use: its precoding subspace `S_i^t` and
/// the effective channels `G_ji` of row-space links.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitterView {
    /// `N_i^s x N_i^e` orthonormal bases, one per transmitter.
    pub s_t: Vec<CMatrix>,
    /// `M_j^e x N_i^e` effective channels keyed by `(j, i)`.
    pub g: BTreeMap<(usize, usize), CMatrix>,
}

/// Everything produced by the feedback stage for one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct FedCSI {
    /// The profile that produced this feedback.
    pub profile: FeedbackProfile,
    /// Its derived dimensions.
    pub derived: DerivedProfile,
    /// Stream counts d_i.
    pub streams: Vec<usize>,
    /// Receiver-side bases `S_j^r` (`M_j^s x M_j^e`); never shown to transmitters.
    pub s_r: Vec<CMatrix>,
    /// Reported subspaces in a fixed order (receiver, then null-space links, then the row-space report).
    pub subspaces: Vec<FedSubspace>,
    /// Transmitter-side reconstruction from `subspaces`.
    pub view: TransmitterView,
    transforms: Option<Vec<CMatrix>>,
}

impl FedCSI {
    /// Manifold dimension of every reported subspace, in order.
    pub fn subspace_dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(FedSubspace::manifold_dim).collect()
    }

    /// Total feedback dimension, the sum of all manifold dimensions.
    pub fn total_dimension(&self) -> usize {
        self.subspace_dims().iter().sum()
    }

    /// Same feedback with the reported subspaces replaced (e.g. by quantized ones);
    /// the transmitter view is rebuilt from the new subspaces.
    pub fn with_subspaces(&self, subspaces: Vec<FedSubspace>) -> Result<FedCSI> {
        if subspaces.len() != self.subspaces.len()
            || subspaces.iter().zip(&self.subspaces).any(|(a, b)| a.rx != b.rx || a.kind != b.kind || a.params() != b.params())
        {
            return Err(Error::InvalidInput("replacement subspaces do not match the originals".into()));
        }
        let view = transmitter_view(&self.profile, &self.derived, &subspaces, self.transforms.as_deref())?;
        Ok(FedCSI { subspaces, view, ..self.clone() })
    }
}

fn submatrix(h: &ChannelRealization, j: usize, i: usize, rows: usize, cols: usize) -> CMatrix {
    h.link(j, i).view((0, 0), (rows, cols)).into_owned()
}

/// Random receiver transforms `R_j` (square, size `M_j^e`, invertible almost surely).
pub fn random_transforms(derived: &DerivedProfile, seed: u64) -> Vec<CMatrix> {
    derived
        .me
        .iter()
        .enumerate()
        .map(|(j, &me)| {
            let n = me.max(0) as usize;
            gaussian_matrix(n, n, &mut substream(seed, TAG_TRANSFORM, j as u64, 0))
        })
        .collect()
}

/// Computes the reported subspaces and the transmitter view for one channel draw.
///
/// `H_ji^s` is the top-left `M_j^s x N_i^s` block of `H_ji`. `S_j^r` spans the
/// left null space of the absorbed links, `S_i^t` the common null space of
/// all null-space reports about transmitter `i`. The effective channel of a
/// row-space link is rebuilt from the reported row space only, see
/// [`transmitter_view`]. `transforms` optionally applies invertible `R_j`.
pub fn evaluate_feedback(
    cfg: &NetworkConfig,
    profile: &FeedbackProfile,
    h: &ChannelRealization,
    transforms: Option<&[CMatrix]>,
) -> Result<FedCSI> {
    let der = derive(cfg, profile)?;
    if der.me.iter().any(|&x| x < 0) || der.ne.iter().any(|&x| x < 0) {
        return Err(Error::InvalidProfile(format!(
            "feedback needs non-negative effective sizes (M^e = {:?}, N^e = {:?})",
            der.me, der.ne
        )));
    }
    if h.users() != cfg.users() {
        return Err(Error::InvalidInput("channel realization does not match the network".into()));
    }
    let k = cfg.users();
    let ms = profile.rx_sub();
    let ns = profile.tx_sub();

    let mut s_r = Vec::with_capacity(k);
    for j in 0..k {
        let absorbed = profile.omega(j, LinkStrategy::Absorbed);
        let basis = if absorbed.is_empty() {
            CMatrix::identity(ms[j], ms[j])
        } else {
            let blocks: Vec<CMatrix> = absorbed.iter().map(|&i| submatrix(h, j, i, ms[j], ns[i])).collect();
            let refs: Vec<&CMatrix> = blocks.iter().collect();
            let ln = left_null_space(&hstack(&refs, ms[j])?, DEFAULT_RANK_TOL)?;
            if ln.rank() as i64 != der.me[j] {
                return Err(Error::DegenerateChannel(format!(
                    "receiver {}: left null space has dimension {}, expected {}",
                    j + 1,
                    ln.rank(),
                    der.me[j]
                )));
            }
            ln.into_basis()
        };
        s_r.push(basis);
    }

    let mut subspaces = Vec::new();
    for j in 0..k {
        let me = der.me[j] as usize;
        let project = |i: usize| s_r[j].adjoint() * submatrix(h, j, i, ms[j], ns[i]);
        for i in profile.omega(j, LinkStrategy::NullSpace) {
            let rows = column_space(&project(i).adjoint(), DEFAULT_RANK_TOL)?;
            if rows.rank() != me {
                return Err(Error::DegenerateChannel(format!(
                    "link ({}, {}): projected channel has rank {}, expected {me}",
                    j + 1,
                    i + 1,
                    rows.rank()
                )));
            }
            subspaces.push(FedSubspace { rx: j, kind: FedKind::NullSpace { tx: i }, subspace: rows });
        }
        let txs = profile.omega(j, LinkStrategy::RowSpace);
        if !txs.is_empty() {
            let blocks: Vec<CMatrix> = txs.iter().map(|&i| project(i)).collect();
            let refs: Vec<&CMatrix> = blocks.iter().collect();
            let cat = hstack(&refs, me)?;
            let expected = me.min(cat.ncols());
            let rows = column_space(&cat.adjoint(), DEFAULT_RANK_TOL)?;
            if rows.rank() != expected {
                return Err(Error::DegenerateChannel(format!(
                    "receiver {}: concatenated channel has rank {}, expected {expected}",
                    j + 1,
                    rows.rank()
                )));
            }
            subspaces.push(FedSubspace { rx: j, kind: FedKind::RowSpace { txs }, subspace: rows });
        }
    }

    let view = transmitter_view(profile, &der, &subspaces, transforms)?;
    Ok(FedCSI {
        profile: profile.clone(),
        derived: der,
        streams: cfg.streams().to_vec(),
        s_r,
        subspaces,
        view,
        transforms: transforms.map(<[CMatrix]>::to_vec),
    })
}

/// Reports the direction of every full cross-link matrix, with the all-row-space
/// profile on full submatrices. This is the conventional full-CSI-direction scheme.
pub fn full_direction_feedback(cfg: &NetworkConfig, h: &ChannelRealization) -> Result<FedCSI> {
    let profile = FeedbackProfile::truncated_full(cfg);
    let der = derive(cfg, &profile)?;
    let mut subspaces = Vec::new();
    for (j, i) in cfg.cross_links() {
        let hji = h.link(j, i);
        let norm = hji.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateChannel(format!("link ({}, {}) is identically zero", j + 1, i + 1)));
        }
        let v = CMatrix::from_column_slice(hji.len(), 1, hji.as_slice()) / num_complex::Complex64::new(norm, 0.0);
        subspaces.push(FedSubspace {
            rx: j,
            kind: FedKind::Direction { tx: i, rows: hji.nrows(), cols: hji.ncols() },
            subspace: SubspaceBasis::new_unchecked(v),
        });
    }
    let view = transmitter_view(&profile, &der, &subspaces, None)?;
    Ok(FedCSI {
        profile,
        derived: der,
        streams: cfg.streams().to_vec(),
        s_r: cfg.rx_antennas().iter().map(|&m| CMatrix::identity(m, m)).collect(),
        subspaces,
        view,
        transforms: None,
    })
}

/// Rebuilds `S_i^t` and `G_ji` from reported subspaces alone.
///
/// `S_i^t` is the orthogonal complement of all null-space reports about
/// transmitter `i`. For a row-space report with basis `Q` at receiver `j`,
/// the transmitters take `[Q^H; 0]` (zero-padded to `M_j^e` rows) as the
/// concatenated channel, i.e. the true one up to an invertible receiver-side
/// transform, and slice it per transmitter. `transforms` multiplies each
/// receiver's block by `R_j` on the left.
pub fn transmitter_view(
    profile: &FeedbackProfile,
    derived: &DerivedProfile,
    subspaces: &[FedSubspace],
    transforms: Option<&[CMatrix]>,
) -> Result<TransmitterView> {
    let k = profile.users();
    let ns = profile.tx_sub();
    let me = |j: usize| derived.me[j].max(0) as usize;
    if let Some(r) = transforms {
        if r.len() != k || (0..k).any(|j| r[j].shape() != (me(j), me(j))) {
            return Err(Error::InvalidInput("receiver transforms must be M^e x M^e per receiver".into()));
        }
    }

    let mut s_t = Vec::with_capacity(k);
    for i in 0..k {
        let reports: Vec<CMatrix> = subspaces
            .iter()
            .filter(|s| s.kind == FedKind::NullSpace { tx: i })
            .map(|s| s.subspace.basis().adjoint())
            .collect();
        let basis = if reports.is_empty() {
            CMatrix::identity(ns[i], ns[i])
        } else {
            let refs: Vec<&CMatrix> = reports.iter().collect();
            let nsp = null_space(&vstack(&refs, ns[i])?, DEFAULT_RANK_TOL)?;
            if nsp.rank() as i64 != derived.ne[i] {
                return Err(Error::DegenerateChannel(format!(
                    "transmitter {}: precoding subspace has dimension {}, expected {}",
                    i + 1,
                    nsp.rank(),
                    derived.ne[i]
                )));
            }
            nsp.into_basis()
        };
        s_t.push(basis);
    }

    let apply_transform = |j: usize, m: CMatrix| match transforms {
        Some(r) => &r[j] * m,
        None => m,
    };
    let mut g = BTreeMap::new();
    for sub in subspaces {
        let j = sub.rx;
        match &sub.kind {
            FedKind::NullSpace { .. } => {}
            FedKind::RowSpace { txs } => {
                let q = sub.subspace.basis();
                if q.ncols() > me(j) {
                    return Err(Error::InvalidInput(format!(
                        "receiver {}: row-space report of rank {} exceeds M^e = {}",
                        j + 1,
                        q.ncols(),
                        me(j)
                    )));
                }
                let mut tilde = CMatrix::zeros(me(j), q.nrows());
                tilde.view_mut((0, 0), (q.ncols(), q.nrows())).copy_from(&q.adjoint());
                let tilde = apply_transform(j, tilde);
                let mut offset = 0;
                for &i in txs {
                    let block = tilde.columns(offset, ns[i]).into_owned();
                    offset += ns[i];
                    g.insert((j, i), block * &s_t[i]);
                }
                if offset != q.nrows() {
                    return Err(Error::InvalidInput(format!(
                        "receiver {}: row-space report has ambient dimension {}, expected {offset}",
                        j + 1,
                        q.nrows()
                    )));
                }
            }
            FedKind::Direction { tx, rows, cols } => {
                let v = sub.subspace.basis();
                if v.len() != rows * cols || *rows != me(j) || *cols != ns[*tx] {
                    return Err(Error::InvalidInput(format!("direction report for link ({}, {}) has the wrong size", j + 1, tx + 1)));
                }
                let mat = CMatrix::from_column_slice(*rows, *cols, v.as_slice());
                g.insert((j, *tx), apply_transform(j, mat) * &s_t[*tx]);
            }
        }
    }
    Ok(TransmitterView { s_t, g })
}
