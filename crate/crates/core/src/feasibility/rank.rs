//! Generic rank test.
//!
//! Writing `U_j^b = [I; U~_j]` and `V_i^a = [I; V~_i]`, each alignment
//! equation becomes `G1 + U~^H G2 + G3 V~ + U~^H G4 V~ = 0` with
//! `G_ji = [G1 G3; G2 G4]` split around its top-left `d_j^0 x d_i` block.
//! If the linear parts of all equations have independent rows, the system
//! is solvable for almost every channel. Independence is decided by padding
//! the stacked rows with random rows to a square matrix and testing its
//! smallest singular value.
//!
//! Reconstructed channels may carry structural zeros (a row-space report of
//! rank below `M_j^e` is padded with zero rows), which would place the
//! linearization point off the generic set. Each receiver and transmitter
//! basis is therefore mixed by a random invertible matrix first; this
//! changes variables without changing solvability.

use crate::error::Result;
use crate::matproc::{det_nonzero, CMatrix};
use crate::netcfg::{ChannelRealization, NetworkConfig};
use crate::profile::{derive, evaluate_feedback, FeedbackProfile, LinkStrategy};
use crate::seeding::{complex_gaussian, gaussian_matrix, substream, TAG_AUGMENT};

use super::counting::{necessary_check, variable_counts};
use super::{FeasibilityReport, Method, Verdict};

/// Rank test with identity receiver transforms.
pub fn rank_test(cfg: &NetworkConfig, profile: &FeedbackProfile, h: &ChannelRealization, tol: f64) -> Result<FeasibilityReport> {
    rank_test_with_transform(cfg, profile, h, tol, None)
}

/// Rank test with optional receiver transforms `R_j` applied to the effective channels.
pub fn rank_test_with_transform(
    cfg: &NetworkConfig,
    profile: &FeedbackProfile,
    h: &ChannelRealization,
    tol: f64,
    transforms: Option<&[CMatrix]>,
) -> Result<FeasibilityReport> {
    let nec = necessary_check(cfg, profile)?;
    if nec.verdict == Verdict::Infeasible {
        return Ok(nec.with_method(Method::RankTest));
    }
    let der = derive(cfg, profile)?;
    let counts = variable_counts(cfg, &der);
    let k = cfg.users();
    let pairs = profile.pairs(LinkStrategy::RowSpace);
    let m_bar: usize = counts.u.iter().chain(&counts.v).map(|&x| x as usize).sum();
    let rows: usize = pairs.iter().map(|&(j, i)| der.d0[j] * cfg.streams()[i]).sum();
    if rows > m_bar {
        return Ok(FeasibilityReport::infeasible(
            Method::RankTest,
            format!("row-count: {rows} constraint rows exceed {m_bar} free variables"),
        ));
    }
    if pairs.is_empty() {
        return Ok(FeasibilityReport::feasible(Method::RankTest));
    }

    let fed = evaluate_feedback(cfg, profile, h, transforms)?;
    let mut u_off = vec![0usize; k];
    let mut v_off = vec![0usize; k];
    let mut acc = 0;
    for j in 0..k {
        u_off[j] = acc;
        acc += counts.u[j] as usize;
    }
    for i in 0..k {
        v_off[i] = acc;
        acc += counts.v[i] as usize;
    }
    let rx_mix: Vec<CMatrix> =
        (0..k).map(|j| gaussian_matrix(der.me[j] as usize, der.me[j] as usize, &mut substream(h.seed(), TAG_AUGMENT, 1, j as u64))).collect();
    let tx_mix: Vec<CMatrix> =
        (0..k).map(|i| gaussian_matrix(der.ne[i] as usize, der.ne[i] as usize, &mut substream(h.seed(), TAG_AUGMENT, 2, i as u64))).collect();

    let mut x = CMatrix::zeros(m_bar, m_bar);
    let mut row = 0;
    for &(j, i) in &pairs {
        let d0 = der.d0[j];
        let di = cfg.streams()[i];
        let g = &rx_mix[j] * &fed.view.g[&(j, i)] * &tx_mix[i];
        let block = linear_rows(&g, d0, di);
        let split = counts.u[j] as usize;
        x.view_mut((row, u_off[j]), (block.nrows(), split)).copy_from(&block.columns(0, split));
        x.view_mut((row, v_off[i]), (block.nrows(), block.ncols() - split))
            .copy_from(&block.columns(split, block.ncols() - split));
        row += d0 * di;
    }
    let mut rng = substream(h.seed(), TAG_AUGMENT, 0, 0);
    for r in row..m_bar {
        for c in 0..m_bar {
            x[(r, c)] = complex_gaussian(&mut rng);
        }
    }
    if det_nonzero(&x, tol)? {
        Ok(FeasibilityReport::feasible(Method::RankTest))
    } else {
        Ok(FeasibilityReport::infeasible(
            Method::RankTest,
            format!("rank-deficient: the {row} linearized constraint rows are dependent"),
        ))
    }
}

/// Linear part of one alignment equation: `[G2^T kron I_d0 | I_di kron G3]`,
/// acting on `[vec(U~^H); vec(V~)]` with column-major `vec`.
pub(crate) fn linear_rows(g: &CMatrix, d0: usize, di: usize) -> CMatrix {
    let mu = g.nrows() - d0;
    let nu = g.ncols() - di;
    let g2 = g.view((d0, 0), (mu, di)).into_owned();
    let g3 = g.view((0, di), (d0, nu)).into_owned();
    let left = g2.transpose().kronecker(&CMatrix::identity(d0, d0));
    let right = CMatrix::identity(di, di).kronecker(&g3);
    let mut out = CMatrix::zeros(d0 * di, left.ncols() + right.ncols());
    out.columns_mut(0, left.ncols()).copy_from(&left);
    out.columns_mut(left.ncols(), right.ncols()).copy_from(&right);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one;
    use crate::netcfg::generate_channels;

    fn all_row_space(k: usize, m: usize, n: usize, d: usize) -> (NetworkConfig, FeedbackProfile) {
        let cfg = NetworkConfig::symmetric(k, m, n, d).unwrap();
        (cfg.clone(), FeedbackProfile::truncated_full(&cfg))
    }

    #[test]
    fn landmark_instances() {
        let (cfg, p) = all_row_space(3, 2, 2, 1);
        assert_eq!(rank_test(&cfg, &p, &generate_channels(&cfg, 1), 1e-9).unwrap().verdict, Verdict::Feasible);
        let (cfg, p) = all_row_space(4, 2, 2, 1);
        let r = rank_test(&cfg, &p, &generate_channels(&cfg, 1), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(r.failed_condition.unwrap().starts_with("row-count"));
    }

    #[test]
    fn empty_row_space_is_vacuous() {
        let (cfg, p) = example_one();
        assert_eq!(rank_test(&cfg, &p, &generate_channels(&cfg, 2), 1e-9).unwrap().verdict, Verdict::Feasible);
    }

    #[test]
    fn linear_rows_match_the_equation() {
        let g = crate::seeding::gaussian_matrix(5, 6, &mut substream(1, 99, 0, 0));
        let (d0, di) = (2, 2);
        let uh = crate::seeding::gaussian_matrix(d0, 3, &mut substream(1, 99, 1, 0));
        let vt = crate::seeding::gaussian_matrix(4, di, &mut substream(1, 99, 2, 0));
        let g2 = g.view((d0, 0), (3, di));
        let g3 = g.view((0, di), (d0, 4));
        let linear = &uh * g2 + g3 * &vt;
        let mut z = CMatrix::zeros(uh.len() + vt.len(), 1);
        z.rows_mut(0, uh.len()).copy_from_slice(uh.as_slice());
        z.rows_mut(uh.len(), vt.len()).copy_from_slice(vt.as_slice());
        let by_rows = linear_rows(&g, d0, di) * z;
        let expected = CMatrix::from_column_slice(linear.len(), 1, linear.as_slice());
        assert!((by_rows - expected).camax() < 1e-12);
    }
}
