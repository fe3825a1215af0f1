//! Sum rate with residual interference treated as noise.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::matproc::{orthonormalize, CMatrix};
use crate::netcfg::{ChannelRealization, NetworkConfig};

fn log2_det_hpd(m: CMatrix, what: &str) -> Result<f64> {
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::InvalidInput(format!("{what} is not positive definite")))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|x| x.re.log2()).sum::<f64>())
}

/// `sum_j log2 det(I + (P/d_j) A_j^H Q_j^{-1} A_j)` with `P = 10^(snr_db/10)`,
/// `A_j = U_j^H H_jj V_j` and
/// `Q_j = I + sum_{i != j} (P/d_i) (U_j^H H_ji V_i)(U_j^H H_ji V_i)^H`.
///
/// Decorrelator columns are orthonormalized and precoder columns scaled to
/// unit norm before use.
pub fn sum_rate(cfg: &NetworkConfig, h: &ChannelRealization, v: &[CMatrix], u: &[CMatrix], snr_db: f64) -> Result<f64> {
    let k = cfg.users();
    if v.len() != k || u.len() != k || h.users() != k {
        return Err(Error::InvalidInput("need one precoder and one decorrelator per user".into()));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidInput(format!("snr_db must be finite, got {snr_db}")));
    }
    let p = 10f64.powf(snr_db / 10.0);
    let v: Vec<CMatrix> = v
        .iter()
        .map(|vi| {
            let mut vi = vi.clone();
            for mut c in vi.column_iter_mut() {
                let n = c.norm();
                if n > 0.0 {
                    c /= Complex::new(n, 0.0);
                }
            }
            vi
        })
        .collect();
    let mut total = 0.0;
    for j in 0..k {
        let uj = orthonormalize(&u[j]);
        let dj = uj.ncols();
        if v[j].ncols() != cfg.streams()[j] || uj.nrows() != cfg.rx_antennas()[j] {
            return Err(Error::InvalidInput(format!("user {} filters have the wrong shape", j + 1)));
        }
        let mut q = CMatrix::identity(dj, dj);
        for i in (0..k).filter(|&i| i != j) {
            let b = uj.adjoint() * h.link(j, i) * &v[i];
            q += (&b * b.adjoint()) * Complex::new(p / cfg.streams()[i] as f64, 0.0);
        }
        let a = uj.adjoint() * h.link(j, j) * &v[j];
        let q_inv = q
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("interference covariance is not positive definite".into()))?
            .inverse();
        let ds = v[j].ncols();
        let s = CMatrix::identity(ds, ds) + (a.adjoint() * q_inv * &a) * Complex::new(p / ds as f64, 0.0);
        // Symmetrize against round-off before the Cholesky factorization.
        let s = (&s + s.adjoint()) * Complex::new(0.5, 0.0);
        total += log2_det_hpd(s, "signal-plus-noise matrix")?;
    }
    Ok(total.max(0.0))
}
