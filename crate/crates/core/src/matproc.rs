//! Dense complex linear algebra: null spaces, subspace intersection,
//! Hermitian eigen-subspaces, chordal distance and rank tests.
//!
//! Every routine is a deterministic function of its input; singular values
//! and eigenvalues are sorted explicitly so that tie-breaking never depends
//! on the backend's internal ordering.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

const ORTHONORMAL_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;

/// Orthonormal basis of an `A`-dimensional subspace of `C^B`, i.e. a point of G(A, B).
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: CMatrix,
}

impl SubspaceBasis {
    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        check_finite(&basis, "subspace basis")?;
        let gram = basis.adjoint() * &basis;
        let err = (gram - CMatrix::identity(basis.ncols(), basis.ncols())).camax();
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis columns are not orthonormal (error {err:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Orthonormal basis of the column span of `m`.
    pub fn span_of(m: &CMatrix, tol: f64) -> Result<Self> {
        column_space(m, tol)
    }

    pub(crate) fn new_unchecked(basis: CMatrix) -> Self {
        Self { basis }
    }

    /// The whole space `C^n`.
    pub fn full(n: usize) -> Self {
        Self { basis: CMatrix::identity(n, n) }
    }

    /// The zero subspace of `C^n`.
    pub fn zero(n: usize) -> Self {
        Self { basis: CMatrix::zeros(n, 0) }
    }

    /// Ambient dimension `B`.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Subspace dimension `A`.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Real dimension count `A (B - A)` of the Grassmannian containing this point.
    pub fn manifold_dim(&self) -> usize {
        self.rank() * (self.ambient_dim() - self.rank())
    }

    /// The `B x A` basis matrix.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Consumes the wrapper and returns the basis matrix.
    pub fn into_basis(self) -> CMatrix {
        self.basis
    }
}

/// Fails unless every entry is finite.
pub fn check_finite(a: &CMatrix, what: &str) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Singular values in descending order (length `min(rows, cols)`).
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    check_finite(a, "matrix")?;
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

fn rank_from_sorted(sv: &[f64], tol: f64) -> usize {
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s > tol * smax).count(),
        _ => 0,
    }
}

/// Full set of right singular vectors, columns ordered by descending singular value.
/// The returned value list has one entry per column of `a` (padded with zeros).
fn right_singular(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (m, n) = a.shape();
    let padded;
    let work = if m < n {
        padded = a.clone().insert_rows(m, n - m, Complex64::new(0.0, 0.0));
        &padded
    } else {
        a
    };
    let svd = work.clone().svd(false, true);
    let v = svd.v_t.expect("right singular vectors requested").adjoint();
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending_order(&sv);
    let sorted: Vec<f64> = order.iter().map(|&k| sv[k]).collect();
    let cols: Vec<_> = order.iter().map(|&k| v.column(k).into_owned()).collect();
    (sorted, CMatrix::from_columns(&cols))
}

/// Orthonormal basis of the right null space `{x : A x = 0}`.
pub fn null_space(a: &CMatrix, tol: f64) -> Result<SubspaceBasis> {
    check_finite(a, "matrix")?;
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(SubspaceBasis::zero(0));
    }
    if m == 0 {
        return Ok(SubspaceBasis::full(n));
    }
    let (sv, v) = right_singular(a);
    let rank = rank_from_sorted(&sv, tol);
    Ok(SubspaceBasis::new_unchecked(v.columns(rank, n - rank).into_owned()))
}

/// Orthonormal basis of the left null space `{x : x^H A = 0}`.
pub fn left_null_space(a: &CMatrix, tol: f64) -> Result<SubspaceBasis> {
    null_space(&a.adjoint(), tol)
}

/// Orthonormal basis of the column span of `a`.
pub fn column_space(a: &CMatrix, tol: f64) -> Result<SubspaceBasis> {
    check_finite(a, "matrix")?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(SubspaceBasis::zero(m));
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending_order(&sv);
    let sorted: Vec<f64> = order.iter().map(|&k| sv[k]).collect();
    let rank = rank_from_sorted(&sorted, tol);
    let cols: Vec<_> = order[..rank].iter().map(|&k| u.column(k).into_owned()).collect();
    if cols.is_empty() {
        return Ok(SubspaceBasis::zero(m));
    }
    Ok(SubspaceBasis::new_unchecked(CMatrix::from_columns(&cols)))
}

/// Numerical rank by singular-value thresholding at `tol * max singular value`.
pub fn numerical_rank(a: &CMatrix, tol: f64) -> Result<usize> {
    Ok(rank_from_sorted(&singular_values(a)?, tol))
}

/// True iff the smallest singular value exceeds `tol` times the largest.
pub fn det_nonzero(a: &CMatrix, tol: f64) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "det_nonzero needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let sv = singular_values(a)?;
    match (sv.first(), sv.last()) {
        (Some(&smax), Some(&smin)) => Ok(smax > 0.0 && smin > tol * smax),
        _ => Ok(true),
    }
}

/// Stacks matrices vertically; all inputs must have `cols` columns.
pub fn vstack(blocks: &[&CMatrix], cols: usize) -> Result<CMatrix> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::InvalidInput(format!(
                "vstack column mismatch: {} vs {cols}",
                b.ncols()
            )));
        }
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    Ok(out)
}

/// Stacks matrices horizontally; all inputs must have `rows` rows.
pub fn hstack(blocks: &[&CMatrix], rows: usize) -> Result<CMatrix> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        if b.nrows() != rows {
            return Err(Error::InvalidInput(format!(
                "hstack row mismatch: {} vs {rows}",
                b.nrows()
            )));
        }
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    Ok(out)
}

/// Orthonormal basis of the intersection of subspaces sharing one ambient space.
///
/// Each input contributes the rows of its orthogonal complement as
/// constraints, and the intersection is the null space of the stack.
pub fn intersect_subspaces(list: &[SubspaceBasis], tol: f64) -> Result<SubspaceBasis> {
    let Some(first) = list.first() else {
        return Err(Error::InvalidInput("intersection of an empty list".into()));
    };
    let n = first.ambient_dim();
    let mut constraints = Vec::with_capacity(list.len());
    for s in list {
        if s.ambient_dim() != n {
            return Err(Error::InvalidInput(format!(
                "ambient dimension mismatch: {} vs {n}",
                s.ambient_dim()
            )));
        }
        constraints.push(left_null_space(s.basis(), tol)?.into_basis().adjoint());
    }
    let refs: Vec<&CMatrix> = constraints.iter().collect();
    null_space(&vstack(&refs, n)?, tol)
}

/// Eigenvalues (ascending) and eigenvectors for the `d` smallest eigenvalues of a Hermitian matrix.
pub fn smallest_eigen(h: &CMatrix, d: usize) -> Result<(Vec<f64>, CMatrix)> {
    check_finite(h, "hermitian matrix")?;
    if !h.is_square() {
        return Err(Error::InvalidInput("eigen-decomposition needs a square matrix".into()));
    }
    let n = h.nrows();
    if d > n {
        return Err(Error::InvalidInput(format!("requested {d} eigenvectors of a {n}x{n} matrix")));
    }
    let scale = 1.0 + h.camax();
    let asym = (h - h.adjoint()).camax();
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::InvalidInput(format!("matrix is not hermitian (error {asym:.3e})")));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let chosen = &idx[..d];
    let cols: Vec<_> = chosen.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    let vecs = if cols.is_empty() { CMatrix::zeros(n, 0) } else { CMatrix::from_columns(&cols) };
    Ok((chosen.iter().map(|&k| vals[k]).collect(), vecs))
}

/// Orthonormal eigenvectors for the `d` smallest eigenvalues of a Hermitian matrix.
pub fn smallest_eigvecs(h: &CMatrix, d: usize) -> Result<CMatrix> {
    Ok(smallest_eigen(h, d)?.1)
}

/// Chordal distance `sqrt(A - ||S1^H S2||_F^2)` between two points of G(A, B).
///
/// Evaluated as `||P1 - P2||_F / sqrt(2)` with orthogonal projectors, which is
/// the same quantity without cancellation for nearby subspaces.
pub fn chordal_distance(s1: &SubspaceBasis, s2: &SubspaceBasis) -> Result<f64> {
    if s1.ambient_dim() != s2.ambient_dim() || s1.rank() != s2.rank() {
        return Err(Error::InvalidInput(format!(
            "chordal distance between G({},{}) and G({},{})",
            s1.rank(),
            s1.ambient_dim(),
            s2.rank(),
            s2.ambient_dim()
        )));
    }
    let p1 = s1.basis() * s1.basis().adjoint();
    let p2 = s2.basis() * s2.basis().adjoint();
    let d = (p1 - p2).norm() * std::f64::consts::FRAC_1_SQRT_2;
    Ok(d.min((s1.rank() as f64).sqrt()))
}

/// Orthonormalizes the columns of a full-column-rank matrix (thin QR).
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    m.clone().qr().q()
}

/// Largest column norm of a matrix.
pub fn max_col_norm(m: &CMatrix) -> f64 {
    m.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{gaussian_matrix, substream};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        gaussian_matrix(rows, cols, &mut substream(seed, 1000, rows as u64, cols as u64))
    }

    fn orthonormal_err(b: &CMatrix) -> f64 {
        (b.adjoint() * b - CMatrix::identity(b.ncols(), b.ncols())).camax()
    }

    #[test]
    fn null_space_of_zero_is_everything() {
        let ns = null_space(&CMatrix::zeros(2, 3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ns.rank(), 3);
        assert!(orthonormal_err(ns.basis()) < 1e-12);
    }

    #[test]
    fn null_space_of_generic_wide_matrix() {
        let a = random(4, 6, 1);
        let ns = null_space(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ns.rank(), 2);
        assert!(max_col_norm(&(&a * ns.basis())) < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn null_space_of_projection_is_third_axis() {
        let a = real(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = null_space(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ns.rank(), 1);
        let b = ns.basis();
        assert!(b[(0, 0)].norm() < 1e-12 && b[(1, 0)].norm() < 1e-12);
        assert!((b[(2, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn left_null_space_examples() {
        assert_eq!(left_null_space(&CMatrix::zeros(3, 2), DEFAULT_RANK_TOL).unwrap().rank(), 3);
        assert_eq!(left_null_space(&CMatrix::identity(3, 3), DEFAULT_RANK_TOL).unwrap().rank(), 0);
        let a = random(6, 4, 2);
        let ln = left_null_space(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(ln.rank(), 2);
        let res = ln.basis().adjoint() * &a;
        let max_row = res.row_iter().map(|r| r.norm()).fold(0.0, f64::max);
        assert!(max_row < 1e-8 * (1.0 + a.norm()));
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(null_space(&a, DEFAULT_RANK_TOL), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn intersection_examples() {
        let s = SubspaceBasis::new_unchecked(orthonormalize(&random(6, 4, 3)));
        let same = intersect_subspaces(std::slice::from_ref(&s), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(same.rank(), 4);
        assert!(chordal_distance(&s, &same).unwrap() < 1e-8);

        let t = SubspaceBasis::new_unchecked(orthonormalize(&random(6, 4, 4)));
        let both = intersect_subspaces(&[s.clone(), t.clone()], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(both.rank(), 2);
        for sub in [&s, &t] {
            let proj = sub.basis() * (sub.basis().adjoint() * both.basis());
            assert!(max_col_norm(&(both.basis() - proj)) < 1e-8);
        }

        let e = CMatrix::identity(4, 4);
        let x = SubspaceBasis::new_unchecked(e.columns(0, 2).into_owned());
        let y = SubspaceBasis::new_unchecked(e.columns(2, 2).into_owned());
        assert_eq!(intersect_subspaces(&[x, y], DEFAULT_RANK_TOL).unwrap().rank(), 0);

        let bad = SubspaceBasis::full(3);
        assert!(intersect_subspaces(&[s, bad], DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn smallest_eigvecs_examples() {
        let h = real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let v = smallest_eigvecs(&h, 1).unwrap();
        assert!((v[(1, 0)].norm() - 1.0).abs() < 1e-12);

        let h = real(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let v = smallest_eigvecs(&h, 2).unwrap();
        assert!(v.row(2).norm() < 1e-12);

        let a = random(3, 5, 5);
        let g = a.adjoint() * &a;
        let (vals, v) = smallest_eigen(&g, 2).unwrap();
        assert!(vals.iter().all(|x| x.abs() < 1e-10));
        assert!((&g * &v).norm() < 1e-10);
        assert!(orthonormal_err(&v) < 1e-10);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let h = real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(smallest_eigvecs(&h, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn chordal_distance_examples() {
        let s = SubspaceBasis::new_unchecked(orthonormalize(&random(4, 2, 6)));
        assert_eq!(chordal_distance(&s, &s).unwrap(), 0.0);
        let e = CMatrix::identity(2, 2);
        let x = SubspaceBasis::new_unchecked(e.columns(0, 1).into_owned());
        let y = SubspaceBasis::new_unchecked(e.columns(1, 1).into_owned());
        assert!((chordal_distance(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let p = SubspaceBasis::new_unchecked(orthonormalize(&random(6, 2, 7)));
        let q = SubspaceBasis::new_unchecked(orthonormalize(&random(6, 2, 8)));
        let d = chordal_distance(&p, &q).unwrap();
        assert!(d > 0.0 && d < 2f64.sqrt());
        assert!((d - chordal_distance(&q, &p).unwrap()).abs() < 1e-14);
        let r = SubspaceBasis::new_unchecked(orthonormalize(&random(6, 1, 9)));
        assert!(chordal_distance(&p, &r).is_err());
    }

    #[test]
    fn chordal_distance_matches_overlap_formula() {
        let p = SubspaceBasis::new_unchecked(orthonormalize(&random(7, 3, 10)));
        let q = SubspaceBasis::new_unchecked(orthonormalize(&random(7, 3, 11)));
        let overlap = (p.basis().adjoint() * q.basis()).norm_squared();
        let expected = (3.0 - overlap).sqrt();
        assert!((chordal_distance(&p, &q).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rank_and_determinant_examples() {
        let i3 = CMatrix::identity(3, 3);
        assert_eq!(numerical_rank(&i3, DEFAULT_RANK_TOL).unwrap(), 3);
        assert!(det_nonzero(&i3, DEFAULT_RANK_TOL).unwrap());
        let u = random(4, 1, 12);
        let outer = &u * u.adjoint();
        assert_eq!(numerical_rank(&outer, DEFAULT_RANK_TOL).unwrap(), 1);
        assert!(!det_nonzero(&outer, DEFAULT_RANK_TOL).unwrap());
        assert!(det_nonzero(&random(20, 20, 13), DEFAULT_RANK_TOL).unwrap());
        assert!(det_nonzero(&random(2, 3, 14), DEFAULT_RANK_TOL).is_err());
    }

    #[test]
    fn column_space_spans_range() {
        let a = random(5, 2, 15) * random(2, 4, 16);
        let r = column_space(&a, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.rank(), 2);
        let resid = &a - r.basis() * (r.basis().adjoint() * &a);
        assert!(resid.norm() < 1e-10 * a.norm());
    }

    #[test]
    fn from_orthonormal_checks_columns() {
        assert!(SubspaceBasis::from_orthonormal(CMatrix::identity(3, 2)).is_ok());
        assert!(SubspaceBasis::from_orthonormal(real(2, 1, &[1.0, 1.0])).is_err());
    }

    fn low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> CMatrix {
        random(rows, rank, seed) * random(rank, cols, seed + 1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_nullity(rows in 1usize..7, cols in 1usize..7, r in 0usize..7, seed in 0u64..1000) {
            let rank = r.min(rows).min(cols);
            let a = if rank == 0 { CMatrix::zeros(rows, cols) } else { low_rank(rows, cols, rank, seed) };
            let ns = null_space(&a, DEFAULT_RANK_TOL).unwrap();
            let nr = numerical_rank(&a, DEFAULT_RANK_TOL).unwrap();
            prop_assert_eq!(nr, rank);
            prop_assert_eq!(ns.rank() + nr, cols);
            prop_assert!(orthonormal_err(ns.basis()) < 1e-10);
            prop_assert!(max_col_norm(&(&a * ns.basis())) < 1e-8 * (1.0 + a.norm()));
            let ln = left_null_space(&a, DEFAULT_RANK_TOL).unwrap();
            prop_assert_eq!(ln.rank() + nr, rows);
            prop_assert!(orthonormal_err(ln.basis()) < 1e-10);
        }

        #[test]
        fn eigen_subspace_is_invariant(n in 1usize..7, d in 0usize..7, seed in 0u64..1000) {
            let d = d.min(n);
            let a = random(n, n, seed);
            let h = &a + a.adjoint();
            let (vals, v) = smallest_eigen(&h, d).unwrap();
            let rayleigh = v.adjoint() * &h * &v;
            let resid = &h * &v - &v * &rayleigh;
            prop_assert!(resid.norm() < 1e-8 * (1.0 + h.norm()));
            let all = SymmetricEigen::new(h.clone()).eigenvalues;
            let mut sorted: Vec<f64> = all.iter().copied().collect();
            sorted.sort_by(f64::total_cmp);
            let expected: f64 = sorted[..d].iter().sum();
            let trace: f64 = rayleigh.trace().re;
            prop_assert!((trace - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
            prop_assert!((vals.iter().sum::<f64>() - expected).abs() <= 1e-8 * (1.0 + expected.abs()));
        }

        #[test]
        fn chordal_distance_is_unitarily_invariant(b in 2usize..7, a in 1usize..3, seed in 0u64..1000) {
            let a = a.min(b - 1);
            let p = SubspaceBasis::new_unchecked(orthonormalize(&random(b, a, seed)));
            let q = SubspaceBasis::new_unchecked(orthonormalize(&random(b, a, seed + 7)));
            let w = orthonormalize(&random(a, a, seed + 13));
            let pw = SubspaceBasis::new_unchecked(p.basis() * &w);
            let d0 = chordal_distance(&p, &q).unwrap();
            prop_assert!((d0 - chordal_distance(&q, &p).unwrap()).abs() < 1e-12);
            prop_assert!((d0 - chordal_distance(&pw, &q).unwrap()).abs() < 1e-10);
            prop_assert!(d0 >= 0.0 && d0 <= (a as f64).sqrt() + 1e-12);
        }

        #[test]
        fn intersection_dimension_matches_stacked_rank(n in 2usize..7, a in 1usize..7, b in 1usize..7, seed in 0u64..1000) {
            let a = a.min(n);
            let b = b.min(n);
            let s = SubspaceBasis::new_unchecked(orthonormalize(&random(n, a, seed)));
            let t = SubspaceBasis::new_unchecked(orthonormalize(&random(n, b, seed + 3)));
            let inter = intersect_subspaces(&[s.clone(), t.clone()], DEFAULT_RANK_TOL).unwrap();
            let cs = left_null_space(s.basis(), DEFAULT_RANK_TOL).unwrap().into_basis().adjoint();
            let ct = left_null_space(t.basis(), DEFAULT_RANK_TOL).unwrap().into_basis().adjoint();
            let stacked = vstack(&[&cs, &ct], n).unwrap();
            let brute = n - numerical_rank(&stacked, DEFAULT_RANK_TOL).unwrap();
            prop_assert_eq!(inter.rank(), brute);
            prop_assert_eq!(inter.rank(), (a + b).saturating_sub(n));
        }
    }
}
