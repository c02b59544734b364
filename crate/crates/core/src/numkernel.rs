//! Tolerance-aware dense complex linear algebra.
//!
//! Every operator in the crate is a [`Matrix`]: a dense, column-major
//! `nalgebra` matrix of complex doubles. Zero-sized matrices are valid
//! everywhere and stand for maps to or from the trivial space.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

fn to_faer(a: &Matrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(a: faer::MatRef<'_, faer::c64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a[(i, j)];
        C64::new(z.re, z.im)
    })
}

fn svd_failed(a: &Matrix) -> Error {
    Error::NonConvergence {
        rows: a.nrows(),
        cols: a.ncols(),
    }
}

/// Tolerance applied when a basis is checked for orthonormality.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Matrix {
    Matrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    Matrix::zeros(rows, cols)
}

/// Builds a matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> Matrix {
    assert_eq!(data.len(), rows * cols, "data length does not match shape");
    Matrix::from_fn(rows, cols, |i, j| c(data[i * cols + j]))
}

pub fn real_diag(values: &[f64]) -> Matrix {
    let mut m = zeros(values.len(), values.len());
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = c(v);
    }
    m
}

pub fn is_finite(a: &Matrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(a: &Matrix, what: &str) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// `a ⊕ b`.
pub fn direct_sum(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

pub fn hstack(parts: &[&Matrix]) -> Matrix {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        assert_eq!(p.nrows(), rows, "hstack: row counts differ");
        out.view_mut((0, at), p.shape()).copy_from(*p);
        at += p.ncols();
    }
    out
}

/// Copy of the `rows × cols` block starting at `(r0, c0)`.
pub fn block(a: &Matrix, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
    a.view((r0, c0), (rows, cols)).into_owned()
}

/// Singular values only, sorted non-increasing.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    ensure_finite(a, "singular_values input")?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut s = to_faer(a).singular_values().map_err(|_| svd_failed(a))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Spectral norm; zero for empty matrices.
pub fn norm2(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    match singular_values(a) {
        Ok(s) => s[0],
        Err(_) => f64::NAN,
    }
}

/// `‖computed − expected‖ / max(1, ‖expected‖)` in the spectral norm.
/// Shape mismatches are reported as an infinite residual.
pub fn rel_residual(computed: &Matrix, expected: &Matrix) -> f64 {
    if computed.shape() != expected.shape() {
        return f64::INFINITY;
    }
    norm2(&(computed - expected)) / norm2(expected).max(1.0)
}

/// How the rank cut-off τ is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum RankTol {
    /// τ = max(rows, cols) · ε · σ_max.
    #[default]
    Standard,
    /// τ = r · σ_max.
    Relative(f64),
    /// τ given directly.
    Absolute(f64),
}

impl RankTol {
    pub fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankTol::Standard => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            RankTol::Relative(r) => r * sigma_max,
            RankTol::Absolute(t) => t,
        }
    }
}

/// Full singular value decomposition `a = left · diag(singulars) · right*`
/// with square unitary `left` (rows × rows) and `right` (cols × cols).
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub left: Matrix,
    pub singulars: Vec<f64>,
    pub right: Matrix,
    pub rank_tol: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singulars.iter().filter(|&&s| s > self.rank_tol).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        let p = self.singulars.len();
        let mut us = self.left.columns(0, p).into_owned();
        for (j, &s) in self.singulars.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.right.columns(0, p).adjoint()
    }
}

pub fn svd(a: &Matrix) -> Result<SvdResult> {
    svd_with(a, RankTol::Standard)
}

pub fn svd_with(a: &Matrix, tol: RankTol) -> Result<SvdResult> {
    ensure_finite(a, "svd input")?;
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(SvdResult {
            left: identity(m),
            singulars: Vec::new(),
            right: identity(n),
            rank_tol: tol.threshold(m, n, 0.0),
        });
    }
    let raw = to_faer(a).svd().map_err(|_| svd_failed(a))?;
    let sv = raw.S().column_vector();
    let raw_s: Vec<f64> = (0..sv.nrows()).map(|i| sv[i].re).collect();
    let (u, v) = (from_faer(raw.U()), from_faer(raw.V()));
    // Singular values arrive non-increasing; the stable sort only guards that.
    let mut order: Vec<usize> = (0..raw_s.len()).collect();
    order.sort_by(|&i, &j| raw_s[j].total_cmp(&raw_s[i]));
    let singulars: Vec<f64> = order.iter().map(|&i| raw_s[i]).collect();
    let permute = |q: &Matrix| {
        let mut out = q.clone();
        for (j, &o) in order.iter().enumerate() {
            out.set_column(j, &q.column(o));
        }
        out
    };
    let smax = singulars.first().copied().unwrap_or(0.0);
    Ok(SvdResult {
        left: permute(&u),
        singulars,
        right: permute(&v),
        rank_tol: tol.threshold(m, n, smax),
    })
}

pub fn rank_of(a: &Matrix, tol: RankTol) -> Result<usize> {
    let s = singular_values(a)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let tau = tol.threshold(a.nrows(), a.ncols(), smax);
    Ok(s.iter().filter(|&&x| x > tau).count())
}

pub fn nullity(a: &Matrix, tol: RankTol) -> Result<usize> {
    Ok(a.ncols() - rank_of(a, tol)?)
}

pub fn pinv(a: &Matrix) -> Result<Matrix> {
    pinv_with(a, RankTol::Standard)
}

/// Moore–Penrose pseudoinverse `right_r · diag(1/σ) · left_r*`.
pub fn pinv_with(a: &Matrix, tol: RankTol) -> Result<Matrix> {
    let s = svd_with(a, tol)?;
    let r = s.rank();
    let mut vr = s.right.columns(0, r).into_owned();
    for j in 0..r {
        vr.column_mut(j).unscale_mut(s.singulars[j]);
    }
    Ok(vr * s.left.columns(0, r).adjoint())
}

/// Orthonormal basis of a subspace of `C^ambient_dim`, stored as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub basis: Matrix,
}

impl SubspaceBasis {
    /// Checks `basis* · basis = I` within [`ORTHONORMAL_TOL`].
    pub fn new(basis: Matrix) -> Result<Self> {
        let g = gram_residual(&basis);
        if g > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(g));
        }
        Ok(SubspaceBasis { basis })
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            basis: identity(ambient_dim),
        }
    }

    /// The span of the given coordinate axes, in order.
    pub fn coordinate(ambient_dim: usize, axes: std::ops::Range<usize>) -> Self {
        let mut basis = zeros(ambient_dim, axes.len());
        for (j, i) in axes.enumerate() {
            basis[(i, j)] = c(1.0);
        }
        SubspaceBasis { basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

pub fn gram_residual(basis: &Matrix) -> f64 {
    norm2(&(basis.adjoint() * basis - identity(basis.ncols())))
}

/// Orthogonal splittings of domain and codomain of a matrix, with the
/// invertible compression `restricted = range* · a · kernel_complement`.
#[derive(Clone, Debug)]
pub struct Subspaces {
    pub kernel: SubspaceBasis,
    pub kernel_complement: SubspaceBasis,
    pub range: SubspaceBasis,
    pub range_complement: SubspaceBasis,
    pub restricted: Matrix,
}

pub fn subspaces(a: &Matrix) -> Result<Subspaces> {
    subspaces_with(a, RankTol::Standard)
}

pub fn subspaces_with(a: &Matrix, tol: RankTol) -> Result<Subspaces> {
    let s = svd_with(a, tol)?;
    let r = s.rank();
    let (m, n) = a.shape();
    let range = s.left.columns(0, r).into_owned();
    let kernel_complement = s.right.columns(0, r).into_owned();
    let restricted = range.adjoint() * a * &kernel_complement;
    Ok(Subspaces {
        kernel: SubspaceBasis {
            basis: s.right.columns(r, n - r).into_owned(),
        },
        kernel_complement: SubspaceBasis {
            basis: kernel_complement,
        },
        range: SubspaceBasis { basis: range },
        range_complement: SubspaceBasis {
            basis: s.left.columns(r, m - r).into_owned(),
        },
        restricted,
    })
}

#[derive(Clone, Debug)]
pub struct Inverse {
    pub inv: Matrix,
    pub condition: f64,
}

pub fn inverse(a: &Matrix) -> Result<Inverse> {
    inverse_with(a, RankTol::Standard, "matrix")
}

/// Inverse via LU, with singularity decided on the singular values. `what`
/// names the matrix in the error.
pub fn inverse_with(a: &Matrix, tol: RankTol, what: &str) -> Result<Inverse> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "cannot invert non-square {what} ({}x{})",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Inverse {
            inv: zeros(0, 0),
            condition: 1.0,
        });
    }
    let s = singular_values(a)?;
    let (smax, smin) = (s[0], s[n - 1]);
    let threshold = tol.threshold(n, n, smax);
    if !(smin > threshold) {
        return Err(Error::Singular {
            what: what.to_string(),
            sigma_min: smin,
            threshold,
        });
    }
    let inv = a.clone().lu().try_inverse().ok_or(Error::Singular {
        what: what.to_string(),
        sigma_min: smin,
        threshold,
    })?;
    Ok(Inverse {
        inv,
        condition: smax / smin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.shape() == b.shape() && norm2(&(a - b)) <= tol
    }

    #[test]
    fn svd_identity_and_diag() {
        let s = svd(&identity(2)).unwrap();
        assert_eq!(s.singulars, vec![1.0, 1.0]);
        let s = svd(&real_diag(&[3.0, 0.0])).unwrap();
        assert_eq!(s.singulars, vec![3.0, 0.0]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn svd_swap_reconstructs() {
        let a = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = svd(&a).unwrap();
        assert!((s.singulars[0] - 1.0).abs() < 1e-15 && (s.singulars[1] - 1.0).abs() < 1e-15);
        assert!(norm2(&(s.reconstruct() - &a)) <= 1e-14);
    }

    #[test]
    fn svd_rectangular_factors_are_unitary() {
        let a = Matrix::from_fn(5, 3, |i, j| C64::new((i + 2 * j) as f64 - 3.0, (i * j) as f64 % 3.0));
        for m in [a.clone(), a.adjoint()] {
            let s = svd(&m).unwrap();
            let (r, k) = m.shape();
            assert!(gram_residual(&s.left) < 1e-13 && s.left.shape() == (r, r));
            assert!(gram_residual(&s.right) < 1e-13 && s.right.shape() == (k, k));
            assert!(norm2(&(s.reconstruct() - &m)) <= 1e-13 * norm2(&m));
            assert!(s.singulars.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn svd_of_empty_matrix() {
        let s = svd(&zeros(3, 0)).unwrap();
        assert!(s.singulars.is_empty());
        assert_eq!(s.left.shape(), (3, 3));
        assert_eq!(s.right.shape(), (0, 0));
    }

    #[test]
    fn svd_rejects_non_finite() {
        let mut a = identity(2);
        a[(0, 1)] = c(f64::NAN);
        assert!(matches!(svd(&a), Err(Error::NonFinite(_))));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_of(&zeros(3, 3), RankTol::Standard).unwrap(), 0);
        assert_eq!(rank_of(&real_diag(&[1.0, 1e-30]), RankTol::Standard).unwrap(), 1);
        let a = from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        assert_eq!(rank_of(&a, RankTol::Standard).unwrap(), 2);
        assert_eq!(rank_of(&real_diag(&[1.0, 1e-6]), RankTol::Relative(1e-5)).unwrap(), 1);
        assert_eq!(rank_of(&real_diag(&[1.0, 1e-6]), RankTol::Absolute(1e-7)).unwrap(), 2);
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&real_diag(&[2.0, 0.0])).unwrap();
        assert!(close(&p, &real_diag(&[0.5, 0.0]), 1e-15));

        let a = from_real_rows(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        let inv = inverse(&a).unwrap().inv;
        assert!(close(&pinv(&a).unwrap(), &inv, 1e-14));

        let col = from_real_rows(2, 1, &[3.0, 4.0]);
        let p = pinv(&col).unwrap();
        assert!(close(&p, &from_real_rows(1, 2, &[3.0 / 25.0, 4.0 / 25.0]), 1e-15));
    }

    #[test]
    fn pinv_of_empty_and_zero() {
        assert_eq!(pinv(&zeros(0, 3)).unwrap().shape(), (3, 0));
        assert!(close(&pinv(&zeros(2, 3)).unwrap(), &zeros(3, 2), 0.0));
    }

    #[test]
    fn subspace_examples() {
        let s = subspaces(&zeros(2, 2)).unwrap();
        assert_eq!((s.kernel.dim(), s.range.dim()), (2, 0));
        let s = subspaces(&identity(3)).unwrap();
        assert_eq!((s.kernel.dim(), s.range.dim()), (0, 3));

        let s = subspaces(&real_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(s.kernel.dim(), 1);
        // spans are compared through their projectors, which are phase independent
        let proj = |b: &SubspaceBasis| &b.basis * b.basis.adjoint();
        assert!(close(&proj(&s.kernel), &real_diag(&[0.0, 1.0]), 1e-15));
        assert!(close(&proj(&s.range), &real_diag(&[1.0, 0.0]), 1e-15));
        assert!(close(&proj(&s.kernel_complement), &real_diag(&[1.0, 0.0]), 1e-15));
        assert!(close(&proj(&s.range_complement), &real_diag(&[0.0, 1.0]), 1e-15));
        assert!((s.restricted[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let r = inverse(&identity(4)).unwrap();
        assert!(close(&r.inv, &identity(4), 0.0));
        assert_eq!(r.condition, 1.0);

        let a = from_real_rows(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        let r = inverse(&a).unwrap();
        assert!(close(&r.inv, &from_real_rows(2, 2, &[0.5, -0.5, 0.5, 0.5]), 1e-15));

        match inverse(&real_diag(&[1.0, 0.0])) {
            Err(Error::Singular { sigma_min, .. }) => assert_eq!(sigma_min, 0.0),
            other => panic!("expected singular error, got {other:?}"),
        }
        assert!(matches!(inverse(&zeros(2, 3)), Err(Error::Shape(_))));
    }

    #[test]
    fn subspace_basis_rejects_non_orthonormal() {
        let b = from_real_rows(2, 1, &[1.0, 1.0]);
        assert!(matches!(SubspaceBasis::new(b), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn direct_sum_and_blocks() {
        let a = real_diag(&[1.0, 2.0]);
        let b = from_real_rows(1, 3, &[3.0, 4.0, 5.0]);
        let s = direct_sum(&a, &b);
        assert_eq!(s.shape(), (3, 5));
        assert_eq!(block(&s, 2, 2, 1, 3), b);
        assert_eq!(block(&s, 0, 0, 2, 2), a);
        assert_eq!(direct_sum(&a, &zeros(0, 0)), a);
    }
}
