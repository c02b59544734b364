//! 2×2 block operators, Schur complements, block inversion and the
//! embedding / projection maps of a subspace.

use crate::error::{Error, Result};
use crate::numkernel::{
    block, gram_residual, identity, zeros, Matrix, SubspaceBasis, ORTHONORMAL_TOL,
};

/// `[[a11, a12], [a21, a22]]` with consistent block shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Block2x2 {
    pub a11: Matrix,
    pub a12: Matrix,
    pub a21: Matrix,
    pub a22: Matrix,
}

impl Block2x2 {
    pub fn new(a11: Matrix, a12: Matrix, a21: Matrix, a22: Matrix) -> Result<Self> {
        let ok = a11.nrows() == a12.nrows()
            && a21.nrows() == a22.nrows()
            && a11.ncols() == a21.ncols()
            && a12.ncols() == a22.ncols();
        if !ok {
            return Err(Error::Shape(format!(
                "inconsistent blocks {:?} {:?} / {:?} {:?}",
                a11.shape(),
                a12.shape(),
                a21.shape(),
                a22.shape()
            )));
        }
        Ok(Block2x2 { a11, a12, a21, a22 })
    }

    /// Splits `m` after `row_split` rows and `col_split` columns.
    pub fn split(m: &Matrix, row_split: usize, col_split: usize) -> Result<Self> {
        let (r, c) = m.shape();
        if row_split > r || col_split > c {
            return Err(Error::Shape(format!(
                "split ({row_split}, {col_split}) outside {r}x{c} matrix"
            )));
        }
        Ok(Block2x2 {
            a11: block(m, 0, 0, row_split, col_split),
            a12: block(m, 0, col_split, row_split, c - col_split),
            a21: block(m, row_split, 0, r - row_split, col_split),
            a22: block(m, row_split, col_split, r - row_split, c - col_split),
        })
    }

    pub fn row_split(&self) -> usize {
        self.a11.nrows()
    }

    pub fn col_split(&self) -> usize {
        self.a11.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (
            self.a11.nrows() + self.a21.nrows(),
            self.a11.ncols() + self.a12.ncols(),
        )
    }

    pub fn assemble(&self) -> Matrix {
        let (r, c) = self.shape();
        let (rs, cs) = (self.row_split(), self.col_split());
        let mut out = zeros(r, c);
        out.view_mut((0, 0), self.a11.shape()).copy_from(&self.a11);
        out.view_mut((0, cs), self.a12.shape()).copy_from(&self.a12);
        out.view_mut((rs, 0), self.a21.shape()).copy_from(&self.a21);
        out.view_mut((rs, cs), self.a22.shape()).copy_from(&self.a22);
        out
    }
}

/// Assembles a 3×3 block matrix by nesting two levels of [`Block2x2`]:
/// `[[B11, B12 | B13], [B21, B22 | B23], [B31, B32 | B33]]`.
pub fn assemble3(b: [[&Matrix; 3]; 3]) -> Result<Matrix> {
    let top_left = Block2x2::new(b[0][0].clone(), b[0][1].clone(), b[1][0].clone(), b[1][1].clone())?;
    let right = Block2x2::new(
        b[0][2].clone(),
        zeros(b[0][2].nrows(), 0),
        b[1][2].clone(),
        zeros(b[1][2].nrows(), 0),
    )?;
    let bottom = Block2x2::new(
        b[2][0].clone(),
        b[2][1].clone(),
        zeros(0, b[2][0].ncols()),
        zeros(0, b[2][1].ncols()),
    )?;
    Ok(Block2x2::new(top_left.assemble(), right.assemble(), bottom.assemble(), b[2][2].clone())?.assemble())
}

/// The two Schur complements `(A − B·D⁻¹·C, D − C·A⁻¹·B)`.
pub fn schur_pair(m: &Block2x2) -> Result<(Matrix, Matrix)> {
    let a_inv = inverse_named(&m.a11, "A (top-left block)")?;
    let d_inv = inverse_named(&m.a22, "D (bottom-right block)")?;
    let u = &m.a11 - &m.a12 * &d_inv * &m.a21;
    let v = &m.a22 - &m.a21 * &a_inv * &m.a12;
    Ok((u, v))
}

fn inverse_named(a: &Matrix, what: &str) -> Result<Matrix> {
    crate::numkernel::inverse_with(a, crate::RankTol::Standard, what).map(|r| r.inv)
}

/// Which block of a 2×2 block matrix is used as the pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

#[derive(Clone, Debug)]
pub struct BlockInverse {
    /// Blocks of the inverse; its row split is the column split of the input.
    pub inverse: Block2x2,
    /// The Schur complement of the pivot that had to be inverted.
    pub schur: Matrix,
}

/// Newton steps `X ← X + X·(I − M·X)` on the assembled inverse. Each step
/// squares the right residual while it is below one.
const REFINE_STEPS: usize = 2;

/// Right inverse of `m` through the Schur complement of `pivot`. For
/// `TopRight` the complement is `Δ = a21 − a22·a12⁻¹·a11`.
///
/// The block formulas lose accuracy when the pivot is much worse conditioned
/// than `m`, so the assembled result is polished until `m·m⁻¹ − I` reaches
/// rounding level. The left residual `m⁻¹·m − I` is not polished and can be
/// up to `cond(m)` times larger.
pub fn block_inverse(m: &Block2x2, pivot: Pivot) -> Result<BlockInverse> {
    let BlockInverse { inverse, schur } = block_inverse_formula(m, pivot)?;
    let full = m.assemble();
    let n = full.nrows();
    let mut x = inverse.assemble();
    for _ in 0..REFINE_STEPS {
        let r = identity(n) - &full * &x;
        if !(crate::numkernel::norm2(&r) < 0.5) {
            break;
        }
        let dx = &x * r;
        x += dx;
    }
    let inverse = Block2x2::split(&x, inverse.row_split(), inverse.col_split())?;
    Ok(BlockInverse { inverse, schur })
}

fn block_inverse_formula(m: &Block2x2, pivot: Pivot) -> Result<BlockInverse> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::Shape(format!("block matrix {r}x{c} is not square")));
    }
    match pivot {
        Pivot::TopLeft => invert_diagonal_pivot(m, true, "a11"),
        Pivot::BottomRight => invert_diagonal_pivot(m, false, "a22"),
        Pivot::TopRight | Pivot::BottomLeft => {
            // Swapping the column blocks moves the pivot onto the diagonal;
            // the inverse then comes back with its row blocks swapped.
            let swapped = Block2x2::new(m.a12.clone(), m.a11.clone(), m.a22.clone(), m.a21.clone())?;
            let BlockInverse { inverse: n, schur } = if pivot == Pivot::TopRight {
                invert_diagonal_pivot(&swapped, true, "a12")?
            } else {
                invert_diagonal_pivot(&swapped, false, "a21")?
            };
            let inv = Block2x2::new(n.a21, n.a22, n.a11, n.a12)?;
            Ok(BlockInverse { inverse: inv, schur })
        }
    }
}

fn invert_diagonal_pivot(m: &Block2x2, top_left: bool, label: &str) -> Result<BlockInverse> {
    let (a, b, cc, d) = (&m.a11, &m.a12, &m.a21, &m.a22);
    let pivot_name = format!("pivot {label}");
    let schur_name = format!("Schur complement of {label}");
    if top_left {
        let a_inv = inverse_named(a, &pivot_name)?;
        let s = d - cc * &a_inv * b;
        let s_inv = inverse_named(&s, &schur_name)?;
        let ainv_b = &a_inv * b;
        let c_ainv = cc * &a_inv;
        let inv = Block2x2::new(
            &a_inv + &ainv_b * &s_inv * &c_ainv,
            -(&ainv_b * &s_inv),
            -(&s_inv * &c_ainv),
            s_inv,
        )?;
        Ok(BlockInverse { inverse: inv, schur: s })
    } else {
        let d_inv = inverse_named(d, &pivot_name)?;
        let s = a - b * &d_inv * cc;
        let s_inv = inverse_named(&s, &schur_name)?;
        let b_dinv = b * &d_inv;
        let dinv_c = &d_inv * cc;
        let inv = Block2x2::new(
            s_inv.clone(),
            -(&s_inv * &b_dinv),
            -(&dinv_c * &s_inv),
            &d_inv + &dinv_c * &s_inv * &b_dinv,
        )?;
        Ok(BlockInverse { inverse: inv, schur: s })
    }
}

/// `J` (embedding), `Pi` (projection onto the subspace) and `P = J·Pi`.
#[derive(Clone, Debug)]
pub struct SubspaceMaps {
    pub j: Matrix,
    pub pi: Matrix,
    pub p: Matrix,
}

pub fn subspace_maps(basis: &SubspaceBasis) -> Result<SubspaceMaps> {
    let g = gram_residual(&basis.basis);
    if g > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(g));
    }
    let j = basis.basis.clone();
    let pi = j.adjoint();
    let p = &j * &pi;
    Ok(SubspaceMaps { j, pi, p })
}

/// `Pi·J − I` and `P² − P` residuals of a set of subspace maps.
pub fn subspace_map_residuals(maps: &SubspaceMaps) -> (f64, f64) {
    use crate::numkernel::norm2;
    let k = maps.j.ncols();
    (
        norm2(&(&maps.pi * &maps.j - identity(k))),
        norm2(&(&maps.p * &maps.p - &maps.p)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{direct_sum, from_real_rows, inverse, norm2, real_diag, C64};

    fn scalar(x: f64) -> Matrix {
        from_real_rows(1, 1, &[x])
    }

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.shape() == b.shape() && norm2(&(a - b)) <= tol
    }

    #[test]
    fn split_assemble_round_trip() {
        let m = Matrix::from_fn(5, 4, |i, j| C64::new(i as f64, j as f64));
        for rs in 0..=5 {
            for cs in 0..=4 {
                assert_eq!(Block2x2::split(&m, rs, cs).unwrap().assemble(), m);
            }
        }
        assert!(Block2x2::split(&m, 6, 0).is_err());
    }

    #[test]
    fn new_rejects_inconsistent_blocks() {
        let e = Block2x2::new(identity(2), zeros(2, 1), zeros(1, 3), identity(1));
        assert!(matches!(e, Err(Error::Shape(_))));
    }

    #[test]
    fn schur_pair_scalar() {
        let m = Block2x2::split(&from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]), 1, 1).unwrap();
        let (u, v) = schur_pair(&m).unwrap();
        assert!(close(&u, &scalar(1.0), 1e-15));
        assert!(close(&v, &scalar(0.5), 1e-15));
    }

    #[test]
    fn schur_pair_identity_and_decoupled() {
        let m = Block2x2::split(&identity(5), 2, 2).unwrap();
        let (u, v) = schur_pair(&m).unwrap();
        assert_eq!((u, v), (identity(2), identity(3)));

        let a = from_real_rows(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let d = scalar(7.0);
        let m = Block2x2::split(&direct_sum(&a, &d), 2, 2).unwrap();
        let (u, v) = schur_pair(&m).unwrap();
        assert!(close(&u, &a, 0.0) && close(&v, &d, 0.0));
    }

    #[test]
    fn schur_pair_names_singular_block() {
        let m = Block2x2::split(&real_diag(&[0.0, 1.0]), 1, 1).unwrap();
        match schur_pair(&m) {
            Err(Error::Singular { what, .. }) => assert!(what.starts_with("A ")),
            other => panic!("{other:?}"),
        }
        let m = Block2x2::split(&real_diag(&[1.0, 0.0]), 1, 1).unwrap();
        match schur_pair(&m) {
            Err(Error::Singular { what, .. }) => assert!(what.starts_with("D ")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn block_inverse_top_right_pivot() {
        let f = Block2x2::split(&from_real_rows(2, 2, &[1.0, 1.0, 0.5, -0.5]), 1, 1).unwrap();
        let r = block_inverse(&f, Pivot::TopRight).unwrap();
        assert!(close(&r.schur, &scalar(1.0), 1e-15));
        let expected = from_real_rows(2, 2, &[0.5, 1.0, 0.5, -1.0]);
        assert!(close(&r.inverse.assemble(), &expected, 1e-15));
    }

    #[test]
    fn block_inverse_diagonal_and_unipotent() {
        let a = from_real_rows(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let d = scalar(4.0);
        let m = Block2x2::split(&direct_sum(&a, &d), 2, 2).unwrap();
        let r = block_inverse(&m, Pivot::TopLeft).unwrap();
        let a_inv = inverse(&a).unwrap().inv;
        assert!(close(&r.inverse.assemble(), &direct_sum(&a_inv, &scalar(0.25)), 1e-15));

        let b = from_real_rows(2, 1, &[3.0, -1.0]);
        let m = Block2x2::new(identity(2), b.clone(), zeros(1, 2), identity(1)).unwrap();
        let expected = Block2x2::new(identity(2), -b, zeros(1, 2), identity(1)).unwrap();
        for p in [Pivot::TopLeft, Pivot::BottomRight] {
            let r = block_inverse(&m, p).unwrap();
            assert!(close(&r.inverse.assemble(), &expected.assemble(), 1e-15));
        }
    }

    #[test]
    fn block_inverse_all_pivots_agree() {
        let m = Matrix::from_fn(4, 4, |i, j| {
            C64::new(if i == j { 3.0 } else { 0.3 * (i as f64 - j as f64) }, 0.1 * (i * j) as f64)
        });
        let b = Block2x2::split(&m, 2, 2).unwrap();
        let full = inverse(&m).unwrap().inv;
        for p in [Pivot::TopLeft, Pivot::TopRight, Pivot::BottomLeft, Pivot::BottomRight] {
            let r = block_inverse(&b, p).unwrap();
            assert!(close(&r.inverse.assemble(), &full, 1e-13), "{p:?}");
            assert!(close(&(&m * r.inverse.assemble()), &identity(4), 1e-13));
        }
    }

    #[test]
    fn block_inverse_singular_pivot_is_named() {
        let m = Block2x2::split(&from_real_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]), 1, 1).unwrap();
        match block_inverse(&m, Pivot::TopRight) {
            Err(Error::Singular { what, .. }) => assert!(what.contains("a12"), "{what}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subspace_map_examples() {
        let e1 = SubspaceBasis::coordinate(2, 0..1);
        let maps = subspace_maps(&e1).unwrap();
        assert_eq!(maps.j, from_real_rows(2, 1, &[1.0, 0.0]));
        assert_eq!(maps.p, real_diag(&[1.0, 0.0]));

        let maps = subspace_maps(&SubspaceBasis::full(3)).unwrap();
        assert_eq!(maps.j, identity(3));
        assert_eq!(maps.p, identity(3));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let diag = SubspaceBasis::new(from_real_rows(2, 1, &[h, h])).unwrap();
        let maps = subspace_maps(&diag).unwrap();
        assert!(close(&maps.p, &from_real_rows(2, 2, &[0.5, 0.5, 0.5, 0.5]), 1e-15));
        let (pij, idem) = subspace_map_residuals(&maps);
        assert!(pij < 1e-15 && idem < 1e-15);
    }

    #[test]
    fn subspace_maps_report_gram_residual() {
        let bad = SubspaceBasis {
            basis: from_real_rows(2, 1, &[1.0, 1.0]),
        };
        match subspace_maps(&bad) {
            Err(Error::NotOrthonormal(g)) => assert!((g - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn assemble3_places_blocks() {
        let b: Vec<Matrix> = (0..9)
            .map(|k| Matrix::from_element(1 + k / 3, 1 + k % 3, C64::new(k as f64, 0.0)))
            .collect();
        let m = assemble3([[&b[0], &b[1], &b[2]], [&b[3], &b[4], &b[5]], [&b[6], &b[7], &b[8]]])
            .unwrap();
        assert_eq!(m.shape(), (6, 6));
        assert_eq!(m[(0, 0)].re, 0.0);
        assert_eq!(m[(0, 1)].re, 1.0);
        assert_eq!(m[(0, 3)].re, 2.0);
        assert_eq!(m[(1, 0)].re, 3.0);
        assert_eq!(m[(2, 5)].re, 5.0);
        assert_eq!(m[(3, 0)].re, 6.0);
        assert_eq!(m[(5, 2)].re, 7.0);
        assert_eq!(m[(5, 5)].re, 8.0);
    }
}
