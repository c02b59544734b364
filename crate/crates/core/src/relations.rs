//! Witnesses for the four operator relations, their residual verifiers and
//! the explicit converters SC → MC → EAE (special form) and EAOE → SC.
//!
//! Throughout, `U` acts on `X = C^n` and `V` on `Y = C^m`. Residuals are
//! relative, `‖lhs − rhs‖ / max(1, ‖lhs‖)` in the spectral norm, where
//! `lhs` is the left-hand side of the identity as written in its label.

use crate::blockops::{schur_pair, Block2x2};
use crate::error::{Error, Result};
use crate::numkernel::{
    block, direct_sum, identity, inverse_with, rel_residual, singular_values, zeros, Matrix,
    RankTol,
};
use crate::residual::ResidualReport;

fn require_square(a: &Matrix, name: &str) -> Result<usize> {
    if a.is_square() {
        Ok(a.nrows())
    } else {
        Err(Error::Shape(format!(
            "{name} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )))
    }
}

fn require_shape(a: &Matrix, rows: usize, cols: usize, name: &str) -> Result<()> {
    if a.shape() == (rows, cols) {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "{name} must be {rows}x{cols}, got {}x{}",
            a.nrows(),
            a.ncols()
        )))
    }
}

fn sigma_min(a: &Matrix) -> f64 {
    match singular_values(a) {
        Ok(s) => s.last().copied().unwrap_or(f64::INFINITY),
        Err(_) => f64::NAN,
    }
}

// ---------------------------------------------------------------- SC

/// `U = A − B·D⁻¹·C` and `V = D − C·A⁻¹·B` for `M = [[A, B], [C, D]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScWitness {
    pub m: Block2x2,
    pub u: Matrix,
    pub v: Matrix,
}

impl ScWitness {
    /// Computes both Schur complements of `m`.
    pub fn from_block(m: Block2x2) -> Result<Self> {
        let (u, v) = schur_pair(&m)?;
        Ok(ScWitness { m, u, v })
    }
}

pub fn verify_sc(w: &ScWitness, tol: f64) -> Result<ResidualReport> {
    let n = require_square(&w.m.a11, "A")?;
    let m = require_square(&w.m.a22, "D")?;
    require_shape(&w.m.a12, n, m, "B")?;
    require_shape(&w.m.a21, m, n, "C")?;
    require_shape(&w.u, n, n, "U")?;
    require_shape(&w.v, m, m, "V")?;

    let mut report = ResidualReport::new("schur coupling", tol);
    let (smin_a, smin_d) = (sigma_min(&w.m.a11), sigma_min(&w.m.a22));
    report.note("sigma_min(A)", smin_a);
    report.note("sigma_min(D)", smin_d);
    match schur_pair(&w.m) {
        Ok((u, v)) => {
            report.push("U = A - B D^-1 C", rel_residual(&u, &w.u));
            report.push("V = D - C A^-1 B", rel_residual(&v, &w.v));
        }
        Err(Error::Singular { what, .. }) => {
            report.push(format!("{what} invertible"), f64::INFINITY);
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

// ---------------------------------------------------------------- MC

/// `Uhat` on `X ⊕ Y` with `Uhat11 = U` and `(Uhat⁻¹)22 = V`.
#[derive(Clone, Debug, PartialEq)]
pub struct McWitness {
    pub uhat: Matrix,
    pub uhat_inv: Matrix,
    pub u: Matrix,
    pub v: Matrix,
}

impl McWitness {
    pub fn dim_x(&self) -> usize {
        self.u.nrows()
    }

    pub fn dim_y(&self) -> usize {
        self.v.nrows()
    }

    pub fn uhat_blocks(&self) -> Result<Block2x2> {
        Block2x2::split(&self.uhat, self.dim_x(), self.dim_x())
    }

    pub fn uhat_inv_blocks(&self) -> Result<Block2x2> {
        Block2x2::split(&self.uhat_inv, self.dim_x(), self.dim_x())
    }
}

pub fn verify_mc(w: &McWitness, tol: f64) -> Result<ResidualReport> {
    let n = require_square(&w.u, "U")?;
    let m = require_square(&w.v, "V")?;
    require_shape(&w.uhat, n + m, n + m, "Uhat")?;
    require_shape(&w.uhat_inv, n + m, n + m, "Uhat^-1")?;
    let mut report = ResidualReport::new("matricial coupling", tol);
    let id = identity(n + m);
    report.push("Uhat UhatInv = I", rel_residual(&(&w.uhat * &w.uhat_inv), &id));
    report.push("UhatInv Uhat = I", rel_residual(&(&w.uhat_inv * &w.uhat), &id));
    report.push("U = Uhat11", rel_residual(&block(&w.uhat, 0, 0, n, n), &w.u));
    report.push("V = UhatInv22", rel_residual(&block(&w.uhat_inv, n, n, m, m), &w.v));
    Ok(report)
}

/// `Uhat = [[U, B·D⁻¹], [−D⁻¹·C, D⁻¹]]`, `Uhat⁻¹ = [[A⁻¹, −A⁻¹·B], [C·A⁻¹, V]]`.
pub fn sc_to_mc(w: &ScWitness, tol: f64) -> Result<McWitness> {
    verify_sc(w, tol)?.into_result()?;
    let a_inv = inverse_with(&w.m.a11, RankTol::Standard, "A")?.inv;
    let d_inv = inverse_with(&w.m.a22, RankTol::Standard, "D")?.inv;
    let (b, cc) = (&w.m.a12, &w.m.a21);
    let uhat = Block2x2::new(w.u.clone(), b * &d_inv, -(&d_inv * cc), d_inv.clone())?.assemble();
    let uhat_inv =
        Block2x2::new(a_inv.clone(), -(&a_inv * b), cc * &a_inv, w.v.clone())?.assemble();
    let mc = McWitness {
        uhat,
        uhat_inv,
        u: w.u.clone(),
        v: w.v.clone(),
    };
    verify_mc(&mc, tol)?.into_result()?;
    Ok(mc)
}

// ---------------------------------------------------------------- EAE

/// `U ⊕ I_{x0} = E·(V ⊕ I_{y0})·F` with `E`, `F` invertible.
#[derive(Clone, Debug, PartialEq)]
pub struct EaeWitness {
    pub u: Matrix,
    pub v: Matrix,
    pub e: Matrix,
    pub f: Matrix,
    pub x0_dim: usize,
    pub y0_dim: usize,
}

pub fn verify_eae(w: &EaeWitness, tol: f64) -> Result<ResidualReport> {
    let n = require_square(&w.u, "U")?;
    let m = require_square(&w.v, "V")?;
    let size = n + w.x0_dim;
    if m + w.y0_dim != size {
        return Err(Error::Shape(format!(
            "extended sizes differ: {n}+{} vs {m}+{}",
            w.x0_dim, w.y0_dim
        )));
    }
    require_shape(&w.e, size, size, "E")?;
    require_shape(&w.f, size, size, "F")?;
    let ce = inverse_with(&w.e, RankTol::Standard, "E")?.condition;
    let cf = inverse_with(&w.f, RankTol::Standard, "F")?.condition;
    let mut report = ResidualReport::new("equivalence after extension", tol);
    let lhs = direct_sum(&w.u, &identity(w.x0_dim));
    let rhs = &w.e * direct_sum(&w.v, &identity(w.y0_dim)) * &w.f;
    report.push("U+I = E (V+I) F", rel_residual(&rhs, &lhs));
    report.note("cond(E)", ce);
    report.note("cond(F)", cf);
    Ok(report)
}

/// Special-form witness: `X0 = Y`, `Y0 = X` and
///
/// ```text
/// E   = [[E11, U], [E21, -F11]]      F   = [[F11, I_Y], [F21, F22]]
/// E⁻¹ = [[Ê11, V], [Ê21,  F22]]      F⁻¹ = [[-F22, I_X], [I + F11·F22, -F11]]
/// ```
///
/// `E` maps `Y ⊕ X → X ⊕ Y`, `F` maps `X ⊕ Y → Y ⊕ X`.
#[derive(Clone, Debug, PartialEq)]
pub struct EaeSpecialWitness {
    pub u: Matrix,
    pub v: Matrix,
    pub e: Matrix,
    pub f: Matrix,
    pub e_inv: Matrix,
}

impl EaeSpecialWitness {
    /// Computes `E⁻¹` numerically.
    pub fn new(u: Matrix, v: Matrix, e: Matrix, f: Matrix) -> Result<Self> {
        let e_inv = inverse_with(&e, RankTol::Standard, "E")?.inv;
        Ok(EaeSpecialWitness { u, v, e, f, e_inv })
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn m(&self) -> usize {
        self.v.nrows()
    }

    pub fn e11(&self) -> Matrix {
        block(&self.e, 0, 0, self.n(), self.m())
    }
    pub fn e12(&self) -> Matrix {
        block(&self.e, 0, self.m(), self.n(), self.n())
    }
    pub fn e21(&self) -> Matrix {
        block(&self.e, self.n(), 0, self.m(), self.m())
    }
    pub fn e22(&self) -> Matrix {
        block(&self.e, self.n(), self.m(), self.m(), self.n())
    }
    pub fn f11(&self) -> Matrix {
        block(&self.f, 0, 0, self.m(), self.n())
    }
    pub fn f12(&self) -> Matrix {
        block(&self.f, 0, self.n(), self.m(), self.m())
    }
    pub fn f21(&self) -> Matrix {
        block(&self.f, self.m(), 0, self.n(), self.n())
    }
    pub fn f22(&self) -> Matrix {
        block(&self.f, self.m(), self.n(), self.n(), self.m())
    }
    /// `Ê11`, the (1,1) block of `E⁻¹` (X → Y).
    pub fn ehat11(&self) -> Matrix {
        block(&self.e_inv, 0, 0, self.m(), self.n())
    }
    pub fn einv12(&self) -> Matrix {
        block(&self.e_inv, 0, self.n(), self.m(), self.m())
    }
    /// `Ê21`, the (2,1) block of `E⁻¹` (X → X).
    pub fn ehat21(&self) -> Matrix {
        block(&self.e_inv, self.m(), 0, self.n(), self.n())
    }
    pub fn einv22(&self) -> Matrix {
        block(&self.e_inv, self.m(), self.n(), self.n(), self.m())
    }

    /// `F⁻¹` as dictated by the special form.
    pub fn f_inv(&self) -> Matrix {
        let (f11, f22) = (self.f11(), self.f22());
        Block2x2 {
            a11: -&f22,
            a12: identity(self.n()),
            a21: identity(self.m()) + &f11 * &f22,
            a22: -f11,
        }
        .assemble()
    }

    pub fn as_eae(&self) -> EaeWitness {
        EaeWitness {
            u: self.u.clone(),
            v: self.v.clone(),
            e: self.e.clone(),
            f: self.f.clone(),
            x0_dim: self.m(),
            y0_dim: self.n(),
        }
    }

    fn check_shapes(&self) -> Result<()> {
        let n = require_square(&self.u, "U")?;
        let m = require_square(&self.v, "V")?;
        require_shape(&self.e, n + m, m + n, "E")?;
        require_shape(&self.f, m + n, n + m, "F")?;
        require_shape(&self.e_inv, m + n, n + m, "E^-1")
    }
}

/// Labels of the eleven block identities, in order.
pub const IDENTITY_LABELS: [&str; 11] = [
    "I = F21 - F22 F11",
    "U = E11 V F11 + U F21",
    "E21 V F11 = F11 F21",
    "E11 V = -U F22",
    "F11 F22 = E21 V - I",
    "Ehat11 U = V F11",
    "Ehat21 U = F21",
    "E11 Ehat11 = I - U Ehat21",
    "E21 Ehat11 = F11 Ehat21",
    "Ehat11 E11 = I - V E21",
    "Ehat21 E11 = -F22 E21",
];

/// The eleven block identities, the corner conditions of the special form
/// and the extended equivalence itself.
pub fn verify_eae_special(w: &EaeSpecialWitness, tol: f64) -> Result<ResidualReport> {
    w.check_shapes()?;
    let (n, m) = (w.n(), w.m());
    let ce = inverse_with(&w.e, RankTol::Standard, "E")?.condition;
    let cf = inverse_with(&w.f, RankTol::Standard, "F")?.condition;

    let (u, v) = (&w.u, &w.v);
    let (e11, e21) = (w.e11(), w.e21());
    let (f11, f21, f22) = (w.f11(), w.f21(), w.f22());
    let (eh11, eh21) = (w.ehat11(), w.ehat21());
    let (ix, iy) = (identity(n), identity(m));

    let mut report = ResidualReport::new("special-form equivalence after extension", tol);
    let identities: [(Matrix, Matrix); 11] = [
        (ix.clone(), &f21 - &f22 * &f11),
        (u.clone(), &e11 * v * &f11 + u * &f21),
        (&e21 * v * &f11, &f11 * &f21),
        (&e11 * v, -(u * &f22)),
        (&f11 * &f22, &e21 * v - &iy),
        (&eh11 * u, v * &f11),
        (&eh21 * u, f21.clone()),
        (&e11 * &eh11, &ix - u * &eh21),
        (&e21 * &eh11, &f11 * &eh21),
        (&eh11 * &e11, &iy - v * &e21),
        (&eh21 * &e11, -(&f22 * &e21)),
    ];
    for (label, (lhs, rhs)) in IDENTITY_LABELS.iter().zip(identities.iter()) {
        report.push(*label, rel_residual(rhs, lhs));
    }

    report.push("E12 = U", rel_residual(&w.e12(), u));
    report.push("Einv12 = V", rel_residual(&w.einv12(), v));
    report.push("F12 = I", rel_residual(&w.f12(), &iy));
    report.push("E22 = -F11", rel_residual(&w.e22(), &(-&f11)));
    report.push("Einv22 = F22", rel_residual(&w.einv22(), &f22));
    report.push("E Einv = I", rel_residual(&(&w.e * &w.e_inv), &identity(n + m)));
    report.push("F Finv = I", rel_residual(&(&w.f * w.f_inv()), &identity(n + m)));
    let lhs = direct_sum(u, &iy);
    let rhs = &w.e * direct_sum(v, &ix) * &w.f;
    report.push("U+I = E (V+I) F", rel_residual(&rhs, &lhs));
    report.note("cond(E)", ce);
    report.note("cond(F)", cf);
    Ok(report)
}

/// With `Uhat = [[U, R], [Q, S]]` and `Uhat⁻¹ = [[A, B], [C, V]]`:
/// `E = [[R, U], [S, Q]]`, `F = [[−Q, I], [A·U, B]]`, `E⁻¹ = [[C, V], [A, B]]`.
pub fn mc_to_eae_special(w: &McWitness, tol: f64) -> Result<EaeSpecialWitness> {
    verify_mc(w, tol)?.into_result()?;
    let n = w.dim_x();
    let m = w.dim_y();
    let hat = w.uhat_blocks()?;
    let inv = w.uhat_inv_blocks()?;
    let (r, q, s) = (&hat.a12, &hat.a21, &hat.a22);
    let (a, b, cc) = (&inv.a11, &inv.a12, &inv.a21);

    let e = Block2x2::new(r.clone(), w.u.clone(), s.clone(), q.clone())?.assemble();
    let f = Block2x2::new(-q, identity(m), a * &w.u, b.clone())?.assemble();
    let e_inv = Block2x2::new(cc.clone(), inv.a22.clone(), a.clone(), b.clone())?.assemble();
    debug_assert_eq!(e.shape(), (n + m, m + n));
    let out = EaeSpecialWitness {
        u: w.u.clone(),
        v: w.v.clone(),
        e,
        f,
        e_inv,
    };
    verify_eae_special(&out, tol)?.into_result()?;
    Ok(out)
}

// ---------------------------------------------------------------- EAOE

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtendedSide {
    /// `U ⊕ I = E·V·F`.
    U,
    /// `U = E·(V ⊕ I)·F`.
    V,
}

impl ExtendedSide {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtendedSide::U => "U",
            ExtendedSide::V => "V",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EaoeWitness {
    pub u: Matrix,
    pub v: Matrix,
    pub side: ExtendedSide,
    pub ext_dim: usize,
    pub e: Matrix,
    pub f: Matrix,
}

pub fn verify_eaoe(w: &EaoeWitness, tol: f64) -> Result<ResidualReport> {
    let n = require_square(&w.u, "U")?;
    require_square(&w.v, "V")?;
    let (size, lhs, middle) = match w.side {
        ExtendedSide::U => (n + w.ext_dim, direct_sum(&w.u, &identity(w.ext_dim)), w.v.clone()),
        ExtendedSide::V => (n, w.u.clone(), direct_sum(&w.v, &identity(w.ext_dim))),
    };
    if middle.nrows() != size {
        return Err(Error::Shape(format!(
            "one-sided extension sizes differ: {} vs {}",
            size,
            middle.nrows()
        )));
    }
    require_shape(&w.e, size, size, "E")?;
    require_shape(&w.f, size, size, "F")?;
    let ce = inverse_with(&w.e, RankTol::Standard, "E")?.condition;
    let cf = inverse_with(&w.f, RankTol::Standard, "F")?.condition;
    let mut report = ResidualReport::new("equivalence after one-sided extension", tol);
    let label = match w.side {
        ExtendedSide::U => "U+I = E V F",
        ExtendedSide::V => "U = E (V+I) F",
    };
    report.push(label, rel_residual(&(&w.e * &middle * &w.f), &lhs));
    report.note("cond(E)", ce);
    report.note("cond(F)", cf);
    Ok(report)
}

/// Builds `M = [[E·F, E·J_S], [(I − S)·Π_S·F, I]]` from `T = E·(S ⊕ I_Z)·F`,
/// whose Schur complements are `T` and `S`; the blocks are then arranged so
/// that the complements come out as `(U, V)`.
pub fn sc_from_eaoe(w: &EaoeWitness, tol: f64) -> Result<ScWitness> {
    verify_eaoe(w, tol)?.into_result()?;
    let (t_dim, s, e, f) = match w.side {
        ExtendedSide::V => (w.u.nrows(), w.v.clone(), w.e.clone(), w.f.clone()),
        ExtendedSide::U => {
            let e_inv = inverse_with(&w.e, RankTol::Standard, "E")?.inv;
            let f_inv = inverse_with(&w.f, RankTol::Standard, "F")?.inv;
            (w.v.nrows(), w.u.clone(), e_inv, f_inv)
        }
    };
    let s_dim = s.nrows();
    let j_s = Block2x2::new(identity(s_dim), zeros(s_dim, 0), zeros(w.ext_dim, s_dim), zeros(w.ext_dim, 0))?
        .assemble();
    debug_assert_eq!(j_s.nrows(), t_dim);
    let pi_s = j_s.adjoint();

    let a = &e * &f;
    let b = &e * &j_s;
    let cc = (identity(s_dim) - &s) * &pi_s * &f;
    let d = identity(s_dim);
    let m = match w.side {
        ExtendedSide::V => Block2x2::new(a, b, cc, d)?,
        ExtendedSide::U => Block2x2::new(d, cc, b, a)?,
    };
    let sc = ScWitness {
        m,
        u: w.u.clone(),
        v: w.v.clone(),
    };
    verify_sc(&sc, tol)?.into_result()?;
    Ok(sc)
}

/// Largest absolute entry difference, used where exact equality is expected.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{from_real_rows, real_diag};

    fn scalar(x: f64) -> Matrix {
        from_real_rows(1, 1, &[x])
    }

    fn worked_sc() -> ScWitness {
        let m = Block2x2::split(&from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]), 1, 1).unwrap();
        ScWitness::from_block(m).unwrap()
    }

    pub(crate) fn worked_special() -> EaeSpecialWitness {
        EaeSpecialWitness::new(
            scalar(1.0),
            scalar(0.5),
            from_real_rows(2, 2, &[1.0, 1.0, 1.0, -1.0]),
            from_real_rows(2, 2, &[1.0, 1.0, 0.5, -0.5]),
        )
        .unwrap()
    }

    fn swap_special() -> EaeSpecialWitness {
        let swap = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        EaeSpecialWitness::new(scalar(1.0), scalar(1.0), swap.clone(), swap).unwrap()
    }

    #[test]
    fn verify_sc_examples() {
        let w = ScWitness {
            m: Block2x2::split(&identity(2), 1, 1).unwrap(),
            u: scalar(1.0),
            v: scalar(1.0),
        };
        assert_eq!(verify_sc(&w, 1e-12).unwrap().max_residual(), 0.0);

        let w = worked_sc();
        assert!(verify_sc(&w, 1e-12).unwrap().passed());

        let bad = ScWitness {
            v: scalar(0.6),
            ..worked_sc()
        };
        let r = verify_sc(&bad, 1e-8).unwrap();
        assert!(!r.passed());
        assert!((r.get("V = D - C A^-1 B").unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn verify_sc_rejects_bad_shapes_and_flags_singular_blocks() {
        let w = ScWitness {
            m: Block2x2::split(&identity(3), 1, 1).unwrap(),
            u: scalar(1.0),
            v: scalar(1.0),
        };
        assert!(matches!(verify_sc(&w, 1e-8), Err(Error::Shape(_))));

        let w = ScWitness {
            m: Block2x2::split(&real_diag(&[0.0, 1.0]), 1, 1).unwrap(),
            u: scalar(0.0),
            v: scalar(1.0),
        };
        assert!(!verify_sc(&w, 1e-8).unwrap().passed());
    }

    #[test]
    fn verify_mc_examples() {
        let w = McWitness {
            uhat: identity(2),
            uhat_inv: identity(2),
            u: scalar(1.0),
            v: scalar(1.0),
        };
        assert!(verify_mc(&w, 1e-14).unwrap().passed());

        let w = McWitness {
            uhat: from_real_rows(2, 2, &[1.0, 1.0, -1.0, 1.0]),
            uhat_inv: from_real_rows(2, 2, &[0.5, -0.5, 0.5, 0.5]),
            u: scalar(1.0),
            v: scalar(0.5),
        };
        assert!(verify_mc(&w, 1e-14).unwrap().passed());

        let swap = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let w = McWitness {
            uhat: swap.clone(),
            uhat_inv: swap,
            u: scalar(0.0),
            v: scalar(0.0),
        };
        assert!(verify_mc(&w, 1e-14).unwrap().passed());
    }

    #[test]
    fn verify_eae_special_worked_instance_is_exact() {
        let r = verify_eae_special(&worked_special(), 1e-12).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.checks.len(), 19);
        assert!(r.max_residual() < 1e-15);
    }

    #[test]
    fn verify_eae_special_swap_witness() {
        let w = swap_special();
        assert_eq!((w.f11(), w.f21(), w.f22()), (scalar(0.0), scalar(1.0), scalar(0.0)));
        assert!(verify_eae_special(&w, 1e-14).unwrap().passed());
    }

    #[test]
    fn verify_eae_special_detects_perturbed_f21() {
        let mut w = worked_special();
        w.f[(1, 0)] = crate::numkernel::c(0.6);
        let r = verify_eae_special(&w, 1e-8).unwrap();
        assert!(!r.passed());
        assert!((r.get(IDENTITY_LABELS[0]).unwrap() - 0.1).abs() < 1e-12);
        assert!(r.failing().any(|c| c.label == IDENTITY_LABELS[0]));
    }

    #[test]
    fn verify_eae_special_rejects_singular_e() {
        let mut w = worked_special();
        w.e = from_real_rows(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(verify_eae_special(&w, 1e-8), Err(Error::Singular { .. })));
    }

    #[test]
    fn sc_to_mc_worked_instance() {
        let mc = sc_to_mc(&worked_sc(), 1e-12).unwrap();
        assert!(max_abs_diff(&mc.uhat, &from_real_rows(2, 2, &[1.0, 1.0, -1.0, 1.0])) < 1e-15);
        assert!(max_abs_diff(&mc.uhat_inv, &from_real_rows(2, 2, &[0.5, -0.5, 0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn sc_to_mc_identity() {
        let w = ScWitness::from_block(Block2x2::split(&identity(3), 1, 1).unwrap()).unwrap();
        let mc = sc_to_mc(&w, 1e-14).unwrap();
        assert_eq!(mc.uhat, identity(3));
    }

    #[test]
    fn mc_to_eae_special_worked_and_swap() {
        let mc = sc_to_mc(&worked_sc(), 1e-12).unwrap();
        let w = mc_to_eae_special(&mc, 1e-12).unwrap();
        assert!(max_abs_diff(&w.e, &from_real_rows(2, 2, &[1.0, 1.0, 1.0, -1.0])) < 1e-15);
        assert!(max_abs_diff(&w.f, &from_real_rows(2, 2, &[1.0, 1.0, 0.5, -0.5])) < 1e-15);
        // E·diag(0.5, 1)·F = I₂
        let prod = &w.e * real_diag(&[0.5, 1.0]) * &w.f;
        assert!(max_abs_diff(&prod, &identity(2)) < 1e-15);

        let mc = McWitness {
            uhat: identity(2),
            uhat_inv: identity(2),
            u: scalar(1.0),
            v: scalar(1.0),
        };
        let w = mc_to_eae_special(&mc, 1e-14).unwrap();
        let swap = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!((w.e.clone(), w.f.clone()), (swap.clone(), swap));
    }

    #[test]
    fn sc_from_eaoe_examples() {
        let w = EaoeWitness {
            u: scalar(1.0),
            v: scalar(1.0),
            side: ExtendedSide::V,
            ext_dim: 0,
            e: scalar(1.0),
            f: scalar(1.0),
        };
        let sc = sc_from_eaoe(&w, 1e-14).unwrap();
        assert_eq!(sc.m.assemble(), from_real_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]));

        let w = EaoeWitness {
            u: identity(2),
            v: scalar(1.0),
            side: ExtendedSide::V,
            ext_dim: 1,
            e: identity(2),
            f: identity(2),
        };
        let sc = sc_from_eaoe(&w, 1e-14).unwrap();
        assert_eq!(sc.m.a11, identity(2));
        assert_eq!(sc.m.a12, from_real_rows(2, 1, &[1.0, 0.0]));
        assert_eq!(sc.m.a21, zeros(1, 2));
        assert_eq!(sc.m.a22, identity(1));
    }

    #[test]
    fn sc_from_eaoe_u_extended_orientation() {
        // U ⊕ I₁ = E·V·F with U = [2], V = diag(1, 2) swapped into place.
        let swap = from_real_rows(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let w = EaoeWitness {
            u: scalar(2.0),
            v: real_diag(&[1.0, 2.0]),
            side: ExtendedSide::U,
            ext_dim: 1,
            e: swap.clone(),
            f: swap,
        };
        assert!(verify_eaoe(&w, 1e-14).unwrap().passed());
        let sc = sc_from_eaoe(&w, 1e-12).unwrap();
        let (u, v) = schur_pair(&sc.m).unwrap();
        assert!(max_abs_diff(&u, &w.u) < 1e-14 && max_abs_diff(&v, &w.v) < 1e-14);
    }

    #[test]
    fn verify_eae_rejects_non_square() {
        let w = EaeWitness {
            u: zeros(1, 2),
            v: scalar(1.0),
            e: identity(2),
            f: identity(2),
            x0_dim: 1,
            y0_dim: 1,
        };
        assert!(matches!(verify_eae(&w, 1e-8), Err(Error::Shape(_))));
    }
}
