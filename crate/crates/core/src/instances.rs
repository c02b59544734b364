//! Seeded test-instance factory: random pairs with prescribed nullities,
//! rank normal forms, matricial-coupling synthesis and random Schur-coupling
//! witnesses. Every generator takes its RNG (or seed) explicitly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::blockops::Block2x2;
use crate::error::{Error, Result};
use crate::numkernel::{
    c, direct_sum, inverse_with, real_diag, svd_with, zeros, Matrix, RankTol, C64,
};
use crate::relations::{verify_mc, McWitness, ScWitness};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    /// Common nullity of `U` and `V`.
    pub k: usize,
    pub seed: u64,
    pub cond_bound: f64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k > self.n.min(self.m) {
            return Err(Error::InvalidArgument(format!(
                "nullity {} exceeds min(n, m) = {}",
                self.k,
                self.n.min(self.m)
            )));
        }
        if !(self.cond_bound >= 1.0) || !self.cond_bound.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cond_bound must be a finite number >= 1, got {}",
                self.cond_bound
            )));
        }
        Ok(())
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with independent standard normal real and imaginary parts,
/// scaled by 1/√2.
pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Matrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    if n == 0 {
        return zeros(0, 0);
    }
    let qr = gaussian(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `count` values log-uniform in `[1/cond_bound, 1]`, sorted non-increasing.
pub fn log_uniform_singulars<R: Rng + ?Sized>(count: usize, cond_bound: f64, rng: &mut R) -> Vec<f64> {
    let span = cond_bound.ln();
    let mut s: Vec<f64> = (0..count)
        .map(|_| (-span * rng.random::<f64>()).exp())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `W · diag(singulars) · Z*` with Haar `W`, `Z`; `singulars` is padded
/// with zeros to `min(rows, cols)`.
pub fn with_singular_values<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    singulars: &[f64],
    rng: &mut R,
) -> Matrix {
    let w = random_unitary(rows, rng);
    let z = random_unitary(cols, rng);
    let mut d = zeros(rows, cols);
    for (i, &s) in singulars.iter().enumerate().take(rows.min(cols)) {
        d[(i, i)] = c(s);
    }
    w * d * z.adjoint()
}

/// Invertible `n × n` matrix with singular values in `[1/cond_bound, 1]`.
pub fn random_invertible<R: Rng + ?Sized>(n: usize, cond_bound: f64, rng: &mut R) -> Matrix {
    let s = log_uniform_singulars(n, cond_bound, rng);
    with_singular_values(n, n, &s, rng)
}

/// `U` (n×n) and `V` (m×m), each of nullity exactly `k`, with nonzero
/// singular values in `[1/cond_bound, 1]`. Deterministic per seed.
pub fn random_instance(spec: &InstanceSpec) -> Result<(Matrix, Matrix)> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let su = log_uniform_singulars(spec.n - spec.k, spec.cond_bound, &mut rng);
    let u = with_singular_values(spec.n, spec.n, &su, &mut rng);
    let sv = log_uniform_singulars(spec.m - spec.k, spec.cond_bound, &mut rng);
    let v = with_singular_values(spec.m, spec.m, &sv, &mut rng);
    Ok((u, v))
}

/// `a = p1 · core · p2` with `core = I_r ⊕ 0`, `p1 = W·diag(σ₁..σ_r, 1, …)`
/// and `p2 = Z*` from the SVD `a = W·Σ·Z*`.
#[derive(Clone, Debug)]
pub struct RankFactorization {
    pub p1: Matrix,
    pub core: Matrix,
    pub p2: Matrix,
    pub rank: usize,
}

pub fn canonical_rank_factorization(a: &Matrix, tol: RankTol) -> Result<RankFactorization> {
    let s = svd_with(a, tol)?;
    let rank = s.rank();
    let (rows, cols) = a.shape();
    let scale: Vec<f64> = (0..rows)
        .map(|i| if i < rank { s.singulars[i] } else { 1.0 })
        .collect();
    let p1 = &s.left * real_diag(&scale);
    let mut core = zeros(rows, cols);
    for i in 0..rank {
        core[(i, i)] = c(1.0);
    }
    Ok(RankFactorization {
        p1,
        core,
        p2: s.right.adjoint(),
        rank,
    })
}

/// The involution `[[I_{n−k} ⊕ 0, Σ], [Σᵀ, I_{m−k} ⊕ 0]]` where `Σ` pairs the
/// last `k` coordinates of `X` with the last `k` of `Y` in index order.
pub fn null_pairing_coupling(n: usize, m: usize, k: usize) -> Matrix {
    let mut u0 = zeros(n + m, n + m);
    for i in 0..n - k {
        u0[(i, i)] = c(1.0);
    }
    for i in 0..m - k {
        u0[(n + i, n + i)] = c(1.0);
    }
    for i in 0..k {
        let (x, y) = (n - k + i, n + m - k + i);
        u0[(x, y)] = c(1.0);
        u0[(y, x)] = c(1.0);
    }
    u0
}

pub fn synth_mc(u: &Matrix, v: &Matrix) -> Result<McWitness> {
    synth_mc_with(u, v, RankTol::Standard, crate::DEFAULT_TOL)
}

/// `Uhat = diag(P1, Q2⁻¹)·Uhat₀·diag(P2, Q1⁻¹)` and
/// `Uhat⁻¹ = diag(P2⁻¹, Q1)·Uhat₀·diag(P1⁻¹, Q2)` from the rank
/// factorizations `U = P1·(I ⊕ 0)·P2`, `V = Q1·(I ⊕ 0)·Q2`.
pub fn synth_mc_with(u: &Matrix, v: &Matrix, rank_tol: RankTol, tol: f64) -> Result<McWitness> {
    if !u.is_square() || !v.is_square() {
        return Err(Error::Shape("U and V must be square".into()));
    }
    let (n, m) = (u.nrows(), v.nrows());
    let fu = canonical_rank_factorization(u, rank_tol)?;
    let fv = canonical_rank_factorization(v, rank_tol)?;
    let (ku, kv) = (n - fu.rank, m - fv.rank);
    if ku != kv {
        return Err(Error::Infeasible {
            nullity_u: ku,
            nullity_v: kv,
        });
    }
    let u0 = null_pairing_coupling(n, m, ku);
    let p1_inv = inverse_with(&fu.p1, RankTol::Standard, "P1")?.inv;
    let q1_inv = inverse_with(&fv.p1, RankTol::Standard, "Q1")?.inv;
    // P2 and Q2 are unitary.
    let p2_inv = fu.p2.adjoint();
    let q2_inv = fv.p2.adjoint();

    let uhat = direct_sum(&fu.p1, &q2_inv) * &u0 * direct_sum(&fu.p2, &q1_inv);
    let uhat_inv = direct_sum(&p2_inv, &fv.p1) * &u0 * direct_sum(&p1_inv, &fv.p2);
    let w = McWitness {
        uhat,
        uhat_inv,
        u: u.clone(),
        v: v.clone(),
    };
    verify_mc(&w, tol)?.into_result()?;
    Ok(w)
}

/// Random Schur-coupling witness with block sizes in `1..=max_block`:
/// `A`, `D` have condition at most `cond_bound` with singular values in
/// `[cond_bound^{-1/2}, cond_bound^{1/2}]`, so neither the blocks nor their
/// inverses dominate; `B`, `C` are Gaussian scaled to unit-order norm.
pub fn random_sc_witness<R: Rng + ?Sized>(
    max_block: usize,
    cond_bound: f64,
    rng: &mut R,
) -> Result<ScWitness> {
    let n = rng.random_range(1..=max_block);
    let m = rng.random_range(1..=max_block);
    let centre = c(cond_bound.sqrt());
    let a = random_invertible(n, cond_bound, rng) * centre;
    let d = random_invertible(m, cond_bound, rng) * centre;
    let scale = 1.0 / ((n + m) as f64).sqrt();
    let b = gaussian(n, m, rng) * c(scale);
    let cc = gaussian(m, n, rng) * c(scale);
    ScWitness::from_block(Block2x2::new(a, b, cc, d)?)
}

/// `true` iff `U` and `V` have equal nullity, the finite-dimensional
/// criterion for equivalence after extension.
pub fn eae_feasible(u: &Matrix, v: &Matrix, tol: RankTol) -> Result<bool> {
    Ok(crate::numkernel::nullity(u, tol)? == crate::numkernel::nullity(v, tol)?)
}
