//! Symbols on the unit circle and finite sections of their multiplication
//! operators.
//!
//! With the Fourier basis split into `K` (indices `−1, −2, …, −N`) and `H`
//! (indices `0, 1, …, N`), multiplication by `f` has the four blocks
//!
//! ```text
//! T[i, j]  = f̂(i − j)        H → H, (N+1)×(N+1)
//! H[i, j]  = f̂(i + j + 1)    K → H, (N+1)×N
//! Ht[i, j] = f̂(−(i + j + 1)) H → K, N×(N+1)
//! Tt[i, j] = f̂(j − i)        K → K, N×N
//! ```
//!
//! For a symbol that does not vanish on the circle the reordered matrices
//! `[[Ht_f, Tt_f], [T_f, H_f]]` and `[[H_g, T_g], [Tt_g, Ht_g]]` with
//! `g = 1/f` are mutually inverse up to truncation, which
//! [`mc_residual_hankel`] measures on the rows where no truncation occurs.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::blockops::Block2x2;
use crate::error::{Error, Result};
use crate::numkernel::{self, identity, rel_residual, Matrix, C64};
use crate::residual::ResidualReport;

/// Singular values below `ZERO_RTOL · σ_max` count as zero.
pub const ZERO_RTOL: f64 = 1e-12;

/// Coefficients `f̂(offset), f̂(offset + 1), …`; zero elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolFc {
    pub offset: i64,
    pub coeffs: Vec<C64>,
}

impl SymbolFc {
    pub fn new(offset: i64, coeffs: Vec<C64>) -> Self {
        SymbolFc { offset, coeffs }
    }

    pub fn from_real(offset: i64, coeffs: &[f64]) -> Self {
        SymbolFc::new(offset, coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn coeff(&self, j: i64) -> C64 {
        let i = j - self.offset;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Inclusive index range `[j_min, j_max]`; `None` when empty.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.coeffs.iter().position(|z| z.norm() != 0.0)?;
        let last = self.coeffs.iter().rposition(|z| z.norm() != 0.0)?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// `Σ |f̂(j)|`.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a * C64::from_polar(1.0, (self.offset + i as i64) as f64 * t))
            .sum()
    }

    /// Restriction to indices in `[lo, hi]`.
    pub fn truncate(&self, lo: i64, hi: i64) -> SymbolFc {
        if hi < lo {
            return SymbolFc::new(lo, Vec::new());
        }
        SymbolFc::new(lo, (lo..=hi).map(|j| self.coeff(j)).collect())
    }

    /// Drops leading and trailing coefficients below `threshold` in modulus.
    pub fn trim(&self, threshold: f64) -> SymbolFc {
        let keep = |z: &C64| z.norm() >= threshold;
        match (self.coeffs.iter().position(keep), self.coeffs.iter().rposition(keep)) {
            (Some(a), Some(b)) => SymbolFc::new(self.offset + a as i64, self.coeffs[a..=b].to_vec()),
            _ => SymbolFc::new(0, Vec::new()),
        }
    }

    /// Coefficients of `j ≥ 0` only (the analytic part).
    pub fn analytic_part(&self) -> SymbolFc {
        match self.support() {
            Some((_, hi)) if hi >= 0 => self.truncate(0, hi),
            _ => SymbolFc::new(0, Vec::new()),
        }
    }

    /// Coefficients with `j` replaced by `−j`.
    pub fn reflect(&self) -> SymbolFc {
        let n = self.coeffs.len() as i64;
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        SymbolFc::new(-(self.offset + n - 1), coeffs)
    }
}

/// Direct (non-FFT) convolution of coefficient sequences.
pub fn convolve(a: &SymbolFc, b: &SymbolFc) -> SymbolFc {
    if a.coeffs.is_empty() || b.coeffs.is_empty() {
        return SymbolFc::new(0, Vec::new());
    }
    let mut out = vec![C64::new(0.0, 0.0); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        for (j, &y) in b.coeffs.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    SymbolFc::new(a.offset + b.offset, out)
}

/// `‖ĉ − δ₀‖₁` for a coefficient sequence `c`.
pub fn delta_residual(c: &SymbolFc) -> f64 {
    let one = C64::new(1.0, 0.0);
    let at_zero = (c.coeff(0) - one).norm();
    let rest: f64 = c
        .coeffs
        .iter()
        .enumerate()
        .filter(|(i, _)| c.offset + *i as i64 != 0)
        .map(|(_, z)| z.norm())
        .sum();
    at_zero + rest
}

/// Values of `f` at `e^{2πik/grid}`, `k = 0..grid`.
fn sample(f: &SymbolFc, grid: usize) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); grid];
    let g = grid as i64;
    for (i, &a) in f.coeffs.iter().enumerate() {
        buf[(f.offset + i as i64).rem_euclid(g) as usize] += a;
    }
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    buf
}

/// Fourier coefficients `j ∈ [−grid/2, grid/2)` of sampled values.
fn coefficients(mut values: Vec<C64>) -> SymbolFc {
    let grid = values.len();
    FftPlanner::new().plan_fft_forward(grid).process(&mut values);
    let scale = 1.0 / grid as f64;
    let half = (grid / 2) as i64;
    let coeffs = (-half..grid as i64 - half)
        .map(|j| values[j.rem_euclid(grid as i64) as usize] * scale)
        .collect();
    SymbolFc::new(-half, coeffs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolInverse {
    pub inverse: SymbolFc,
    pub grid: usize,
    pub min_modulus: f64,
    pub winding_number: i64,
    /// `‖(f * inverse)̂ − δ₀‖₁`, by direct convolution.
    pub convolution_residual: f64,
}

/// Relative modulus below which trailing coefficients of `1/f` are dropped.
pub const TAIL_RTOL: f64 = 1e-15;

/// Coefficients of `1/f` by sampling on a power-of-two grid of at least
/// `max(min_grid, 4·len(f))` points.
pub fn invert_symbol(f: &SymbolFc, min_grid: usize, tol: f64) -> Result<SymbolInverse> {
    if f.coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("symbol coefficients".into()));
    }
    let (lo, hi) = f.support().ok_or(Error::SymbolVanishes { min_modulus: 0.0, tol })?;
    let width = (hi - lo + 1) as usize;
    let grid = min_grid.max(4 * width).max(8).next_power_of_two();
    let values = sample(f, grid);
    let min_modulus = values.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if !(min_modulus > tol) {
        return Err(Error::SymbolVanishes { min_modulus, tol });
    }
    let winding: f64 = (0..grid)
        .map(|k| (values[(k + 1) % grid] / values[k]).arg())
        .sum::<f64>()
        / (2.0 * PI);

    let inv_values = values.iter().map(|z| z.inv()).collect();
    let raw = coefficients(inv_values);
    let peak = raw.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let inverse = raw.trim(TAIL_RTOL * peak);
    let convolution_residual = delta_residual(&convolve(f, &inverse));
    Ok(SymbolInverse {
        inverse,
        grid,
        min_modulus,
        winding_number: winding.round() as i64,
        convolution_residual,
    })
}

// ------------------------------------------------------------------ sections

#[derive(Clone, Debug, PartialEq)]
pub struct SectionBlocks {
    pub n: usize,
    /// `f̂(i − j)`, indices `0..=N`.
    pub t: Matrix,
    /// `f̂(i + j + 1)`.
    pub h: Matrix,
    /// `f̂(−(i + j + 1))`.
    pub htilde: Matrix,
    /// `f̂(j − i)`.
    pub ttilde: Matrix,
}

pub fn build_sections(f: &SymbolFc, n: usize) -> Result<SectionBlocks> {
    if n == 0 {
        return Err(Error::InvalidArgument("section size N must be at least 1".into()));
    }
    let (ni, nn) = (n as i64 + 1, n as i64);
    let entry = |rows: i64, cols: i64, idx: &dyn Fn(i64, i64) -> i64| {
        Matrix::from_fn(rows as usize, cols as usize, |i, j| f.coeff(idx(i as i64, j as i64)))
    };
    Ok(SectionBlocks {
        n,
        t: entry(ni, ni, &|i, j| i - j),
        h: entry(ni, nn, &|i, j| i + j + 1),
        htilde: entry(nn, ni, &|i, j| -(i + j + 1)),
        ttilde: entry(nn, nn, &|i, j| j - i),
    })
}

/// `f̂(a − b)` for `a, b ∈ [−N, N]`, in increasing index order.
pub fn toeplitz_section(f: &SymbolFc, n: usize) -> Matrix {
    let size = 2 * n + 1;
    Matrix::from_fn(size, size, |a, b| f.coeff(a as i64 - b as i64))
}

/// Position of Fourier index `j` in the `(K, H)` ordering `−1..−N, 0..N`.
fn kh_position(j: i64, n: usize) -> usize {
    if j < 0 {
        (-j - 1) as usize
    } else {
        n + j as usize
    }
}

impl SectionBlocks {
    /// `[[Tt, Ht], [H, T]]` on `K ⊕ H`.
    pub fn kh_matrix(&self) -> Matrix {
        Block2x2 {
            a11: self.ttilde.clone(),
            a12: self.htilde.clone(),
            a21: self.h.clone(),
            a22: self.t.clone(),
        }
        .assemble()
    }

    /// The full section in increasing index order `−N..N`.
    pub fn reassemble(&self) -> Matrix {
        let kh = self.kh_matrix();
        let n = self.n;
        let size = 2 * n + 1;
        Matrix::from_fn(size, size, |a, b| {
            let (ja, jb) = (a as i64 - n as i64, b as i64 - n as i64);
            kh[(kh_position(ja, n), kh_position(jb, n))]
        })
    }

    /// `[[Ht, Tt], [T, H]]`: rows `K ⊕ H`, columns `H ⊕ K`.
    pub fn reordered(&self) -> Matrix {
        Block2x2 {
            a11: self.htilde.clone(),
            a12: self.ttilde.clone(),
            a21: self.t.clone(),
            a22: self.h.clone(),
        }
        .assemble()
    }

    /// `[[H, T], [Tt, Ht]]`: rows `H ⊕ K`, columns `K ⊕ H`.
    pub fn reordered_inverse_layout(&self) -> Matrix {
        Block2x2 {
            a11: self.h.clone(),
            a12: self.t.clone(),
            a21: self.ttilde.clone(),
            a22: self.htilde.clone(),
        }
        .assemble()
    }
}

/// `[[Ht_f, Tt_f], [T_f, H_f]] · [[H_g, T_g], [Tt_g, Ht_g]]` against the
/// identity on the rows `j ∈ [−N + j_max, N + j_min]` of `K ⊕ H`, where
/// `[j_min, j_max]` is the support of `f` and `g` is `1/f` truncated to
/// `|j| ≤ N`.
pub fn mc_residual_hankel(f: &SymbolFc, n: usize, min_grid: usize) -> Result<ResidualReport> {
    let inv = invert_symbol(f, min_grid, 1e-12)?;
    let g = inv.inverse.truncate(-(n as i64), n as i64);
    let sf = build_sections(f, n)?;
    let sg = build_sections(&g, n)?;
    let product = sf.reordered() * sg.reordered_inverse_layout();

    let (lo, hi) = f.support().expect("invert_symbol rejects the zero symbol");
    let rows: Vec<usize> = (-(n as i64) + hi..=n as i64 + lo)
        .map(|j| kh_position(j, n))
        .collect();
    let size = 2 * n + 1;
    let pick = |a: &Matrix| Matrix::from_fn(rows.len(), size, |i, j| a[(rows[i], j)]);
    let mut report = ResidualReport::new("finite-section coupling", f64::INFINITY);
    report.push(
        "interior rows of section product = I",
        if rows.is_empty() {
            f64::NAN
        } else {
            rel_residual(&pick(&product), &pick(&identity(size)))
        },
    );
    report.note("N", n as f64);
    report.note("interior rows", rows.len() as f64);
    report.note("inverse convolution residual", inv.convolution_residual);
    report.note("min |f|", inv.min_modulus);
    report.note("winding number", inv.winding_number as f64);
    Ok(report)
}

pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    numkernel::singular_values(a)
}

/// Number of singular values above `ZERO_RTOL · σ_max`.
pub fn numerical_rank(sv: &[f64]) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > ZERO_RTOL * smax).count()
}

// ------------------------------------------------------- shift comparability

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `α_n / β_{n+k}`.
    AlphaOverBeta,
    /// `β_n / α_{n+k}`.
    BetaOverAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftConstant {
    pub orientation: Orientation,
    pub k: usize,
    /// `min_n min(ratio, 1/ratio)`; `None` when no index is comparable.
    pub c: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftComparabilityReport {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub per_shift: Vec<ShiftConstant>,
    /// Best `(orientation, k, c)`; `None` means incomparable at this
    /// truncation.
    pub verdict: Option<ShiftConstant>,
}

fn is_zero(x: f64, smax: f64) -> bool {
    !(x > ZERO_RTOL * smax)
}

/// Best constant for `num_n / den_{n+k}` over the overlap. Indices where both
/// entries are numerically zero are skipped; a zero against a nonzero gives 0.
fn shift_constant(num: &[f64], den: &[f64], k: usize) -> Option<f64> {
    let (nmax, dmax) = (
        num.first().copied().unwrap_or(0.0),
        den.first().copied().unwrap_or(0.0),
    );
    let mut best: Option<f64> = None;
    for (n, &a) in num.iter().enumerate() {
        let Some(&b) = den.get(n + k) else { break };
        let c = match (is_zero(a, nmax), is_zero(b, dmax)) {
            (true, true) => continue,
            (false, false) => (a / b).min(b / a),
            _ => 0.0,
        };
        best = Some(best.map_or(c, |x: f64| x.min(c)));
    }
    best
}

pub fn shift_comparability(alpha: &[f64], beta: &[f64], k_max: usize) -> Result<ShiftComparabilityReport> {
    for (name, s) in [("alpha", alpha), ("beta", beta)] {
        if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || s.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be a non-increasing sequence of non-negative numbers"
            )));
        }
    }
    let mut per_shift = Vec::new();
    for k in 0..=k_max {
        for orientation in [Orientation::AlphaOverBeta, Orientation::BetaOverAlpha] {
            let c = match orientation {
                Orientation::AlphaOverBeta => shift_constant(alpha, beta, k),
                Orientation::BetaOverAlpha => shift_constant(beta, alpha, k),
            };
            per_shift.push(ShiftConstant { orientation, k, c });
        }
    }
    // Strict improvement only, so ties keep the smaller shift.
    let verdict = per_shift
        .iter()
        .filter(|s| s.c.is_some_and(|c| c > 0.0))
        .fold(None::<ShiftConstant>, |best, s| match best {
            Some(b) if b.c >= s.c => Some(b),
            _ => Some(*s),
        });
    Ok(ShiftComparabilityReport {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        per_shift,
        verdict,
    })
}

// ---------------------------------------------------------- summability

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovQuadrature {
    /// Midpoint nodes on `[−π, π]`; an even count keeps `t = 0` off the grid.
    pub t_points: usize,
    /// Sample points for the `L^p` norm in `s`.
    pub s_points: usize,
}

impl Default for BesovQuadrature {
    fn default() -> Self {
        BesovQuadrature {
            t_points: 256,
            s_points: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovEstimate {
    pub smoothness: f64,
    pub difference_order: u32,
    pub t_points: usize,
    pub s_points: usize,
    /// `∫ |t|^{−1−αp} ‖Δ_t^n g‖_p^p dt` by the midpoint rule.
    pub integral: f64,
    /// `integral^{1/p}`.
    pub seminorm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub p: f64,
    /// `Σ_{n ≤ i} σ_n^p`.
    pub partial_sums: Vec<f64>,
    pub total: f64,
    /// Share of the total contributed by the last quarter of the sequence.
    pub tail_share: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub besov: Option<BesovEstimate>,
}

pub fn spectral_summability(
    sv: &[f64],
    p: f64,
    besov: Option<(&SymbolFc, BesovQuadrature)>,
) -> Result<SummabilityReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("p must be a finite number >= 1, got {p}")));
    }
    let partial_sums: Vec<f64> = sv
        .iter()
        .scan(0.0, |acc, s| {
            *acc += s.powf(p);
            Some(*acc)
        })
        .collect();
    let total = partial_sums.last().copied().unwrap_or(0.0);
    let cut = sv.len() - sv.len() / 4;
    let head = if cut == 0 { 0.0 } else { partial_sums[cut - 1] };
    let tail_share = if total > 0.0 { (total - head) / total } else { 0.0 };
    let besov = besov.map(|(f, q)| besov_estimate(&f.analytic_part(), p, q)).transpose()?;
    Ok(SummabilityReport {
        p,
        partial_sums,
        total,
        tail_share,
        besov,
    })
}

/// Midpoint-rule estimate of the Besov `B_p^{1/p}` seminorm of `g`, using
/// `Δ_t g(s) = g(s + t) − g(s)` iterated `n = ⌊1/p⌋ + 1` times.
pub fn besov_estimate(g: &SymbolFc, p: f64, q: BesovQuadrature) -> Result<BesovEstimate> {
    if q.t_points == 0 || q.s_points == 0 {
        return Err(Error::InvalidArgument("quadrature grids must be non-empty".into()));
    }
    let alpha = 1.0 / p;
    let order = alpha.floor() as u32 + 1;
    let width = g.coeffs.len();
    let s_points = q.s_points.max(4 * width).max(8).next_power_of_two();
    let dt = 2.0 * PI / q.t_points as f64;
    let mut integral = 0.0;
    for i in 0..q.t_points {
        let t = -PI + (i as f64 + 0.5) * dt;
        if t == 0.0 {
            continue;
        }
        // Δ_t^n acts on e^{ijs} as multiplication by (e^{ijt} − 1)^n.
        let diff = SymbolFc::new(
            g.offset,
            g.coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| {
                    let j = (g.offset + k as i64) as f64;
                    a * (C64::from_polar(1.0, j * t) - 1.0).powu(order)
                })
                .collect(),
        );
        let values = sample(&diff, s_points);
        let lp: f64 = values.iter().map(|z| z.norm().powf(p)).sum::<f64>() / s_points as f64;
        integral += t.abs().powf(-1.0 - alpha * p) * lp * dt;
    }
    Ok(BesovEstimate {
        smoothness: alpha,
        difference_order: order,
        t_points: q.t_points,
        s_points,
        integral,
        seminorm: integral.powf(1.0 / p),
    })
}

// ------------------------------------------------------------ experiment

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelExperiment {
    pub symbol: SymbolFc,
    pub inverse: SymbolInverse,
    pub n: usize,
    pub p: f64,
    pub sv_f: Vec<f64>,
    pub sv_inv: Vec<f64>,
    pub rank_f: usize,
    pub rank_inv: usize,
    pub coupling: ResidualReport,
    pub comparability: ShiftComparabilityReport,
    pub summability_f: SummabilityReport,
    pub summability_inv: SummabilityReport,
}

/// Hankel sections of `f` and `1/f` at size `N`, their singular values,
/// the section coupling residual, shift comparability and summability.
pub fn hankel_experiment(
    f: &SymbolFc,
    n: usize,
    p: f64,
    k_max: usize,
    min_grid: usize,
    besov: Option<BesovQuadrature>,
) -> Result<HankelExperiment> {
    let inverse = invert_symbol(f, min_grid, 1e-12)?;
    let sv_f = singular_values(&build_sections(f, n)?.h)?;
    let sv_inv = singular_values(&build_sections(&inverse.inverse, n)?.h)?;
    let coupling = mc_residual_hankel(f, n, min_grid)?;
    let comparability = shift_comparability(&sv_f, &sv_inv, k_max)?;
    let summability_f = spectral_summability(&sv_f, p, besov.map(|q| (f, q)))?;
    let summability_inv = spectral_summability(&sv_inv, p, besov.map(|q| (&inverse.inverse, q)))?;
    Ok(HankelExperiment {
        symbol: f.clone(),
        rank_f: numerical_rank(&sv_f),
        rank_inv: numerical_rank(&sv_inv),
        inverse,
        n,
        p,
        sv_f,
        sv_inv,
        coupling,
        comparability,
        summability_f,
        summability_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{c, zeros};

    fn two_plus_z() -> SymbolFc {
        SymbolFc::from_real(0, &[2.0, 1.0])
    }

    fn geometric(j: i64) -> C64 {
        if j < 0 {
            c(0.0)
        } else {
            c(0.5 * (-0.5f64).powi(j as i32))
        }
    }

    #[test]
    fn invert_constant() {
        let inv = invert_symbol(&SymbolFc::from_real(0, &[2.0]), 64, 1e-12).unwrap();
        assert_eq!(inv.inverse.support(), Some((0, 0)));
        assert!((inv.inverse.coeff(0) - c(0.5)).norm() < 1e-15);
        assert_eq!(inv.winding_number, 0);
    }

    #[test]
    fn invert_two_plus_z_matches_geometric_series() {
        let inv = invert_symbol(&two_plus_z(), 256, 1e-12).unwrap();
        let err: f64 = (-60..=60).map(|j| (inv.inverse.coeff(j) - geometric(j)).norm()).sum();
        assert!(err < 1e-13, "{err}");
        assert!(inv.convolution_residual < 1e-13);
        assert!((inv.min_modulus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invert_z_concentrates_at_minus_one() {
        let inv = invert_symbol(&SymbolFc::from_real(1, &[1.0]), 16, 1e-12).unwrap();
        assert_eq!(inv.inverse.support(), Some((-1, -1)));
        assert!((inv.inverse.coeff(-1) - c(1.0)).norm() < 1e-15);
        assert_eq!(inv.winding_number, 1);
    }

    #[test]
    fn invert_rejects_vanishing_symbol() {
        // 1 + z vanishes at z = −1, which lies on every even grid.
        let err = invert_symbol(&SymbolFc::from_real(0, &[1.0, 1.0]), 64, 1e-12).unwrap_err();
        assert!(matches!(err, Error::SymbolVanishes { .. }));
    }

    #[test]
    fn sections_examples() {
        let s = build_sections(&SymbolFc::from_real(0, &[1.0]), 3).unwrap();
        assert_eq!(s.t, identity(4));
        assert_eq!(s.ttilde, identity(3));
        assert!(s.h.iter().all(|z| z.norm() == 0.0));
        assert!(s.htilde.iter().all(|z| z.norm() == 0.0));

        let s = build_sections(&two_plus_z(), 2).unwrap();
        assert_eq!(s.h[(0, 0)], c(1.0));
        assert_eq!(s.h.iter().filter(|z| z.norm() != 0.0).count(), 1);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 2.0 } else if i == j + 1 { 1.0 } else { 0.0 };
                assert_eq!(s.t[(i, j)], c(want));
            }
        }

        let s = build_sections(&SymbolFc::from_real(-1, &[1.0, 0.0, 1.0]), 4).unwrap();
        assert_eq!(numerical_rank(&singular_values(&s.h).unwrap()), 1);
        assert_eq!(numerical_rank(&singular_values(&s.htilde).unwrap()), 1);
    }

    #[test]
    fn reassembled_sections_equal_toeplitz_section() {
        let f = SymbolFc::new(-2, vec![C64::new(0.3, 1.0), c(-1.0), c(4.0), C64::new(0.0, 2.0), c(0.5)]);
        for n in [1, 2, 5] {
            let s = build_sections(&f, n).unwrap();
            assert_eq!(s.reassemble(), toeplitz_section(&f, n));
        }
    }

    #[test]
    fn coupling_residual_constant_and_decay() {
        let r = mc_residual_hankel(&SymbolFc::from_real(0, &[2.0]), 5, 64).unwrap();
        assert_eq!(r.max_residual(), 0.0);

        let f = two_plus_z();
        let r20 = mc_residual_hankel(&f, 20, 1024).unwrap().max_residual();
        let r30 = mc_residual_hankel(&f, 30, 1024).unwrap().max_residual();
        let r40 = mc_residual_hankel(&f, 40, 1024).unwrap().max_residual();
        assert!(r30 <= 1e-6);
        assert!(r40 < r30 && r30 < r20);
    }

    #[test]
    fn hankel_singular_values_for_two_plus_z() {
        let f = two_plus_z();
        let sv = singular_values(&build_sections(&f, 30).unwrap().h).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-15);
        assert_eq!(numerical_rank(&sv), 1);
        let g = invert_symbol(&f, 1024, 1e-12).unwrap().inverse;
        let sv = singular_values(&build_sections(&g, 30).unwrap().h).unwrap();
        assert!((sv[0] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(numerical_rank(&sv), 1);
        assert!(singular_values(&zeros(3, 2)).unwrap().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn shift_comparability_examples() {
        let a = [1.0, 0.5, 0.25];
        let r = shift_comparability(&a, &a, 3).unwrap();
        let v = r.verdict.unwrap();
        assert_eq!((v.k, v.c), (0, Some(1.0)));

        let r = shift_comparability(&[1.0, 0.0, 0.0], &[1.0 / 3.0, 0.0, 0.0], 2).unwrap();
        let v = r.verdict.unwrap();
        assert_eq!(v.k, 0);
        assert!((v.c.unwrap() - 1.0 / 3.0).abs() < 1e-15);

        let alpha = [1.0, 0.5, 0.25, 0.125];
        let beta = [0.5, 0.25, 0.125];
        let v = shift_comparability(&alpha, &beta, 2).unwrap().verdict.unwrap();
        assert_eq!((v.k, v.orientation, v.c), (1, Orientation::BetaOverAlpha, Some(1.0)));
    }

    #[test]
    fn shift_comparability_incomparable_and_invalid() {
        let r = shift_comparability(&[0.0, 0.0], &[0.0], 1).unwrap();
        assert!(r.verdict.is_none());
        assert!(shift_comparability(&[0.1, 0.2], &[0.1], 0).is_err());
    }

    #[test]
    fn summability_examples() {
        let r = spectral_summability(&[1.0, 0.0, 0.0], 1.0, None).unwrap();
        assert_eq!(r.total, 1.0);
        let r = spectral_summability(&[0.0; 4], 2.0, None).unwrap();
        assert_eq!(r.total, 0.0);
        assert!(spectral_summability(&[1.0], 0.5, None).is_err());

        let q = BesovQuadrature::default();
        let r = spectral_summability(&[1.0], 2.0, Some((&two_plus_z(), q))).unwrap();
        let b = r.besov.unwrap();
        assert_eq!(b.difference_order, 1);
        assert!(b.integral.is_finite() && b.integral > 0.0);
    }

    #[test]
    fn besov_of_constant_vanishes() {
        let b = besov_estimate(&SymbolFc::from_real(0, &[3.0]), 1.0, BesovQuadrature::default()).unwrap();
        assert_eq!(b.integral, 0.0);
        assert_eq!(b.difference_order, 2);
    }

    #[test]
    fn convolution_and_reflection() {
        let f = two_plus_z();
        let sq = convolve(&f, &f);
        assert_eq!(sq, SymbolFc::from_real(0, &[4.0, 4.0, 1.0]));
        assert_eq!(f.reflect(), SymbolFc::from_real(-1, &[1.0, 2.0]));
        assert_eq!(delta_residual(&SymbolFc::from_real(0, &[1.0])), 0.0);
    }
}
