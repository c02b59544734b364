//! From a special-form witness to a Schur coupling.
//!
//! The stages split the corners `F22` and `E11` into invertible parts and
//! zero parts, rewrite `U` and `V` in the adapted bases, normalize the
//! witness so the off-corner blocks become exact one-sided inverses, and
//! assemble first an equivalence after extension with small extension
//! spaces, then a one-sided one, and finally a block matrix whose Schur
//! complements are `U` and `V`.
//!
//! Rank decisions on witness blocks use the cut-off
//! `rank_rtol · max(1, ‖block‖)`; decisions on `U` and `V` use
//! `rank_rtol · σ_max`.

use serde::Serialize;

use crate::blockops::{subspace_maps, Block2x2};
use crate::error::{Error, Result};
use crate::instances::synth_mc_with;
use crate::numkernel::{
    direct_sum, hstack, identity, inverse_with, norm2, nullity, rank_of, rel_residual,
    subspaces_with, zeros, Matrix, RankTol, SubspaceBasis,
};
use crate::relations::{
    mc_to_eae_special, sc_from_eaoe, verify_eae, verify_eae_special, verify_eaoe, verify_sc,
    EaeSpecialWitness, EaeWitness, EaoeWitness, ExtendedSide, McWitness, ScWitness,
};
use crate::residual::ResidualReport;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Per-stage relative residual threshold.
    pub tol: f64,
    /// Relative rank cut-off.
    pub rank_rtol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tol: crate::DEFAULT_TOL,
            rank_rtol: 1e-9,
        }
    }
}

impl PipelineConfig {
    fn block_tol(&self, a: &Matrix) -> RankTol {
        RankTol::Absolute(self.rank_rtol * norm2(a).max(1.0))
    }
}

// ------------------------------------------------------------ Fredholm data

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CornerIndex {
    pub rank: usize,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub index: i64,
}

impl CornerIndex {
    fn of(a: &Matrix, tol: RankTol) -> Result<Self> {
        let rank = rank_of(a, tol)?;
        let kernel_dim = a.ncols() - rank;
        let cokernel_dim = a.nrows() - rank;
        Ok(CornerIndex {
            rank,
            kernel_dim,
            cokernel_dim,
            index: kernel_dim as i64 - cokernel_dim as i64,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FredholmReport {
    pub f11: CornerIndex,
    pub f22: CornerIndex,
    pub e11: CornerIndex,
    pub ehat11: CornerIndex,
    /// `index(F22) > 0`: the one-sided extension has to be applied to `U`.
    pub extend_u: bool,
}

pub fn fredholm_report(w: &EaeSpecialWitness, cfg: &PipelineConfig) -> Result<FredholmReport> {
    let corner = |a: Matrix| CornerIndex::of(&a, cfg.block_tol(&a));
    let rep = FredholmReport {
        f11: corner(w.f11())?,
        f22: corner(w.f22())?,
        e11: corner(w.e11())?,
        ehat11: corner(w.ehat11())?,
        extend_u: false,
    };
    let expected = w.m() as i64 - w.n() as i64;
    if rep.f11.index != -rep.f22.index
        || rep.e11.index != -rep.ehat11.index
        || rep.f22.index != expected
        || rep.e11.index != expected
    {
        return Err(Error::Inconsistent(format!(
            "index identities violated: F11 {}, F22 {}, E11 {}, Ehat11 {}",
            rep.f11.index, rep.f22.index, rep.e11.index, rep.ehat11.index
        )));
    }
    Ok(FredholmReport {
        extend_u: rep.f22.index > 0,
        ..rep
    })
}

// ------------------------------------------------------ corner decomposition

/// Orthonormal splitting of a corner `a: Y → X`: domain
/// `coimage ⊕ kernel`, codomain `image ⊕ cokernel`, and the invertible
/// compression `restricted: coimage → image`.
#[derive(Clone, Debug)]
pub struct CornerSplit {
    pub coimage: SubspaceBasis,
    pub kernel: SubspaceBasis,
    pub image: SubspaceBasis,
    pub cokernel: SubspaceBasis,
    pub restricted: Matrix,
    pub restricted_inv: Matrix,
    pub condition: f64,
}

impl CornerSplit {
    fn of(a: &Matrix, tol: RankTol, what: &str) -> Result<Self> {
        let s = subspaces_with(a, tol)?;
        let inv = inverse_with(&s.restricted, RankTol::Standard, what)?;
        Ok(CornerSplit {
            coimage: s.kernel_complement,
            kernel: s.kernel,
            image: s.range,
            cokernel: s.range_complement,
            restricted: s.restricted,
            restricted_inv: inv.inv,
            condition: inv.condition,
        })
    }

    pub fn rank(&self) -> usize {
        self.restricted.nrows()
    }

    /// Domain basis `[coimage | kernel]`.
    pub fn domain(&self) -> Matrix {
        hstack(&[&self.coimage.basis, &self.kernel.basis])
    }

    /// Codomain basis `[image | cokernel]`.
    pub fn codomain(&self) -> Matrix {
        hstack(&[&self.image.basis, &self.cokernel.basis])
    }

    /// `a` in the adapted bases minus `restricted ⊕ 0`.
    fn block_residual(&self, a: &Matrix) -> f64 {
        let adapted = self.codomain().adjoint() * a * self.domain();
        let target = direct_sum(
            &self.restricted,
            &zeros(self.cokernel.dim(), self.kernel.dim()),
        );
        rel_residual(&adapted, &target)
    }
}

/// `F22` splits as `K2 ⊕ Ker F22 → Im F22 ⊕ H2`, `E11` as
/// `F1 ⊕ Ker E11 → Im E11 ⊕ G1`.
#[derive(Clone, Debug)]
pub struct CornerDecomposition {
    pub f22: CornerSplit,
    pub e11: CornerSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CornerDims {
    pub rank_f22: usize,
    pub ker_f22: usize,
    pub h2: usize,
    pub rank_e11: usize,
    pub ker_e11: usize,
    pub g1: usize,
}

impl CornerDecomposition {
    pub fn dims(&self) -> CornerDims {
        CornerDims {
            rank_f22: self.f22.rank(),
            ker_f22: self.f22.kernel.dim(),
            h2: self.f22.cokernel.dim(),
            rank_e11: self.e11.rank(),
            ker_e11: self.e11.kernel.dim(),
            g1: self.e11.cokernel.dim(),
        }
    }

    /// `F22⁺ = J_K2 · F22′⁻¹ · Π_ImF22`.
    pub fn f22_pinv(&self) -> Matrix {
        &self.f22.coimage.basis * &self.f22.restricted_inv * self.f22.image.basis.adjoint()
    }
}

pub fn decompose_corners(
    w: &EaeSpecialWitness,
    cfg: &PipelineConfig,
) -> Result<(CornerDecomposition, ResidualReport)> {
    let (f22, e11) = (w.f22(), w.e11());
    let d = CornerDecomposition {
        f22: CornerSplit::of(&f22, cfg.block_tol(&f22), "F22'")?,
        e11: CornerSplit::of(&e11, cfg.block_tol(&e11), "E11'")?,
    };
    let mut report = ResidualReport::new("corner decomposition", cfg.tol);
    report.push("F22 = F22' + 0", d.f22.block_residual(&f22));
    report.push("E11 = E11' + 0", d.e11.block_residual(&e11));
    report.note("cond(F22')", d.f22.condition);
    report.note("cond(E11')", d.e11.condition);
    Ok((d, report))
}

// ------------------------------------------------------------ reduced blocks

/// `U` in `Im F22 ⊕ H2 → Im E11 ⊕ G1` and `V` in `K2 ⊕ Ker F22 → F1 ⊕ Ker E11`,
/// with `left_inv_v22 = Π_KerF22·E21·J_KerE11` and
/// `right_inv_u22 = Π_H2·Ê21·J_G1`.
#[derive(Clone, Debug)]
pub struct ReducedBlocks {
    pub u11: Matrix,
    pub u12: Matrix,
    pub u22: Matrix,
    pub v11: Matrix,
    pub v21: Matrix,
    pub v22: Matrix,
    pub left_inv_v22: Matrix,
    pub right_inv_u22: Matrix,
}

pub fn derive_uv_blocks(
    w: &EaeSpecialWitness,
    d: &CornerDecomposition,
    tol: f64,
) -> Result<(ReducedBlocks, ResidualReport)> {
    let ub = d.e11.codomain().adjoint() * &w.u * d.f22.codomain();
    let ub = Block2x2::split(&ub, d.e11.rank(), d.f22.rank())?;
    let vb = d.e11.domain().adjoint() * &w.v * d.f22.domain();
    let vb = Block2x2::split(&vb, d.e11.rank(), d.f22.rank())?;

    let ker_f22 = subspace_maps(&d.f22.kernel)?;
    let ker_e11 = subspace_maps(&d.e11.kernel)?;
    let h2 = subspace_maps(&d.f22.cokernel)?;
    let g1 = subspace_maps(&d.e11.cokernel)?;
    let left_inv_v22 = &ker_f22.pi * w.e21() * &ker_e11.j;
    let right_inv_u22 = &h2.pi * w.ehat21() * &g1.j;

    let unorm = norm2(&w.u).max(1.0);
    let vnorm = norm2(&w.v).max(1.0);
    let mut report = ResidualReport::new("reduced blocks", tol);
    report.push("U21 = 0", norm2(&ub.a21) / unorm);
    report.push("V12 = 0", norm2(&vb.a12) / vnorm);
    report.push(
        "E11' V11 = -U11 F22'",
        rel_residual(
            &-(&ub.a11 * &d.f22.restricted),
            &(&d.e11.restricted * &vb.a11),
        ),
    );
    report.push(
        "L V22 = I",
        rel_residual(&(&left_inv_v22 * &vb.a22), &identity(vb.a22.ncols())),
    );
    report.push(
        "U22 R = I",
        rel_residual(&(&ub.a22 * &right_inv_u22), &identity(ub.a22.nrows())),
    );
    let report = report.into_result()?;
    Ok((
        ReducedBlocks {
            u11: ub.a11,
            u12: ub.a12,
            u22: ub.a22,
            v11: vb.a11,
            v21: vb.a21,
            v22: vb.a22,
            left_inv_v22,
            right_inv_u22,
        },
        report,
    ))
}

// ------------------------------------------------------------- normalization

/// `Ẽ = [[I, 0], [X, I]]·E`, `F̃ = F·[[I, 0], [−X·U, I]]` with `X = F22⁺·Ê21`.
/// Afterwards `E21 = P_KerF22·E21` and `F21 = P_H2`.
pub fn normalize_adjoint(
    w: &EaeSpecialWitness,
    d: &CornerDecomposition,
    tol: f64,
) -> Result<(EaeSpecialWitness, ResidualReport)> {
    let (n, m) = (w.n(), w.m());
    let x = d.f22_pinv() * w.ehat21();
    let left = Block2x2::new(identity(n), zeros(n, m), x.clone(), identity(m))?.assemble();
    let right = Block2x2::new(identity(n), zeros(n, m), -(&x * &w.u), identity(m))?.assemble();
    let left_inv = Block2x2::new(identity(n), zeros(n, m), -&x, identity(m))?.assemble();
    let out = EaeSpecialWitness {
        u: w.u.clone(),
        v: w.v.clone(),
        e: &left * &w.e,
        f: &w.f * &right,
        e_inv: &w.e_inv * &left_inv,
    };

    let p_ker_f22 = subspace_maps(&d.f22.kernel)?.p;
    let p_h2 = subspace_maps(&d.f22.cokernel)?.p;
    let mut report = verify_eae_special(&out, tol)?;
    report.name = "normalized witness".into();
    let e21 = out.e21();
    report.push("E21 = P_KerF22 E21", rel_residual(&(&p_ker_f22 * &e21), &e21));
    report.push("F21 = P_H2", rel_residual(&out.f21(), &p_h2));
    report.note("norm(X)", norm2(&x));
    Ok((out, report.into_result()?))
}

/// `V22·L = I` and `R·U22 = I` on a normalized witness, making `L`, `R`
/// two-sided inverses.
pub fn check_two_sided(rb: &ReducedBlocks, tol: f64) -> Result<ResidualReport> {
    let mut report = ResidualReport::new("two-sided inverses", tol);
    report.push(
        "V22 L = I",
        rel_residual(&(&rb.v22 * &rb.left_inv_v22), &identity(rb.v22.nrows())),
    );
    report.push(
        "R U22 = I",
        rel_residual(&(&rb.right_inv_u22 * &rb.u22), &identity(rb.u22.ncols())),
    );
    report.into_result()
}

// -------------------------------------------------------- extension witnesses

/// Equivalence `U ⊕ I_k = E·(V ⊕ I_h)·F` with `k = dim Ker E11`,
/// `h = dim H2`, together with the factors it was assembled from.
#[derive(Clone, Debug)]
pub struct SmallEae {
    pub eae: EaeWitness,
    /// `Q_U·[[I, U12], [0, U22]]`, so `U = lu·(U11 ⊕ I_h)·Q_D*`.
    pub lu: Matrix,
    /// `Q_V·[[I, 0], [−V22⁻¹V21, V22⁻¹]]`, so `V11 ⊕ I_k = P*·V·rv_inv`.
    pub rv_inv: Matrix,
    pub e11p: Matrix,
    pub f22p_inv: Matrix,
    /// `[F1 | Ker E11]`.
    pub v_codomain: Matrix,
    /// `[Im F22 | H2]`.
    pub u_domain: Matrix,
    pub rank: usize,
    pub h: usize,
    pub k: usize,
}

pub fn build_small_eae(
    w: &EaeSpecialWitness,
    d: &CornerDecomposition,
    rb: &ReducedBlocks,
    tol: f64,
) -> Result<(SmallEae, ResidualReport)> {
    let dims = d.dims();
    if dims.rank_e11 != dims.rank_f22 || dims.h2 != dims.g1 || dims.ker_f22 != dims.ker_e11 {
        return Err(Error::Inconsistent(format!(
            "corner dimensions do not match: {dims:?}"
        )));
    }
    let (r, h, k) = (dims.rank_f22, dims.h2, dims.ker_e11);

    let v22_inv = &rb.left_inv_v22;
    let lu = d.e11.codomain()
        * Block2x2::new(identity(r), rb.u12.clone(), zeros(h, r), rb.u22.clone())?.assemble();
    let rv_inv = d.f22.domain()
        * Block2x2::new(identity(r), zeros(r, k), -(v22_inv * &rb.v21), v22_inv.clone())?
            .assemble();

    let e11p = d.e11.restricted.clone();
    let f22p_inv = d.f22.restricted_inv.clone();
    let neg_f22p_inv = -&f22p_inv;
    let (ih, ik) = (identity(h), identity(k));
    let (z_rh, z_rk, z_hr, z_kr) = (zeros(r, h), zeros(r, k), zeros(h, r), zeros(k, r));
    let (z_hk, z_kh) = (zeros(h, k), zeros(k, h));
    // G = [[E11', 0, 0], [0, 0, I_h], [0, I_k, 0]] : F1 ⊕ KerE11 ⊕ H2 → ImE11 ⊕ G1 ⊕ KerE11
    let g = crate::blockops::assemble3([
        [&e11p, &z_rk, &z_rh],
        [&z_hr, &z_hk, &ih],
        [&z_kr, &ik, &z_kh],
    ])?;
    // H = [[−F22'⁻¹, 0, 0], [0, 0, I_k], [0, I_h, 0]] : ImF22 ⊕ H2 ⊕ KerF22 → K2 ⊕ KerF22 ⊕ H2
    let hm = crate::blockops::assemble3([
        [&neg_f22p_inv, &z_rh, &z_rk],
        [&z_kr, &z_kh, &ik],
        [&z_hr, &ih, &z_hk],
    ])?;

    let v_codomain = d.e11.domain();
    let u_domain = d.f22.codomain();
    let e = direct_sum(&lu, &ik) * g * direct_sum(&v_codomain.adjoint(), &ih);
    let f = direct_sum(&rv_inv, &ih) * hm * direct_sum(&u_domain.adjoint(), &ik);
    let eae = EaeWitness {
        u: w.u.clone(),
        v: w.v.clone(),
        e,
        f,
        x0_dim: k,
        y0_dim: h,
    };
    let mut report = verify_eae(&eae, tol)?;
    report.name = "small extension".into();
    report.push(
        "U11 = -E11' V11 F22'^-1",
        rel_residual(&-(&e11p * &rb.v11 * &f22p_inv), &rb.u11),
    );
    let report = report.into_result()?;
    Ok((
        SmallEae {
            eae,
            lu,
            rv_inv,
            e11p,
            f22p_inv,
            v_codomain,
            u_domain,
            rank: r,
            h,
            k,
        },
        report,
    ))
}

/// One-sided extension obtained by embedding `H2` into `Ker E11` (or the
/// reverse) through the first-coordinates isometry. The extension lands on
/// `U` iff `dim H2 < dim Ker E11`.
pub fn build_eaoe(small: &SmallEae, tol: f64) -> Result<(EaoeWitness, ResidualReport)> {
    let SmallEae { lu, rv_inv, e11p, f22p_inv, v_codomain, u_domain, h, k, .. } = small;
    let (h, k) = (*h, *k);
    let neg_f22p_inv = -f22p_inv;
    let w = if h < k {
        let ext = k - h;
        let ie = identity(ext);
        let ik = identity(k);
        EaoeWitness {
            u: small.eae.u.clone(),
            v: small.eae.v.clone(),
            side: ExtendedSide::U,
            ext_dim: ext,
            e: direct_sum(lu, &ie) * direct_sum(e11p, &ik) * v_codomain.adjoint(),
            f: rv_inv * direct_sum(&neg_f22p_inv, &ik) * direct_sum(&u_domain.adjoint(), &ie),
        }
    } else {
        let ext = h - k;
        let ie = identity(ext);
        let ih = identity(h);
        EaoeWitness {
            u: small.eae.u.clone(),
            v: small.eae.v.clone(),
            side: ExtendedSide::V,
            ext_dim: ext,
            e: lu * direct_sum(e11p, &ih) * direct_sum(&v_codomain.adjoint(), &ie),
            f: direct_sum(rv_inv, &ie) * direct_sum(&neg_f22p_inv, &ih) * u_domain.adjoint(),
        }
    };
    let mut report = verify_eaoe(&w, tol)?;
    report.name = "one-sided extension".into();
    Ok((w, report.into_result()?))
}

// ------------------------------------------------------------------ pipeline

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub report: ResidualReport,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub stages: Vec<StageReport>,
    pub fredholm: FredholmReport,
    pub dims: CornerDims,
    /// `dim Ker E11`.
    pub x0_dim: usize,
    /// `dim H2`.
    pub y0_dim: usize,
    pub mc: Option<McWitness>,
    pub special: EaeSpecialWitness,
    pub normalized: EaeSpecialWitness,
    pub small: EaeWitness,
    pub eaoe: EaoeWitness,
    pub sc: ScWitness,
}

impl PipelineReport {
    pub fn stage(&self, name: &str) -> Option<&ResidualReport> {
        self.stages.iter().find(|s| s.stage == name).map(|s| &s.report)
    }

    pub fn max_residual(&self) -> f64 {
        self.stages
            .iter()
            .map(|s| s.report.max_residual())
            .fold(0.0, f64::max)
    }

    pub fn final_sc_residual(&self) -> f64 {
        self.stage("schur coupling")
            .map(|r| r.max_residual())
            .unwrap_or(f64::INFINITY)
    }
}

/// Input checks plus, when no witness is given, the nullity test and
/// witness synthesis.
fn prepare(
    u: &Matrix,
    v: &Matrix,
    witness: Option<EaeSpecialWitness>,
    cfg: &PipelineConfig,
    stages: &mut Vec<StageReport>,
) -> Result<(EaeSpecialWitness, Option<McWitness>)> {
    crate::numkernel::ensure_finite(u, "U")?;
    crate::numkernel::ensure_finite(v, "V")?;
    if !u.is_square() || !v.is_square() {
        return Err(Error::Shape("U and V must be square".into()));
    }
    match witness {
        Some(w) => {
            let mut r = ResidualReport::new("supplied witness", cfg.tol);
            r.push("witness U = U", rel_residual(&w.u, u));
            r.push("witness V = V", rel_residual(&w.v, v));
            let r = r.into_result().map_err(|e| e.at("input"))?;
            stages.push(StageReport { stage: "input", report: r });
            Ok((w, None))
        }
        None => {
            let ku = nullity(u, RankTol::Relative(cfg.rank_rtol))?;
            let kv = nullity(v, RankTol::Relative(cfg.rank_rtol))?;
            if ku != kv {
                return Err(Error::Infeasible {
                    nullity_u: ku,
                    nullity_v: kv,
                });
            }
            let mc = synth_mc_with(u, v, RankTol::Relative(cfg.rank_rtol), cfg.tol)
                .map_err(|e| e.at("synthesize"))?;
            let special = mc_to_eae_special(&mc, cfg.tol).map_err(|e| e.at("synthesize"))?;
            let mut r = ResidualReport::new("feasibility", cfg.tol);
            r.note("nullity(U)", ku as f64);
            r.note("nullity(V)", kv as f64);
            stages.push(StageReport { stage: "feasibility", report: r });
            Ok((special, Some(mc)))
        }
    }
}

/// Runs the full reduction from `(U, V)` (and optionally a special-form
/// witness for them) to a verified Schur coupling.
pub fn run_pipeline(
    u: &Matrix,
    v: &Matrix,
    witness: Option<EaeSpecialWitness>,
    cfg: &PipelineConfig,
) -> Result<PipelineReport> {
    let tol = cfg.tol;
    let mut stages = Vec::new();
    let (special, mc) = prepare(u, v, witness, cfg, &mut stages)?;

    macro_rules! stage {
        ($name:literal, $e:expr) => {
            $e.map_err(|e: Error| e.at($name))?
        };
    }

    let r = stage!("special form", verify_eae_special(&special, tol).and_then(|r| r.into_result()));
    stages.push(StageReport { stage: "special form", report: r });

    let fredholm = stage!("fredholm", fredholm_report(&special, cfg));

    let (d, r) = stage!("decompose", decompose_corners(&special, cfg).and_then(|(d, r)| Ok((d, r.into_result()?))));
    stages.push(StageReport { stage: "decompose", report: r });

    let (_, r) = stage!("reduce", derive_uv_blocks(&special, &d, tol));
    stages.push(StageReport { stage: "reduce", report: r });

    let (normalized, r) = stage!("normalize", normalize_adjoint(&special, &d, tol));
    stages.push(StageReport { stage: "normalize", report: r });

    let (rb, r) = stage!("re-reduce", derive_uv_blocks(&normalized, &d, tol));
    stages.push(StageReport { stage: "re-reduce", report: r });

    let r = stage!("two-sided", check_two_sided(&rb, tol));
    stages.push(StageReport { stage: "two-sided", report: r });

    let (small, r) = stage!("small extension", build_small_eae(&normalized, &d, &rb, tol));
    stages.push(StageReport { stage: "small extension", report: r });

    let (eaoe, r) = stage!("one-sided extension", build_eaoe(&small, tol));
    stages.push(StageReport { stage: "one-sided extension", report: r });
    if (eaoe.side == ExtendedSide::U) != fredholm.extend_u {
        return Err(Error::Inconsistent(format!(
            "extension side {} disagrees with index(F22) = {}",
            eaoe.side.as_str(),
            fredholm.f22.index
        ))
        .at("one-sided extension"));
    }

    let sc = stage!("schur coupling", sc_from_eaoe(&eaoe, tol));
    let mut r = stage!("schur coupling", verify_sc(&sc, tol));
    r.push("M Schur complement U", rel_residual(&sc.u, u));
    r.push("M Schur complement V", rel_residual(&sc.v, v));
    let r = stage!("schur coupling", r.into_result());
    stages.push(StageReport { stage: "schur coupling", report: r });

    let dims = d.dims();
    Ok(PipelineReport {
        config: *cfg,
        stages,
        fredholm,
        dims,
        x0_dim: dims.ker_e11,
        y0_dim: dims.h2,
        mc,
        special,
        normalized,
        small: small.eae,
        eaoe,
        sc,
    })
}
