//! JSON encodings of matrices, symbols, witnesses, instances and reports,
//! plus CSV export of singular values.
//!
//! A matrix is `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order. Doubles are written in shortest round-trip form and parsed back
//! exactly, so every file round-trips bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::blockops::Block2x2;
use crate::error::{Error, Result};
use crate::hankel::SymbolFc;
use crate::instances::InstanceSpec;
use crate::numkernel::{Matrix, C64};
use crate::reduction::{CornerDims, FredholmReport, PipelineReport, StageReport};
use crate::relations::{
    verify_eae, verify_eae_special, verify_eaoe, verify_mc, verify_sc, EaeSpecialWitness,
    EaeWitness, EaoeWitness, ExtendedSide, McWitness, ScWitness,
};
use crate::residual::ResidualReport;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&Matrix> for MatrixJson {
    fn from(a: &Matrix) -> Self {
        let (rows, cols) = a.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = a[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson { rows, cols, data }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self, role: &str) -> Result<Matrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Shape(format!(
                "{role}: {} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(role.to_string()));
        }
        Ok(Matrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|&[re, im]| C64::new(re, im)),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    pub offset: i64,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&SymbolFc> for SymbolJson {
    fn from(f: &SymbolFc) -> Self {
        SymbolJson {
            offset: f.offset,
            coeffs: f.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl From<&SymbolJson> for SymbolFc {
    fn from(s: &SymbolJson) -> Self {
        SymbolFc::new(s.offset, s.coeffs.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

// ------------------------------------------------------------------ witnesses

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Sc,
    Mc,
    Eae,
    EaeSpecial,
    Eaoe,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Sc => "sc",
            WitnessKind::Mc => "mc",
            WitnessKind::Eae => "eae",
            WitnessKind::EaeSpecial => "eae_special",
            WitnessKind::Eaoe => "eaoe",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sc" => WitnessKind::Sc,
            "mc" => WitnessKind::Mc,
            "eae" => WitnessKind::Eae,
            "eae_special" => WitnessKind::EaeSpecial,
            "eaoe" => WitnessKind::Eaoe,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown witness kind `{other}` (expected sc, mc, eae, eae_special or eaoe)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Sc(ScWitness),
    Mc(McWitness),
    Eae(EaeWitness),
    EaeSpecial(EaeSpecialWitness),
    Eaoe(EaoeWitness),
}

impl Witness {
    pub fn kind(&self) -> WitnessKind {
        match self {
            Witness::Sc(_) => WitnessKind::Sc,
            Witness::Mc(_) => WitnessKind::Mc,
            Witness::Eae(_) => WitnessKind::Eae,
            Witness::EaeSpecial(_) => WitnessKind::EaeSpecial,
            Witness::Eaoe(_) => WitnessKind::Eaoe,
        }
    }

    pub fn verify(&self, tol: f64) -> Result<ResidualReport> {
        match self {
            Witness::Sc(w) => verify_sc(w, tol),
            Witness::Mc(w) => verify_mc(w, tol),
            Witness::Eae(w) => verify_eae(w, tol),
            Witness::EaeSpecial(w) => verify_eae_special(w, tol),
            Witness::Eaoe(w) => verify_eaoe(w, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub kind: WitnessKind,
    pub tool_version: String,
    pub dims: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extended_side: Option<String>,
    pub matrices: BTreeMap<String, MatrixJson>,
}

impl WitnessFile {
    fn new(kind: WitnessKind, dims: &[(&str, usize)], matrices: &[(&str, &Matrix)]) -> Self {
        WitnessFile {
            kind,
            tool_version: TOOL_VERSION.to_string(),
            dims: dims.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            extended_side: None,
            matrices: matrices
                .iter()
                .map(|&(k, m)| (k.to_string(), MatrixJson::from(m)))
                .collect(),
        }
    }

    fn matrix(&self, role: &str) -> Result<Matrix> {
        self.matrices
            .get(role)
            .ok_or_else(|| Error::InvalidArgument(format!("witness file lacks matrix `{role}`")))?
            .to_matrix(role)
    }

    fn dim(&self, name: &str) -> Result<usize> {
        self.dims
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("witness file lacks dimension `{name}`")))
    }

    pub fn to_witness(&self) -> Result<Witness> {
        Ok(match self.kind {
            WitnessKind::Sc => {
                let m = Block2x2::new(
                    self.matrix("A")?,
                    self.matrix("B")?,
                    self.matrix("C")?,
                    self.matrix("D")?,
                )?;
                Witness::Sc(ScWitness {
                    m,
                    u: self.matrix("U")?,
                    v: self.matrix("V")?,
                })
            }
            WitnessKind::Mc => Witness::Mc(McWitness {
                uhat: self.matrix("Uhat")?,
                uhat_inv: self.matrix("UhatInv")?,
                u: self.matrix("U")?,
                v: self.matrix("V")?,
            }),
            WitnessKind::Eae => Witness::Eae(EaeWitness {
                u: self.matrix("U")?,
                v: self.matrix("V")?,
                e: self.matrix("E")?,
                f: self.matrix("F")?,
                x0_dim: self.dim("x0")?,
                y0_dim: self.dim("y0")?,
            }),
            WitnessKind::EaeSpecial => Witness::EaeSpecial(EaeSpecialWitness {
                u: self.matrix("U")?,
                v: self.matrix("V")?,
                e: self.matrix("E")?,
                f: self.matrix("F")?,
                e_inv: self.matrix("Einv")?,
            }),
            WitnessKind::Eaoe => {
                let side = match self.extended_side.as_deref() {
                    Some("U") => ExtendedSide::U,
                    Some("V") => ExtendedSide::V,
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "eaoe witness needs extended_side \"U\" or \"V\", got {other:?}"
                        )))
                    }
                };
                Witness::Eaoe(EaoeWitness {
                    u: self.matrix("U")?,
                    v: self.matrix("V")?,
                    side,
                    ext_dim: self.dim("ext")?,
                    e: self.matrix("E")?,
                    f: self.matrix("F")?,
                })
            }
        })
    }
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Sc(w) => WitnessFile::new(
                WitnessKind::Sc,
                &[("x", w.u.nrows()), ("y", w.v.nrows())],
                &[
                    ("A", &w.m.a11),
                    ("B", &w.m.a12),
                    ("C", &w.m.a21),
                    ("D", &w.m.a22),
                    ("U", &w.u),
                    ("V", &w.v),
                ],
            ),
            Witness::Mc(w) => WitnessFile::new(
                WitnessKind::Mc,
                &[("x", w.dim_x()), ("y", w.dim_y())],
                &[("Uhat", &w.uhat), ("UhatInv", &w.uhat_inv), ("U", &w.u), ("V", &w.v)],
            ),
            Witness::Eae(w) => WitnessFile::new(
                WitnessKind::Eae,
                &[("x", w.u.nrows()), ("y", w.v.nrows()), ("x0", w.x0_dim), ("y0", w.y0_dim)],
                &[("U", &w.u), ("V", &w.v), ("E", &w.e), ("F", &w.f)],
            ),
            Witness::EaeSpecial(w) => WitnessFile::new(
                WitnessKind::EaeSpecial,
                &[("x", w.n()), ("y", w.m())],
                &[("U", &w.u), ("V", &w.v), ("E", &w.e), ("F", &w.f), ("Einv", &w.e_inv)],
            ),
            Witness::Eaoe(w) => {
                let mut file = WitnessFile::new(
                    WitnessKind::Eaoe,
                    &[("x", w.u.nrows()), ("y", w.v.nrows()), ("ext", w.ext_dim)],
                    &[("U", &w.u), ("V", &w.v), ("E", &w.e), ("F", &w.f)],
                );
                file.extended_side = Some(w.side.as_str().to_string());
                file
            }
        }
    }
}

// ------------------------------------------------------------------ instances

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<InstanceSpec>,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
}

impl InstanceFile {
    pub fn new(u: &Matrix, v: &Matrix, spec: Option<InstanceSpec>) -> Self {
        InstanceFile {
            tool_version: TOOL_VERSION.to_string(),
            spec,
            u: u.into(),
            v: v.into(),
        }
    }

    pub fn matrices(&self) -> Result<(Matrix, Matrix)> {
        Ok((self.u.to_matrix("U")?, self.v.to_matrix("V")?))
    }
}

// -------------------------------------------------------------------- reports

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionJson {
    pub x0_dim: usize,
    pub y0_dim: usize,
    pub one_sided_side: &'static str,
    pub one_sided_ext_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReportJson {
    pub tool_version: String,
    pub timestamp: u64,
    pub passed: bool,
    pub tol: f64,
    pub rank_rtol: f64,
    pub stages: Vec<StageReport>,
    pub fredholm: FredholmReport,
    pub dims: CornerDims,
    pub extension: ExtensionJson,
    pub final_sc_residual: f64,
    pub witnesses: BTreeMap<String, WitnessFile>,
}

pub fn unix_timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl PipelineReportJson {
    pub fn new(rep: &PipelineReport) -> Self {
        let mut witnesses = BTreeMap::new();
        if let Some(mc) = &rep.mc {
            witnesses.insert("mc".to_string(), (&Witness::Mc(mc.clone())).into());
        }
        for (name, w) in [
            ("special", Witness::EaeSpecial(rep.special.clone())),
            ("normalized", Witness::EaeSpecial(rep.normalized.clone())),
            ("small_eae", Witness::Eae(rep.small.clone())),
            ("eaoe", Witness::Eaoe(rep.eaoe.clone())),
            ("sc", Witness::Sc(rep.sc.clone())),
        ] {
            witnesses.insert(name.to_string(), (&w).into());
        }
        PipelineReportJson {
            tool_version: TOOL_VERSION.to_string(),
            timestamp: unix_timestamp(),
            passed: rep.stages.iter().all(|s| s.report.passed()),
            tol: rep.config.tol,
            rank_rtol: rep.config.rank_rtol,
            stages: rep.stages.clone(),
            fredholm: rep.fredholm,
            dims: rep.dims,
            extension: ExtensionJson {
                x0_dim: rep.x0_dim,
                y0_dim: rep.y0_dim,
                one_sided_side: rep.eaoe.side.as_str(),
                one_sided_ext_dim: rep.eaoe.ext_dim,
            },
            final_sc_residual: rep.final_sc_residual(),
            witnesses,
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_witness(path: &Path, w: &Witness) -> Result<()> {
    write_json(path, &WitnessFile::from(w))
}

pub fn read_witness(path: &Path) -> Result<Witness> {
    read_json::<WitnessFile>(path)?.to_witness()
}

/// `index,sigma` header, then one row per value (1-based index).
pub fn sigma_csv(values: &[f64]) -> String {
    let mut out = String::from("index,sigma\n");
    for (i, s) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, s));
    }
    out
}

pub fn write_sigma_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(sigma_csv(values).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{from_real_rows, identity};

    #[test]
    fn matrix_json_round_trip_is_bit_exact() {
        let a = Matrix::from_fn(2, 3, |i, j| {
            C64::new(0.1 * (i as f64 + 1.0) / 3.0, -1e-300 * j as f64 + std::f64::consts::PI)
        });
        let text = serde_json::to_string(&MatrixJson::from(&a)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let b = back.to_matrix("a").unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn matrix_json_rejects_wrong_length() {
        let bad = MatrixJson { rows: 2, cols: 2, data: vec![[1.0, 0.0]] };
        assert!(matches!(bad.to_matrix("x"), Err(Error::Shape(_))));
    }

    #[test]
    fn witness_file_round_trip_every_kind() {
        let u = from_real_rows(1, 1, &[1.0]);
        let v = from_real_rows(1, 1, &[0.5]);
        let m = Block2x2::split(&from_real_rows(2, 2, &[2.0, 1.0, 1.0, 1.0]), 1, 1).unwrap();
        let sc = ScWitness { m, u: u.clone(), v: v.clone() };
        let mc = crate::relations::sc_to_mc(&sc, 1e-12).unwrap();
        let sp = crate::relations::mc_to_eae_special(&mc, 1e-12).unwrap();
        let eaoe = EaoeWitness {
            u: identity(2),
            v: from_real_rows(1, 1, &[1.0]),
            side: ExtendedSide::V,
            ext_dim: 1,
            e: identity(2),
            f: identity(2),
        };
        for w in [
            Witness::Sc(sc),
            Witness::Mc(mc),
            Witness::Eae(sp.as_eae()),
            Witness::EaeSpecial(sp),
            Witness::Eaoe(eaoe),
        ] {
            let text = to_json(&WitnessFile::from(&w)).unwrap();
            let file: WitnessFile = serde_json::from_str(&text).unwrap();
            assert_eq!(file.to_witness().unwrap(), w);
            assert!(w.verify(1e-12).unwrap().passed());
        }
    }

    #[test]
    fn witness_kind_parsing() {
        assert_eq!(WitnessKind::parse("eae_special").unwrap(), WitnessKind::EaeSpecial);
        assert!(WitnessKind::parse("xyz").is_err());
        let text = serde_json::to_string(&WitnessKind::EaeSpecial).unwrap();
        assert_eq!(text, "\"eae_special\"");
    }

    #[test]
    fn csv_layout() {
        assert_eq!(sigma_csv(&[1.0, 0.25]), "index,sigma\n1,1\n2,0.25\n");
    }

    #[test]
    fn symbol_json_round_trip() {
        let f = SymbolFc::from_real(-1, &[1.0, 2.0, 0.5]);
        let back = SymbolFc::from(&SymbolJson::from(&f));
        assert_eq!(back, f);
    }
}
