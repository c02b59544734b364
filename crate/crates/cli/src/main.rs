use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eae_core::hankel::{hankel_experiment, BesovQuadrature, HankelExperiment, SymbolFc};
use eae_core::instances::{random_instance, InstanceSpec};
use eae_core::io::{
    read_json, read_witness, unix_timestamp, write_json, write_sigma_csv, write_witness,
    InstanceFile, PipelineReportJson, Witness, WitnessKind, TOOL_VERSION,
};
use eae_core::reduction::{run_pipeline, PipelineConfig, PipelineReport};
use eae_core::{Error, ResidualReport, C64, DEFAULT_TOL};
use rayon::prelude::*;
use serde::Serialize;

/// Exit status for a claim that was checked and does not hold.
const EXIT_FAILED: u8 = 1;
/// Exit status for input that could not be processed.
const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "eae", version, about = "Equivalence after extension, matricial and Schur coupling for finite matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance (U, V) with prescribed common nullity.
    Synth(SynthArgs),
    /// Run the reduction EAE -> EAOE -> SC on an instance, or on a batch of random ones.
    Pipeline(PipelineArgs),
    /// Re-check a witness file.
    Verify(VerifyArgs),
    /// Finite Hankel sections of a symbol and of its inverse.
    Hankel(HankelArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Common nullity of U and V.
    #[arg(long)]
    nullity: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Bound on the ratio of largest to smallest nonzero singular value.
    #[arg(long, default_value_t = 1e3)]
    cond: f64,
}

impl InstanceArgs {
    fn spec(&self, seed: u64) -> InstanceSpec {
        InstanceSpec { n: self.n, m: self.m, k: self.nullity, seed, cond_bound: self.cond }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Instance file written by `synth`.
    #[arg(long = "in", required_unless_present = "trials", conflicts_with = "trials")]
    input: Option<PathBuf>,
    /// Special-form witness to start from instead of synthesizing one.
    #[arg(long, requires = "input")]
    witness: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "rank-rtol", default_value_t = PipelineConfig::default().rank_rtol)]
    rank_rtol: f64,
    /// Where to write the final Schur-coupling witness.
    #[arg(long, requires = "input")]
    out: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Batch mode: run this many random instances with seeds seed, seed+1, ...
    #[arg(long, requires_all = ["n", "m", "nullity"])]
    trials: Option<u64>,
    /// Worker threads for batch mode; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    nullity: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e3)]
    cond: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    witness: PathBuf,
    /// Expected kind: sc, mc, eae, eae_special or eaoe.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Where to write the residual table as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct HankelArgs {
    /// Fourier coefficients as a comma list, e.g. `2,1` or `1+0.5i,2`.
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Index of the first coefficient.
    #[arg(long = "symbol-offset", default_value_t = 0, allow_hyphen_values = true)]
    symbol_offset: i64,
    /// Section size.
    #[arg(long = "N")]
    n: usize,
    /// Schatten exponent.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Largest index shift searched.
    #[arg(long, default_value_t = 5)]
    kmax: usize,
    /// Minimum FFT grid for inverting the symbol.
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Also estimate the Besov seminorm of the inverse's analytic part.
    #[arg(long)]
    besov: bool,
    /// JSON report; singular values go to `<stem>.sigma_f.csv` and `<stem>.sigma_inv.csv` beside it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Failed(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut msg = e.to_string();
        if let Some(r) = e.report() {
            let labels: Vec<&str> = r.failing().map(|c| c.label.as_str()).collect();
            if !labels.is_empty() {
                msg.push_str(&format!("\nfailing checks: {}", labels.join(", ")));
            }
        }
        if e.is_verification_failure() {
            Failure::Failed(msg)
        } else {
            Failure::Invalid(msg)
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Verify(a) => verify(a),
        Command::Hankel(a) => hankel(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(msg)) => {
            eprintln!("FAIL: {msg}");
            ExitCode::from(EXIT_FAILED)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be a positive number, got {x}")))
    }
}

// ---------------------------------------------------------------------- synth

fn synth(a: SynthArgs) -> Outcome {
    let spec = a.instance.spec(a.instance.seed);
    let (u, v) = random_instance(&spec)?;
    let file = InstanceFile::new(&u, &v, Some(spec));
    match &a.out {
        Some(path) => {
            write_json(path, &file)?;
            println!("wrote {}x{} / {}x{} instance with nullity {} to {}", spec.n, spec.n, spec.m, spec.m, spec.k, path.display());
        }
        None => print!("{}", eae_core::io::to_json(&file)?),
    }
    Ok(())
}

// ------------------------------------------------------------------- pipeline

fn pipeline(a: PipelineArgs) -> Outcome {
    positive("tol", a.tol)?;
    positive("rank-rtol", a.rank_rtol)?;
    let cfg = PipelineConfig { tol: a.tol, rank_rtol: a.rank_rtol };
    match &a.input {
        Some(path) => single_pipeline(&a, path, &cfg),
        None => batch_pipeline(&a, &cfg),
    }
}

fn single_pipeline(a: &PipelineArgs, path: &Path, cfg: &PipelineConfig) -> Outcome {
    let (u, v) = read_json::<InstanceFile>(path)?.matrices()?;
    let witness = match &a.witness {
        None => None,
        Some(p) => match read_witness(p)? {
            Witness::EaeSpecial(w) => Some(w),
            other => {
                return Err(invalid(format!(
                    "--witness must hold an eae_special witness, found {}",
                    other.kind().as_str()
                )))
            }
        },
    };
    let rep = run_pipeline(&u, &v, witness, cfg)?;
    print_pipeline(&rep);
    if let Some(out) = &a.out {
        write_witness(out, &Witness::Sc(rep.sc.clone()))?;
    }
    if let Some(path) = &a.report {
        write_json(path, &PipelineReportJson::new(&rep))?;
    }
    Ok(())
}

fn print_pipeline(rep: &PipelineReport) {
    for s in &rep.stages {
        println!("{:<22} {:>10.3e}  {}", s.stage, s.report.max_residual(), if s.report.passed() { "ok" } else { "FAIL" });
    }
    println!(
        "extension: X0 = {}, Y0 = {}; one-sided on {} by {}",
        rep.x0_dim,
        rep.y0_dim,
        rep.eaoe.side.as_str(),
        rep.eaoe.ext_dim
    );
    println!("final Schur-coupling residual {:.3e}", rep.final_sc_residual());
}

#[derive(Serialize)]
struct TrialJson {
    seed: u64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_stage_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_sc_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x0_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y0_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_sided_side: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_sided_ext_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct BatchJson {
    tool_version: String,
    timestamp: u64,
    tol: f64,
    rank_rtol: f64,
    spec: InstanceSpec,
    passed: usize,
    failed: usize,
    trials: Vec<TrialJson>,
}

fn run_trial(spec: InstanceSpec, cfg: &PipelineConfig) -> Result<TrialJson, Failure> {
    let (u, v) = random_instance(&spec)?;
    Ok(match run_pipeline(&u, &v, None, cfg) {
        Ok(rep) => TrialJson {
            seed: spec.seed,
            passed: true,
            max_stage_residual: Some(rep.max_residual()),
            final_sc_residual: Some(rep.final_sc_residual()),
            x0_dim: Some(rep.x0_dim),
            y0_dim: Some(rep.y0_dim),
            one_sided_side: Some(rep.eaoe.side.as_str()),
            one_sided_ext_dim: Some(rep.eaoe.ext_dim),
            error: None,
        },
        Err(e) if e.is_verification_failure() => TrialJson {
            seed: spec.seed,
            passed: false,
            max_stage_residual: None,
            final_sc_residual: None,
            x0_dim: None,
            y0_dim: None,
            one_sided_side: None,
            one_sided_ext_dim: None,
            error: Some(e.to_string()),
        },
        Err(e) => return Err(e.into()),
    })
}

fn batch_pipeline(a: &PipelineArgs, cfg: &PipelineConfig) -> Outcome {
    // clap guarantees these once --trials is present.
    let (n, m, nullity) = (a.n.unwrap_or(0), a.m.unwrap_or(0), a.nullity.unwrap_or(0));
    let trials = a.trials.unwrap_or(0);
    let base = InstanceArgs { n, m, nullity, seed: a.seed, cond: a.cond };
    base.spec(a.seed).validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| invalid(format!("cannot start {} worker threads: {e}", a.jobs)))?;
    let results: Vec<Result<TrialJson, Failure>> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run_trial(base.spec(a.seed.wrapping_add(i)), cfg))
            .collect()
    });
    let trials: Vec<TrialJson> = results.into_iter().collect::<Result<_, _>>()?;
    let passed = trials.iter().filter(|t| t.passed).count();
    let failed = trials.len() - passed;
    let worst = trials.iter().filter_map(|t| t.max_stage_residual).fold(0.0, f64::max);
    println!("{passed}/{} trials passed; max stage residual {worst:.3e}", trials.len());
    for t in trials.iter().filter(|t| !t.passed) {
        println!("seed {}: {}", t.seed, t.error.as_deref().unwrap_or("failed"));
    }
    if let Some(path) = &a.report {
        let report = BatchJson {
            tool_version: TOOL_VERSION.to_string(),
            timestamp: unix_timestamp(),
            tol: cfg.tol,
            rank_rtol: cfg.rank_rtol,
            spec: base.spec(a.seed),
            passed,
            failed,
            trials,
        };
        write_json(path, &report)?;
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{failed} trial(s) failed")))
    }
}

// --------------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyJson<'a> {
    tool_version: &'a str,
    timestamp: u64,
    kind: &'a str,
    passed: bool,
    report: &'a ResidualReport,
}

fn verify(a: VerifyArgs) -> Outcome {
    positive("tol", a.tol)?;
    let witness = read_witness(&a.witness)?;
    if let Some(kind) = &a.kind {
        let expected = WitnessKind::parse(kind)?;
        if expected != witness.kind() {
            return Err(invalid(format!(
                "--kind {} does not match the file, which holds a {} witness",
                expected.as_str(),
                witness.kind().as_str()
            )));
        }
    }
    let report = witness.verify(a.tol)?;
    println!("{report}");
    if let Some(path) = &a.report {
        let json = VerifyJson {
            tool_version: TOOL_VERSION,
            timestamp: unix_timestamp(),
            kind: witness.kind().as_str(),
            passed: report.passed(),
            report: &report,
        };
        write_json(path, &json)?;
    }
    if report.passed() {
        Ok(())
    } else {
        let labels: Vec<&str> = report.failing().map(|c| c.label.as_str()).collect();
        Err(Failure::Failed(format!("failing checks: {}", labels.join(", "))))
    }
}

// --------------------------------------------------------------------- hankel

fn parse_symbol(list: &str, offset: i64) -> Result<SymbolFc, Failure> {
    let coeffs = list
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<C64>()
                .map_err(|_| invalid(format!("cannot parse symbol coefficient `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(invalid("symbol coefficients must be finite"));
    }
    Ok(SymbolFc::new(offset, coeffs))
}

#[derive(Serialize)]
struct HankelJson<'a> {
    tool_version: &'a str,
    timestamp: u64,
    experiment: &'a HankelExperiment,
}

fn csv_beside(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn hankel(a: HankelArgs) -> Outcome {
    if a.n == 0 {
        return Err(invalid("--N must be at least 1"));
    }
    positive("p", a.p)?;
    let f = parse_symbol(&a.symbol, a.symbol_offset)?;
    let besov = a.besov.then(BesovQuadrature::default);
    let exp = hankel_experiment(&f, a.n, a.p, a.kmax, a.grid, besov)?;
    print_hankel(&exp);
    if let Some(out) = &a.out {
        write_json(out, &HankelJson { tool_version: TOOL_VERSION, timestamp: unix_timestamp(), experiment: &exp })?;
        write_sigma_csv(&csv_beside(out, "sigma_f"), &exp.sv_f)?;
        write_sigma_csv(&csv_beside(out, "sigma_inv"), &exp.sv_inv)?;
    }
    Ok(())
}

fn print_hankel(exp: &HankelExperiment) {
    let first = |s: &[f64]| s.first().copied().unwrap_or(0.0);
    println!("N = {}, inverse winding number {}, min |f| on grid {:.3e}", exp.n, exp.inverse.winding_number, exp.inverse.min_modulus);
    println!("Hankel section of f:   rank {}, sigma_1 {:.12}", exp.rank_f, first(&exp.sv_f));
    println!("Hankel section of 1/f: rank {}, sigma_1 {:.12}", exp.rank_inv, first(&exp.sv_inv));
    println!("section coupling residual {:.3e}", exp.coupling.max_residual());
    match &exp.comparability.verdict {
        Some(v) => println!(
            "shift comparability: {:?} k = {}, c = {}",
            v.orientation,
            v.k,
            v.c.map_or("none".to_string(), |c| format!("{c:.9}"))
        ),
        None => println!("shift comparability: none within the searched shifts"),
    }
    println!(
        "sum sigma^p (p = {}): f {:.6e}, 1/f {:.6e}",
        exp.p, exp.summability_f.total, exp.summability_inv.total
    );
    if let Some(b) = &exp.summability_inv.besov {
        println!("Besov seminorm estimate of the inverse: {:.6e} ({}x{} grid)", b.seminorm, b.t_points, b.s_points);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_lists_parse_real_and_complex() {
        let f = parse_symbol("2, 1", 0).unwrap();
        assert_eq!(f.coeffs, vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)]);
        let g = parse_symbol("1+0.5i,-3", -1).unwrap();
        assert_eq!(g.offset, -1);
        assert_eq!(g.coeffs[0], C64::new(1.0, 0.5));
        assert!(parse_symbol("2,x", 0).is_err());
        assert!(parse_symbol("nan", 0).is_err());
    }

    #[test]
    fn csv_paths_sit_beside_the_report() {
        let p = csv_beside(Path::new("out/run.json"), "sigma_f");
        assert_eq!(p, PathBuf::from("out/run.sigma_f.csv"));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
