//! Command-line front end: construct, verify, decompose, simulate.

pub mod manifest;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use agdistill::csscode::{quantum_params, QuantumCodeParams};
use agdistill::curves::Curve;
use agdistill::decoder::{build_decoder, scan_deg_a1, DegA1Choice};
use agdistill::distill::{overhead_report, simulate, ErrorModel, OverheadReport, SimulationReport};
use agdistill::gf2e::{Field, FieldSpec};
use agdistill::phasepoly::{decomposition, search_min_ccz, GateDecomposition};
use agdistill::selfdual::{paper_basis_s10, SelfDualBasis};
use agdistill::statecheck::{run_state_checks, StateCheckReport};
use agdistill::triortho::{
    construct, is_triorthogonal, preset_parameters, structure_checks, transversality_failures,
    StructureReport, TriorthogonalMatrix, VerificationReport, VerifyMode, Violation,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use manifest::{default_basis, Manifest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const THREADS_ENV: &str = "AGDISTILL_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAIL,
        }
    }
}

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failed(e: impl Display) -> CliError {
    CliError::Failed(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "agdistill", version, about = "Triorthogonal AG codes and magic-state distillation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a triorthogonal matrix and write its manifest.
    Construct(ConstructArgs),
    /// Check triorthogonality, transversality and optionally the dense state checks.
    Verify(VerifyArgs),
    /// Z/CZ/CCZ content of the 7th-power trace phase in a self-dual basis.
    Decompose(DecomposeArgs),
    /// Monte-Carlo block failure rate of the Z-error correction step.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Rational curve over F_32, a=4, k=1.
    Small,
    /// Hermitian curve over F_256, a=500, k=100.
    Mid,
    /// Hermitian curve over F_1024, a=2232, k=620.
    Paper,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum, conflicts_with = "curve")]
    pub preset: Option<Preset>,
    /// `rational:s=<s>` or `hermitian:q0=<q0>`.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long, requires = "curve")]
    pub a: Option<usize>,
    #[arg(long, requires = "curve")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; a `.gz` suffix writes a gzip container.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Exhaustive when m <= 50, else sampled.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub artifact: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Random triples (and pairs) in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1_000)]
    pub transversality_trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run the dense teleportation and twirling checks.
    #[arg(long)]
    pub states: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisSource {
    Paper,
    File,
    Search,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long, value_enum, default_value_t = BasisSource::Paper)]
    pub basis: BasisSource,
    /// JSON with `s`, `modulus` and `basis` (hex); decompose output qualifies.
    #[arg(long, required_if_eq("basis", "file"))]
    pub basis_file: Option<PathBuf>,
    /// Field degree for `--basis search` (default modulus).
    #[arg(long, default_value_t = 10)]
    pub s: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub artifact: PathBuf,
    /// iid per-qudit error probability.
    #[arg(long, conflicts_with = "weight", required_unless_present = "weight")]
    pub p: Option<f64>,
    /// Exact error weight.
    #[arg(long)]
    pub weight: Option<usize>,
    #[arg(long, default_value_t = 1_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; falls back to AGDISTILL_THREADS, then all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// CCZ states per input qudit in the bound.
    #[arg(long, default_value_t = 1)]
    pub c_conv: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let res = match cli.command {
        Command::Construct(a) => cmd_construct(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(failed)?;
    println!("{text}");
    if let Some(p) = path {
        fs::write(p, text + "\n").map_err(usage)?;
    }
    Ok(())
}

/// CCZ count of the artifact's basis, or None below s = 3.
fn c_conv_of(field: &Field, basis: &SelfDualBasis) -> Option<usize> {
    decomposition(field, basis).ok().map(|d| d.c())
}

pub struct Built {
    pub matrix: TriorthogonalMatrix,
    pub manifest: Manifest,
    pub params: QuantumCodeParams,
}

/// Construction shared by the CLI and tests.
pub fn build(args: &ConstructArgs) -> Result<Built, CliError> {
    let (curve, a, k, choice) = match (args.preset, &args.curve) {
        (Some(Preset::Small), _) => (Curve::parse("rational:s=5").map_err(usage)?, 4, 1, DegA1Choice::Scan),
        (Some(Preset::Mid), _) => (Curve::parse("hermitian:q0=16").map_err(usage)?, 500, 100, DegA1Choice::Scan),
        (Some(Preset::Paper), _) => {
            let c = Curve::parse("hermitian:q0=32").map_err(usage)?;
            let (a, k) = preset_parameters(&c);
            let g = c.genus();
            (c, a, k, DegA1Choice::Fixed(9 * g / 8))
        }
        (None, Some(desc)) => {
            let c = Curve::parse(desc).map_err(usage)?;
            let (pa, pk) = preset_parameters(&c);
            (c, args.a.unwrap_or(pa), args.k.unwrap_or(pk), DegA1Choice::Scan)
        }
        (None, None) => return Err(usage("one of --preset or --curve is required")),
    };
    let matrix = construct(&curve, a, k, args.seed).map_err(usage)?;
    let params = quantum_params(&matrix).map_err(usage)?;
    let deg_a1 = match choice {
        DegA1Choice::Scan => scan_deg_a1(&curve, a, k, params.t).map_err(usage)?,
        DegA1Choice::Fixed(d) => d,
    };
    let basis = default_basis(curve.field(), args.seed).map_err(usage)?;
    let manifest = Manifest::from_matrix(&matrix, &basis, params.t, deg_a1, args.seed);
    Ok(Built { matrix, manifest, params })
}

fn cmd_construct(args: &ConstructArgs) -> Result<i32, CliError> {
    let b = build(args)?;
    b.manifest.save(&args.out).map_err(usage)?;
    let p = &b.params;
    let f = &b.matrix.field;
    let c = c_conv_of(f, &b.manifest.basis(f).map_err(failed)?);
    println!("curve     {}", b.manifest.curve);
    println!("N         {}", b.matrix.big_n());
    println!("n         {}", p.n);
    println!("k         {}", p.k);
    println!("m         {}", p.m);
    println!("genus     {}", p.genus);
    println!("d_lower   {}", p.d_lower);
    println!("t         {}", p.t);
    println!("deg_a1    {}", b.manifest.params.deg_a1);
    println!("qubits    [[{}, {}]]", p.qubits_n, p.qubits_k);
    if let Some(c) = c {
        let o = overhead_report(p.n, p.k, c).map_err(failed)?;
        println!("C_conv    {c}");
        println!("overhead  {:.4}", o.ratio);
    }
    println!("wrote     {}", args.out.display());
    Ok(EXIT_PASS)
}

#[derive(Debug, Serialize)]
pub struct TriorthoSummary {
    pub mode: String,
    pub pass: bool,
    pub triples_checked: usize,
    pub pairs_checked: usize,
    pub violations_total: usize,
    /// First few, 1-based.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Serialize)]
pub struct TransversalitySummary {
    pub trials: usize,
    pub pass: bool,
    pub failing_trials: Vec<usize>,
}

#[derive(Debug, Default, Serialize)]
pub struct VerifyReport {
    pub params: Option<QuantumCodeParams>,
    pub triorthogonality: Option<TriorthoSummary>,
    pub transversality: Option<TransversalitySummary>,
    pub structure: Option<StructureReport>,
    pub overhead: Option<OverheadReport>,
    pub states: Option<StateCheckReport>,
    pub pass: bool,
}

const SHOWN_VIOLATIONS: usize = 10;
/// Skip the rank identities when n^3 exceeds this.
const STRUCTURE_COST_CAP: usize = 2_000_000_000;

fn summarize(mode: &str, r: VerificationReport) -> TriorthoSummary {
    TriorthoSummary {
        mode: mode.into(),
        pass: r.pass,
        triples_checked: r.triples_checked,
        pairs_checked: r.pairs_checked,
        violations_total: r.violations.len(),
        violations: r.violations.into_iter().take(SHOWN_VIOLATIONS).collect(),
    }
}

/// Runs the checks; returns the report and the first counterexample, if any.
pub fn verify_report(args: &VerifyArgs) -> Result<(VerifyReport, Option<String>), CliError> {
    if args.artifact.is_none() && !args.states {
        return Err(usage("nothing to verify: give an artifact or --states"));
    }
    let mut rep = VerifyReport { pass: true, ..Default::default() };
    let mut first = None;
    if let Some(path) = &args.artifact {
        let man = Manifest::load(path).map_err(failed)?;
        let t = man.matrix().map_err(failed)?;
        let f = t.field.clone();
        let basis = man.basis(&f).map_err(failed)?;
        let mode = match args.mode {
            Mode::Exhaustive => VerifyMode::Exhaustive,
            Mode::Sampled => VerifyMode::Sampled { trials: args.trials, seed: args.seed },
            Mode::Auto => VerifyMode::auto(t.m, args.trials, args.seed),
        };
        let label = match mode {
            VerifyMode::Exhaustive => "exhaustive",
            VerifyMode::Sampled { .. } => "sampled",
        };
        let tri = is_triorthogonal(&t, mode);
        if let Some(v) = tri.violations.first() {
            first = Some(format!(
                "{:?} condition violated at (a,b,c)=({},{},{}): got {:#x}, expected {:#x}",
                v.condition, v.a, v.b, v.c, v.got, v.expected
            ));
        }
        rep.pass &= tri.pass;
        rep.triorthogonality = Some(summarize(label, tri));

        let fails = transversality_failures(&t, args.transversality_trials, args.seed);
        if first.is_none() {
            if let Some(i) = fails.first() {
                first = Some(format!("transversality identity fails on trial {i}"));
            }
        }
        rep.pass &= fails.is_empty();
        rep.transversality = Some(TransversalitySummary {
            trials: args.transversality_trials,
            pass: fails.is_empty(),
            failing_trials: fails.into_iter().take(SHOWN_VIOLATIONS).collect(),
        });

        if t.n.saturating_pow(3) <= STRUCTURE_COST_CAP {
            let s = structure_checks(&t);
            let ok = s.g1_independent && s.spans_disjoint && s.g0_dual_identity;
            if !ok && first.is_none() {
                first = Some(format!("rank identities fail: {s:?}"));
            }
            rep.pass &= ok;
            rep.structure = Some(s);
        }
        rep.params = quantum_params(&t).ok();
        if let Some(c) = c_conv_of(&f, &basis) {
            rep.overhead = overhead_report(t.n, t.k, c).ok();
        }
    }
    if args.states {
        let s = run_state_checks(args.seed);
        if !s.pass && first.is_none() {
            first = Some(format!("state checks exceed tolerance: {s:?}"));
        }
        rep.pass &= s.pass;
        rep.states = Some(s);
    }
    Ok((rep, first))
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let (rep, first) = verify_report(args)?;
    write_json(&rep, args.json.as_deref())?;
    if rep.pass {
        Ok(EXIT_PASS)
    } else {
        eprintln!("FAIL: {}", first.unwrap_or_default());
        Ok(EXIT_FAIL)
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DecomposeReport {
    pub s: u32,
    pub modulus: String,
    pub basis: Vec<String>,
    #[serde(flatten)]
    pub gates: GateDecomposition,
    pub c: usize,
}

#[derive(Deserialize)]
struct BasisFile {
    s: u32,
    modulus: String,
    basis: Vec<String>,
}

pub fn decompose_report(args: &DecomposeArgs) -> Result<DecomposeReport, CliError> {
    let (field, basis) = match args.basis {
        BasisSource::Paper => {
            let f = Field::with_default(10).map_err(usage)?;
            let b = paper_basis_s10(&f).map_err(usage)?;
            (f, b)
        }
        BasisSource::File => {
            let path = args.basis_file.as_ref().ok_or_else(|| usage("--basis-file is required"))?;
            let text = fs::read_to_string(path).map_err(usage)?;
            let bf: BasisFile = serde_json::from_str(&text).map_err(usage)?;
            let modulus = u32::from_str_radix(&bf.modulus, 16).map_err(usage)?;
            let f = Field::new(FieldSpec::new(bf.s, modulus).map_err(usage)?).map_err(usage)?;
            let b = SelfDualBasis::from_hex(&f, &bf.basis).map_err(usage)?;
            if !agdistill::selfdual::is_self_dual(&f, &b) {
                return Err(usage("basis in file is not self-dual"));
            }
            (f, b)
        }
        BasisSource::Search => {
            let spec = FieldSpec::default_for(args.s).map_err(usage)?;
            let (b, _) = search_min_ccz(spec, args.budget as usize, args.seed)
                .map_err(usage)?
                .ok_or_else(|| failed("no self-dual basis found within budget"))?;
            (Field::new(spec).map_err(usage)?, b)
        }
    };
    let gates = decomposition(&field, &basis).map_err(usage)?;
    let spec = field.spec();
    Ok(DecomposeReport {
        s: spec.s(),
        modulus: format!("{:x}", spec.modulus()),
        basis: basis.to_hex(&field),
        c: gates.c(),
        gates,
    })
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<i32, CliError> {
    let rep = decompose_report(args)?;
    write_json(&rep, args.json.as_deref())?;
    Ok(EXIT_PASS)
}

fn workers(flag: Option<usize>) -> Result<usize, CliError> {
    match flag {
        Some(w) => Ok(w),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| usage(format!("{THREADS_ENV}={v} is not a count"))),
            Err(_) => Ok(0),
        },
    }
}

pub const CSV_HEADER: &str =
    "model,p,weight,trials,block_failures,epsilon,ci_low,ci_high,analytic_bound,threshold_proxy,n,k,t,c_conv,seed";

pub fn csv_line(r: &SimulationReport) -> String {
    let (model, p, w) = match r.model {
        ErrorModel::Iid { p } => ("iid", p.to_string(), String::new()),
        ErrorModel::FixedWeight { weight } => ("fixed_weight", String::new(), weight.to_string()),
    };
    let bound = r.analytic_bound.map(|b| b.to_string()).unwrap_or_default();
    format!(
        "{model},{p},{w},{},{},{},{},{},{bound},{},{},{},{},{},{}",
        r.trials, r.block_failures, r.epsilon, r.ci_low, r.ci_high, r.threshold_proxy, r.n, r.k, r.t,
        r.c_conv, r.seed
    )
}

pub fn simulate_report(args: &SimulateArgs) -> Result<SimulationReport, CliError> {
    let model = match (args.p, args.weight) {
        (Some(p), None) => ErrorModel::Iid { p },
        (None, Some(weight)) => ErrorModel::FixedWeight { weight },
        _ => return Err(usage("exactly one of --p or --weight is required")),
    };
    let man = Manifest::load(&args.artifact).map_err(failed)?;
    let t = man.matrix().map_err(failed)?;
    model.validate(t.n).map_err(usage)?;
    let dec = build_decoder(&t, man.params.t, DegA1Choice::Fixed(man.params.deg_a1)).map_err(failed)?;
    simulate(&t, &dec, model, args.trials, args.seed, workers(args.workers)?, args.c_conv).map_err(usage)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let r = simulate_report(args)?;
    write_json(&r, args.json.as_deref())?;
    if let Some(p) = &args.csv {
        fs::write(p, format!("{CSV_HEADER}\n{}\n", csv_line(&r))).map_err(usage)?;
    }
    eprintln!("wall time {:.3} s", r.wall_time.as_secs_f64());
    Ok(EXIT_PASS)
}
