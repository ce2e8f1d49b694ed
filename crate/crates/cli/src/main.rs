use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use recon_core::chiral::{
    check_c1d_action, check_locality_1d, check_pseudoderivation, check_translation, make_local_endo,
};
use recon_core::conflie::{validate_rep, Gen};
use recon_core::error::Error;
use recon_core::io::{mud_from_json, mud_to_json, spec_from_str, spec_to_json, AlgebraSpec};
use recon_core::models::{
    build_heisenberg, build_tensor_2d, fixture_negative_energy, fixture_negative_norm, fixture_scaled_omega,
};
use recon_core::reconstruct::checks::run_suites;
use recon_core::reconstruct::isotypic::isotypic_crosscheck;
use recon_core::reconstruct::synthetic::{check_gegenbauer, gegenbauer_spec};
use recon_core::reconstruct::{reconstruct_d2, reconstruct_general, MuDTable};
use recon_core::report::{Check, Report, Status};

const EXIT_PASS: u8 = 0;
const EXIT_CHECK: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;
const EXIT_UNIQUENESS: u8 = 5;
const EXIT_INTERNAL: u8 = 6;

#[derive(Parser)]
#[command(name = "recon", version, about = "Reconstruct and check D-dimensional vertex algebras from chiral data")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the hypotheses on a spec file.
    Validate {
        spec: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for the D-dimensional products and write a table file.
    Reconstruct {
        spec: PathBuf,
        #[arg(long)]
        dim: usize,
        /// Truncate the spec at Δ ≤ cutoff; half-integers like 3/2 are accepted.
        #[arg(long)]
        cutoff: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Solver::Auto)]
        solver: Solver,
        /// Skip the hypothesis checks (needed for specs without a full conformal action).
        #[arg(long)]
        no_validate: bool,
    },
    /// Run check suites on a table file against its spec.
    Check {
        table: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a model, reconstruct it and write spec.json, mud.json and report.json.
    Demo {
        #[arg(value_enum)]
        model: Model,
        #[arg(long, default_value_t = 3)]
        cutoff: i64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write the spec file of a built-in model.
    Export {
        #[arg(value_enum)]
        model: ExportModel,
        #[arg(long, default_value_t = 3)]
        cutoff: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Auto,
    Projection,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Restriction,
    Parity,
    Poles,
    Covariance,
    Locality,
    Isotypic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Heisenberg,
    Tensor2d,
    Gegenbauer4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportModel {
    Heisenberg,
    Tensor2d,
    Gegenbauer4,
    NegativeNorm,
    NegativeEnergy,
    ScaledOmega,
}

/// A failed command: exit code plus a machine-readable diagnostic.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    report: Option<Value>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, kind: "usage", message: message.into(), report: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Hypothesis(_) => (EXIT_HYPOTHESIS, "hypothesis"),
            Error::Uniqueness(_) => (EXIT_UNIQUENESS, "uniqueness"),
            Error::Inconclusive(_) => (EXIT_INCONCLUSIVE, "inconclusive"),
            Error::Format(_)
            | Error::Parse(_)
            | Error::Precondition(_)
            | Error::InvalidSpace(_)
            | Error::Structural(_) => (EXIT_USAGE, "format"),
            _ => (EXIT_INTERNAL, "internal"),
        };
        Failure { code, kind, message: e.to_string(), report: None }
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            return fail(Failure::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().expect("thread pool is set once");
    }
    let r = match cli.cmd {
        Cmd::Validate { spec, out } => validate(&spec, out.as_deref()),
        Cmd::Reconstruct { spec, dim, cutoff, out, solver, no_validate } => {
            reconstruct(&spec, dim, cutoff.as_deref(), &out, solver, no_validate)
        }
        Cmd::Check { table, spec, suite, out } => check(&table, &spec, suite, out.as_deref()),
        Cmd::Demo { model, cutoff, out } => demo(model, cutoff, &out),
        Cmd::Export { model, cutoff, out } => export(model, cutoff, out.as_deref()),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    let mut d = json!({"error": f.kind, "message": f.message, "exit_code": f.code});
    if let Some(r) = f.report {
        d["report"] = r;
    }
    eprintln!("{}", serde_json::to_string(&d).expect("diagnostic serializes"));
    ExitCode::from(f.code)
}

fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let sha = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| Failure::usage(format!("{} is not UTF-8", path.display())))?;
    Ok((text, sha))
}

fn load_spec(path: &Path) -> Result<(AlgebraSpec, String), Failure> {
    let (text, sha) = read_input(path)?;
    Ok((spec_from_str(&text)?, sha))
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).expect("json serializes") + "\n";
    match path {
        Some(p) => fs::write(p, s).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn exit_of(r: &Report) -> u8 {
    match r.status() {
        Status::Pass => EXIT_PASS,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
        Status::Fail => EXIT_CHECK,
    }
}

/// Hypothesis report: conformal action, and for the local action the translation and c1d checks.
fn hypotheses(spec: &AlgebraSpec) -> Report {
    let mut r = Report::new("hypotheses");
    r.extend(validate_rep(&spec.rep));
    r.extend(check_translation(&spec.table));
    match check_c1d_action(&spec.table, &spec.rep) {
        Ok(c) => r.extend(c),
        Err(e) => r.push(Check::fail("c1d_action", e.to_string(), json!({}))),
    }
    r
}

fn validate(spec: &Path, out: Option<&Path>) -> CmdResult {
    let (spec, sha) = load_spec(spec)?;
    let r = hypotheses(&spec);
    write_json(out, &json!({"command": "validate", "input_sha256": sha, "report": r.to_json()}))?;
    Ok(exit_of(&r))
}

fn parse_cutoff2(s: &str) -> Result<i64, Failure> {
    let bad = || Failure::usage(format!("--cutoff must be a nonnegative integer or half-integer, got '{s}'"));
    let c2 = match s.split_once('/') {
        Some((n, "2")) => n.trim().parse::<i64>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
        None => 2 * s.trim().parse::<i64>().map_err(|_| bad())?,
    };
    if c2 < 0 {
        return Err(bad());
    }
    Ok(c2)
}

fn solve(spec: &AlgebraSpec, solver: Solver) -> Result<MuDTable, Failure> {
    let dim = spec.dim();
    let r = match solver {
        Solver::Projection => {
            if dim != 2 {
                return Err(Failure::usage("the projection solver needs D = 2"));
            }
            reconstruct_d2(&spec.table, &spec.rep)
        }
        Solver::Auto if dim == 2 => reconstruct_d2(&spec.table, &spec.rep),
        _ => reconstruct_general(&spec.table, &spec.rep, dim, spec.source_cutoff2),
    };
    Ok(r?)
}

fn reconstruct(
    path: &Path,
    dim: usize,
    cutoff: Option<&str>,
    out: &Path,
    solver: Solver,
    no_validate: bool,
) -> CmdResult {
    if dim == 0 || dim % 2 == 1 {
        return Err(Failure::usage(format!("--dim must be a positive even integer, got {dim}")));
    }
    let (mut spec, sha) = load_spec(path)?;
    if spec.dim() != dim {
        return Err(Failure::usage(format!("--dim {dim} does not match the spec dimension {}", spec.dim())));
    }
    if let Some(c) = cutoff {
        spec = spec.truncate(parse_cutoff2(c)?)?;
    }
    if !no_validate {
        let r = hypotheses(&spec);
        if r.has_failure() {
            return Err(Failure {
                code: EXIT_HYPOTHESIS,
                kind: "hypothesis",
                message: "the spec violates the reconstruction hypotheses".into(),
                report: Some(r.to_json()),
            });
        }
    }
    let mud = solve(&spec, solver)?;
    write_json(Some(out), &mud_to_json(&mud, &sha))?;
    Ok(EXIT_PASS)
}

fn suites_of(s: Suite) -> &'static [&'static str] {
    match s {
        Suite::Restriction => &["restriction"],
        Suite::Parity => &["parity"],
        Suite::Poles => &["poles"],
        Suite::Covariance => &["covariance"],
        Suite::Locality => &["locality"],
        Suite::Isotypic => &[],
        Suite::All => &["parity", "restriction", "poles", "covariance", "locality"],
    }
}

fn check(table: &Path, spec_path: &Path, suite: Suite, out: Option<&Path>) -> CmdResult {
    let (spec, sha) = load_spec(spec_path)?;
    let (text, _) = read_input(table)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::from(Error::Format(format!("table: {e}"))))?;
    let recorded = v.pointer("/provenance/input_sha256").and_then(Value::as_str).unwrap_or_default();
    if recorded != sha {
        return Err(Failure::usage(format!("table was built from input '{recorded}' but the spec hashes to {sha}")));
    }
    // tables built with --cutoff refer to the truncated spec
    let spec = match v.pointer("/provenance/cutoff2").and_then(Value::as_i64) {
        Some(c) if c < spec.rep.space.cutoff2 => spec.truncate(c)?,
        _ => spec,
    };
    let (mud, prov) = mud_from_json(&v, &spec.rep.space)?;
    if prov.dim != spec.dim() {
        return Err(Failure::usage("table dimension differs from the spec"));
    }
    let mut r = run_suites(&mud, &spec.table, &spec.rep, suites_of(suite));
    if matches!(suite, Suite::Isotypic) {
        r.extend(isotypic_crosscheck(&mud, &spec.table, &spec.rep, mud.source_cutoff2));
    }
    write_json(out, &json!({"command": "check", "provenance": prov, "report": r.to_json()}))?;
    Ok(exit_of(&r))
}

fn heisenberg_spec(cutoff: i64) -> AlgebraSpec {
    let m = build_heisenberg(cutoff);
    AlgebraSpec { name: Some("heisenberg".into()), rep: m.rep(), table: m.table.clone(), source_cutoff2: None }
}

fn tensor_spec(cutoff: i64) -> AlgebraSpec {
    let m = build_tensor_2d(cutoff);
    AlgebraSpec { name: Some("tensor2d".into()), rep: m.rep, table: m.table, source_cutoff2: None }
}

fn gegenbauer4_spec(cutoff: i64) -> Result<AlgebraSpec, Failure> {
    let (rep, table) = gegenbauer_spec(4, cutoff as u32)?;
    Ok(AlgebraSpec { name: Some("gegenbauer4".into()), rep, table, source_cutoff2: Some(0) })
}

fn check_cutoff(cutoff: i64) -> Result<(), Failure> {
    if cutoff < 0 {
        return Err(Failure::usage("--cutoff must be nonnegative"));
    }
    Ok(())
}

fn export(model: ExportModel, cutoff: i64, out: Option<&Path>) -> CmdResult {
    check_cutoff(cutoff)?;
    let fixture = |name: &str, (rep, table)| AlgebraSpec { name: Some(name.into()), rep, table, source_cutoff2: None };
    let spec = match model {
        ExportModel::Heisenberg => heisenberg_spec(cutoff),
        ExportModel::Tensor2d => tensor_spec(cutoff),
        ExportModel::Gegenbauer4 => gegenbauer4_spec(cutoff)?,
        ExportModel::NegativeNorm => fixture("negative-norm", fixture_negative_norm(cutoff)),
        ExportModel::NegativeEnergy => fixture("negative-energy", fixture_negative_energy(cutoff)),
        ExportModel::ScaledOmega => fixture("scaled-omega", fixture_scaled_omega(cutoff)),
    };
    write_json(out, &spec_to_json(&spec))?;
    Ok(EXIT_PASS)
}

/// Writes spec.json and returns its hash.
fn write_spec(dir: &Path, spec: &AlgebraSpec) -> Result<String, Failure> {
    let p = dir.join("spec.json");
    write_json(Some(&p), &spec_to_json(spec))?;
    Ok(read_input(&p)?.1)
}

fn demo(model: Model, cutoff: i64, dir: &Path) -> CmdResult {
    check_cutoff(cutoff)?;
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    let mut r = Report::new("demo");
    match model {
        Model::Heisenberg => {
            let spec = heisenberg_spec(cutoff);
            write_spec(dir, &spec)?;
            r.extend(hypotheses(&spec));
            let m = build_heisenberg(cutoff);
            let a = m.alpha();
            let loc = check_locality_1d(&m.table, &a, &a);
            r.push(match loc.minimal_n {
                Some(2) => Check::pass("locality_1d", "(x−y)^2 [Y(a,x),Y(a,y)] = 0 and N = 1 fails"),
                Some(n) => Check::fail("locality_1d", "unexpected minimal locality order", json!({"minimal_n": n})),
                None => Check::inconclusive("locality_1d", "no order found within the window"),
            });
            let mut endo = Report::new("local_endomorphisms");
            for g in [Gen::H, Gen::C(1)] {
                let x = spec.rep.op(g).expect("Heisenberg action has H and C1");
                match make_local_endo(&m.table, x) {
                    Ok(e) => {
                        let mut p = check_pseudoderivation(&e, &m.table);
                        p.title = g.to_string();
                        endo.extend(p);
                    }
                    Err(c) => endo.push(c),
                }
            }
            r.extend(endo);
        }
        Model::Tensor2d => {
            let spec = tensor_spec(cutoff);
            let sha = write_spec(dir, &spec)?;
            r.extend(hypotheses(&spec));
            let mud = reconstruct_d2(&spec.table, &spec.rep)?;
            write_json(Some(&dir.join("mud.json")), &mud_to_json(&mud, &sha))?;
            r.extend(run_suites(&mud, &spec.table, &spec.rep, suites_of(Suite::All)));
        }
        Model::Gegenbauer4 => {
            let spec = gegenbauer4_spec(cutoff)?;
            let sha = write_spec(dir, &spec)?;
            let mud = reconstruct_general(&spec.table, &spec.rep, 4, spec.source_cutoff2)?;
            write_json(Some(&dir.join("mud.json")), &mud_to_json(&mud, &sha))?;
            r.extend(run_suites(&mud, &spec.table, &spec.rep, &["parity", "restriction"]));
            r.push(check_gegenbauer(&mud, cutoff as u32));
            r.extend(isotypic_crosscheck(&mud, &spec.table, &spec.rep, 0));
        }
    }
    write_json(Some(&dir.join("report.json")), &json!({"command": "demo", "report": r.to_json()}))?;
    Ok(exit_of(&r))
}
