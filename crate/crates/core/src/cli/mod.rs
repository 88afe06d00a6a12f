//! Command-line front end. `run` returns the process exit status:
//! 0 success (including REGION-UNSAT), 1 UNKNOWN, 2 usage or I/O error,
//! 3 parse error, 4 certification failure or invalid certificate.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebra::{DependenceRelation, KhovanskiiSystem};
use crate::certify::{certify_regular_zero, check_certificate, Budget, Certificate};
use crate::enclose::{parse_rational, Dyadic, IntervalBox};
use crate::formula::parse_formula;
use crate::reduce::eliminate_dependence;
use crate::search::{solve_formula, SearchConfig, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNKNOWN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CERTIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "kkit", version, about = "Certified zeros and satisfiability for restricted exponential polynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a formula file in canonical form.
    Parse {
        #[arg(long)]
        formula: PathBuf,
    },
    /// Print the formal Jacobian of a system file.
    Jac {
        #[arg(long)]
        system: PathBuf,
    },
    /// Certify a regular zero of a system inside a box.
    Certify {
        #[arg(long)]
        system: PathBuf,
        /// Box file, or the box written inline, e.g. "[[0.6, 0.8]]".
        #[arg(long = "box")]
        region: String,
        #[arg(long, env = "KKIT_PRECISION", default_value_t = 64)]
        precision: u32,
        #[arg(long, env = "KKIT_PRECISION_CAP", default_value_t = 4096)]
        precision_cap: u32,
    },
    /// Decide a formula file by branch and prune.
    Solve {
        #[arg(long)]
        formula: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Eliminate a dependent coordinate from a certified system.
    Reduce {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        cert: PathBuf,
        /// Relation `d;k1,...;g` meaning d·a_ℓ = Σ k_i·a_i + g.
        #[arg(long)]
        relation: String,
    },
    /// Re-verify a certificate file; exit 0 iff it is valid.
    Check {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Half-width of the search interval for unguarded variables.
    #[arg(long, env = "KKIT_RADIUS", default_value = "8")]
    radius: String,
    #[arg(long, env = "KKIT_DEPTH", default_value_t = 48)]
    depth: u32,
    #[arg(long, env = "KKIT_PRECISION", default_value_t = 64)]
    precision: u32,
    #[arg(long, env = "KKIT_PRECISION_CAP", default_value_t = 4096)]
    precision_cap: u32,
    /// Worker threads; defaults to the number of logical cores.
    #[arg(long, env = "KKIT_WORKERS")]
    workers: Option<usize>,
    #[arg(long, env = "KKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "KKIT_MAX_BOXES", default_value_t = 20_000)]
    max_boxes: usize,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

struct Fail(i32, String);

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn parse_err(e: impl std::fmt::Display) -> Fail {
    Fail(EXIT_PARSE, format!("parse error: {e}"))
}

fn load_system(path: &Path) -> Result<KhovanskiiSystem, Fail> {
    KhovanskiiSystem::parse(&read(path)?).map_err(parse_err)
}

fn load_certificate(path: &Path) -> Result<Certificate, Fail> {
    Certificate::from_json(&read(path)?).map_err(parse_err)
}

fn search_config(a: &SearchArgs) -> Result<SearchConfig, Fail> {
    let usage = |m: String| Fail(EXIT_USAGE, m);
    let q = parse_rational(&a.radius).ok_or_else(|| usage(format!("invalid radius `{}`", a.radius)))?;
    let radius = Dyadic::from_rational_exact(&q).ok_or_else(|| usage(format!("radius `{}` is not a dyadic rational", a.radius)))?;
    let cfg = SearchConfig {
        radius,
        max_depth: a.depth,
        precision: a.precision,
        precision_cap: a.precision_cap,
        workers: a.workers.unwrap_or_else(|| SearchConfig::default().workers),
        seed: a.seed,
        max_boxes: a.max_boxes,
        timing: a.timing,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, Fail> {
    let mut emit = |s: String| {
        out.write_all(s.as_bytes())
            .map_err(|e| Fail(EXIT_USAGE, format!("cannot write output: {e}")))
    };
    match cmd {
        Command::Parse { formula } => {
            let f = parse_formula(&read(&formula)?).map_err(parse_err)?;
            emit(format!("{f}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Jac { system } => {
            let sys = load_system(&system)?;
            emit(format!("{}det J = {}\n", sys.jacobian_text(), sys.jacobian_determinant()))?;
            Ok(EXIT_OK)
        }
        Command::Certify {
            system,
            region,
            precision,
            precision_cap,
        } => {
            let sys = load_system(&system)?;
            let text = if Path::new(&region).is_file() {
                read(Path::new(&region))?
            } else {
                region
            };
            let b = IntervalBox::parse(&text, precision.max(64)).map_err(parse_err)?;
            if b.dim() != sys.n() {
                return Err(Fail(
                    EXIT_USAGE,
                    format!("box has dimension {}, system has {} variables", b.dim(), sys.n()),
                ));
            }
            let budget = Budget {
                precision_start: precision,
                precision_cap,
                ..Budget::default()
            };
            match certify_regular_zero(&sys, &b, budget) {
                Ok(c) => {
                    emit(json_text(&c.to_json_value()))?;
                    Ok(EXIT_OK)
                }
                Err(f) => Err(Fail(EXIT_CERTIFY, format!("certification failed: {f}"))),
            }
        }
        Command::Solve { formula, search } => {
            let cfg = search_config(&search)?;
            let f = parse_formula(&read(&formula)?).map_err(parse_err)?;
            let report = solve_formula(&f, &cfg).map_err(|e| Fail(EXIT_PARSE, e.to_string()))?;
            emit(json_text(&report.to_json_value(&cfg)))?;
            Ok(match report.status {
                Status::Unknown => EXIT_UNKNOWN,
                _ => EXIT_OK,
            })
        }
        Command::Reduce { system, cert, relation } => {
            let sys = load_system(&system)?;
            let cert = load_certificate(&cert)?;
            let rel: DependenceRelation = relation.parse().map_err(parse_err)?;
            if cert.system != sys {
                return Err(Fail(EXIT_USAGE, "certificate is for a different system".into()));
            }
            if !check_certificate(&cert) {
                return Err(Fail(EXIT_CERTIFY, "certificate does not verify".into()));
            }
            match eliminate_dependence(&sys, &rel, &cert, Budget::default()) {
                Ok(r) => {
                    emit(json_text(&r.to_json_value()))?;
                    Ok(EXIT_OK)
                }
                Err(e) => Err(Fail(EXIT_CERTIFY, format!("reduction failed: {e}"))),
            }
        }
        Command::Check { cert } => {
            let c = load_certificate(&cert)?;
            if check_certificate(&c) {
                emit("valid\n".into())?;
                Ok(EXIT_OK)
            } else {
                emit("invalid\n".into())?;
                Ok(EXIT_CERTIFY)
            }
        }
    }
}

/// Runs one invocation, writing documents to `out` and diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "kkit: {msg}");
            code
        }
    }
}
