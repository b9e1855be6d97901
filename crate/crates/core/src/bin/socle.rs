//! `socle`: JSON front end to the library.
//!
//! Exit codes: 0 all checks pass, 1 a checked property failed, 2 input or
//! usage error, 3 numeric failure.

use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use socle::central::equivalence_harness;
use socle::ideal::{ideal_basis, tensor_model_check};
use socle::instance::{generate, InstanceFile};
use socle::report::{Check, Report};
use socle::shoda::{corner_square_route, in_commutator_space, shoda_socle};
use socle::spectral::{
    block_traces, rank, rank_direct, socle_decompose, spectral_data, spectral_rank, trace, RANK_SAMPLES,
};
use socle::suite::{parse_profiles, parse_seeds, sweep, Suite};
use socle::wedderburn::{attach_decomposition, verify_iso, wedderburn_decompose, IsoFile, WedderburnIso};
use socle::{Algebra, Element, SocleError, Tolerance, C64};

const CORPUS: &str = "1;1,1;2;2,1;2,2;3;1,1,1;3,2,1";

#[derive(Parser)]
#[command(name = "socle", version, about = "Spectral rank, trace, Wedderburn and Shoda checks on semisimple algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Target {
    /// Instance file, or `-` for stdin.
    instance: PathBuf,
    /// Element name inside the instance.
    element: String,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decomposition of a structure-constant instance, as written by
    /// `decompose -o`. Computed on the fly when absent.
    #[arg(long)]
    iso: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral rank of an element.
    Rank(Target),
    /// Spectral trace.
    Trace(Target),
    /// Distinct spectral values with multiplicities.
    Spectrum(Target),
    /// `a = sum lambda_i u p_i` with minimal projections `p_i`.
    Diagonalize(Target),
    /// Wedderburn decomposition.
    Decompose {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the isomorphism here.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Commutator certificate, or the per-ideal trace obstruction.
    Shoda(Target),
    /// Two-sided ideal generated by a projection.
    Ideal(Target),
    /// Central-socle predicates and their equivalence verdict.
    Central {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a seeded instance file.
    Gen {
        /// Block sizes, e.g. `2,2`.
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Present in a random basis through structure constants.
        #[arg(long)]
        scramble: bool,
    },
    /// Property sweep; one JSON line per instance, then a summary.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Half-open range `A..B` or a single seed.
        #[arg(long, default_value = "0..25")]
        seeds: String,
        /// Profiles separated by `;`, sizes by `,`.
        #[arg(long, default_value = CORPUS)]
        sizes: String,
    },
}

struct Failure {
    code: u8,
    body: serde_json::Value,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 2, body: json!({ "error": msg.into() }) }
    }
}

impl From<SocleError> for Failure {
    fn from(e: SocleError) -> Self {
        let code = match e {
            SocleError::NotInCommutatorSpace(_) => 1,
            _ if e.is_numeric() => 3,
            _ => 2,
        };
        Failure { code, body: json!({ "error": e.to_string() }) }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// `base` with any `SOCLE_TOL_*` variables applied on top.
fn env_overrides(base: Tolerance) -> CliResult<Tolerance> {
    let mut tol = base;
    for (var, slot) in [
        ("SOCLE_TOL_RANK", &mut tol.rank_tol),
        ("SOCLE_TOL_CLUSTER", &mut tol.cluster_tol),
        ("SOCLE_TOL_RESIDUAL", &mut tol.residual_tol),
    ] {
        if let Ok(v) = std::env::var(var) {
            *slot = v.trim().parse().map_err(|_| Failure::usage(format!("{var}={v:?} is not a number")))?;
        }
    }
    tol.validate()?;
    Ok(tol)
}

fn env_tolerance() -> CliResult<Tolerance> {
    env_overrides(Tolerance::default())
}

/// Algebra of an instance under file tolerances, then environment.
fn build_algebra(file: &mut InstanceFile) -> CliResult<Algebra> {
    let tol = match file.tolerances.take() {
        Some(t) => t.apply(Tolerance::default())?,
        None => Tolerance::default(),
    };
    Ok(file.algebra(env_overrides(tol)?)?)
}

fn read_text(path: &Path) -> CliResult<String> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        body: json!({
            "error": "malformed JSON",
            "file": path.display().to_string(),
            "line": e.line(),
            "column": e.column(),
            "detail": e.to_string(),
        }),
    })
}

/// Instance, algebra with a decomposition attached, and effective
/// tolerances (file over defaults, environment over both).
fn load(path: &Path, common: &Common) -> CliResult<(InstanceFile, Algebra)> {
    let mut file: InstanceFile = parse_json(path)?;
    let mut alg = build_algebra(&mut file)?;
    if !alg.has_iso() {
        match &common.iso {
            Some(p) => {
                let iso_file: IsoFile = parse_json(p)?;
                alg.set_iso(WedderburnIso::from_file(&iso_file)?)?;
            }
            None => attach_decomposition(&mut alg, common.seed)?,
        }
    }
    Ok((file, alg))
}

fn load_target(t: &Target) -> CliResult<(Algebra, Element)> {
    let (file, alg) = load(&t.instance, &t.common)?;
    let a = file.element(&alg, &t.element)?;
    Ok((alg, a))
}

fn run(cli: &Cli, argv: Vec<String>) -> CliResult<Report> {
    let report = |seed: Option<u64>, tol: Tolerance| Report::new(argv.clone(), seed, tol);
    match &cli.command {
        Command::Rank(t) => {
            let (alg, a) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let value = rank(&alg, &a)?;
            let direct = rank_direct(&alg, &a)?;
            let sampled = spectral_rank(&alg, &a, RANK_SAMPLES, t.common.seed)?;
            r.set("rank", value);
            r.set("rank_direct", direct);
            r.set("spectral_rank", sampled);
            r.push(Check::new("rank_oracle", direct == sampled, None, || json!({ "element": a })));
            Ok(r)
        }
        Command::Trace(t) => {
            let (alg, a) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let tr = trace(&alg, &a)?;
            let classical: C64 = block_traces(&alg, &a)?.into_iter().sum();
            r.set("trace", tr);
            r.set("block_trace", classical);
            let gap = (tr - classical).norm() / a.norm().max(1.0);
            r.push(Check::bounded(
                "trace_consistency",
                gap,
                alg.tol().cluster_tol * alg.dim() as f64,
                || json!({ "element": a }),
            ));
            Ok(r)
        }
        Command::Spectrum(t) => {
            let (alg, a) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let data = spectral_data(&alg, &a)?;
            let total: usize = data.distinct.iter().map(|t| t.multiplicity).sum();
            let expected = data.rank + usize::from(data.includes_zero);
            r.set("spectrum", &data.distinct);
            r.set("includes_zero", data.includes_zero);
            r.set("rank", data.rank);
            r.push(Check::new(
                "multiplicity_sum",
                total == expected,
                None,
                || json!({ "sum": total, "expected": expected }),
            ));
            Ok(r)
        }
        Command::Diagonalize(t) => {
            let (alg, a) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let d = socle_decompose(&alg, &a, t.common.seed)?;
            let residual = d.reconstruct(&alg).distance(&a) / a.norm().max(1.0);
            let terms: Vec<_> = d.terms.iter().map(|(l, p)| json!({ "value": l, "projection": p })).collect();
            r.set("u", &d.u);
            r.set("v", &d.v);
            r.set("terms", terms);
            r.push(Check::bounded("reconstruction", residual, alg.tol().residual_tol, || json!({ "element": a })));
            Ok(r)
        }
        Command::Decompose { instance, seed, output } => {
            let mut file: InstanceFile = parse_json(instance)?;
            let alg = build_algebra(&mut file)?;
            let mut r = report(Some(*seed), *alg.tol());
            let iso = wedderburn_decompose(&alg, *seed)?;
            let check = verify_iso(&alg, &iso, *seed)?;
            r.set("sizes", &iso.sizes);
            r.set("verification", &check);
            r.push(Check::bounded("iso", check.worst(), alg.tol().residual_tol, || json!(check)));
            if let Some(out) = output {
                let text = serde_json::to_string(&iso.to_file()).expect("iso serializes");
                std::fs::write(out, text)
                    .map_err(|e| Failure::usage(format!("cannot write {}: {e}", out.display())))?;
            }
            Ok(r)
        }
        Command::Shoda(t) => {
            let (alg, a) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let membership = in_commutator_space(&alg, &a)?;
            r.set("member", membership.member);
            r.set("component_traces", &membership.traces);
            if !membership.member {
                r.push(Check::new(
                    "membership",
                    false,
                    None,
                    || json!({ "element": a, "component_traces": membership.traces }),
                ));
                return Ok(r);
            }
            let cert = shoda_socle(&alg, &a, t.common.seed)?;
            r.push(Check::bounded("commutator_residual", cert.residual, alg.tol().residual_tol, || json!(cert)));
            r.push(Check::new("rank_bound", cert.rank_bound_holds, None, || json!(cert)));
            r.set("certificate", &cert);
            let corner = corner_square_route(&alg, &a, t.common.seed)?;
            r.set("corner_square_route", corner.as_ref().map(|c| c.residual));
            Ok(r)
        }
        Command::Ideal(t) => {
            let (alg, p) = load_target(t)?;
            let mut r = report(Some(t.common.seed), *alg.tol());
            let cert = ideal_basis(&alg, &p)?;
            r.set("dim", cert.basis.dim());
            r.set("minimal", cert.minimal);
            r.set("basis", cert.basis.basis());
            if let Some(b) = cert.block_index {
                r.set("block_index", b);
            }
            match tensor_model_check(&alg, &p) {
                Ok(tm) => {
                    r.push(Check::new("tensor_model", tm.pass, Some(tm.product_residual), || json!(tm)));
                    r.set("tensor_model", tm);
                }
                // only rank-one projections have a tensor model
                Err(SocleError::Precondition(msg)) => r.set("tensor_model", json!({ "skipped": msg })),
                Err(e) => return Err(e.into()),
            }
            Ok(r)
        }
        Command::Central { instance, common } => {
            let (_, alg) = load(instance, common)?;
            let mut r = report(Some(common.seed), *alg.tol());
            let h = equivalence_harness(&alg, common.seed)?;
            r.push(Check::new("equivalence_pattern", h.consistent, None, || json!(h)));
            r.set("harness", h);
            Ok(r)
        }
        Command::Gen { .. } | Command::Check { .. } => unreachable!("handled by main"),
    }
}

fn emit(out: &mut impl Write, v: &impl serde::Serialize) {
    let line = serde_json::to_string(v).expect("output serializes");
    // a closed pipe is not worth a panic
    let _ = writeln!(out, "{line}");
}

fn gen(sizes: &str, seed: u64, scramble: bool) -> CliResult<InstanceFile> {
    let profiles = parse_profiles(sizes).map_err(Failure::usage)?;
    let [sizes] = profiles.as_slice() else {
        return Err(Failure::usage("gen takes a single size profile"));
    };
    Ok(generate(sizes, seed, scramble, env_tolerance()?)?)
}

fn check(argv: Vec<String>, suite: Suite, seeds: &str, sizes: &str, out: &mut impl Write) -> CliResult<Report> {
    let profiles = parse_profiles(sizes).map_err(Failure::usage)?;
    let seeds = parse_seeds(seeds).map_err(Failure::usage)?;
    let tol = env_tolerance()?;
    let mut summary = Report::new(argv, None, tol);
    let lines = sweep(suite, &profiles, seeds, tol);
    let mut failed = Vec::new();
    for line in &lines {
        emit(out, line);
        for c in line.checks.iter().filter(|c| !c.pass) {
            failed.push(format!("{:?}/{}/{}", line.sizes, line.seed, c.name));
            summary.push(c.clone());
        }
    }
    summary.set("instances", lines.len());
    summary.set("failed_instances", lines.iter().filter(|l| !l.pass).count());
    summary.set("failed", failed);
    Ok(summary)
}

fn exit_code(r: &Report) -> u8 {
    if r.pass {
        0
    } else if r.numeric_only_failure() {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let start = Instant::now();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let outcome = match &cli.command {
        Command::Gen { sizes, seed, scramble } => gen(sizes, *seed, *scramble).map(|f| {
            emit(&mut out, &f);
            0
        }),
        Command::Check { suite, seeds, sizes } => check(argv, *suite, seeds, sizes, &mut out).map(|mut r| {
            r.wall_time = start.elapsed().as_secs_f64();
            emit(&mut out, &r);
            exit_code(&r)
        }),
        _ => run(&cli, argv).map(|mut r| {
            r.wall_time = start.elapsed().as_secs_f64();
            emit(&mut out, &r);
            exit_code(&r)
        }),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(f) => {
            emit(&mut out, &f.body);
            eprintln!("socle: {}", f.body["error"].as_str().unwrap_or("error"));
            f.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
