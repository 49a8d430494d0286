//! `adhm`: generate ADHM data, check the defining conditions, and run
//! seeded verification campaigns. All input and output is JSON.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 retry or resource exhaustion.

use std::fmt::Display;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use adhm_core::campaign::{run_campaign, Report, Suite};
use adhm_core::monad::{build_jm, compose_residual, framing_residual, monad_residual, MonadCoeffs};
use adhm_core::plane::{check_t1, check_t2, from_plane_points, PlaneADHM};
use adhm_core::quiver::{
    brute_force_semistable, check_relations, check_semistable_spectral, relation_defects,
    FramedRep, StabilityParams, Verdict, DEFAULT_BUDGET,
};
use adhm_core::random::{
    random_costable, random_framed_rep, random_gauge, random_points, sample_rng,
};
use adhm_core::xn::{
    check_p1, check_p2, check_p3_direct, from_xn_points, p1_residual, zeta_inverse, ChartData,
    XnADHM,
};
use adhm_core::{AdhmError, Backend, Gf, Matrix, Rational, Scalar, C64, DEFAULT_TOL};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "adhm",
    version,
    about = "ADHM data for Hilbert schemes of points on X_n"
)]
struct Cli {
    /// Relative tolerance for float rank decisions; overrides ADHM_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit generated data as JSON.
    Gen(GenArgs),
    /// Check a JSON file (or stdin) against a family of conditions.
    Check(CheckArgs),
    /// Run a seeded verification suite.
    Campaign(CampaignArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Distinct points given by `--points`, or random ones.
    Points,
    /// A random co-stable commuting triple, lifted through chart `m`.
    RandomCostable,
    /// A random framed representation with nonzero framing map.
    RandomRep,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Xn,
    Plane,
    Monad,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "points")]
    kind: Kind,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Number of points; inferred from `--points` when omitted.
    #[arg(long)]
    c: Option<usize>,
    /// Chart used for the construction.
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `z1,w1;z2,w2;…` in chart `m`. Complex entries may be written `a+bi`.
    #[arg(long)]
    points: Option<String>,
    /// `complex`, `rational` or `gf:p`.
    #[arg(long, default_value = "complex")]
    backend: String,
    /// Output form for `points` and `random-costable`.
    #[arg(long, value_enum, default_value = "xn")]
    emit: Emit,
    /// Draws allowed before `random-costable` gives up.
    #[arg(long, default_value_t = 100)]
    retries: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    #[value(name = "P")]
    P,
    #[value(name = "Q")]
    Q,
    #[value(name = "T")]
    T,
    #[value(name = "monad")]
    Monad,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// JSON input; stdin when omitted or `-`.
    file: Option<PathBuf>,
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, default_value = "complex")]
    backend: String,
}

#[derive(clap::Args)]
struct CampaignArgs {
    suite: String,
    /// Defaults to the acceptance sample count of the suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<AdhmError> for Failure {
    fn from(e: AdhmError) -> Self {
        let code = match e {
            AdhmError::Parse(_)
            | AdhmError::InvalidInput(_)
            | AdhmError::ShapeMismatch(_)
            | AdhmError::DuplicatePoint(_)
            | AdhmError::IndexOutOfRange { .. }
            | AdhmError::UnsupportedBackend(_) => 2,
            AdhmError::TooLarge { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Runs `$body` with `$S` bound to the scalar type of `$backend`.
macro_rules! with_scalar {
    ($backend:expr, $S:ident => $body:expr) => {
        match $backend {
            Backend::Complex => {
                type $S = C64;
                $body
            }
            Backend::Rational => {
                type $S = Rational;
                $body
            }
            Backend::Prime(p) => with_prime!(p, P => {
                type $S = Gf<P>;
                $body
            }),
        }
    };
}

/// Runs `$body` with the const `$P` bound to `$p`, for the supported primes.
macro_rules! with_prime {
    ($p:expr, $P:ident => $body:expr) => {
        match $p {
            2 => {
                const $P: u64 = 2;
                $body
            }
            3 => {
                const $P: u64 = 3;
                $body
            }
            5 => {
                const $P: u64 = 5;
                $body
            }
            7 => {
                const $P: u64 = 7;
                $body
            }
            11 => {
                const $P: u64 = 11;
                $body
            }
            13 => {
                const $P: u64 = 13;
                $body
            }
            p => Err(Failure::usage(format!(
                "unsupported prime {p}; use one of 2, 3, 5, 7, 11, 13"
            ))),
        }
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("adhm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let tol = tolerance(cli.tol)?;
    match cli.command {
        Command::Gen(args) => gen(&args, tol).map(|()| 0),
        Command::Check(args) => check(&args, tol),
        Command::Campaign(args) => campaign(&args, tol),
    }
}

fn tolerance(flag: Option<f64>) -> CliResult<f64> {
    let tol = match (flag, std::env::var("ADHM_TOL")) {
        (Some(t), _) => t,
        (None, Ok(s)) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("ADHM_TOL `{s}` is not a number")))?,
        (None, Err(_)) => DEFAULT_TOL,
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::usage(format!(
            "tolerance {tol} must be finite and non-negative"
        )));
    }
    Ok(tol)
}

fn emit<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    println!("{text}");
    Ok(())
}

fn backend(s: &str) -> CliResult<Backend> {
    s.parse().map_err(Failure::from)
}

// ---------------------------------------------------------------- gen

fn gen(args: &GenArgs, tol: f64) -> CliResult<()> {
    if args.n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    if args.c == Some(0) {
        return Err(Failure::usage("--c must be at least 1"));
    }
    let backend = backend(&args.backend)?;
    match args.kind {
        Kind::Points => with_scalar!(backend, S => gen_points::<S>(args, tol)),
        Kind::RandomCostable => {
            require_complex(backend, "random-costable")?;
            gen_costable(args, tol)
        }
        Kind::RandomRep => {
            require_complex(backend, "random-rep")?;
            gen_rep(args)
        }
    }
}

fn require_complex(backend: Backend, kind: &str) -> CliResult<()> {
    if backend == Backend::Complex {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "--kind {kind} draws complex data; use --backend complex"
        )))
    }
}

fn check_chart(m: usize, c: usize) -> CliResult<()> {
    if m > c {
        return Err(Failure::usage(format!("--m {m} exceeds c = {c}")));
    }
    Ok(())
}

fn gen_points<S: Scalar>(args: &GenArgs, tol: f64) -> CliResult<()> {
    let points: Vec<(S, S)> = match &args.points {
        Some(text) => parse_points(text)?,
        None => {
            let c = args
                .c
                .ok_or_else(|| Failure::usage("--kind points needs --points or --c"))?;
            let mut rng = sample_rng(args.seed, 0);
            random_points(c, 0.5, &mut rng)
                .into_iter()
                .map(|(z, w)| Some((S::from_c64(z)?, S::from_c64(w)?)))
                .collect::<Option<_>>()
                .ok_or_else(|| {
                    Failure::usage("random points need --backend complex; pass --points")
                })?
        }
    };
    if let Some(c) = args.c {
        if c != points.len() {
            return Err(Failure::usage(format!(
                "--c {c} but {} points were given",
                points.len()
            )));
        }
    }
    check_chart(args.m, points.len())?;
    match args.emit {
        Emit::Xn => emit(&from_xn_points(args.n, args.m, &points, tol)?),
        Emit::Plane => emit(&from_plane_points(&points)?),
        Emit::Monad => emit(&build_jm(&from_plane_points(&points)?, args.n, args.m)?),
    }
}

fn gen_costable(args: &GenArgs, tol: f64) -> CliResult<()> {
    let c = args.c.unwrap_or(1);
    check_chart(args.m, c)?;
    let mut rng = sample_rng(args.seed, 0);
    let d = random_costable(c, args.retries, &mut rng).ok_or_else(|| Failure {
        code: 3,
        message: format!("no co-stable triple in {} draws", args.retries),
    })?;
    match args.emit {
        Emit::Plane => emit(&d),
        Emit::Monad => emit(&build_jm(&d, args.n, args.m)?),
        Emit::Xn => {
            let cd = ChartData {
                m: args.m,
                b: d.b1,
                e_m: d.b2,
                e: d.e,
                a2m: random_gauge(c, &mut rng),
            };
            emit(&zeta_inverse(&cd, args.n, tol)?)
        }
    }
}

fn gen_rep(args: &GenArgs) -> CliResult<()> {
    let c = args.c.unwrap_or(2);
    if args.n < 2 || c < 2 {
        return Err(Failure::usage(
            "--kind random-rep needs --n ≥ 2 and --c ≥ 2",
        ));
    }
    if args.emit != Emit::Xn {
        return Err(Failure::usage(
            "--kind random-rep emits a representation; drop --emit",
        ));
    }
    check_chart(args.m, c)?;
    let mut rng = sample_rng(args.seed, 0);
    emit(&random_framed_rep(args.n, c, args.m, &mut rng))
}

fn parse_points<S: Scalar>(text: &str) -> CliResult<Vec<(S, S)>> {
    text.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (z, w) = pair
                .split_once(',')
                .ok_or_else(|| Failure::usage(format!("point `{pair}` is not of the form z,w")))?;
            Ok((parse_entry(z)?, parse_entry(w)?))
        })
        .collect()
}

fn parse_entry<S: Scalar>(text: &str) -> CliResult<S> {
    let t = text.trim();
    let bad = || Failure::usage(format!("cannot read `{t}` as a {} entry", S::backend()));
    let value = match S::backend() {
        Backend::Complex => {
            let (re, im) = parse_complex(t).ok_or_else(bad)?;
            serde_json::json!([re, im])
        }
        Backend::Rational => Value::String(t.to_string()),
        Backend::Prime(_) => Value::from(t.parse::<i64>().map_err(|_| bad())?),
    };
    S::from_json(&value).map_err(|_| bad())
}

/// Reads `a`, `bi`, `a+bi` or `a-bi`.
fn parse_complex(t: &str) -> Option<(f64, f64)> {
    let t: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Some((t.parse().ok()?, 0.0));
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        s => s.parse().ok(),
    };
    match split {
        Some(k) => Some((body[..k].parse().ok()?, imag(&body[k..])?)),
        None => Some((0.0, imag(body)?)),
    }
}

// ---------------------------------------------------------------- check

fn read_input(file: &Option<PathBuf>) -> CliResult<String> {
    let mut text = String::new();
    match file {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text)
        .map_err(|e| Failure::usage(format!("input is not a valid {what}: {e}")))
}

fn check(args: &CheckArgs, tol: f64) -> CliResult<u8> {
    let start = Instant::now();
    let backend = backend(&args.backend)?;
    let text = read_input(&args.file)?;
    let mut report = match args.which {
        Which::P => with_scalar!(backend, S => check_p::<S>(&text, tol)),
        Which::T => with_scalar!(backend, S => check_t::<S>(&text, tol)),
        Which::Monad => with_scalar!(backend, S => check_monad::<S>(&text, tol)),
        Which::Q => match backend {
            Backend::Prime(p) => with_prime!(p, P => check_q_prime::<P>(&text, tol)),
            Backend::Complex => check_q::<C64>(&text, tol),
            Backend::Rational => check_q::<Rational>(&text, tol),
        },
    }?;
    report.command = format!(
        "check --which {} --backend {backend}",
        which_name(args.which)
    );
    report.samples = 1;
    report.elapsed_ms = start.elapsed().as_millis();
    emit(&report)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::P => "P",
        Which::Q => "Q",
        Which::T => "T",
        Which::Monad => "monad",
    }
}

fn check_p<S: Scalar>(text: &str, tol: f64) -> CliResult<Report> {
    let d: XnADHM<S> = parse(text, "XnADHM")?;
    d.validate()?;
    let mut r = Report::default();
    r.residual("P1", p1_residual(&d));
    r.check("P1", check_p1(&d, tol), || {
        "A1 C_q A2 products do not commute".into()
    });
    let p2 = check_p2(&d, tol);
    r.check("P2", p2, || "the pencil ν1 A1 + ν2 A2 is singular".into());
    match check_p3_direct(&d, tol) {
        Ok(ok) => r.check("P3", ok, || "a stabilizing vector lies in ker e".into()),
        Err(e) => r.check("P3", false, || e.to_string()),
    }
    Ok(r)
}

fn check_t<S: Scalar>(text: &str, tol: f64) -> CliResult<Report> {
    let d: PlaneADHM<S> = parse(text, "PlaneADHM")?;
    let d = PlaneADHM::new(d.b1, d.b2, d.e)?;
    let mut r = Report::default();
    r.residual("T1", d.b1.commutator(&d.b2).max_abs() / d.scale().powi(2));
    r.check("T1", check_t1(&d, tol), || "[b1, b2] ≠ 0".into());
    match check_t2(&d, tol) {
        Ok(ok) => r.check("T2", ok, || "a joint eigenvector lies in ker e".into()),
        Err(e) => r.check("T2", false, || e.to_string()),
    }
    Ok(r)
}

fn relations_report<S: Scalar>(rep: &FramedRep<S>, tol: f64) -> Report {
    let mut r = Report::default();
    let worst = relation_defects(rep)
        .iter()
        .map(Matrix::max_abs)
        .fold(0.0, f64::max);
    r.residual("relations", worst / rep.scale().powi(3));
    r.check("relations", check_relations(rep, tol), || {
        "the quiver relations fail".into()
    });
    r
}

fn check_q<S: Scalar>(text: &str, tol: f64) -> CliResult<Report> {
    let rep: FramedRep<S> = parse(text, "FramedRep")?;
    rep.validate()?;
    let mut r = relations_report(&rep, tol);
    match check_semistable_spectral(&rep, tol) {
        Ok(Verdict::Semistable) => r.check("semistable", true, String::new),
        Ok(Verdict::NotSemistable) => r.check("semistable", false, || "a destabilizing subrepresentation exists".into()),
        Ok(Verdict::Indeterminate) => r.check("semistable", false, || {
            "indeterminate off the regular-pencil locus; reduce the entries and rerun with --backend gf:p".into()
        }),
        Err(e) => r.check("semistable", false, || e.to_string()),
    }
    Ok(r)
}

fn check_q_prime<const P: u64>(text: &str, tol: f64) -> CliResult<Report> {
    let rep: FramedRep<Gf<P>> = parse(text, "FramedRep")?;
    rep.validate()?;
    let mut r = relations_report(&rep, tol);
    let params = StabilityParams {
        dims: (rep.v0, rep.v1),
        ..StabilityParams::for_c(rep.v0)
    };
    let outcome = brute_force_semistable(&rep, params, DEFAULT_BUDGET)?;
    r.residual("subspace pairs", outcome.pairs_checked as f64);
    r.check("semistable", outcome.semistable, || {
        format!("destabilized by {:?}", outcome.violation)
    });
    Ok(r)
}

fn check_monad<S: Scalar>(text: &str, tol: f64) -> CliResult<Report> {
    let mc: MonadCoeffs<S> = parse(text, "MonadCoeffs")?;
    mc.validate()?;
    let mut r = Report::default();
    let exact = |v: Vec<Matrix<S>>| v.iter().all(Matrix::is_zero);
    let compose_ok = if S::is_exact() {
        exact(compose_residual(&mc))
    } else {
        true
    };
    let framing_ok = if S::is_exact() {
        exact(framing_residual(&mc))
    } else {
        true
    };
    let res = monad_residual(&mc);
    r.residual("monad", res);
    r.check(
        "composition",
        compose_ok && (S::is_exact() || res <= tol),
        || "β∘α ≠ 0".into(),
    );
    r.check(
        "framing",
        framing_ok && (S::is_exact() || res <= tol),
        || "β restricted to ℓ∞ does not kill ξ".into(),
    );
    Ok(r)
}

// ---------------------------------------------------------------- campaign

fn campaign(args: &CampaignArgs, tol: f64) -> CliResult<u8> {
    let suite: Suite = args.suite.parse().map_err(|e: AdhmError| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::usage(format!("{e}; known suites: {}", names.join(", ")))
    })?;
    if args.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let samples = args.samples.unwrap_or_else(|| suite.default_samples());
    let mut report = run_campaign(suite, samples, args.seed, args.jobs, tol)?;
    report.command = format!(
        "campaign {suite} --samples {samples} --seed {} --jobs {}",
        args.seed, args.jobs
    );
    emit(&report)?;
    Ok(if report.passed() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex("3"), Some((3.0, 0.0)));
        assert_eq!(parse_complex("-1.5"), Some((-1.5, 0.0)));
        assert_eq!(parse_complex("2i"), Some((0.0, 2.0)));
        assert_eq!(parse_complex("-i"), Some((0.0, -1.0)));
        assert_eq!(parse_complex("1+2i"), Some((1.0, 2.0)));
        assert_eq!(parse_complex("1 - i"), Some((1.0, -1.0)));
        assert_eq!(parse_complex("1e-3+2e+1i"), Some((1e-3, 20.0)));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn points_per_backend() {
        let q: Vec<(Rational, Rational)> = parse_points("1/2,3; -1,0").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[0].0, Rational::new(1.into(), 2.into()));
        let f: Vec<(Gf<5>, Gf<5>)> = parse_points("7,-1").unwrap();
        assert_eq!(f[0], (Gf::new(2), Gf::new(4)));
        assert!(parse_points::<C64>("1;2").is_err());
    }
}
