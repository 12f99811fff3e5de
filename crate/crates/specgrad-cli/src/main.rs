//! `specgrad`: solve quadratic test problems under a chosen stepsize
//! schedule, analyze the asymptotic two-cycle of a run, reproduce the
//! two-dimensional finite-termination experiment, and drive the
//! benchmark grid with performance profiles. All outputs are CSV files
//! with `#`-metadata headers; every command is deterministic given its
//! flags and seed.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use specgrad_cli::bench::{GridSpec, KbPolicy, MethodSpec};
use specgrad_cli::csvio::{self, fmt_f64, fmt_short};
use specgrad_cli::diagnose::diagnose;
use specgrad_cli::profile::{performance_profile, profile_input_from_report};
use specgrad_cli::{CliError, Result};

use specgrad_core::rates::InteriorExclusion;
use specgrad_core::rng;
use specgrad_core::solver::{finite_termination_2d, run, BbVariant, Schedule, Status};
use specgrad_core::{QuadraticProblem, SolverConfig, SpectrumSpec};

use rand::Rng;

#[derive(Parser)]
#[command(
    name = "specgrad",
    version,
    about = "Gradient methods for convex quadratics: solver, diagnostics, benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one problem under one schedule and write the trace.
    Solve(SolveArgs),
    /// Run a family schedule and analyze the two-cycle asymptotics.
    Diagnose(DiagnoseArgs),
    /// The three-step finite-termination experiment on diag(1, lambda).
    Ft2d(Ft2dArgs),
    /// Run the benchmark grid and aggregate iteration counts.
    Bench(BenchArgs),
    /// Compute performance profiles from an existing report.
    Profile(ProfileArgs),
}

/// Flags that pick the problem instance.
#[derive(Args, Clone)]
struct ProblemArgs {
    /// Spectrum: isqrt | uniform1n | set1..set7 | twodim:<lambda> | list:<v1,v2,...>
    #[arg(long)]
    spectrum: String,
    /// Dimension (twodim and list spectra carry their own).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Condition number, used by the set families.
    #[arg(long, default_value_t = 1e4)]
    kappa: f64,
    /// Seed; draws come from a ChaCha8 stream over it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Conjugate by three random Householder reflections.
    #[arg(long)]
    rotate: bool,
    /// Linear term: zero | uniform:<lo>:<hi>
    #[arg(long, default_value = "zero")]
    b: String,
    /// Starting point: ones | uniform:<lo>:<hi>
    #[arg(long, default_value = "ones")]
    x0: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Stepsize schedule (sd, mg, family:u, bb1, bb2, yuan, dy, aopt,
    /// hat, abbmin2:tau, sdc:h:s, alg1:<bb1|bb2>:<sd|mg>:Kb:Km:Ks).
    #[arg(long)]
    schedule: String,
    /// Relative gradient-norm tolerance.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Record per-eigencomponent history (diagonal problems only).
    #[arg(long)]
    track_mu: bool,
    /// Record both short-step roots (family schedules only).
    #[arg(long)]
    track_tilde: bool,
    /// Output directory for trace.csv (and tilde.csv).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum InteriorRuleArg {
    /// A component is dead when its sign information reached zero.
    Reciprocal,
    /// Scan the stepsizes for an exact hit `1 - alpha lambda_i == 0`.
    Literal,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Family schedule whose dynamics to analyze (sd, mg, family:u).
    #[arg(long)]
    schedule: String,
    /// Relative gradient-norm tolerance.
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Tail pairs used for the cycle-constant and rate estimates.
    #[arg(long, default_value_t = 50)]
    tail: usize,
    /// How interior components are declared annihilated.
    #[arg(long, value_enum, default_value_t = InteriorRuleArg::Reciprocal)]
    interior_rule: InteriorRuleArg,
    /// Output directory for dynamics.csv and summary.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct Ft2dArgs {
    /// Larger eigenvalues to test, comma-separated.
    #[arg(long, default_value = "10,100,1000,10000")]
    lambdas: String,
    /// Random starts per eigenvalue.
    #[arg(long, default_value_t = 10)]
    starts: usize,
    /// Seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory for ft2d.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Eigenvalue families, comma-separated subset of 1..7.
    #[arg(long, default_value = "1,2,3,4,5,6,7")]
    sets: String,
    /// Condition numbers, comma-separated.
    #[arg(long, default_value = "1e4,1e5,1e6")]
    kappas: String,
    /// Tolerances, comma-separated.
    #[arg(long, default_value = "1e-6,1e-9,1e-12")]
    epsilons: String,
    /// Problem dimension.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Instances per (set, kappa, epsilon) cell.
    #[arg(long, default_value_t = 10)]
    replicates: u32,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Methods, comma-separated schedule strings; the three-part form
    /// alg1:<bb1|bb2>:<sd|mg> expands over every --km-ks pair.
    #[arg(
        long,
        default_value = "alg1:bb1:sd,alg1:bb1:mg,alg1:bb2:sd,alg1:bb2:mg,bb1,dy,abbmin2:0.9,sdc:8:6"
    )]
    methods: String,
    /// (K_m, K_s) pairs for expanded alg1 methods, as Km:Ks,...
    #[arg(long, default_value = "9:9,9:13,9:15,13:9,13:13,13:15,15:9,15:13,15:15")]
    km_ks: String,
    /// K_b policy: auto (100 for families 1 and 5, else 30) or a number.
    #[arg(long, default_value = "auto")]
    kb: String,
    /// Iteration cap per run.
    #[arg(long, default_value_t = 20_000)]
    max_iter: usize,
    /// Output directory for report.csv, summary.csv, profile_iterations.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    /// An existing report.csv.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory for profile_iterations.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Diagnose(a) => cmd_diagnose(a),
        Cmd::Ft2d(a) => cmd_ft2d(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Profile(a) => cmd_profile(a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

/// Splits a comma-separated list and parses every item.
fn parse_list<T: std::str::FromStr>(tok: &str, what: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for part in tok.split(',') {
        let part = part.trim();
        out.push(
            part.parse::<T>()
                .map_err(|_| CliError::Usage(format!("bad {what} '{part}'")))?,
        );
    }
    Ok(out)
}

fn parse_spectrum(p: &ProblemArgs) -> Result<SpectrumSpec> {
    let tok = p.spectrum.as_str();
    if tok == "isqrt" {
        return Ok(SpectrumSpec::Isqrt { n: p.n });
    }
    if tok == "uniform1n" {
        return Ok(SpectrumSpec::Uniform1N { n: p.n });
    }
    if let Some(rest) = tok.strip_prefix("set") {
        let id: u8 = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("bad family id in spectrum '{tok}'")))?;
        return Ok(SpectrumSpec::Set { id, n: p.n, kappa: p.kappa });
    }
    if let Some(rest) = tok.strip_prefix("twodim:") {
        let lambda: f64 = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("bad eigenvalue in spectrum '{tok}'")))?;
        return Ok(SpectrumSpec::TwoDim { lambda });
    }
    if let Some(rest) = tok.strip_prefix("list:") {
        return Ok(SpectrumSpec::Explicit(parse_list(rest, "eigenvalue")?));
    }
    Err(CliError::Usage(format!(
        "unknown spectrum '{tok}' (expected isqrt, uniform1n, set1..set7, \
         twodim:<lambda>, or list:<v1,v2,...>)"
    )))
}

/// Parses `uniform:<lo>:<hi>` into its bounds.
fn parse_uniform(tok: &str, what: &str) -> Result<(f64, f64)> {
    let err = || {
        CliError::Usage(format!(
            "bad {what} '{tok}' (expected {what_default} or uniform:<lo>:<hi>)",
            what_default = if what == "b" { "zero" } else { "ones" }
        ))
    };
    let parts: Vec<&str> = tok.split(':').collect();
    if parts.len() != 3 || parts[0] != "uniform" {
        return Err(err());
    }
    let lo: f64 = parts[1].parse().map_err(|_| err())?;
    let hi: f64 = parts[2].parse().map_err(|_| err())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(err());
    }
    Ok((lo, hi))
}

/// Builds the problem and start. Draw order within the seed's stream:
/// eigenvalues, then the linear term, then the rotation vectors, then
/// the start.
fn build_problem(p: &ProblemArgs) -> Result<(QuadraticProblem, Vec<f64>)> {
    let spec = parse_spectrum(p)?;
    let mut rng = rng::stream(p.seed);
    let lambda = spec.generate(&mut rng)?;
    let n = lambda.len();
    let b = match p.b.as_str() {
        "zero" => vec![0.0; n],
        tok => {
            let (lo, hi) = parse_uniform(tok, "b")?;
            (0..n).map(|_| rng.gen_range(lo..hi)).collect()
        }
    };
    let problem = if p.rotate {
        QuadraticProblem::rotated(lambda, b, &mut rng)?
    } else {
        QuadraticProblem::diagonal(lambda, b)?
    };
    let x0 = match p.x0.as_str() {
        "ones" => vec![1.0; n],
        tok => {
            let (lo, hi) = parse_uniform(tok, "x0")?;
            (0..n).map(|_| rng.gen_range(lo..hi)).collect()
        }
    };
    Ok((problem, x0))
}

/// Metadata lines shared by commands that build a problem.
fn problem_meta(p: &ProblemArgs, problem: &QuadraticProblem) -> Vec<(String, String)> {
    vec![
        ("rng".into(), rng::STREAM_ID.into()),
        ("spectrum".into(), p.spectrum.clone()),
        ("n".into(), problem.n().to_string()),
        ("seed".into(), p.seed.to_string()),
        ("rotate".into(), p.rotate.to_string()),
        ("b".into(), p.b.clone()),
        ("x0".into(), p.x0.clone()),
        ("lambda_1".into(), fmt_f64(problem.lambda_min())),
        ("lambda_n".into(), fmt_f64(problem.lambda_max())),
        ("kappa".into(), fmt_f64(problem.kappa())),
    ]
}

/// The `--flag value` echo of the problem flags.
fn problem_echo(p: &ProblemArgs) -> String {
    let mut s = format!(
        "--spectrum {} --n {} --kappa {} --seed {} --b {} --x0 {}",
        p.spectrum,
        p.n,
        fmt_short(p.kappa),
        p.seed,
        p.b,
        p.x0
    );
    if p.rotate {
        s.push_str(" --rotate");
    }
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    let schedule = Schedule::parse(&a.schedule)?;
    let (problem, x0) = build_problem(&a.problem)?;
    let cfg = SolverConfig {
        epsilon: a.eps,
        max_iter: a.max_iter,
        track_mu: a.track_mu,
        track_tilde: a.track_tilde,
        ..SolverConfig::default()
    };
    let trace = run(&problem, &x0, &schedule, &cfg)?;

    ensure_dir(&a.out)?;
    let mut command = format!(
        "specgrad solve {} --schedule {} --eps {} --max-iter {} --out {}",
        problem_echo(&a.problem),
        a.schedule,
        fmt_short(a.eps),
        a.max_iter,
        a.out.display()
    );
    if a.track_mu {
        command.push_str(" --track-mu");
    }
    if a.track_tilde {
        command.push_str(" --track-tilde");
    }
    let mut meta = vec![("command".to_string(), command)];
    meta.extend(problem_meta(&a.problem, &problem));
    meta.push(("schedule".into(), schedule.to_string()));
    meta.push(("epsilon".into(), fmt_f64(a.eps)));
    meta.push(("max_iter".into(), a.max_iter.to_string()));
    meta.push(("status".into(), csvio::status_str(trace.status).into()));
    meta.push(("iterations".into(), trace.iterations.to_string()));

    let trace_path = a.out.join("trace.csv");
    csvio::write_trace(&trace_path, &meta, &trace)?;
    let mut written = vec![trace_path.display().to_string()];
    if let Some(tilde) = &trace.tilde {
        let tilde_path = a.out.join("tilde.csv");
        csvio::write_tilde(&tilde_path, &meta, tilde)?;
        written.push(tilde_path.display().to_string());
    }
    println!(
        "{} after {} iterations; wrote {}",
        csvio::status_str(trace.status),
        trace.iterations,
        written.join(", ")
    );
    Ok(match trace.status {
        Status::Converged => 0,
        Status::IterCap => 2,
        Status::NumericalFailure => 3,
    })
}

fn cmd_diagnose(a: DiagnoseArgs) -> Result<i32> {
    let schedule = Schedule::parse(&a.schedule)?;
    let (problem, x0) = build_problem(&a.problem)?;
    let cfg = SolverConfig { epsilon: a.eps, max_iter: a.max_iter, ..SolverConfig::default() };
    let rule = match a.interior_rule {
        InteriorRuleArg::Reciprocal => InteriorExclusion::Reciprocal,
        InteriorRuleArg::Literal => InteriorExclusion::Literal,
    };
    let output = diagnose(&problem, &x0, &schedule, &cfg, a.tail, rule)?;

    ensure_dir(&a.out)?;
    let rule_str = match a.interior_rule {
        InteriorRuleArg::Reciprocal => "reciprocal",
        InteriorRuleArg::Literal => "literal",
    };
    let command = format!(
        "specgrad diagnose {} --schedule {} --eps {} --max-iter {} --tail {} \
         --interior-rule {} --out {}",
        problem_echo(&a.problem),
        a.schedule,
        fmt_short(a.eps),
        a.max_iter,
        a.tail,
        rule_str,
        a.out.display()
    );
    let mut meta = vec![("command".to_string(), command)];
    meta.extend(problem_meta(&a.problem, &problem));
    meta.push(("schedule".into(), schedule.to_string()));
    meta.push(("epsilon".into(), fmt_f64(a.eps)));

    let dyn_path = a.out.join("dynamics.csv");
    csvio::write_dynamics(&dyn_path, &meta, &output.dynamics)?;
    let sum_path = a.out.join("summary.csv");
    csvio::write_summary_pairs(&sum_path, &meta, &output.summary)?;

    let c = output
        .summary
        .iter()
        .find(|(k, _)| k == "c_even")
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| "unavailable".into());
    println!(
        "{} after {} iterations; c estimate {}; wrote {}, {}",
        csvio::status_str(output.trace.status),
        output.trace.iterations,
        c,
        dyn_path.display(),
        sum_path.display()
    );
    Ok(0)
}

fn cmd_ft2d(a: Ft2dArgs) -> Result<i32> {
    let lambdas: Vec<f64> = parse_list(&a.lambdas, "eigenvalue")?;
    if a.starts == 0 {
        return Err(CliError::Usage("at least one start is required".into()));
    }
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in &lambdas {
        let mut rng = rng::substream(a.seed, &[lambda.to_bits()]);
        let outcome = finite_termination_2d(lambda, a.starts, &mut rng)?;
        rows.push((lambda, outcome.mean_gnorm, outcome.mean_gap));
    }

    ensure_dir(&a.out)?;
    let meta = vec![
        (
            "command".to_string(),
            format!(
                "specgrad ft2d --lambdas {} --starts {} --seed {} --out {}",
                a.lambdas,
                a.starts,
                a.seed,
                a.out.display()
            ),
        ),
        ("rng".to_string(), rng::STREAM_ID.to_string()),
        ("starts".to_string(), a.starts.to_string()),
        ("seed".to_string(), a.seed.to_string()),
    ];
    let path = a.out.join("ft2d.csv");
    csvio::write_ft2d(&path, &meta, &rows)?;

    println!("{:<12} {:<24} {:<24}", "lambda", "mean_gnorm", "mean_f_gap");
    for &(l, g, f) in &rows {
        println!("{:<12} {:<24} {:<24}", l, fmt_f64(g), fmt_f64(f));
    }
    println!("wrote {}", path.display());
    Ok(0)
}

/// Parses the method list; three-part `alg1:<bb>:<family>` tokens
/// become grid-expanded columns, everything else a fixed schedule.
fn parse_methods(tok: &str) -> Result<Vec<MethodSpec>> {
    let mut out = Vec::new();
    for part in tok.split(',') {
        let part = part.trim();
        let pieces: Vec<&str> = part.split(':').collect();
        if pieces.len() == 3 && pieces[0] == "alg1" {
            let bb = match pieces[1] {
                "bb1" => BbVariant::Bb1,
                "bb2" => BbVariant::Bb2,
                other => {
                    return Err(CliError::Usage(format!(
                        "bad method '{part}': BB flavor '{other}' (expected bb1 or bb2)"
                    )))
                }
            };
            let psi_u = match pieces[2] {
                "sd" => 0,
                "mg" => 1,
                other => {
                    return Err(CliError::Usage(format!(
                        "bad method '{part}': family flavor '{other}' (expected sd or mg)"
                    )))
                }
            };
            out.push(MethodSpec::PeriodicGrid { bb, psi_u });
        } else {
            out.push(MethodSpec::Fixed(Schedule::parse(part)?));
        }
    }
    Ok(out)
}

fn parse_km_ks(tok: &str) -> Result<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    for part in tok.split(',') {
        let part = part.trim();
        let pieces: Vec<&str> = part.split(':').collect();
        let err = || CliError::Usage(format!("bad K_m:K_s pair '{part}'"));
        if pieces.len() != 2 {
            return Err(err());
        }
        let km: u32 = pieces[0].parse().map_err(|_| err())?;
        let ks: u32 = pieces[1].parse().map_err(|_| err())?;
        out.push((km, ks));
    }
    Ok(out)
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let kb = match a.kb.as_str() {
        "auto" => KbPolicy::Auto,
        tok => KbPolicy::Fixed(
            tok.parse()
                .map_err(|_| CliError::Usage(format!("bad K_b '{tok}' (expected auto or a number)")))?,
        ),
    };
    let spec = GridSpec {
        sets: parse_list(&a.sets, "family id")?,
        kappas: parse_list(&a.kappas, "condition number")?,
        epsilons: parse_list(&a.epsilons, "tolerance")?,
        n: a.n,
        replicates: a.replicates,
        base_seed: a.seed,
        methods: parse_methods(&a.methods)?,
        km_ks: parse_km_ks(&a.km_ks)?,
        kb,
        max_iter: a.max_iter,
    };
    let rows = specgrad_cli::bench::run_grid(&spec)?;

    ensure_dir(&a.out)?;
    let command = format!(
        "specgrad bench --sets {} --kappas {} --epsilons {} --n {} --replicates {} \
         --seed {} --methods {} --km-ks {} --kb {} --max-iter {} --out {}",
        a.sets,
        a.kappas,
        a.epsilons,
        a.n,
        a.replicates,
        a.seed,
        a.methods,
        a.km_ks,
        a.kb,
        a.max_iter,
        a.out.display()
    );
    let meta = vec![
        ("command".to_string(), command),
        ("rng".to_string(), rng::STREAM_ID.to_string()),
        ("n".to_string(), a.n.to_string()),
        ("seed".to_string(), a.seed.to_string()),
        ("max_iter".to_string(), a.max_iter.to_string()),
    ];
    let report_path = a.out.join("report.csv");
    csvio::write_report(&report_path, &meta, &rows)?;

    let summary = specgrad_cli::bench::aggregate(&rows);
    let summary_path = a.out.join("summary.csv");
    csvio::write_bench_summary(&summary_path, &meta, &summary)?;

    let input = profile_input_from_report(&rows)?;
    let curves = performance_profile(&input)?;
    if curves.dropped > 0 {
        eprintln!(
            "warning: {} instance(s) dropped from the profile (no method finished)",
            curves.dropped
        );
    }
    let profile_path = a.out.join("profile_iterations.csv");
    csvio::write_profile(&profile_path, &meta, &curves)?;

    let unconverged = rows.iter().filter(|r| r.status != Status::Converged).count();
    println!(
        "{} runs on {} instances ({} unconverged); wrote {}, {}, {}",
        rows.len(),
        curves.kept + curves.dropped,
        unconverged,
        report_path.display(),
        summary_path.display(),
        profile_path.display()
    );
    Ok(0)
}

fn cmd_profile(a: ProfileArgs) -> Result<i32> {
    let rows = csvio::read_report(&a.input)?;
    let input = profile_input_from_report(&rows)?;
    let curves = performance_profile(&input)?;
    if curves.dropped > 0 {
        eprintln!(
            "warning: {} instance(s) dropped from the profile (no method finished)",
            curves.dropped
        );
    }
    ensure_dir(&a.out)?;
    let meta = vec![
        (
            "command".to_string(),
            format!("specgrad profile --in {} --out {}", a.input.display(), a.out.display()),
        ),
        ("instances".to_string(), curves.kept.to_string()),
        ("dropped".to_string(), curves.dropped.to_string()),
    ];
    let path = a.out.join("profile_iterations.csv");
    csvio::write_profile(&path, &meta, &curves)?;
    println!(
        "profiled {} methods on {} instances; wrote {}",
        curves.methods.len(),
        curves.kept,
        path.display()
    );
    Ok(0)
}
