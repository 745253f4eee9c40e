//! `packlp` — generate, solve, accelerate, clone, benchmark, and check
//! packing LPs from the command line.
//!
//! Exit codes: 0 success, 1 infeasible result or validation failure,
//! 2 solver failure, 3 I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use packlp_cli::bench::{
    emit_csv, run_experiment, summarize, BenchError, CloneSettings, ExperimentPlan, Method,
    PlanCell,
};
use packlp_cli::cloning::{run_clones, CloneConfig, CloningError, Straggler};
use packlp_cli::io::{
    self, read_duals, read_instance, read_solution, write_instance, write_solution,
};
use packlp_core::accel::{accelerate, AccelError, AcceleratorConfig};
use packlp_core::gen::{BRule, GeneratorSpec, RandomSpec, VicinitySpec};
use packlp_core::solver::{
    check_slackness, simplex_solve_with, solver_by_name, DualAscentParams, DualAscentSolver,
    SimplexParams, Solver, SolverError,
};
use packlp_core::is_binary;

#[derive(Parser)]
#[command(name = "packlp", version, about = "Packing-LP acceleration toolkit")]
struct Cli {
    /// Stream solver iteration logs and attempt details to stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance and write it to a file.
    Gen(GenArgs),
    /// Solve an instance to optimality; print objective and dual prices.
    Solve(SolveArgs),
    /// Run the accelerator (sample, solve, threshold, margin search).
    Accel(AccelArgs),
    /// Speculative execution: best feasible of the first k of K clones.
    Clones(ClonesArgs),
    /// Run a sweep plan and emit per-run rows as CSV.
    Bench(BenchArgs),
    /// Check a solution file for feasibility (and slackness, given duals).
    Check(CheckArgs),
}

#[derive(Args)]
struct FamilyArgs {
    /// Instance family: "random" or "vicinity".
    #[arg(long, default_value = "random")]
    kind: String,
    /// Constraint count (random family).
    #[arg(short = 'm', long, default_value_t = 100)]
    m: usize,
    /// Variable count (random family).
    #[arg(short = 'n', long, default_value_t = 10_000)]
    n: usize,
    /// Keep probability for matrix entries (random family).
    #[arg(short = 'p', long, default_value_t = 0.8)]
    density: f64,
    /// RHS rule: a number, or "<frac>n" such as "0.1n".
    #[arg(long, default_value = "0.1n")]
    b: String,
    #[arg(long, default_value_t = 1.0)]
    c_lo: f64,
    #[arg(long, default_value_t = 100.0)]
    c_hi: f64,
    /// Node count (vicinity family).
    #[arg(long, default_value_t = 10_000)]
    nodes: usize,
    /// Vicinity count (vicinity family).
    #[arg(long, default_value_t = 100)]
    vicinities: usize,
    #[arg(long, default_value_t = 2_000)]
    vicinity_size: usize,
    /// Per-vicinity resource cap (vicinity family).
    #[arg(long, default_value_t = 1_000.0)]
    cap: f64,
    /// Read the spec from a key=value file instead of flags.
    #[arg(long)]
    spec_file: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output instance file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// "simplex" or "dual-ascent".
    #[arg(long, default_value = "simplex")]
    solver: String,
    /// Overshoot factor for the dual-ascent solver.
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// Write the primal solution here (one value per line).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write dual prices here (phi then psi, one value per line).
    #[arg(long)]
    duals_out: Option<PathBuf>,
}

#[derive(Args)]
struct AccelArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    eps_s: f64,
    /// Margin schedule: "start:step:end" or a comma list, e.g. "0:0.01:0.99".
    #[arg(long, default_value = "0:0.01:0.99")]
    ef_schedule: String,
    #[arg(long, default_value_t = 1.0)]
    alpha_d: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "simplex")]
    solver: String,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// Reuse one sample across the schedule instead of resampling.
    #[arg(long)]
    no_resample: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClonesArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(short = 'K', long = "clones", default_value_t = 8)]
    clones: usize,
    #[arg(short = 'k', long = "wait-for", default_value_t = 4)]
    wait_for: usize,
    #[arg(long, default_value_t = 0)]
    master_seed: u64,
    #[arg(long, default_value_t = 0.01)]
    eps_s: f64,
    #[arg(long, default_value = "0:0.01:0.99")]
    ef_schedule: String,
    #[arg(long, default_value_t = 1.0)]
    alpha_d: f64,
    #[arg(long, default_value = "simplex")]
    solver: String,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// "off", "fixed:<clone_id>:<millis>", or "pareto:<scale_ms>:<shape>".
    #[arg(long, default_value = "off")]
    straggler: String,
    /// Run the single-margin pipeline per clone instead of the full search.
    #[arg(long)]
    alg1: bool,
    #[arg(long)]
    max_concurrency: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma list of sampling fractions; one cell per value.
    #[arg(long, default_value = "0.01")]
    eps_s: String,
    /// Optional comma list of "MxN" sizes (random family); one cell per
    /// size, crossed with every eps_s value.
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long, default_value = "0:0.01:0.99")]
    ef_schedule: String,
    #[arg(long, default_value_t = 1.0)]
    alpha_d: f64,
    #[arg(long, default_value = "simplex")]
    solver: String,
    /// Comma list of methods: full, accelerate, clones.
    #[arg(long, default_value = "full,accelerate")]
    methods: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(short = 'K', long = "clones", default_value_t = 8)]
    clones: usize,
    #[arg(short = 'k', long = "wait-for", default_value_t = 4)]
    wait_for: usize,
    #[arg(long, default_value = "off")]
    straggler: String,
    /// Master seed for the whole plan.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Solution file, one value per line.
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Require the solution to be exactly binary.
    #[arg(long)]
    binary: bool,
    /// Dual file (phi then psi); enables the slackness check.
    #[arg(long)]
    duals: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    alpha_p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_d: f64,
    #[arg(long, default_value_t = 1e-6)]
    slack_tol: f64,
}

/// Error with the exit code it maps to.
#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(msg: impl Into<String>) -> Self {
        CliError { code: 1, message: msg.into() }
    }
    fn solver(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
    fn io(msg: impl Into<String>) -> Self {
        CliError { code: 3, message: msg.into() }
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Io(_) => CliError::io(e.to_string()),
            io::IoError::Parse { .. } | io::IoError::Validation { .. } => {
                CliError::validation(e.to_string())
            }
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::solver(e.to_string())
    }
}

impl From<AccelError> for CliError {
    fn from(e: AccelError) -> Self {
        match e {
            AccelError::Solver(_) | AccelError::AllAttemptsFailed { .. } => {
                CliError::solver(e.to_string())
            }
            _ => CliError::validation(e.to_string()),
        }
    }
}

impl From<CloningError> for CliError {
    fn from(e: CloningError) -> Self {
        match e {
            CloningError::AllClonesFailed { .. } => CliError::solver(e.to_string()),
            CloningError::Config(_) => CliError::validation(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(_) => CliError::io(e.to_string()),
            BenchError::Accel(_) => CliError::solver(e.to_string()),
            BenchError::Cloning(c) => c.into(),
            _ => CliError::validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args, cli.verbose),
        Command::Accel(args) => cmd_accel(args, cli.verbose),
        Command::Clones(args) => cmd_clones(args, cli.verbose),
        Command::Bench(args) => cmd_bench(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn parse_b_rule(s: &str) -> Result<BRule, CliError> {
    let t = s.trim();
    if let Some(frac) = t.strip_suffix('n') {
        let f: f64 = frac
            .parse()
            .map_err(|_| CliError::validation(format!("bad b rule {t:?}")))?;
        Ok(BRule::FractionOfN(f))
    } else {
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::validation(format!("bad b rule {t:?}")))?;
        Ok(BRule::Fixed(v))
    }
}

fn family_spec(family: &FamilyArgs, seed: u64) -> Result<GeneratorSpec, CliError> {
    if let Some(path) = &family.spec_file {
        return parse_spec_file(path, seed);
    }
    match family.kind.as_str() {
        "random" => Ok(GeneratorSpec::Random(RandomSpec {
            m: family.m,
            n: family.n,
            density: family.density,
            b_rule: parse_b_rule(&family.b)?,
            c_range: (family.c_lo, family.c_hi),
            seed,
        })),
        "vicinity" => Ok(GeneratorSpec::Vicinity(VicinitySpec {
            nodes: family.nodes,
            vicinities: family.vicinities,
            vicinity_size: family.vicinity_size,
            cap: family.cap,
            c_range: (family.c_lo, family.c_hi),
            seed,
        })),
        other => Err(CliError::validation(format!("unknown family kind {other:?}"))),
    }
}

/// Key=value spec file: `kind`, then the keys of the chosen family
/// (`m n p b c_lo c_hi` or `nodes vicinities vicinity_size cap`), plus
/// optional `seed`. Lines starting with `#` are comments.
fn parse_spec_file(path: &Path, default_seed: u64) -> Result<GeneratorSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(e.to_string()))?;
    let mut kv = std::collections::BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::validation(format!("{}:{}: expected key = value", path.display(), no + 1))
        })?;
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get = |key: &str| kv.get(key).cloned();
    let parse_num = |key: &str, v: &str| -> Result<f64, CliError> {
        v.parse()
            .map_err(|_| CliError::validation(format!("spec file: bad {key} = {v:?}")))
    };
    let seed = match get("seed") {
        Some(v) => parse_num("seed", &v)? as u64,
        None => default_seed,
    };
    let kind = get("kind").unwrap_or_else(|| "random".into());
    match kind.as_str() {
        "random" => {
            let mut spec = RandomSpec { seed, ..RandomSpec::default() };
            if let Some(v) = get("m") {
                spec.m = parse_num("m", &v)? as usize;
            }
            if let Some(v) = get("n") {
                spec.n = parse_num("n", &v)? as usize;
            }
            if let Some(v) = get("p") {
                spec.density = parse_num("p", &v)?;
            }
            if let Some(v) = get("b") {
                spec.b_rule = parse_b_rule(&v)?;
            }
            if let Some(v) = get("c_lo") {
                spec.c_range.0 = parse_num("c_lo", &v)?;
            }
            if let Some(v) = get("c_hi") {
                spec.c_range.1 = parse_num("c_hi", &v)?;
            }
            Ok(GeneratorSpec::Random(spec))
        }
        "vicinity" => {
            let mut spec = VicinitySpec { seed, ..VicinitySpec::default() };
            if let Some(v) = get("nodes") {
                spec.nodes = parse_num("nodes", &v)? as usize;
            }
            if let Some(v) = get("vicinities") {
                spec.vicinities = parse_num("vicinities", &v)? as usize;
            }
            if let Some(v) = get("vicinity_size") {
                spec.vicinity_size = parse_num("vicinity_size", &v)? as usize;
            }
            if let Some(v) = get("cap") {
                spec.cap = parse_num("cap", &v)?;
            }
            if let Some(v) = get("c_lo") {
                spec.c_range.0 = parse_num("c_lo", &v)?;
            }
            if let Some(v) = get("c_hi") {
                spec.c_range.1 = parse_num("c_hi", &v)?;
            }
            Ok(GeneratorSpec::Vicinity(spec))
        }
        other => Err(CliError::validation(format!("spec file: unknown kind {other:?}"))),
    }
}

fn parse_schedule(s: &str) -> Result<Vec<f64>, CliError> {
    let t = s.trim();
    let parts: Vec<&str> = t.split(':').collect();
    let schedule: Vec<f64> = if parts.len() == 3 {
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::validation(format!("bad schedule start {:?}", parts[0])))?;
        let step: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::validation(format!("bad schedule step {:?}", parts[1])))?;
        let end: f64 = parts[2]
            .parse()
            .map_err(|_| CliError::validation(format!("bad schedule end {:?}", parts[2])))?;
        if step <= 0.0 {
            return Err(CliError::validation("schedule step must be positive"));
        }
        let mut vals = Vec::new();
        let mut k = 0u32;
        loop {
            let v = start + step * k as f64;
            if v > end + 1e-12 {
                break;
            }
            vals.push(v);
            k += 1;
        }
        vals
    } else {
        t.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| CliError::validation(format!("bad schedule value {tok:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if schedule.is_empty() {
        return Err(CliError::validation("empty margin schedule"));
    }
    Ok(schedule)
}

fn parse_straggler(s: &str) -> Result<Straggler, CliError> {
    let t = s.trim();
    if t == "off" {
        return Ok(Straggler::Off);
    }
    let parts: Vec<&str> = t.split(':').collect();
    match parts.as_slice() {
        ["fixed", id, ms] => {
            let clone_id = id
                .parse()
                .map_err(|_| CliError::validation(format!("bad clone id {id:?}")))?;
            let millis: f64 = ms
                .parse()
                .map_err(|_| CliError::validation(format!("bad delay {ms:?}")))?;
            Ok(Straggler::Fixed {
                clone_id,
                delay: std::time::Duration::from_secs_f64(millis / 1e3),
            })
        }
        ["pareto", scale_ms, shape] => {
            let scale: f64 = scale_ms
                .parse()
                .map_err(|_| CliError::validation(format!("bad scale {scale_ms:?}")))?;
            let shape: f64 = shape
                .parse()
                .map_err(|_| CliError::validation(format!("bad shape {shape:?}")))?;
            Ok(Straggler::Pareto {
                scale: std::time::Duration::from_secs_f64(scale / 1e3),
                shape,
            })
        }
        _ => Err(CliError::validation(format!(
            "straggler must be off, fixed:<id>:<ms>, or pareto:<scale_ms>:<shape>, got {t:?}"
        ))),
    }
}

fn build_solver(name: &str, delta: f64) -> Result<Box<dyn Solver>, CliError> {
    match name {
        "dual-ascent" => Ok(Box::new(DualAscentSolver {
            params: DualAscentParams { delta, ..DualAscentParams::default() },
        })),
        _ => solver_by_name(name)
            .ok_or_else(|| CliError::validation(format!("unknown solver {name:?}"))),
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let spec = family_spec(&args.family, args.seed)?;
    let lp = spec.generate().map_err(|e| CliError::validation(e.to_string()))?;
    write_instance(&lp, &args.out)?;
    println!("wrote {} ({}x{}, {} nonzeros)", args.out.display(), lp.m(), lp.n(), lp.nnz());
    Ok(())
}

fn cmd_solve(args: SolveArgs, verbose: bool) -> Result<(), CliError> {
    let lp = read_instance(&args.instance)?;
    let start = Instant::now();
    let outcome = if args.solver == "simplex" && verbose {
        let mut log = |e: packlp_core::solver::IterEvent| {
            if e.iteration % 100 == 0 || e.kind == "refactor" {
                eprintln!("simplex iter {:>8} obj {:.6e} [{}]", e.iteration, e.objective, e.kind);
            }
        };
        simplex_solve_with(&lp, &SimplexParams::default(), Some(&mut log))?
    } else {
        build_solver(&args.solver, args.delta)?.solve(&lp)?
    };
    let elapsed = start.elapsed();
    println!("objective {}", io::fmt_f64(outcome.primal.objective));
    println!("iterations {}", outcome.iterations);
    println!("wall_time_s {}", io::fmt_f64(elapsed.as_secs_f64()));
    for (i, phi) in outcome.dual.phi.iter().enumerate() {
        println!("phi[{i}] {}", io::fmt_f64(*phi));
    }
    if let Some(path) = &args.out {
        write_solution(&outcome.primal.x, path)?;
    }
    if let Some(path) = &args.duals_out {
        io::write_duals(&outcome.dual, path)?;
    }
    Ok(())
}

fn cmd_accel(args: AccelArgs, verbose: bool) -> Result<(), CliError> {
    let lp = read_instance(&args.instance)?;
    let solver = build_solver(&args.solver, args.delta)?;
    let config = AcceleratorConfig {
        eps_s: args.eps_s,
        ef_schedule: parse_schedule(&args.ef_schedule)?,
        alpha_d: args.alpha_d,
        seed: args.seed,
        resample_per_ef: !args.no_resample,
    };
    let out = accelerate(&lp, solver.as_ref(), &config)?;
    if verbose {
        for attempt in &out.attempts {
            eprintln!(
                "eps_f {:<6} -> {:?} (sample objective {:?})",
                attempt.eps_f, attempt.status, attempt.sample_objective
            );
        }
    }
    println!("objective {}", io::fmt_f64(out.objective));
    println!("eps_f_used {}", io::fmt_f64(out.eps_f_used));
    println!("fallback {}", out.fallback);
    println!("attempts {}", out.attempts.len());
    println!("solve_time_s {}", io::fmt_f64(out.solve_time.as_secs_f64()));
    println!("threshold_time_s {}", io::fmt_f64(out.threshold_time.as_secs_f64()));
    println!("total_time_s {}", io::fmt_f64(out.total_time.as_secs_f64()));
    if let Some(path) = &args.out {
        write_solution(&out.x_hat, path)?;
    }
    Ok(())
}

fn cmd_clones(args: ClonesArgs, verbose: bool) -> Result<(), CliError> {
    let lp = Arc::new(read_instance(&args.instance)?);
    let solver: Arc<dyn Solver> = Arc::from(build_solver(&args.solver, args.delta)?);
    let config = CloneConfig {
        clones: args.clones,
        wait_for: args.wait_for,
        master_seed: args.master_seed,
        accel: AcceleratorConfig {
            eps_s: args.eps_s,
            ef_schedule: parse_schedule(&args.ef_schedule)?,
            alpha_d: args.alpha_d,
            seed: 0,
            resample_per_ef: true,
        },
        full_search: !args.alg1,
        straggler: parse_straggler(&args.straggler)?,
        max_concurrency: args.max_concurrency,
    };
    let out = run_clones(&lp, &solver, &config)?;
    if verbose {
        for r in &out.completed {
            eprintln!(
                "clone {} seed {} objective {:?} feasible {} wall {:.3}s error {:?}",
                r.clone_id,
                r.seed,
                r.objective,
                r.feasible,
                r.wall_time.as_secs_f64(),
                r.error
            );
        }
    }
    println!("best_clone {}", out.best.clone_id);
    println!("objective {}", io::fmt_f64(out.best.objective));
    println!("fallback {}", out.best_is_fallback);
    println!("completed {}", out.completed.len());
    println!("abandoned {}", out.abandoned);
    println!("wall_time_s {}", io::fmt_f64(out.wall_time.as_secs_f64()));
    if let Some(path) = &args.out {
        if let Some(x) = &out.best.x_hat {
            write_solution(x, path)?;
        }
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(|tok| tok.trim().parse().map_err(CliError::validation))
        .collect::<Result<_, _>>()?;
    let eps_list: Vec<f64> = args
        .eps_s
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| CliError::validation(format!("bad eps_s {tok:?}")))
        })
        .collect::<Result<_, _>>()?;
    let sizes: Vec<Option<(usize, usize)>> = match &args.sizes {
        None => vec![None],
        Some(spec) => spec
            .split(',')
            .map(|tok| {
                let (m, n) = tok
                    .trim()
                    .split_once('x')
                    .ok_or_else(|| CliError::validation(format!("size must be MxN: {tok:?}")))?;
                let m = m
                    .parse()
                    .map_err(|_| CliError::validation(format!("bad size m {m:?}")))?;
                let n = n
                    .parse()
                    .map_err(|_| CliError::validation(format!("bad size n {n:?}")))?;
                Ok(Some((m, n)))
            })
            .collect::<Result<_, CliError>>()?,
    };

    let schedule = parse_schedule(&args.ef_schedule)?;
    let straggler = parse_straggler(&args.straggler)?;
    let mut cells = Vec::new();
    for size in &sizes {
        for &eps_s in &eps_list {
            let mut spec = family_spec(&args.family, 0)?;
            if let Some((m, n)) = size {
                match &mut spec {
                    GeneratorSpec::Random(r) => {
                        r.m = *m;
                        r.n = *n;
                    }
                    GeneratorSpec::Vicinity(v) => {
                        v.vicinities = *m;
                        v.nodes = *n;
                    }
                }
            }
            let label = format!("{spec}@eps_s={eps_s}");
            cells.push(PlanCell {
                label,
                spec,
                eps_s,
                ef_schedule: schedule.clone(),
                alpha_d: args.alpha_d,
                resample_per_ef: true,
                solver: args.solver.clone(),
                methods: methods.clone(),
                trials: args.trials,
                clone_settings: CloneSettings {
                    clones: args.clones,
                    wait_for: args.wait_for,
                    straggler: straggler.clone(),
                    max_concurrency: None,
                },
            });
        }
    }

    let plan = ExperimentPlan::new(args.seed, cells);
    let reports = run_experiment(&plan)?;

    println!(
        "{:<52} {:<11} {:>5} {:>12} {:>12} {:>12}",
        "instance", "method", "rows", "mean_rel_err", "mean_speedup", "mean_time_s"
    );
    for s in summarize(&reports) {
        println!(
            "{:<52} {:<11} {:>5} {:>12} {:>12} {:>12.6}",
            truncate(&s.instance_prefix, 52),
            s.method.to_string(),
            s.rows,
            s.mean_relative_error.map_or("-".into(), |v| format!("{v:.6}")),
            s.mean_speedup.map_or("-".into(), |v| format!("{v:.2}")),
            s.mean_total_time.as_secs_f64(),
        );
    }
    if let Some(path) = &args.out {
        emit_csv(&reports, path)?;
        println!("wrote {} rows to {}", reports.len(), path.display());
    }
    Ok(())
}

fn truncate(s: &str, width: usize) -> String {
    if s.len() <= width {
        s.to_string()
    } else {
        format!("{}...", &s[..width - 3])
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let lp = read_instance(&args.instance)?;
    let x = read_solution(&args.solution, Some(lp.n()))?;
    let report = lp
        .check_feasible(&x, args.tol)
        .map_err(|e| CliError::validation(e.to_string()))?;
    let objective = lp.objective(&x).map_err(|e| CliError::validation(e.to_string()))?;
    println!("objective {}", io::fmt_f64(objective));
    println!("feasible {}", report.feasible);
    println!("worst_violation {}", io::fmt_f64(report.worst_violation));
    if !report.violated_rows.is_empty() {
        println!("violated_rows {:?}", report.violated_rows);
    }
    let mut ok = report.feasible;
    if args.binary {
        let binary = is_binary(&x);
        println!("binary {binary}");
        ok &= binary;
    }
    if let Some(path) = &args.duals {
        let dual = read_duals(path, lp.m())?;
        if dual.psi.len() != lp.n() {
            return Err(CliError::validation(format!(
                "dual file has {} psi values, expected {}",
                dual.psi.len(),
                lp.n()
            )));
        }
        let slack = check_slackness(&lp, &x, &dual, args.alpha_p, args.alpha_d, args.slack_tol);
        println!("primal_slackness_ok {}", slack.primal_ok);
        println!("dual_slackness_ok {}", slack.dual_ok);
        println!("dual_feasible {}", slack.dual_feasible);
        println!("measured_alpha_p {}", io::fmt_f64(slack.measured_alpha_p));
        println!("measured_alpha_d {}", io::fmt_f64(slack.measured_alpha_d));
        if !slack.violating_indices.is_empty() {
            println!("violations {:?}", slack.violating_indices);
        }
        ok &= slack.primal_ok && slack.dual_ok && slack.primal_feasible && slack.dual_feasible;
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::validation("check failed"))
    }
}
