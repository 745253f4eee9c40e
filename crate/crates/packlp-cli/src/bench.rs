//! Experiment runner: full-solve baselines, accelerated runs, cloning runs,
//! per-row reports and CSV emission.
//!
//! Seeds derive from the plan's master seed as
//! `cell_seed = mix(master, cell_index)`, `trial_seed = mix(cell_seed,
//! trial)`, and streams 0/1/2 of the trial seed feed the instance, the
//! accelerator, and the clone coordinator. Rerunning a plan with the same
//! master seed therefore reproduces every objective, margin, and
//! feasibility flag exactly (wall times vary, nothing else does).
//!
//! Cells run sequentially and each timed solve has the process to itself;
//! only the cloning method uses its own internal concurrency. One warm-up
//! solve on a small throwaway instance runs before any timing and is not
//! reported.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use packlp_core::accel::{accelerate, AcceleratorConfig};
use packlp_core::gen::{GenError, GeneratorSpec, RandomSpec};
use packlp_core::rng::mix_seed;
use packlp_core::solver::{solver_by_name, Solver, SolverError};
use packlp_core::relative_error;

use crate::cloning::{run_clones, CloneConfig, CloningError, Straggler};
use crate::io::fmt_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Full,
    Accelerate,
    Clones,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Full => "full",
            Method::Accelerate => "accelerate",
            Method::Clones => "clones",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Method::Full),
            "accelerate" | "accel" => Ok(Method::Accelerate),
            "clones" => Ok(Method::Clones),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// Cloning settings for cells that run the `clones` method.
#[derive(Clone, Debug)]
pub struct CloneSettings {
    pub clones: usize,
    pub wait_for: usize,
    pub straggler: Straggler,
    pub max_concurrency: Option<usize>,
}

impl Default for CloneSettings {
    fn default() -> Self {
        CloneSettings {
            clones: 8,
            wait_for: 4,
            straggler: Straggler::Off,
            max_concurrency: None,
        }
    }
}

/// One sweep cell: an instance family plus accelerator settings, run for
/// `trials` independently seeded instances.
#[derive(Clone, Debug)]
pub struct PlanCell {
    pub label: String,
    pub spec: GeneratorSpec,
    pub eps_s: f64,
    pub ef_schedule: Vec<f64>,
    pub alpha_d: f64,
    pub resample_per_ef: bool,
    pub solver: String,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub clone_settings: CloneSettings,
}

impl PlanCell {
    pub fn new(label: impl Into<String>, spec: GeneratorSpec, eps_s: f64) -> Self {
        let defaults = AcceleratorConfig::default();
        PlanCell {
            label: label.into(),
            spec,
            eps_s,
            ef_schedule: defaults.ef_schedule,
            alpha_d: 1.0,
            resample_per_ef: true,
            solver: "simplex".into(),
            methods: vec![Method::Full, Method::Accelerate],
            trials: 20,
            clone_settings: CloneSettings::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub master_seed: u64,
    pub warmup: bool,
    pub cells: Vec<PlanCell>,
}

impl ExperimentPlan {
    pub fn new(master_seed: u64, cells: Vec<PlanCell>) -> Self {
        ExperimentPlan { master_seed, warmup: true, cells }
    }
}

/// One run of one method on one trial instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    /// Generator fingerprint including the trial seed; enough to regenerate
    /// the instance.
    pub instance: String,
    pub method: Method,
    pub trial: usize,
    pub eps_s: Option<f64>,
    pub eps_f_used: Option<f64>,
    pub alpha_d: Option<f64>,
    pub objective: f64,
    pub opt_reference: Option<f64>,
    pub relative_error: Option<f64>,
    pub solve_time: Duration,
    pub threshold_time: Duration,
    pub total_time: Duration,
    pub speedup: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("plan: {0}")]
    Plan(String),
    #[error("generator: {0}")]
    Gen(#[from] GenError),
    #[error("unknown solver {0:?}")]
    UnknownSolver(String),
    #[error(transparent)]
    Cloning(#[from] CloningError),
    #[error("accelerator: {0}")]
    Accel(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Runs every cell of the plan and returns one report row per method per
/// trial. A failed full solve marks the cell's trial as baseline-unavailable
/// (accelerated rows lose `opt_reference`, `relative_error`, `speedup` but
/// are still produced); a failed accelerated run aborts with an error since
/// the accelerator's fallback contract makes that unexpected.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<RunReport>, BenchError> {
    if plan.cells.is_empty() {
        return Err(BenchError::Plan("plan has no cells".into()));
    }
    if plan.warmup {
        warmup();
    }

    let mut reports = Vec::new();
    for (cell_index, cell) in plan.cells.iter().enumerate() {
        if cell.trials == 0 {
            return Err(BenchError::Plan(format!("cell {:?} has zero trials", cell.label)));
        }
        let solver: Arc<dyn Solver> = Arc::from(
            solver_by_name(&cell.solver).ok_or_else(|| BenchError::UnknownSolver(cell.solver.clone()))?,
        );
        let cell_seed = mix_seed(plan.master_seed, cell_index as u64);

        for trial in 0..cell.trials {
            let trial_seed = mix_seed(cell_seed, trial as u64);
            let spec = cell.spec.with_seed(mix_seed(trial_seed, 0));
            let fingerprint = spec.to_string();
            let lp = Arc::new(spec.generate()?);

            // Baseline: one full solve per trial instance, for OPT and the
            // reference wall time.
            let full = {
                let start = Instant::now();
                let out = solver.solve(&lp);
                (out, start.elapsed())
            };
            let (baseline, baseline_time): (Option<(f64, bool)>, Option<Duration>) = match full {
                (Ok(out), t) => {
                    let feas = lp
                        .check_feasible(&out.primal.x, 1e-7)
                        .map(|r| r.feasible)
                        .unwrap_or(false);
                    (Some((out.primal.objective, feas)), Some(t))
                }
                (Err(SolverError::IterationLimit { .. }), _)
                | (Err(SolverError::Numerical { .. }), _) => (None, None),
            };
            let opt = baseline.map(|(obj, _)| obj);

            for method in &cell.methods {
                match method {
                    Method::Full => {
                        let Some((objective, feasible)) = baseline else {
                            // Baseline unavailable: no full row can be made.
                            continue;
                        };
                        let t = baseline_time.expect("time recorded with baseline");
                        reports.push(RunReport {
                            instance: fingerprint.clone(),
                            method: Method::Full,
                            trial,
                            eps_s: None,
                            eps_f_used: None,
                            alpha_d: None,
                            objective,
                            opt_reference: Some(objective),
                            relative_error: relative_error(objective, objective).ok(),
                            solve_time: t,
                            threshold_time: Duration::ZERO,
                            total_time: t,
                            speedup: None,
                            feasible,
                        });
                    }
                    Method::Accelerate => {
                        let config = AcceleratorConfig {
                            eps_s: cell.eps_s,
                            ef_schedule: cell.ef_schedule.clone(),
                            alpha_d: cell.alpha_d,
                            seed: mix_seed(trial_seed, 1),
                            resample_per_ef: cell.resample_per_ef,
                        };
                        let out = accelerate(&lp, solver.as_ref(), &config)
                            .map_err(|e| BenchError::Accel(e.to_string()))?;
                        reports.push(RunReport {
                            instance: fingerprint.clone(),
                            method: Method::Accelerate,
                            trial,
                            eps_s: Some(cell.eps_s),
                            eps_f_used: Some(out.eps_f_used),
                            alpha_d: Some(cell.alpha_d),
                            objective: out.objective,
                            opt_reference: opt,
                            relative_error: opt
                                .and_then(|o| relative_error(out.objective, o).ok()),
                            solve_time: out.solve_time,
                            threshold_time: out.threshold_time,
                            total_time: out.total_time,
                            speedup: baseline_time
                                .map(|bt| bt.as_secs_f64() / out.total_time.as_secs_f64()),
                            feasible: true,
                        });
                    }
                    Method::Clones => {
                        let settings = &cell.clone_settings;
                        let config = CloneConfig {
                            clones: settings.clones,
                            wait_for: settings.wait_for,
                            master_seed: mix_seed(trial_seed, 2),
                            accel: AcceleratorConfig {
                                eps_s: cell.eps_s,
                                ef_schedule: cell.ef_schedule.clone(),
                                alpha_d: cell.alpha_d,
                                seed: 0, // per-clone seeds derive from master
                                resample_per_ef: cell.resample_per_ef,
                            },
                            full_search: true,
                            straggler: settings.straggler.clone(),
                            max_concurrency: settings.max_concurrency,
                        };
                        let out = run_clones(&lp, &solver, &config)?;
                        reports.push(RunReport {
                            instance: fingerprint.clone(),
                            method: Method::Clones,
                            trial,
                            eps_s: Some(cell.eps_s),
                            eps_f_used: out.best.eps_f_used,
                            alpha_d: Some(cell.alpha_d),
                            objective: out.best.objective,
                            opt_reference: opt,
                            relative_error: opt
                                .and_then(|o| relative_error(out.best.objective, o).ok()),
                            solve_time: Duration::ZERO,
                            threshold_time: Duration::ZERO,
                            total_time: out.wall_time,
                            speedup: baseline_time
                                .map(|bt| bt.as_secs_f64() / out.wall_time.as_secs_f64()),
                            feasible: out.best.feasible,
                        });
                    }
                }
            }
        }
    }
    Ok(reports)
}

/// Touches the solver and accelerator code paths once so first-run effects
/// (lazy page faults, allocator growth) stay out of the measured trials.
fn warmup() {
    let spec = GeneratorSpec::Random(RandomSpec {
        m: 10,
        n: 400,
        density: 0.8,
        seed: 0x77AB,
        ..RandomSpec::default()
    });
    if let Ok(lp) = spec.generate() {
        if let Some(solver) = solver_by_name("simplex") {
            let _ = solver.solve(&lp);
            let config = AcceleratorConfig { eps_s: 0.05, ..AcceleratorConfig::default() };
            let _ = accelerate(&lp, solver.as_ref(), &config);
        }
    }
}

/// Mean and standard deviation over rows of one cell+method, for quick
/// trend checks and the CLI summary table.
#[derive(Clone, Debug)]
pub struct Summary {
    pub instance_prefix: String,
    pub method: Method,
    pub rows: usize,
    pub mean_relative_error: Option<f64>,
    pub std_relative_error: Option<f64>,
    pub mean_speedup: Option<f64>,
    pub mean_total_time: Duration,
    pub all_feasible: bool,
}

/// Groups rows by `(instance fingerprint up to the seed field, method)` in
/// first-appearance order.
pub fn summarize(reports: &[RunReport]) -> Vec<Summary> {
    fn family(instance: &str) -> &str {
        instance.split(",seed=").next().unwrap_or(instance)
    }
    let mut out: Vec<Summary> = Vec::new();
    for row in reports {
        let key_prefix = family(&row.instance).to_string();
        let found = out
            .iter_mut()
            .find(|s| s.instance_prefix == key_prefix && s.method == row.method);
        let entry = match found {
            Some(e) => e,
            None => {
                out.push(Summary {
                    instance_prefix: key_prefix,
                    method: row.method,
                    rows: 0,
                    mean_relative_error: None,
                    std_relative_error: None,
                    mean_speedup: None,
                    mean_total_time: Duration::ZERO,
                    all_feasible: true,
                });
                out.last_mut().expect("just pushed")
            }
        };
        entry.rows += 1;
        entry.all_feasible &= row.feasible;
    }
    for entry in &mut out {
        let rows: Vec<&RunReport> = reports
            .iter()
            .filter(|r| family(&r.instance) == entry.instance_prefix && r.method == entry.method)
            .collect();
        let errs: Vec<f64> = rows.iter().filter_map(|r| r.relative_error).collect();
        if !errs.is_empty() {
            let mean = errs.iter().sum::<f64>() / errs.len() as f64;
            let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
                / errs.len() as f64;
            entry.mean_relative_error = Some(mean);
            entry.std_relative_error = Some(var.sqrt());
        }
        let speedups: Vec<f64> = rows.iter().filter_map(|r| r.speedup).collect();
        if !speedups.is_empty() {
            entry.mean_speedup = Some(speedups.iter().sum::<f64>() / speedups.len() as f64);
        }
        let total: f64 = rows.iter().map(|r| r.total_time.as_secs_f64()).sum();
        entry.mean_total_time = Duration::from_secs_f64(total / rows.len() as f64);
    }
    out
}

const CSV_HEADER: &str = "instance,method,trial,eps_s,eps_f_used,alpha_d,objective,\
opt_reference,relative_error,solve_time_s,threshold_time_s,total_time_s,speedup,feasible";

fn opt_field(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes one header row plus one row per report. The column order is part
/// of the format and stays fixed; numbers carry 17 significant digits.
pub fn emit_csv(reports: &[RunReport], path: &Path) -> Result<(), BenchError> {
    if reports.is_empty() {
        return Err(BenchError::Csv("refusing to write an empty report list".into()));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.instance,
            r.method,
            r.trial,
            opt_field(r.eps_s),
            opt_field(r.eps_f_used),
            opt_field(r.alpha_d),
            fmt_f64(r.objective),
            opt_field(r.opt_reference),
            opt_field(r.relative_error),
            fmt_f64(r.solve_time.as_secs_f64()),
            fmt_f64(r.threshold_time.as_secs_f64()),
            fmt_f64(r.total_time.as_secs_f64()),
            opt_field(r.speedup),
            r.feasible,
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a file produced by [`emit_csv`] back into reports; numeric fields
/// recover exactly.
pub fn read_csv(path: &Path) -> Result<Vec<RunReport>, BenchError> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line != CSV_HEADER {
                return Err(BenchError::Csv(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        // The instance fingerprint may itself contain commas, so split the
        // 13 fixed fields off the right and keep the remainder intact.
        let mut fields: Vec<&str> = line.rsplitn(14, ',').collect();
        fields.reverse();
        if fields.len() != 14 {
            return Err(BenchError::Csv(format!(
                "line {}: {} fields, expected 14",
                idx + 1,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, BenchError> {
            s.parse()
                .map_err(|_| BenchError::Csv(format!("line {}: bad {what} {s:?}", idx + 1)))
        };
        let parse_opt = |s: &str, what: &str| -> Result<Option<f64>, BenchError> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse_f(s, what).map(Some)
            }
        };
        rows.push(RunReport {
            instance: fields[0].to_string(),
            method: fields[1]
                .parse()
                .map_err(|e: String| BenchError::Csv(format!("line {}: {e}", idx + 1)))?,
            trial: fields[2]
                .parse()
                .map_err(|_| BenchError::Csv(format!("line {}: bad trial", idx + 1)))?,
            eps_s: parse_opt(fields[3], "eps_s")?,
            eps_f_used: parse_opt(fields[4], "eps_f_used")?,
            alpha_d: parse_opt(fields[5], "alpha_d")?,
            objective: parse_f(fields[6], "objective")?,
            opt_reference: parse_opt(fields[7], "opt_reference")?,
            relative_error: parse_opt(fields[8], "relative_error")?,
            solve_time: Duration::from_secs_f64(parse_f(fields[9], "solve_time_s")?),
            threshold_time: Duration::from_secs_f64(parse_f(fields[10], "threshold_time_s")?),
            total_time: Duration::from_secs_f64(parse_f(fields[11], "total_time_s")?),
            speedup: parse_opt(fields[12], "speedup")?,
            feasible: match fields[13] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(BenchError::Csv(format!(
                        "line {}: bad feasible flag {other:?}",
                        idx + 1
                    )))
                }
            },
        });
    }
    Ok(rows)
}
