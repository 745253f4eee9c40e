//! The acceleration pipeline: sample variables, solve the scaled sample LP,
//! threshold the full instance with the sample's dual prices, and search the
//! feasibility-margin schedule for the first feasible output.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::clock::Stopwatch;
use crate::float;
use crate::lp::{LpError, PackingLp};
use crate::rng::{sample_without_replacement, SplitMix64};
use crate::solver::{Solver, SolverError, SolverOutcome};

/// Feasibility tolerance the accelerator's own loop uses, matching the
/// workspace-wide default for `check_feasible`.
pub const ACCEL_FEAS_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub enum AccelError {
    /// Configuration rejected before any work happened.
    Config(String),
    /// Sample index set inconsistent with the instance.
    Sample(String),
    /// Single-shot pipeline: the solver failed on the sample LP.
    Solver(SolverError),
    /// The solver failed on every schedule point; diagnostics per point.
    AllAttemptsFailed { failures: Vec<(f64, SolverError)> },
    Lp(LpError),
}

impl fmt::Display for AccelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccelError::Config(msg) => write!(f, "invalid accelerator config: {msg}"),
            AccelError::Sample(msg) => write!(f, "invalid sample: {msg}"),
            AccelError::Solver(e) => write!(f, "sample solve failed: {e}"),
            AccelError::AllAttemptsFailed { failures } => {
                write!(f, "solver failed on all {} schedule points:", failures.len())?;
                for (ef, err) in failures {
                    write!(f, " [eps_f={ef}: {err}]")?;
                }
                Ok(())
            }
            AccelError::Lp(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AccelError {}

impl From<LpError> for AccelError {
    fn from(e: LpError) -> Self {
        AccelError::Lp(e)
    }
}

/// The scaled sub-instance built on a sampled variable set, plus the map
/// back to original variable indices.
#[derive(Clone, Debug)]
pub struct SampleLp {
    pub lp: PackingLp,
    /// `index_map[k]` is the original index of sample variable `k`.
    pub index_map: Vec<usize>,
    pub eps_s: f64,
    pub eps_f: f64,
    pub alpha_d: f64,
}

/// Accelerator parameters. Solver choice is by value (the `Solver` trait
/// object passed to [`accelerate`]); selection by name lives in the CLI
/// layer.
#[derive(Clone, Debug)]
pub struct AcceleratorConfig {
    /// Sampling fraction in `(0, 1]`.
    pub eps_s: f64,
    /// Strictly increasing feasibility margins in `[0, 1)` to try in order.
    pub ef_schedule: Vec<f64>,
    /// Dual slackness factor used for RHS scaling when the solver does not
    /// certify one (ignored for solvers with a declared `alpha_d`).
    pub alpha_d: f64,
    pub seed: u64,
    /// Draw a fresh sample at every schedule point (the pipeline rerun in
    /// full) instead of reusing one sample and rescaling its RHS.
    pub resample_per_ef: bool,
}

impl Default for AcceleratorConfig {
    fn default() -> Self {
        AcceleratorConfig {
            eps_s: 0.01,
            ef_schedule: default_ef_schedule(),
            alpha_d: 1.0,
            seed: 0,
            resample_per_ef: true,
        }
    }
}

impl AcceleratorConfig {
    pub fn validate(&self) -> Result<(), AccelError> {
        if !(self.eps_s > 0.0 && self.eps_s <= 1.0) {
            return Err(AccelError::Config(format!("eps_s = {} outside (0, 1]", self.eps_s)));
        }
        if !(self.alpha_d >= 1.0) {
            return Err(AccelError::Config(format!("alpha_d = {} must be >= 1", self.alpha_d)));
        }
        if self.ef_schedule.is_empty() {
            return Err(AccelError::Config(String::from("ef_schedule is empty")));
        }
        for w in self.ef_schedule.windows(2) {
            if !(w[0] < w[1]) {
                return Err(AccelError::Config(String::from(
                    "ef_schedule must be strictly increasing",
                )));
            }
        }
        let first = self.ef_schedule[0];
        let last = *self.ef_schedule.last().expect("nonempty");
        if !(0.0..1.0).contains(&first) || !(0.0..1.0).contains(&last) {
            return Err(AccelError::Config(String::from("ef values must lie in [0, 1)")));
        }
        Ok(())
    }
}

/// The default margin schedule: the arithmetic grid 0.00, 0.01, ..., 0.99.
pub fn default_ef_schedule() -> Vec<f64> {
    (0..100).map(|k| k as f64 / 100.0).collect()
}

/// Draws `ceil(eps_s * n)` variable indices uniformly without replacement,
/// sorted ascending.
pub fn sample_variables(n: usize, eps_s: f64, rng: &mut SplitMix64) -> Vec<usize> {
    assert!(eps_s > 0.0 && eps_s <= 1.0, "eps_s outside (0, 1]");
    assert!(n >= 1);
    let s = sample_size(n, eps_s);
    sample_without_replacement(n, s, rng)
}

/// `s = ceil(eps_s * n)`, clamped into `[1, n]`.
pub fn sample_size(n: usize, eps_s: f64) -> usize {
    let s = float::ceil_pos(eps_s * n as f64) as usize;
    s.clamp(1, n)
}

/// Builds the sample LP on the sorted index set `sample`: original columns
/// and costs, RHS scaled to `(1 - eps_f) * eps_s / alpha_d * b_i`.
pub fn build_sample_lp(
    lp: &PackingLp,
    sample: &[usize],
    eps_s: f64,
    eps_f: f64,
    alpha_d: f64,
) -> Result<SampleLp, AccelError> {
    if !(eps_s > 0.0 && eps_s <= 1.0) {
        return Err(AccelError::Config(format!("eps_s = {eps_s} outside (0, 1]")));
    }
    if !(0.0..1.0).contains(&eps_f) {
        return Err(AccelError::Config(format!("eps_f = {eps_f} outside [0, 1)")));
    }
    if !(alpha_d >= 1.0) {
        return Err(AccelError::Config(format!("alpha_d = {alpha_d} must be >= 1")));
    }
    let n = lp.n();
    let expected = sample_size(n, eps_s);
    if sample.len() != expected {
        return Err(AccelError::Sample(format!(
            "sample has {} indices, eps_s = {eps_s} requires {expected}",
            sample.len()
        )));
    }
    let mut col_ptr = Vec::with_capacity(sample.len() + 1);
    col_ptr.push(0usize);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    let mut c = Vec::with_capacity(sample.len());
    let mut prev: Option<usize> = None;
    for &j in sample {
        if j >= n {
            return Err(AccelError::Sample(format!("index {j} out of range for n = {n}")));
        }
        if prev.is_some_and(|p| p >= j) {
            return Err(AccelError::Sample(String::from(
                "sample must be sorted ascending without duplicates",
            )));
        }
        prev = Some(j);
        let (rows, vals) = lp.col(j);
        row_idx.extend_from_slice(rows);
        values.extend_from_slice(vals);
        col_ptr.push(row_idx.len());
        c.push(lp.c()[j]);
    }
    let b: Vec<f64> = lp.b().iter().map(|&bi| (1.0 - eps_f) * eps_s / alpha_d * bi).collect();
    let sample_lp = PackingLp::from_parts(lp.m(), sample.len(), col_ptr, row_idx, values, b, c)?;
    Ok(SampleLp {
        lp: sample_lp,
        index_map: sample.to_vec(),
        eps_s,
        eps_f,
        alpha_d,
    })
}

/// The allocation rule: `x_j = 1` iff `sum_i a_ij phi_i < c_j`, strictly
/// (ties go to 0), compared on computed doubles with no epsilon band.
pub fn threshold(lp: &PackingLp, phi: &[f64]) -> Vec<f64> {
    threshold_with_loads(lp, phi).0
}

/// Thresholding fused with the row-load accumulation `A x_hat`, saving a
/// second pass over the nonzeros. The loads are summed in the same column
/// order `PackingLp::loads` uses, so both routes agree bit for bit.
pub fn threshold_with_loads(lp: &PackingLp, phi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(phi.len(), lp.m(), "phi length");
    debug_assert!(phi.iter().all(|&v| v >= 0.0), "phi must be nonnegative");
    let n = lp.n();
    let mut x = vec![0.0; n];
    let mut loads = vec![0.0; lp.m()];
    for j in 0..n {
        let (rows, vals) = lp.col(j);
        let mut priced = 0.0;
        for (&i, &a) in rows.iter().zip(vals) {
            priced += a * phi[i as usize];
        }
        if priced < lp.c()[j] {
            x[j] = 1.0;
            for (&i, &a) in rows.iter().zip(vals) {
                loads[i as usize] += a;
            }
        }
    }
    (x, loads)
}

/// One pass of the core pipeline at a fixed margin `eps_f`.
#[derive(Clone, Debug)]
pub struct AccelOnceOutcome {
    /// The thresholded point; exactly binary, not necessarily feasible.
    pub x_hat: Vec<f64>,
    /// Row loads `A x_hat`, a byproduct of the fused thresholding pass.
    pub loads: Vec<f64>,
    pub sample: SampleLp,
    pub solver_outcome: SolverOutcome,
    pub solve_time: Duration,
    pub threshold_time: Duration,
}

/// Runs sample -> solve -> threshold once. The output is integral by
/// construction and feasibility is NOT guaranteed; that is the schedule
/// loop's job ([`accelerate`]).
pub fn accelerate_once(
    lp: &PackingLp,
    solver: &dyn Solver,
    eps_s: f64,
    eps_f: f64,
    rng: &mut SplitMix64,
) -> Result<AccelOnceOutcome, AccelError> {
    let alpha_d = solver.contract().alpha_d.unwrap_or(1.0);
    let sample_idx = sample_variables(lp.n(), eps_s, rng);
    let sample = build_sample_lp(lp, &sample_idx, eps_s, eps_f, alpha_d)?;
    accelerate_on_sample(lp, solver, sample).map_err(AccelError::Solver)
}

fn accelerate_on_sample(
    lp: &PackingLp,
    solver: &dyn Solver,
    sample: SampleLp,
) -> Result<AccelOnceOutcome, SolverError> {
    let watch = Stopwatch::start();
    let solver_outcome = solver.solve(&sample.lp)?;
    let solve_time = watch.elapsed();

    let watch = Stopwatch::start();
    let (x_hat, loads) = threshold_with_loads(lp, &solver_outcome.dual.phi);
    let threshold_time = watch.elapsed();

    Ok(AccelOnceOutcome { x_hat, loads, sample, solver_outcome, solve_time, threshold_time })
}

/// What happened at one schedule point.
#[derive(Clone, Debug)]
pub enum AttemptStatus {
    Feasible,
    Infeasible { worst_violation: f64 },
    SolverFailed { error: SolverError },
}

#[derive(Clone, Debug)]
pub struct Attempt {
    pub eps_f: f64,
    pub status: AttemptStatus,
    pub solve_time: Duration,
    pub threshold_time: Duration,
    /// Sample-LP objective, for verbose reporting only.
    pub sample_objective: Option<f64>,
}

/// Result of the full framework run.
#[derive(Clone, Debug)]
pub struct AccelOutcome {
    /// Feasible binary point (the all-zeros fallback if the schedule ran out).
    pub x_hat: Vec<f64>,
    /// Margin that produced `x_hat`; `1.0` for the fallback.
    pub eps_f_used: f64,
    /// True when the schedule was exhausted and the zero vector returned.
    pub fallback: bool,
    pub objective: f64,
    /// Per-point log, in schedule order up to the successful point.
    pub attempts: Vec<Attempt>,
    /// Accumulated sample-solve time across all attempts.
    pub solve_time: Duration,
    /// Accumulated thresholding time across all attempts.
    pub threshold_time: Duration,
    /// Wall time of the whole search.
    pub total_time: Duration,
}

/// The full framework: walk `config.ef_schedule` from the smallest margin,
/// return the first feasible thresholded point. Feasibility is judged with
/// tolerance [`ACCEL_FEAS_TOL`]. If no point yields feasibility the
/// all-zeros vector is returned with `eps_f_used = 1` and the fallback flag
/// set (always feasible since `b >= 0`). A solver failure at one point is
/// recorded and the search continues; only failure at every point is an
/// error.
pub fn accelerate(
    lp: &PackingLp,
    solver: &dyn Solver,
    config: &AcceleratorConfig,
) -> Result<AccelOutcome, AccelError> {
    config.validate()?;
    let total_watch = Stopwatch::start();
    let alpha_d = solver.contract().alpha_d.unwrap_or(config.alpha_d);
    let mut rng = SplitMix64::new(config.seed);

    let mut attempts = Vec::new();
    let mut solve_time = Duration::ZERO;
    let mut threshold_time = Duration::ZERO;
    let mut solver_failures: Vec<(f64, SolverError)> = Vec::new();
    let mut fixed_sample: Option<Vec<usize>> = None;

    for &eps_f in &config.ef_schedule {
        let sample_idx: Vec<usize> = if config.resample_per_ef {
            sample_variables(lp.n(), config.eps_s, &mut rng)
        } else {
            fixed_sample
                .get_or_insert_with(|| sample_variables(lp.n(), config.eps_s, &mut rng))
                .clone()
        };
        let sample = build_sample_lp(lp, &sample_idx, config.eps_s, eps_f, alpha_d)?;
        match accelerate_on_sample(lp, solver, sample) {
            Ok(once) => {
                solve_time += once.solve_time;
                threshold_time += once.threshold_time;
                let feasible = is_load_feasible(lp, &once.loads, ACCEL_FEAS_TOL);
                if feasible {
                    attempts.push(Attempt {
                        eps_f,
                        status: AttemptStatus::Feasible,
                        solve_time: once.solve_time,
                        threshold_time: once.threshold_time,
                        sample_objective: Some(once.solver_outcome.primal.objective),
                    });
                    let objective = lp.objective(&once.x_hat)?;
                    return Ok(AccelOutcome {
                        x_hat: once.x_hat,
                        eps_f_used: eps_f,
                        fallback: false,
                        objective,
                        attempts,
                        solve_time,
                        threshold_time,
                        total_time: total_watch.elapsed(),
                    });
                }
                let worst = worst_load_violation(lp, &once.loads);
                attempts.push(Attempt {
                    eps_f,
                    status: AttemptStatus::Infeasible { worst_violation: worst },
                    solve_time: once.solve_time,
                    threshold_time: once.threshold_time,
                    sample_objective: Some(once.solver_outcome.primal.objective),
                });
            }
            Err(err) => {
                attempts.push(Attempt {
                    eps_f,
                    status: AttemptStatus::SolverFailed { error: err.clone() },
                    solve_time: Duration::ZERO,
                    threshold_time: Duration::ZERO,
                    sample_objective: None,
                });
                solver_failures.push((eps_f, err));
            }
        }
    }

    if solver_failures.len() == config.ef_schedule.len() {
        return Err(AccelError::AllAttemptsFailed { failures: solver_failures });
    }

    // Schedule exhausted: the all-zeros point is always feasible.
    Ok(AccelOutcome {
        x_hat: vec![0.0; lp.n()],
        eps_f_used: 1.0,
        fallback: true,
        objective: 0.0,
        attempts,
        solve_time,
        threshold_time,
        total_time: total_watch.elapsed(),
    })
}

fn is_load_feasible(lp: &PackingLp, loads: &[f64], tol: f64) -> bool {
    loads.iter().zip(lp.b()).all(|(&ax, &bi)| ax <= bi + tol)
}

fn worst_load_violation(lp: &PackingLp, loads: &[f64]) -> f64 {
    loads
        .iter()
        .zip(lp.b())
        .map(|(&ax, &bi)| ax - bi)
        .fold(0.0, f64::max)
}

/// Theorem-style lower bound for the feasibility margin:
/// `3 * sqrt(6 (m + 2) ln(n) / (eps_s * B))`, natural log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoreticalEf {
    pub value: f64,
    /// Set when the bound exceeds 1, where the guarantee is vacuous.
    pub out_of_regime: bool,
}

/// Evaluates the margin bound. All inputs must be positive and `n >= 2`.
pub fn theoretical_ef(m: usize, n: usize, eps_s: f64, b_min: f64) -> TheoreticalEf {
    assert!(m >= 1 && n >= 2, "need m >= 1 and n >= 2");
    assert!(eps_s > 0.0 && b_min > 0.0, "eps_s and B must be positive");
    let value = 3.0 * float::sqrt(6.0 * (m as f64 + 2.0) * float::ln(n as f64) / (eps_s * b_min));
    TheoreticalEf { value, out_of_regime: value > 1.0 }
}
