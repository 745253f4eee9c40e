//! Speculative execution: run `K` independent clones of the accelerator and
//! take the best feasible answer among the first `k` to finish.
//!
//! Each clone owns its seed (`mix_seed(master, clone_id)`), its sample
//! stream, and its solver call; the instance is shared read-only behind an
//! `Arc`. The coordinator watches a completion channel and returns as soon
//! as `k` clones have produced results — stragglers keep running on their
//! worker threads but their answers are discarded, which is the whole
//! point: one slow clone no longer gates the answer.
//!
//! "Best" means highest objective among *feasible* results; an infeasible
//! result can never win against the hard constraints of a packing LP. When
//! none of the counted results is feasible the all-zeros fallback is
//! returned with a flag. Only if every single clone fails does the run
//! error out.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use packlp_core::accel::{accelerate, accelerate_once, AcceleratorConfig};
use packlp_core::rng::{mix_seed, SplitMix64};
use packlp_core::solver::Solver;
use packlp_core::PackingLp;

/// Synthetic contention for tests and experiments; clones sleep before they
/// start working.
#[derive(Clone, Debug, PartialEq)]
pub enum Straggler {
    Off,
    /// Delay exactly one clone.
    Fixed { clone_id: usize, delay: Duration },
    /// Heavy-tailed delay per clone: `scale * u^(-1/shape)` with `u`
    /// uniform, seeded from the clone seed; capped at `100 * scale`.
    Pareto { scale: Duration, shape: f64 },
}

impl Straggler {
    fn delay_for(&self, clone_id: usize, clone_seed: u64) -> Duration {
        match *self {
            Straggler::Off => Duration::ZERO,
            Straggler::Fixed { clone_id: target, delay } => {
                if clone_id == target {
                    delay
                } else {
                    Duration::ZERO
                }
            }
            Straggler::Pareto { scale, shape } => {
                let mut rng = SplitMix64::new(mix_seed(clone_seed, 0x57A6));
                let u = rng.next_f64().max(1e-12);
                let factor = u.powf(-1.0 / shape).min(100.0);
                scale.mul_f64(factor)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct CloneConfig {
    /// Number of clones to launch (`K`).
    pub clones: usize,
    /// How many completions to wait for (`k`), `1 <= k <= K`.
    pub wait_for: usize,
    pub master_seed: u64,
    /// Accelerator parameters; each clone gets its own derived seed.
    pub accel: AcceleratorConfig,
    /// Run the full margin search per clone (default). With `false` each
    /// clone runs the single-margin core pipeline at the schedule's first
    /// point and may report an infeasible candidate.
    pub full_search: bool,
    pub straggler: Straggler,
    /// Worker threads; defaults to available parallelism capped at `K`.
    pub max_concurrency: Option<usize>,
}

impl CloneConfig {
    pub fn new(clones: usize, wait_for: usize, master_seed: u64, accel: AcceleratorConfig) -> Self {
        CloneConfig {
            clones,
            wait_for,
            master_seed,
            accel,
            full_search: true,
            straggler: Straggler::Off,
            max_concurrency: None,
        }
    }
}

/// What one clone produced. `x_hat` is `None` when the clone failed; the
/// failure text is then in `error`.
#[derive(Clone, Debug)]
pub struct CloneResult {
    pub clone_id: usize,
    pub seed: u64,
    pub x_hat: Option<Vec<f64>>,
    pub objective: f64,
    pub feasible: bool,
    pub eps_f_used: Option<f64>,
    pub fallback: bool,
    /// Includes any injected straggler delay.
    pub wall_time: Duration,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ClonesOutcome {
    /// Winner among the first `wait_for` successful completions, or the
    /// all-zeros fallback when none of them was feasible.
    pub best: CloneResult,
    /// True when `best` is the synthesized all-zeros fallback.
    pub best_is_fallback: bool,
    /// Every completion the coordinator observed, in completion order.
    pub completed: Vec<CloneResult>,
    /// Clones whose results were never observed (abandoned or still queued).
    pub abandoned: usize,
    pub wall_time: Duration,
}

#[derive(Debug, thiserror::Error)]
pub enum CloningError {
    #[error("invalid clone config: {0}")]
    Config(String),
    #[error("all {} clones failed: {failures:?}", failures.len())]
    AllClonesFailed { failures: Vec<(usize, String)> },
}

/// Derives the seed for one clone: `mix_seed(master, clone_id)`.
pub fn clone_seed(master: u64, clone_id: usize) -> u64 {
    mix_seed(master, clone_id as u64)
}

fn run_one(
    lp: &PackingLp,
    solver: &dyn Solver,
    config: &CloneConfig,
    clone_id: usize,
) -> CloneResult {
    let seed = clone_seed(config.master_seed, clone_id);
    let start = Instant::now();
    let delay = config.straggler.delay_for(clone_id, seed);
    if delay > Duration::ZERO {
        thread::sleep(delay);
    }

    let accel_config = AcceleratorConfig { seed, ..config.accel.clone() };
    if config.full_search {
        match accelerate(lp, solver, &accel_config) {
            Ok(out) => CloneResult {
                clone_id,
                seed,
                objective: out.objective,
                feasible: true,
                eps_f_used: Some(out.eps_f_used),
                fallback: out.fallback,
                x_hat: Some(out.x_hat),
                wall_time: start.elapsed(),
                error: None,
            },
            Err(e) => failed(clone_id, seed, start.elapsed(), e.to_string()),
        }
    } else {
        let eps_f = accel_config.ef_schedule.first().copied().unwrap_or(0.0);
        let mut rng = SplitMix64::new(seed);
        match accelerate_once(lp, solver, accel_config.eps_s, eps_f, &mut rng) {
            Ok(once) => {
                let feasible = once
                    .loads
                    .iter()
                    .zip(lp.b())
                    .all(|(&ax, &bi)| ax <= bi + packlp_core::accel::ACCEL_FEAS_TOL);
                let objective = lp.objective(&once.x_hat).expect("dimensions match");
                CloneResult {
                    clone_id,
                    seed,
                    objective,
                    feasible,
                    eps_f_used: Some(eps_f),
                    fallback: false,
                    x_hat: Some(once.x_hat),
                    wall_time: start.elapsed(),
                    error: None,
                }
            }
            Err(e) => failed(clone_id, seed, start.elapsed(), e.to_string()),
        }
    }
}

fn failed(clone_id: usize, seed: u64, wall_time: Duration, error: String) -> CloneResult {
    CloneResult {
        clone_id,
        seed,
        x_hat: None,
        objective: f64::NEG_INFINITY,
        feasible: false,
        eps_f_used: None,
        fallback: false,
        wall_time,
        error: Some(error),
    }
}

/// Launches `config.clones` clones and reduces the first `config.wait_for`
/// successful completions to the best feasible result (max objective,
/// clone id as the tiebreak).
pub fn run_clones(
    lp: &Arc<PackingLp>,
    solver: &Arc<dyn Solver>,
    config: &CloneConfig,
) -> Result<ClonesOutcome, CloningError> {
    let k_total = config.clones;
    let wait_for = config.wait_for;
    if k_total == 0 || wait_for == 0 || wait_for > k_total {
        return Err(CloningError::Config(format!(
            "need 1 <= k <= K, got K = {k_total}, k = {wait_for}"
        )));
    }
    config
        .accel
        .validate()
        .map_err(|e| CloningError::Config(e.to_string()))?;

    let start = Instant::now();
    let workers = config
        .max_concurrency
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |p| p.get()))
        .clamp(1, k_total);

    let jobs: Arc<Mutex<VecDeque<usize>>> = Arc::new(Mutex::new((0..k_total).collect()));
    let cancelled = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel::<CloneResult>();
    let shared_config = Arc::new(config.clone());

    for _ in 0..workers {
        let lp = Arc::clone(lp);
        let solver = Arc::clone(solver);
        let jobs = Arc::clone(&jobs);
        let cancelled = Arc::clone(&cancelled);
        let config = Arc::clone(&shared_config);
        let tx = tx.clone();
        // Detached on purpose: a straggling worker must not block the
        // coordinator's return. Its send into a closed channel is ignored.
        thread::spawn(move || loop {
            if cancelled.load(Ordering::Relaxed) {
                break;
            }
            let job = jobs.lock().expect("job queue poisoned").pop_front();
            let Some(clone_id) = job else { break };
            let result = run_one(&lp, solver.as_ref(), &config, clone_id);
            if tx.send(result).is_err() {
                break;
            }
        });
    }
    drop(tx);

    let mut completed: Vec<CloneResult> = Vec::new();
    let mut successes = 0usize;
    while let Ok(result) = rx.recv() {
        if result.error.is_none() {
            successes += 1;
        }
        completed.push(result);
        if successes >= wait_for || completed.len() == k_total {
            break;
        }
    }
    cancelled.store(true, Ordering::Relaxed);
    let abandoned = k_total - completed.len();

    if successes == 0 {
        let failures = completed
            .iter()
            .map(|r| (r.clone_id, r.error.clone().unwrap_or_default()))
            .collect();
        return Err(CloningError::AllClonesFailed { failures });
    }

    let best = completed
        .iter()
        .filter(|r| r.error.is_none())
        .take(wait_for)
        .filter(|r| r.feasible)
        .max_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then_with(|| b.clone_id.cmp(&a.clone_id))
        })
        .cloned();

    let (best, best_is_fallback) = match best {
        Some(r) => (r, false),
        None => (
            CloneResult {
                clone_id: usize::MAX,
                seed: config.master_seed,
                x_hat: Some(vec![0.0; lp.n()]),
                objective: 0.0,
                feasible: true,
                eps_f_used: None,
                fallback: true,
                wall_time: Duration::ZERO,
                error: None,
            },
            true,
        ),
    };

    Ok(ClonesOutcome { best, best_is_fallback, completed, abandoned, wall_time: start.elapsed() })
}
