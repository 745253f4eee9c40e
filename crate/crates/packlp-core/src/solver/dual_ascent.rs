//! Greedy water-filling dual ascent.
//!
//! Start with every profitable column switched on. While some packing row is
//! overloaded, raise the prices of all overloaded rows uniformly until the
//! next column's reduced cost `c_j - phi'a_j` reaches zero, and freeze that
//! column at zero. The `delta` parameter overshoots each raise by a factor
//! `(1 + delta)`, which batches near-simultaneous freezes and keeps the
//! scheme strictly complementary; larger `delta` trades solution quality for
//! fewer rounds.
//!
//! The output is binary and primal feasible, the dual pair is feasible, and
//! the primal slackness factor is exactly 1 (active columns are priced at
//! cost by construction). The dual factor `alpha_d` is whatever the run
//! produces — it is measured by `check_slackness`, never certified, which is
//! why this solver is labeled experimental.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{SolverError, SolverOutcome};
use crate::clock::Stopwatch;
use crate::lp::{DualSolution, PackingLp, PrimalSolution};

#[derive(Clone, Debug)]
pub struct DualAscentParams {
    /// Multiplicative overshoot on each uniform price raise; must be > 0.
    pub delta: f64,
    /// Round cap.
    pub max_rounds: u64,
}

impl Default for DualAscentParams {
    fn default() -> Self {
        DualAscentParams { delta: 1e-6, max_rounds: 10_000 }
    }
}

pub fn dual_ascent_solve(lp: &PackingLp, delta: f64) -> Result<SolverOutcome, SolverError> {
    dual_ascent_solve_with(lp, &DualAscentParams { delta, ..DualAscentParams::default() })
}

pub fn dual_ascent_solve_with(
    lp: &PackingLp,
    params: &DualAscentParams,
) -> Result<SolverOutcome, SolverError> {
    assert!(params.delta > 0.0, "delta must be positive");
    let watch = Stopwatch::start();
    let (m, n) = (lp.m(), lp.n());

    // Columns with zero cost never pay for the load they add; leave them off
    // (the exact solver keeps them at zero as well).
    let mut active: Vec<bool> = lp.c().iter().map(|&cj| cj > 0.0).collect();
    let mut load = vec![0.0; m];
    for j in 0..n {
        if active[j] {
            let (rows, vals) = lp.col(j);
            for (&i, &a) in rows.iter().zip(vals) {
                load[i as usize] += a;
            }
        }
    }
    let mut phi = vec![0.0; m];
    let mut priced = vec![0.0; n]; // phi' a_j, maintained incrementally
    let mut violated = vec![false; m];
    let mut rate = vec![0.0; n];
    let mut rounds: u64 = 0;

    loop {
        let mut any_violated = false;
        for i in 0..m {
            violated[i] = load[i] > lp.b()[i] + 1e-12 * (1.0 + lp.b()[i]);
            any_violated |= violated[i];
        }
        if !any_violated {
            break;
        }
        rounds += 1;
        if rounds > params.max_rounds {
            return Err(SolverError::IterationLimit { iterations: rounds - 1 });
        }

        // Slowest price raise that drives some active reduced cost to zero.
        let mut theta_min = f64::INFINITY;
        for j in 0..n {
            if !active[j] {
                continue;
            }
            let (rows, vals) = lp.col(j);
            let mut rj = 0.0;
            for (&i, &a) in rows.iter().zip(vals) {
                if violated[i as usize] {
                    rj += a;
                }
            }
            rate[j] = rj;
            if rj > 1e-300 {
                let slack = lp.c()[j] - priced[j];
                theta_min = theta_min.min(slack / rj);
            }
        }
        if !theta_min.is_finite() {
            // A violated row with no active support cannot happen: its load
            // would be zero <= b. Reaching this is a numerical fault.
            return Err(SolverError::Numerical {
                message: String::from("no active column supports a violated row"),
            });
        }
        let theta = theta_min.max(0.0) * (1.0 + params.delta);

        for i in 0..m {
            if violated[i] {
                phi[i] += theta;
            }
        }
        for j in 0..n {
            if !active[j] || rate[j] == 0.0 {
                continue;
            }
            priced[j] += theta * rate[j];
            if priced[j] >= lp.c()[j] - 1e-12 * (1.0 + lp.c()[j]) {
                active[j] = false;
                let (rows, vals) = lp.col(j);
                for (&i, &a) in rows.iter().zip(vals) {
                    load[i as usize] -= a;
                }
            }
        }
    }

    let x: Vec<f64> = active.iter().map(|&on| if on { 1.0 } else { 0.0 }).collect();
    // Recompute psi from scratch so dual feasibility does not inherit the
    // incremental drift of `priced`.
    let psi: Vec<f64> =
        (0..n).map(|j| (lp.c()[j] - lp.col_dot(j, &phi)).max(0.0)).collect();
    let primal = PrimalSolution::evaluated(lp, x).expect("dimensions fixed");
    Ok(SolverOutcome {
        primal,
        dual: DualSolution { phi, psi },
        iterations: rounds,
        wall_time: watch.elapsed(),
    })
}
