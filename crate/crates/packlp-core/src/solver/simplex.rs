//! Revised simplex for packing LPs with implicit `[0, 1]` variable bounds.
//!
//! The LP is `max c'x : Ax + w = b, 0 <= x <= 1, w >= 0`. Box constraints
//! are handled implicitly (nonbasic variables rest at either bound), so the
//! basis stays `m x m` even when the instance is short and wide — exactly
//! the shape sample LPs have. The all-slack basis is feasible (`b >= 0`),
//! so no phase-1 is needed.
//!
//! Pricing is Dantzig (most positive reduced cost) with a switch to Bland's
//! rule after a run of degenerate pivots; ratio-test ties break on the
//! lowest leaving variable index, and there is no randomized state, so a
//! given instance always produces the same outcome bit for bit.
//!
//! Bound flips are batched: a flip leaves the basis (and therefore every
//! reduced cost) untouched, so one pricing pass feeds a heap of candidates
//! that is drained through consecutive flips until a candidate actually
//! forces a pivot. On wide instances most variables only ever flip, which
//! keeps the expensive `O(nnz)` pricing passes proportional to the number
//! of basis changes.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{SolverError, SolverOutcome};
use crate::clock::Stopwatch;
use crate::lp::{DualSolution, PackingLp, PrimalSolution};

/// Tuning knobs. The defaults are used everywhere in this workspace.
#[derive(Clone, Debug)]
pub struct SimplexParams {
    /// Reduced-cost optimality tolerance.
    pub tol: f64,
    /// Smallest pivot magnitude accepted in the ratio test.
    pub pivot_tol: f64,
    /// Iteration cap; `None` means `50 * (m + n)` for the solved LP.
    pub max_iterations: Option<u64>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub stall_limit: u32,
    /// Basis changes between refactorizations of the inverse.
    pub refactor_interval: u32,
}

impl Default for SimplexParams {
    fn default() -> Self {
        SimplexParams {
            tol: 1e-9,
            pivot_tol: 1e-10,
            max_iterations: None,
            stall_limit: 100,
            refactor_interval: 128,
        }
    }
}

/// One solver step, emitted through the optional observer.
#[derive(Clone, Copy, Debug)]
pub struct IterEvent {
    pub iteration: u64,
    pub objective: f64,
    /// `"pivot"`, `"flip"`, or `"refactor"`.
    pub kind: &'static str,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarState {
    AtLower,
    AtUpper,
    Basic(u32),
}

/// Heap candidate; max-heap by score, ties to the lower variable index.
struct Cand {
    score: f64,
    var: usize,
}

impl PartialEq for Cand {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cand {}
impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score.total_cmp(&other.score).then_with(|| other.var.cmp(&self.var))
    }
}

/// Solves `lp` to optimality with the given reduced-cost tolerance.
pub fn simplex_solve(lp: &PackingLp, tol: f64) -> Result<SolverOutcome, SolverError> {
    let params = SimplexParams { tol, ..SimplexParams::default() };
    simplex_solve_with(lp, &params, None)
}

/// Full-control entry point; `observer` receives one event per iteration
/// and is how verbose mode streams progress.
pub fn simplex_solve_with(
    lp: &PackingLp,
    params: &SimplexParams,
    mut observer: Option<&mut dyn FnMut(IterEvent)>,
) -> Result<SolverOutcome, SolverError> {
    let watch = Stopwatch::start();
    let mut state = State::new(lp, params);
    state.run(&mut observer)?;
    Ok(state.into_outcome(watch))
}

struct State<'a> {
    lp: &'a PackingLp,
    params: SimplexParams,
    m: usize,
    n: usize,
    status: Vec<VarState>,
    /// Variable occupying each basis row.
    basis: Vec<usize>,
    /// Dense row-major inverse of the basis matrix.
    binv: Vec<f64>,
    /// Values of the basic variables, aligned with `basis`.
    xb: Vec<f64>,
    /// Packing-row duals for the current basis.
    y: Vec<f64>,
    /// Reduced costs for all structural and slack variables.
    d: Vec<f64>,
    /// Incrementally tracked objective, for stall detection and logging.
    obj: f64,
    iterations: u64,
    events_since_refactor: u32,
    stall: u32,
    bland: bool,
    scratch_u: Vec<f64>,
    scratch_row: Vec<f64>,
}

impl<'a> State<'a> {
    fn new(lp: &'a PackingLp, params: &SimplexParams) -> Self {
        let (m, n) = (lp.m(), lp.n());
        let mut status = vec![VarState::AtLower; n + m];
        let basis: Vec<usize> = (n..n + m).collect();
        for (r, &v) in basis.iter().enumerate() {
            status[v] = VarState::Basic(r as u32);
        }
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        State {
            lp,
            params: params.clone(),
            m,
            n,
            status,
            basis,
            binv,
            xb: lp.b().to_vec(),
            y: vec![0.0; m],
            d: vec![0.0; n + m],
            obj: 0.0,
            iterations: 0,
            events_since_refactor: 0,
            stall: 0,
            bland: false,
            scratch_u: vec![0.0; m],
            scratch_row: vec![0.0; m],
        }
    }

    fn cost(&self, var: usize) -> f64 {
        if var < self.n {
            self.lp.c()[var]
        } else {
            0.0
        }
    }

    fn upper(&self, var: usize) -> f64 {
        if var < self.n {
            1.0
        } else {
            f64::INFINITY
        }
    }

    /// `y = c_B' * B^-1`.
    fn compute_duals(&mut self) {
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.m {
            let cb = self.cost(self.basis[r]);
            if cb != 0.0 {
                let row = &self.binv[r * self.m..(r + 1) * self.m];
                for (yi, &bi) in self.y.iter_mut().zip(row) {
                    *yi += cb * bi;
                }
            }
        }
    }

    /// Reduced costs for every variable under the current duals.
    fn compute_reduced_costs(&mut self) {
        for j in 0..self.n {
            self.d[j] = match self.status[j] {
                VarState::Basic(_) => 0.0,
                _ => self.lp.c()[j] - self.lp.col_dot(j, &self.y),
            };
        }
        for i in 0..self.m {
            self.d[self.n + i] = match self.status[self.n + i] {
                VarState::Basic(_) => 0.0,
                _ => -self.y[i],
            };
        }
    }

    /// `u = B^-1 * A_j` into the scratch buffer.
    fn ftran(&mut self, var: usize) {
        let m = self.m;
        if var < self.n {
            let (rows, vals) = self.lp.col(var);
            for r in 0..m {
                let row = &self.binv[r * m..(r + 1) * m];
                let mut acc = 0.0;
                for (&i, &a) in rows.iter().zip(vals) {
                    acc += row[i as usize] * a;
                }
                self.scratch_u[r] = acc;
            }
        } else {
            let i = var - self.n;
            for r in 0..m {
                self.scratch_u[r] = self.binv[r * m + i];
            }
        }
    }

    fn eligible(&self, var: usize) -> bool {
        match self.status[var] {
            VarState::AtLower => self.d[var] > self.params.tol,
            VarState::AtUpper => self.d[var] < -self.params.tol,
            VarState::Basic(_) => false,
        }
    }

    fn is_degenerate_step(&self, step: f64, gain: f64) -> bool {
        step * gain <= 1e-13 * (1.0 + self.obj.abs())
    }

    /// Rebuilds `B^-1` from scratch and recomputes the basic values from
    /// `b - sum(columns at upper bound)`.
    fn refactor(&mut self) -> Result<(), SolverError> {
        let m = self.m;
        let mut bmat = vec![0.0; m * m];
        for (k, &var) in self.basis.iter().enumerate() {
            if var < self.n {
                let (rows, vals) = self.lp.col(var);
                for (&i, &a) in rows.iter().zip(vals) {
                    bmat[i as usize * m + k] = a;
                }
            } else {
                bmat[(var - self.n) * m + k] = 1.0;
            }
        }
        // Gauss-Jordan with partial pivoting, identity augmented in-place.
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = bmat[col * m + col].abs();
            for r in col + 1..m {
                let v = bmat[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(SolverError::Numerical {
                    message: String::from("singular basis during refactorization"),
                });
            }
            if piv_row != col {
                for k in 0..m {
                    bmat.swap(piv_row * m + k, col * m + k);
                    inv.swap(piv_row * m + k, col * m + k);
                }
            }
            let p = bmat[col * m + col];
            for k in 0..m {
                bmat[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = bmat[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        bmat[r * m + k] -= f * bmat[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;

        let mut rhs = self.lp.b().to_vec();
        for j in 0..self.n {
            if self.status[j] == VarState::AtUpper {
                let (rows, vals) = self.lp.col(j);
                for (&i, &a) in rows.iter().zip(vals) {
                    rhs[i as usize] -= a;
                }
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.xb[r] = row.iter().zip(&rhs).map(|(&bi, &ri)| bi * ri).sum();
        }
        self.events_since_refactor = 0;
        Ok(())
    }

    fn run(&mut self, observer: &mut Option<&mut dyn FnMut(IterEvent)>) -> Result<(), SolverError> {
        let cap = self
            .params
            .max_iterations
            .unwrap_or(50 * (self.m as u64 + self.n as u64));
        let nvars = self.n + self.m;

        loop {
            if self.events_since_refactor >= self.params.refactor_interval {
                self.refactor()?;
                if let Some(obs) = observer.as_mut() {
                    obs(IterEvent { iteration: self.iterations, objective: self.obj, kind: "refactor" });
                }
            }
            self.compute_duals();
            self.compute_reduced_costs();

            let mut heap = BinaryHeap::new();
            for var in 0..nvars {
                if self.eligible(var) {
                    let score =
                        if self.bland { -(var as f64) } else { self.d[var].abs() };
                    heap.push(Cand { score, var });
                }
            }
            if heap.is_empty() {
                // Optimal for the current (possibly drifted) factorization.
                // Refresh once and re-verify before declaring victory.
                if self.events_since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(());
            }

            while let Some(Cand { var: entering, .. }) = heap.pop() {
                if !self.eligible(entering) {
                    continue; // stale after an earlier flip
                }
                if self.iterations >= cap {
                    return Err(SolverError::IterationLimit { iterations: self.iterations });
                }
                let sigma = if self.status[entering] == VarState::AtLower { 1.0 } else { -1.0 };
                self.ftran(entering);

                // Ratio test: the entering variable moves by t in direction
                // sigma; basic values move by -sigma * t * u.
                let span = self.upper(entering);
                let mut t = span;
                let mut leave: Option<(usize, bool)> = None;
                let mut leave_var = usize::MAX;
                for r in 0..self.m {
                    let dir = sigma * self.scratch_u[r];
                    let (lim, to_upper) = if dir > self.params.pivot_tol {
                        (self.xb[r].max(0.0) / dir, false)
                    } else if dir < -self.params.pivot_tol {
                        let ub = self.upper(self.basis[r]);
                        if ub.is_infinite() {
                            continue;
                        }
                        ((ub - self.xb[r]).max(0.0) / (-dir), true)
                    } else {
                        continue;
                    };
                    if lim < t - 1e-12 * (1.0 + t.abs().min(1e12)) {
                        t = lim;
                        leave = Some((r, to_upper));
                        leave_var = self.basis[r];
                    } else if leave.is_some()
                        && lim <= t + 1e-12 * (1.0 + t)
                        && self.basis[r] < leave_var
                    {
                        t = t.min(lim);
                        leave = Some((r, to_upper));
                        leave_var = self.basis[r];
                    }
                }

                let gain = self.d[entering].abs();
                match leave {
                    None => {
                        if t.is_infinite() {
                            return Err(SolverError::Numerical {
                                message: String::from(
                                    "unbounded direction in a box-constrained packing LP",
                                ),
                            });
                        }
                        // Bound flip: basis, duals and reduced costs all stay
                        // valid; keep draining the same candidate heap.
                        for r in 0..self.m {
                            self.xb[r] -= sigma * t * self.scratch_u[r];
                        }
                        self.status[entering] = if sigma > 0.0 {
                            VarState::AtUpper
                        } else {
                            VarState::AtLower
                        };
                        self.obj += t * gain;
                        self.iterations += 1;
                        self.events_since_refactor += 1;
                        self.stall = 0;
                        self.bland = false;
                        if let Some(obs) = observer.as_mut() {
                            obs(IterEvent {
                                iteration: self.iterations,
                                objective: self.obj,
                                kind: "flip",
                            });
                        }
                    }
                    Some((r, to_upper)) => {
                        let entering_value = if sigma > 0.0 { t } else { span - t };
                        for r2 in 0..self.m {
                            self.xb[r2] -= sigma * t * self.scratch_u[r2];
                        }
                        let leaving = self.basis[r];
                        self.status[leaving] =
                            if to_upper { VarState::AtUpper } else { VarState::AtLower };
                        self.status[entering] = VarState::Basic(r as u32);
                        self.basis[r] = entering;
                        self.xb[r] = entering_value;

                        let m = self.m;
                        let piv = self.scratch_u[r];
                        // Eta update of the inverse: row r scales by 1/piv,
                        // every other row eliminates its u component.
                        self.scratch_row.copy_from_slice(&self.binv[r * m..(r + 1) * m]);
                        for r2 in 0..m {
                            let row = &mut self.binv[r2 * m..(r2 + 1) * m];
                            if r2 == r {
                                for (v, &p) in row.iter_mut().zip(&self.scratch_row) {
                                    *v = p / piv;
                                }
                            } else {
                                let f = self.scratch_u[r2] / piv;
                                if f != 0.0 {
                                    for (v, &p) in row.iter_mut().zip(&self.scratch_row) {
                                        *v -= f * p;
                                    }
                                }
                            }
                        }

                        self.obj += t * gain;
                        self.iterations += 1;
                        self.events_since_refactor += 1;
                        if self.is_degenerate_step(t, gain) {
                            self.stall += 1;
                            if self.stall >= self.params.stall_limit {
                                self.bland = true;
                            }
                        } else {
                            self.stall = 0;
                            self.bland = false;
                        }
                        if let Some(obs) = observer.as_mut() {
                            obs(IterEvent {
                                iteration: self.iterations,
                                objective: self.obj,
                                kind: "pivot",
                            });
                        }
                        break;
                    }
                }
            }
        }
    }

    fn into_outcome(self, watch: Stopwatch) -> SolverOutcome {
        let mut x = vec![0.0; self.n];
        for j in 0..self.n {
            x[j] = match self.status[j] {
                VarState::AtLower => 0.0,
                VarState::AtUpper => 1.0,
                VarState::Basic(r) => self.xb[r as usize].clamp(0.0, 1.0),
            };
        }
        let phi: Vec<f64> = self.y.iter().map(|&v| v.max(0.0)).collect();
        let psi: Vec<f64> = (0..self.n).map(|j| self.d[j].max(0.0)).collect();
        let primal = PrimalSolution::evaluated(self.lp, x).expect("dimensions fixed");
        SolverOutcome {
            primal,
            dual: DualSolution { phi, psi },
            iterations: self.iterations,
            wall_time: watch.elapsed(),
        }
    }
}
