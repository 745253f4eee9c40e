//! The black-box solver interface plus two built-in implementations and a
//! complementary-slackness verifier.
//!
//! The accelerator only asks a solver for one thing: a primal/dual pair for
//! a packing LP, with the packing-row prices `phi` exposed explicitly, since
//! the thresholding rule consumes nothing else. Solvers that cannot produce
//! dual prices are out of contract.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::lp::{DualSolution, PackingLp, PrimalSolution};
use crate::rng::SplitMix64;

mod dual_ascent;
mod simplex;

pub use dual_ascent::{dual_ascent_solve, dual_ascent_solve_with, DualAscentParams};
pub use simplex::{simplex_solve, simplex_solve_with, IterEvent, SimplexParams};

/// Declared approximate-complementary-slackness contract of a solver.
///
/// `alpha_d: None` means the dual factor is not certified and must be
/// measured at runtime (see [`check_slackness`]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverContract {
    pub alpha_p: f64,
    pub alpha_d: Option<f64>,
}

/// A solved primal/dual pair with bookkeeping.
///
/// `wall_time` is measured by the solver itself with a monotonic clock and
/// reads zero in `no_std` builds.
#[derive(Clone, Debug)]
pub struct SolverOutcome {
    pub primal: PrimalSolution,
    pub dual: DualSolution,
    pub iterations: u64,
    pub wall_time: Duration,
}

/// Solver failure modes. The accelerator treats any of these as a failed
/// attempt (or a failed clone) rather than a panic.
#[derive(Clone, Debug, PartialEq)]
pub enum SolverError {
    IterationLimit { iterations: u64 },
    Numerical { message: String },
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::IterationLimit { iterations } => {
                write!(f, "iteration cap reached after {iterations} iterations")
            }
            SolverError::Numerical { message } => write!(f, "numerical failure: {message}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolverError {}

/// The black-box LP solver abstraction.
///
/// Implementations must be safe for concurrent independent calls; all
/// built-in solvers are stateless apart from their parameters.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    /// The `(alpha_p, alpha_d)` contract this solver promises.
    fn contract(&self) -> SolverContract;

    fn solve(&self, lp: &PackingLp) -> Result<SolverOutcome, SolverError>;
}

/// Exact bounded-variable revised simplex; contract `(1, 1)`.
#[derive(Clone, Debug, Default)]
pub struct SimplexSolver {
    pub params: SimplexParams,
}

impl SimplexSolver {
    pub fn with_tolerance(tol: f64) -> Self {
        SimplexSolver { params: SimplexParams { tol, ..SimplexParams::default() } }
    }
}

impl Solver for SimplexSolver {
    fn name(&self) -> &'static str {
        "simplex"
    }

    fn contract(&self) -> SolverContract {
        SolverContract { alpha_p: 1.0, alpha_d: Some(1.0) }
    }

    fn solve(&self, lp: &PackingLp) -> Result<SolverOutcome, SolverError> {
        simplex_solve_with(lp, &self.params, None)
    }
}

/// Greedy water-filling dual ascent; contract `(1, measured)`. Experimental:
/// its dual factor is observed per run, never certified.
#[derive(Clone, Debug, Default)]
pub struct DualAscentSolver {
    pub params: DualAscentParams,
}

impl Solver for DualAscentSolver {
    fn name(&self) -> &'static str {
        "dual-ascent"
    }

    fn contract(&self) -> SolverContract {
        SolverContract { alpha_p: 1.0, alpha_d: None }
    }

    fn solve(&self, lp: &PackingLp) -> Result<SolverOutcome, SolverError> {
        dual_ascent_solve_with(lp, &self.params)
    }
}

/// Looks a solver up by its configuration name: `"simplex"` or
/// `"dual-ascent"`, with default parameters.
pub fn solver_by_name(name: &str) -> Option<Box<dyn Solver>> {
    match name {
        "simplex" => Some(Box::new(SimplexSolver::default())),
        "dual-ascent" => Some(Box::new(DualAscentSolver::default())),
        _ => None,
    }
}

/// One violated slackness condition.
#[derive(Clone, Debug, PartialEq)]
pub enum SlacknessViolation {
    /// `x_j > tol` but `sum_i a_ij y_i` falls outside `[c_j, alpha_p * c_j]`.
    Primal { var: usize },
    /// `phi_i > tol` but `(Ax)_i` falls outside `[b_i / alpha_d, b_i]`.
    DualRow { row: usize },
    /// `psi_j > tol` but `x_j` falls outside `[1 / alpha_d, 1]`.
    DualBound { var: usize },
}

/// Outcome of [`check_slackness`]. All failure modes are fields, not errors.
#[derive(Clone, Debug)]
pub struct SlacknessReport {
    /// Primal condition holds at the given `alpha_p` for every active `x_j`.
    pub primal_ok: bool,
    /// Dual condition holds at the given `alpha_d` for every active price.
    pub dual_ok: bool,
    /// `x` satisfies the primal constraints (checked before the conditions).
    pub primal_feasible: bool,
    /// `y` satisfies dual feasibility `sum_i a_ij phi_i + psi_j >= c_j - tol`.
    pub dual_feasible: bool,
    /// Tightest factor that would satisfy the primal condition, `>= 1`,
    /// infinite when no finite factor works.
    pub measured_alpha_p: f64,
    /// Tightest factor for the dual condition, `>= 1`.
    pub measured_alpha_d: f64,
    pub violating_indices: Vec<SlacknessViolation>,
}

/// Verifies the approximate complementary slackness conditions for a
/// primal/dual pair on `lp`, treating the dual vector as `[phi, psi]` over
/// the packing rows and the `x_j <= 1` box rows:
///
/// - primal: `x_j > tol` implies `c_j <= sum_i a_ij phi_i + psi_j <= alpha_p * c_j`;
/// - dual (rows): `phi_i > tol` implies `b_i / alpha_d <= (Ax)_i <= b_i`;
/// - dual (bounds): `psi_j > tol` implies `1 / alpha_d <= x_j <= 1`.
///
/// Activity is judged against the same `tol` used for the inequalities.
pub fn check_slackness(
    lp: &PackingLp,
    x: &[f64],
    dual: &DualSolution,
    alpha_p: f64,
    alpha_d: f64,
    tol: f64,
) -> SlacknessReport {
    let (m, n) = (lp.m(), lp.n());
    assert_eq!(x.len(), n, "primal length");
    assert_eq!(dual.phi.len(), m, "phi length");
    assert_eq!(dual.psi.len(), n, "psi length");

    let loads = lp.loads(x).expect("length checked above");
    let primal_feasible = lp.check_feasible(x, tol).expect("length checked above").feasible
        && dual.phi.iter().all(|&v| v >= -tol)
        && dual.psi.iter().all(|&v| v >= -tol);

    let mut report = SlacknessReport {
        primal_ok: true,
        dual_ok: true,
        primal_feasible,
        dual_feasible: true,
        measured_alpha_p: 1.0,
        measured_alpha_d: 1.0,
        violating_indices: Vec::new(),
    };

    for j in 0..n {
        let v = lp.col_dot(j, &dual.phi) + dual.psi[j];
        let cj = lp.c()[j];
        if v < cj - tol {
            report.dual_feasible = false;
        }
        if x[j] > tol {
            let mut ok = v >= cj - tol;
            if cj > tol {
                let ratio = v / cj;
                report.measured_alpha_p = report.measured_alpha_p.max(ratio);
                ok &= v <= alpha_p * cj + tol;
            } else if v > tol {
                // c_j ~ 0 forces the dual row value to ~0 as well.
                report.measured_alpha_p = f64::INFINITY;
                ok = false;
            }
            if !ok {
                report.primal_ok = false;
                report.violating_indices.push(SlacknessViolation::Primal { var: j });
            }
        }
    }

    for i in 0..m {
        if dual.phi[i] > tol {
            let bi = lp.b()[i];
            let mut ok = loads[i] <= bi + tol;
            if loads[i] > tol {
                report.measured_alpha_d = report.measured_alpha_d.max(bi / loads[i]);
            } else if bi > tol {
                report.measured_alpha_d = f64::INFINITY;
            }
            ok &= loads[i] >= bi / alpha_d - tol;
            if !ok {
                report.dual_ok = false;
                report.violating_indices.push(SlacknessViolation::DualRow { row: i });
            }
        }
    }

    for j in 0..n {
        if dual.psi[j] > tol {
            let mut ok = x[j] <= 1.0 + tol;
            if x[j] > tol {
                report.measured_alpha_d = report.measured_alpha_d.max(1.0 / x[j]);
            } else {
                report.measured_alpha_d = f64::INFINITY;
            }
            ok &= x[j] >= 1.0 / alpha_d - tol;
            if !ok {
                report.dual_ok = false;
                report.violating_indices.push(SlacknessViolation::DualBound { var: j });
            }
        }
    }

    report
}

/// Multiplicative cost perturbation `c_j <- c_j * (1 + u_j)` with `u_j`
/// uniform in `[0, 1e-9)`, seeded. Breaks exact ties between a column's
/// cost and its priced value, so thresholded and solved values can only
/// disagree on basic columns.
pub fn perturb_costs(lp: &PackingLp, seed: u64) -> PackingLp {
    const SCALE: f64 = 1e-9;
    let mut rng = SplitMix64::new(seed);
    let c: Vec<f64> = lp.c().iter().map(|&cj| cj * (1.0 + SCALE * rng.next_f64())).collect();
    lp.with_costs(c).expect("perturbed costs stay finite and nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tiny_lp() -> PackingLp {
        // max 2x0 + x1  s.t.  x0 + 0.5 x1 <= 1
        PackingLp::from_entries(1, 2, &[(0, 0, 1.0), (0, 1, 0.5)], vec![1.0], vec![2.0, 1.0])
            .unwrap()
    }

    #[test]
    fn vacuous_conditions_hold() {
        let lp = PackingLp::from_entries(1, 2, &[(0, 0, 0.5)], vec![1.0], vec![0.0, 0.0])
            .unwrap();
        let dual = DualSolution { phi: vec![0.0], psi: vec![0.0, 0.0] };
        let report = check_slackness(&lp, &[0.0, 0.0], &dual, 1.0, 1.0, 1e-9);
        assert!(report.primal_ok && report.dual_ok);
        assert!(report.primal_feasible && report.dual_feasible);
        assert_eq!(report.measured_alpha_p, 1.0);
        assert_eq!(report.measured_alpha_d, 1.0);
        assert!(report.violating_indices.is_empty());
    }

    #[test]
    fn constructed_primal_violation_is_reported() {
        // x1 = 1 active but the priced value is only half its cost.
        let lp = tiny_lp();
        let dual = DualSolution { phi: vec![1.0], psi: vec![1.0, 0.0] };
        // Column 1: a = 0.5, priced value 0.5 + psi 0 = 0.5 = 0.5 * c_1.
        let report = check_slackness(&lp, &[0.0, 1.0], &dual, 1.0, 1.0, 1e-9);
        assert!(!report.primal_ok);
        assert!(report
            .violating_indices
            .contains(&SlacknessViolation::Primal { var: 1 }));
        assert!(!report.dual_feasible);
    }

    #[test]
    fn measured_alpha_p_is_tight() {
        // Active column priced at 1.5x its cost.
        let lp = tiny_lp();
        let dual = DualSolution { phi: vec![3.0], psi: vec![0.0, 0.0] };
        // Column 0: value 3.0 vs c 2.0 -> ratio 1.5.
        let report = check_slackness(&lp, &[1.0, 0.0], &dual, 2.0, f64::INFINITY, 1e-9);
        assert!((report.measured_alpha_p - 1.5).abs() < 1e-12);
        assert!(report.primal_ok);
    }

    #[test]
    fn perturbation_is_small_and_deterministic() {
        let lp = tiny_lp();
        let p1 = perturb_costs(&lp, 7);
        let p2 = perturb_costs(&lp, 7);
        assert_eq!(p1, p2);
        for (orig, pert) in lp.c().iter().zip(p1.c()) {
            assert!(pert >= orig);
            assert!(pert <= &(orig * (1.0 + 1e-9)));
        }
        assert_ne!(perturb_costs(&lp, 8).c(), p1.c());
    }

    #[test]
    fn solver_lookup() {
        assert_eq!(solver_by_name("simplex").unwrap().name(), "simplex");
        assert_eq!(solver_by_name("dual-ascent").unwrap().name(), "dual-ascent");
        assert!(solver_by_name("gurobi").is_none());
    }
}
