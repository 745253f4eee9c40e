//! Acceleration toolkit for packing linear programs.
//!
//! A packing LP is
//!
//! ```text
//!    max  c'x
//!    s.t. Ax <= b,  0 <= x <= 1
//! ```
//!
//! with `A` in `[0,1]^{m x n}`, `b >= 0`, `c >= 0`, and typically far more
//! variables than constraints (`m << n`). Instead of solving the full
//! instance, the accelerator
//!
//! 1. samples `s = ceil(eps_s * n)` variables uniformly at random,
//! 2. solves the sample LP with its right-hand side scaled down to
//!    `(1 - eps_f) * eps_s / alpha_d * b`,
//! 3. reads the dual prices `phi` of the packing constraints, and
//! 4. sets every original variable by the allocation rule
//!    `x_j = 1  iff  sum_i a_ij * phi_i < c_j`.
//!
//! The output is always integral, so the same pipeline doubles as an ILP
//! heuristic. [`accel::accelerate`] wraps the pipeline in a search for the
//! smallest feasibility margin `eps_f` that yields a feasible point, falling
//! back to the all-zeros vector (always feasible for a packing LP) when the
//! schedule is exhausted.
//!
//! Two built-in solvers implement the black-box interface: an exact
//! bounded-variable revised simplex ([`solver::SimplexSolver`]) and an
//! experimental greedy dual-ascent scheme ([`solver::DualAscentSolver`]).
//! [`solver::check_slackness`] verifies approximate complementary slackness
//! of any primal/dual pair and measures the tight `(alpha_p, alpha_d)`
//! factors.
//!
//! The crate is `no_std`-compatible (with `alloc`); disabling the default
//! `std` feature turns all wall-clock readings into zeros but leaves every
//! algorithm intact. File formats, the CLI, benchmarking, and speculative
//! execution live in the companion `packlp-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod accel;
pub mod gen;
pub mod lp;
pub mod rng;
pub mod solver;

mod clock;
mod float;

pub use accel::{
    accelerate, accelerate_once, build_sample_lp, sample_variables, theoretical_ef, threshold,
    AccelError, AccelOutcome, AcceleratorConfig, SampleLp, TheoreticalEf,
};
pub use lp::{
    is_binary, relative_error, DualSolution, FeasibilityReport, LpError, PackingLp,
    PrimalSolution,
};
pub use solver::{
    check_slackness, perturb_costs, DualAscentSolver, SimplexSolver, SlacknessReport, Solver,
    SolverContract, SolverError, SolverOutcome,
};
