//! Std companion to `packlp-core`: instance and solution file formats,
//! speculative execution (clones), the benchmark harness, and everything
//! else that needs a filesystem, threads, or a wall clock.

pub mod bench;
pub mod cloning;
pub mod io;

pub use bench::{emit_csv, read_csv, run_experiment, ExperimentPlan, Method, PlanCell, RunReport};
pub use cloning::{run_clones, CloneConfig, CloneResult, ClonesOutcome, Straggler};
pub use io::{
    read_duals, read_instance, read_solution, write_instance, write_solution, IoError,
};
