//! Finite-difference solvers for linear fractional ODEs with Caputo
//! derivatives.
//!
//! The initial-point singularity of the solution is removed by subtracting a
//! fractional Taylor polynomial built from Miller-Ross values; the smooth
//! remainder is then integrated with the L1, A2 or A4 kernel.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod problems;
pub mod render;
pub mod solvers;
pub mod specfun;
pub mod tables;

pub use analysis::{max_error, observed_order, run_study, ConvergenceReport, ReportRow, StudyProblem, StudySpec};
pub use error::{Error, Result};
pub use kernels::{apply_kernel, coeffs, KernelCoefficients, Scheme};
pub use problems::{
    exact_regularized, exact_three_term, exact_two_term, regularize_three_term, regularize_two_term,
    RegularizedProblem, ThreeTermProblem, TwoTermProblem,
};
pub use solvers::{recover_solution, solve_ns1, solve_ns2, solve_ns3, GridSolution, SolverConfig, SolverKind};
