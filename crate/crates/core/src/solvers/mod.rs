//! Linear programming and sparse recovery solvers.

pub mod bp;
pub mod l0;
pub mod simplex;

pub use bp::{
    lp_feasibility, lp_feasibility_with, solve_bp, solve_bp_with, support_of, BpOptions, BpResult,
    DualSolution, FeasibilityStatus, FeasibilityVerdict, SolveStatus, SolverKind, SparseSolution,
    DEFAULT_FEAS_TOL, DEFAULT_SUPPORT_THRESHOLD, DUALITY_TOL,
};
pub use l0::{solve_l0, solve_l0_with_budget, L0Report, DEFAULT_L0_BUDGET, DEFAULT_RES_TOL};
pub use simplex::{solve_standard_form, LpSolution, LpStatus, SimplexOptions};
