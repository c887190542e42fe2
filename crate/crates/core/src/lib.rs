//! Solver for combinatorial n-fold integer programs.
//!
//! A combinatorial n-fold program minimizes a separable convex objective over
//! the integer points of a box subject to `n` copies of a small matrix `D`
//! summed across bricks (the global rows) and one all-ones row per brick (the
//! local rows). The solver repeatedly applies the best step found by a
//! dynamic program over a layered graph; see [`solver::solve`].
//!
//! The [`encoders`] module reduces closest-string type problems, weighted set
//! multicover, swap bribery and high-multiplicity programs to this form.

pub mod augment;
pub mod encoders;
pub mod error;
pub mod format;
pub mod instance;
pub mod objective;
pub mod oracle;
pub mod solver;
pub mod transform;

pub use augment::{dp_layer_size_bound, find_best_step, DpLimits, DpStep};
pub use encoders::{decode, solve_encoded, solve_schedule, Answer, Caps, Decoder};
pub use error::{NFoldError, Result};
pub use format::{instance_to_json, parse_instance, ReportDoc};
pub use instance::{evaluate_objective, is_feasible, validate_instance, Bimatrix, CombNFoldInstance, ValidationResult};
pub use oracle::{brute_force_solve, graver_brute_force, graver_of_ones};
pub use objective::{PiecewiseLinear, SeparableObjective, Term, UnivariateConvex};
pub use solver::{
    find_initial_feasible, graver_best_step, graver_complexity_bound, optimize, solve, AlphaStrategy, Mode,
    SolveReport, SolveStatus, SolverConfig, StepPair, TraceEntry,
};
pub use transform::{
    equalize, equalize_global, equalize_local, lift_pre_nfold, solve_relational, tighten_box, PreNFoldInstance,
    RelationalInstance, Relation, RelaxationOracle, VariableMap,
};
