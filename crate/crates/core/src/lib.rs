//! Reductions from SUBSET-SUM, 3-SAT and equality-form integer linear
//! programs to systems of linear equations over binary variables whose
//! coefficients and constants all lie in {-1, 0, 1}.
//!
//! Every reduction comes with a lifting function that maps a satisfying
//! assignment back to a witness for the source instance, and the
//! [`solver`] and [`oracle`] modules decide both sides independently so the
//! reductions can be checked end to end.

pub mod dimacs;
pub mod error;
pub mod expansion;
pub mod format;
pub mod ilp;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod subset_sum;
pub mod threesat;

pub use error::{Error, Result};
pub use model::{
    check_system, evaluate_equation, Assignment, IlpInstance, IlpRow, Literal, Sign,
    SubsetSumInstance, Term, ThreeSatInstance, UnitEquation, UnitSystem, VarId, VarProvenance,
    VariableRegistry, WeightedEquation,
};
pub use solver::{solve_unit_system, SolveLimits, SolveResult};
