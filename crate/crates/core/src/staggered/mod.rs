//! Staggered modules: data, invariants and existence.

pub mod existence;
pub mod invariants;
pub mod module;
pub mod problem;

pub use existence::{
    critical_constraints, exists, generic_beta_bar, generic_row, oracle_answer, oracle_singular,
    rohsiepe_exists, same_region, varpi, AffineConstraint, GenericRow, StaggeredAnswer,
    GENERIC_ROWS,
};
pub use invariants::{
    admissible_subspace, beta_from_decomposition, beta_invariants, data_from_beta, gauge_apply,
    is_admissible_right_verma, moduli_dimension, naive_beta, project_data, projection_operator,
    psi_kernel, BetaValue, DataSpace, ProjectionStep,
};
pub use module::{Data, StagVec, StaggeredModule};
pub use problem::{CaseTag, StaggeredProblem};
