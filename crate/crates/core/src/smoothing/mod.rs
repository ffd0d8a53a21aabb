//! Linear smoothers, roughness-penalized basis fitting and validation of the
//! smoothing parameter.

mod basis_fit;
mod hat;
mod kernel;
mod validation;

pub use basis_fit::{
    basis_smoother_matrix, grid_operator_matrix, grid_penalty_matrix, penalized_basis_fit,
    penalty_matrix,
};
pub use hat::{hat_matrix, smooth, smooth_onto, HatMatrix, SmootherSpec};
pub use kernel::Kernel;
pub use validation::{
    gcv_score, loo_cv_score, parameter_search, penalized_mean_squared_residual, PenaltyFunction,
    ScoreEntry, Scorer, SearchResult,
};
