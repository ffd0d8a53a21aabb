//! Functional PCA, feature extraction and variable selection.

pub mod dcor;
pub mod features;
pub mod fpca;
pub mod selection;

pub use dcor::{distance_correlation, distance_correlation_labels, distance_correlation_vectors};
pub use features::{coefficient_features, evaluation_features};
pub use fpca::{fpca_fit, fpca_inverse, fpca_perturbation, fpca_transform, FpcaModel};
pub use selection::{
    maxima_hunting, mrmr_select, recursive_maxima_hunting, rkhs_variable_selection, rmh_residuals, RkhsCovariance,
    SelectionResult, DEFAULT_MH_WINDOW, DEFAULT_RMH_THRESHOLD,
};
