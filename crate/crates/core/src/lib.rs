//! Functional data analysis toolkit.
//!
//! Curves are held either as values on a shared grid ([`GridSample`]) or as
//! coefficients over a finite basis ([`BasisSample`]). On top of these the
//! crate provides linear smoothers with cross-validated parameter search,
//! shift and elastic registration, functional PCA, variable selection,
//! functional depths and outlier detection, synthetic data generators and
//! CSV/JSON serialization.

// `!(x > 0.0)` style checks reject NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dimred;
pub mod error;
pub mod exploratory;
pub mod io;
pub mod linalg;
pub mod registration;
pub mod repr;
pub mod simulate;
pub mod smoothing;

pub use error::{ErrorClass, FdaError, Result};
pub use repr::{
    BasisKind, BasisSample, BasisSpec, Extrapolation, FunctionalData, Grid, GridSample,
    Interpolation, LinearDifferentialOperator, SampleNames,
};
