//! Functional samples in discretized (grid) and basis-expansion form.

pub mod basis;
pub mod bspline;
pub mod grid;
pub mod operator;
pub mod sample;

pub use basis::{BasisKind, BasisSpec};
pub use grid::Grid;
pub use operator::LinearDifferentialOperator;
pub use sample::{
    inner_product_l2, linear_combine, norm_l2, BasisSample, Extrapolation, FunctionalData,
    GridSample, Interpolation, SampleNames,
};
