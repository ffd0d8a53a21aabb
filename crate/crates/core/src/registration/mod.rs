//! Shift, landmark and elastic registration of curves.

pub mod elastic;
pub mod landmark;
pub mod shift;
pub mod srvf;
pub mod warping;

pub use elastic::{elastic_register, mean_pairwise_distance, ElasticOptions, ElasticRegistration};
pub use landmark::{landmark_elastic_register, MonotoneCubic};
pub use shift::{
    landmark_shift_deltas, landmark_shift_register, least_squares_shift_register, shift,
    LeastSquaresShiftOptions, ShiftRegistration,
};
pub use srvf::{alignment_cost, dp_align, dp_align_values, srvf_inverse, srvf_transform};
pub use warping::{apply_warping, Shifts, Warping, MIN_WARP_SLOPE};
