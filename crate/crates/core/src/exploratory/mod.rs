//! Summary statistics, functional depths and outlier detection.

pub mod depth;
pub mod outliers;
pub mod summary;

pub use depth::{
    band_counts, band_depth, depth, fraiman_muniz_depth, mean_epigraph_index, modified_band_depth,
    modified_band_depth_from_counts, DepthMethod, DepthReport,
};
pub use outliers::{
    boxplot_stats, msplot_cutoff, msplot_stats, outliergram_parabola, outliergram_stats,
    parabola_polyline, quantile, BoxplotStats, Ellipse, Envelope, MsplotStats, OutliergramStats, ProbEnvelope,
};
pub use summary::{
    depth_based_median, depth_order, geometric_median, sample_covariance, sample_mean,
    sample_variance, trimmed_mean, GeometricMedian,
};
