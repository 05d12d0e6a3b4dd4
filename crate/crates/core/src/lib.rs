//! Change detection in univariate time series from the difference subspace
//! between past and present SSA signal subspaces.
//!
//! The pipeline: [`ssa`] turns sliding segments into signal subspaces,
//! [`geometry`] measures how two subspaces differ (canonical angles,
//! difference subspace, direction and magnitude indices), [`detector`]
//! learns a reference from normal data and scores new data, and
//! [`evaluation`] computes AUC, parameter sweeps and MDS exports.
//! [`baselines`] holds the autoregressive comparison method.

pub mod baselines;
pub mod detector;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod series;
pub mod ssa;
pub mod synth;

pub use detector::{
    change_degree, detect, detect_baseline, ssa_theta_score, tau_from_overlap, train, window_pair,
    DetectorConfig, Lag, ScorePoint, ScoreSeries, TrainedModel,
};
pub use error::{Error, ErrorKind, Result};
pub use geometry::{
    canonical_angles, difference_subspace, difference_subspace_analytic, magnitude,
    principal_component_subspace, subspace_dissimilarity, CanonicalAngleSet, DifferenceSubspace,
};
pub use series::TimeSeries;
pub use ssa::{build_trajectory_matrix, choose_rank, signal_subspace, RankRule, Span, Subspace, TrajectoryMatrix};
