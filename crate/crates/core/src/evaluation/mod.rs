//! AUC, experiment and sweep runners, and MDS export of subspace trajectories.

mod auc;
mod experiment;
mod mds;

pub use auc::auc;
pub use experiment::{
    aligned_auc, dimension_sweep, run_experiment, sweep, write_report, Dataset, ExperimentParams, Grid,
    Method, SweepReport, SweepRow, DEFAULT_TRAIN_FRACTION, REPORT_HEADER,
};
pub use mds::{double_center, mds_embed, pairwise_subspace_distances, Embedding, SubspaceMetric};

use nalgebra::DMatrix;

use crate::detector::{map_window_pairs, DetectorConfig};
use crate::error::{Error, Result};
use crate::geometry::difference_subspace;
use crate::series::TimeSeries;
use crate::ssa::Span;

/// An embedded subspace with its class and position.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedPoint {
    pub coords: [f64; 3],
    pub anomalous: bool,
    pub time_index: usize,
}

#[derive(Debug, Clone)]
pub struct EmbeddingExport {
    pub points: Vec<EmbeddedPoint>,
    pub stress: f64,
    /// Coordinates left at zero for lack of positive eigenvalues.
    pub missing_dims: usize,
}

/// Subspaces collected along a series for visualization.
#[derive(Debug, Clone)]
pub struct TrajectoryItems {
    pub bases: Vec<DMatrix<f64>>,
    pub time_indices: Vec<usize>,
}

/// Present signal subspaces (for the minimum-angle metric) or non-empty
/// difference subspaces (for the dissimilarity metric) at every position.
pub fn subspace_trajectory(series: &TimeSeries, config: &DetectorConfig, metric: SubspaceMetric) -> Result<TrajectoryItems> {
    let t_c = config.center_offset()?;
    let items = map_window_pairs(series, config, |past, present| {
        Ok(match metric {
            SubspaceMetric::MinAngle => present.basis().clone(),
            SubspaceMetric::Dissimilarity(_) => difference_subspace(past, present, config.delta_floor)?
                .basis()
                .clone(),
        })
    })?;
    let (time_indices, bases) = items
        .into_iter()
        .filter(|(_, b)| b.ncols() > 0)
        .map(|(t, b)| (t - t_c, b))
        .unzip();
    Ok(TrajectoryItems { bases, time_indices })
}

/// Embeds the subspaces along `series` into three dimensions.
pub fn embed_trajectory(series: &TimeSeries, config: &DetectorConfig, metric: SubspaceMetric) -> Result<EmbeddingExport> {
    let labels = series
        .labels()
        .ok_or_else(|| Error::Evaluation("embedding export needs labels".into()))?;
    let items = subspace_trajectory(series, config, metric)?;
    let distances = pairwise_subspace_distances(&items.bases, metric)?;
    let embedding = mds_embed(&distances, 3)?;
    let points = items
        .time_indices
        .iter()
        .enumerate()
        .map(|(i, &t)| EmbeddedPoint {
            coords: [
                embedding.coordinates[(i, 0)],
                embedding.coordinates[(i, 1)],
                embedding.coordinates[(i, 2)],
            ],
            anomalous: labels[t - 1] == 1,
            time_index: t,
        })
        .collect();
    Ok(EmbeddingExport {
        points,
        stress: embedding.stress,
        missing_dims: embedding.missing_dims,
    })
}

/// Rows `x,y,z,label,time_index` under a header line.
pub fn write_embedding(export: &EmbeddingExport) -> String {
    let mut out = String::from("x,y,z,label,time_index\n");
    for p in &export.points {
        let label = if p.anomalous { "anomalous" } else { "normal" };
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{label},{}\n",
            p.coords[0], p.coords[1], p.coords[2], p.time_index
        ));
    }
    out
}
