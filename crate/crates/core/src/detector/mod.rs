//! Training and detection pipelines for the difference-subspace detector and
//! the minimum-angle SSA baselines.
//!
//! A detection position `t` (1-based) pairs the signal subspace of the
//! trajectory matrix ending at `t` (present) with the one ending at `t − τ`
//! (past). Its score is reported at `time_index = t − t_c`, the centre of the
//! covered interval.

mod config;
mod model_file;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    canonical_angles, difference_subspace, log_cosine_sum, mean_complement,
    principal_component_subspace, subspace_dissimilarity, DifferenceSubspace,
};
use crate::series::TimeSeries;
use crate::ssa::{signal_subspace_at, Span, Subspace};

pub use config::{tau_from_overlap, DetectorConfig, Lag};
pub use model_file::{read_model, write_model};

/// Positions evaluated per parallel batch; bounds the subspace cache size.
const BATCH: usize = 256;

/// One scored position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorePoint {
    /// 1-based sample index `t − t_c` the score is attributed to.
    pub time_index: usize,
    pub degree: f64,
    /// `degree > threshold`; absent for methods without a threshold.
    pub flag: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreSeries {
    pub points: Vec<ScorePoint>,
}

impl ScoreSeries {
    pub fn degrees(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.degree).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean_degree(&self) -> f64 {
        mean(&self.degrees())
    }
}

/// Reference state learned from anomaly-free data.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Principal component subspace of the training difference subspaces.
    pub reference_ds: Subspace,
    /// Mean magnitude index over the training positions.
    pub reference_magnitude: f64,
    /// Mean of `training_degrees`.
    pub threshold: f64,
    pub training_degrees: Vec<f64>,
    pub config: DetectorConfig,
    pub training_window_count: usize,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Past and present signal subspaces at position `t`.
pub fn window_pair(
    series: &TimeSeries,
    t: usize,
    config: &DetectorConfig,
) -> Result<(Subspace, Subspace)> {
    config.validate()?;
    let tau = config.tau()?;
    let first = config.first_position()?;
    if t < first || t > series.len() {
        return Err(Error::Bounds(format!(
            "position t = {t} outside {first}..={} (w + M + tau − 1 ≤ t ≤ length)",
            series.len()
        )));
    }
    let sub = |end| {
        signal_subspace_at(
            series,
            end,
            config.window_width,
            config.window_count,
            config.signal_rank,
        )
    };
    Ok((sub(t - tau)?, sub(t)?))
}

/// Mean of `1 − cos θᵢ` over the `k` smallest canonical angles.
/// `k = 1` is the classic minimum-angle score `1 − cos θ₁`.
pub fn ssa_theta_score(past: &impl Span, present: &impl Span, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Parameter("k must be ≥ 1".into()));
    }
    let angles = canonical_angles(past, present)?;
    Ok(mean_complement(&angles.cosines, k))
}

/// Evaluates `f(past, present)` at every detection position, in time order.
pub(crate) fn map_window_pairs<T, F>(series: &TimeSeries, config: &DetectorConfig, f: F) -> Result<Vec<(usize, T)>>
where
    T: Send,
    F: Fn(&Subspace, &Subspace) -> Result<T> + Sync,
{
    let positions = config.positions(series.len())?;
    let tau = config.tau()?;
    let mut out = Vec::with_capacity(positions.len());
    for batch in positions.chunks(BATCH) {
        let mut ends: Vec<usize> = batch.iter().flat_map(|&t| [t - tau, t]).collect();
        ends.sort_unstable();
        ends.dedup();
        let subspaces: Vec<Subspace> = ends
            .par_iter()
            .map(|&end| {
                signal_subspace_at(
                    series,
                    end,
                    config.window_width,
                    config.window_count,
                    config.signal_rank,
                )
            })
            .collect::<Result<_>>()?;
        let cache: HashMap<usize, &Subspace> = ends.iter().copied().zip(subspaces.iter()).collect();
        let results: Vec<T> = batch
            .par_iter()
            .map(|&t| f(cache[&(t - tau)], cache[&t]))
            .collect::<Result<_>>()?;
        out.extend(batch.iter().copied().zip(results));
    }
    Ok(out)
}

/// Difference subspace and magnitude index of one window pair.
fn pair_features(past: &Subspace, present: &Subspace, delta_floor: f64) -> Result<(DifferenceSubspace, f64)> {
    let ds = difference_subspace(past, present, delta_floor)?;
    let angles = canonical_angles(past, present)?;
    Ok((ds, log_cosine_sum(&angles.cosines)))
}

/// Learns the reference difference subspace, reference magnitude and
/// threshold from an anomaly-free series.
///
/// The threshold is the mean change degree over the same positions used to
/// build the reference.
pub fn train(series: &TimeSeries, config: &DetectorConfig) -> Result<TrainedModel> {
    let features = map_window_pairs(series, config, |past, present| {
        pair_features(past, present, config.delta_floor)
    })?;
    let (ds_list, magnitudes): (Vec<DifferenceSubspace>, Vec<f64>) =
        features.into_iter().map(|(_, f)| f).unzip();
    if ds_list.iter().all(|d| d.is_empty()) {
        return Err(Error::DegenerateTraining(format!(
            "all {} training difference subspaces are empty; the signal repeats exactly at lag tau",
            ds_list.len()
        )));
    }
    let reference_ds = principal_component_subspace(&ds_list, config.reference_dims)?;
    let reference_magnitude = mean(&magnitudes);
    let mut model = TrainedModel {
        reference_ds,
        reference_magnitude,
        threshold: 0.0,
        training_degrees: Vec::new(),
        config: config.clone(),
        training_window_count: ds_list.len(),
    };
    let degrees = ds_list
        .iter()
        .zip(&magnitudes)
        .map(|(d, &mu)| change_degree(d, mu, &model))
        .collect::<Result<Vec<_>>>()?;
    model.threshold = mean(&degrees);
    model.training_degrees = degrees;
    Ok(model)
}

/// Change degree `β·δ`: squared deviation of the magnitude index from the
/// reference times the direction dissimilarity from the reference subspace.
/// An empty input subspace has direction dissimilarity zero.
pub fn change_degree(input: &DifferenceSubspace, magnitude: f64, model: &TrainedModel) -> Result<f64> {
    let beta = (magnitude - model.reference_magnitude).powi(2);
    let direction = if input.is_empty() {
        0.0
    } else {
        subspace_dissimilarity(input, &model.reference_ds, model.config.angle_count)?
    };
    Ok(beta * direction)
}

/// Scores every position of `series` against a trained model.
pub fn detect(series: &TimeSeries, model: &TrainedModel) -> Result<ScoreSeries> {
    let config = &model.config;
    let t_c = config.center_offset()?;
    let scored = map_window_pairs(series, config, |past, present| {
        let (ds, mu) = pair_features(past, present, config.delta_floor)?;
        change_degree(&ds, mu, model)
    })?;
    Ok(ScoreSeries {
        points: scored
            .into_iter()
            .map(|(t, degree)| ScorePoint {
                time_index: t - t_c,
                degree,
                flag: Some(degree > model.threshold),
            })
            .collect(),
    })
}

/// Minimum-angle SSA scores with `k` angles; no training, no flags.
pub fn detect_baseline(series: &TimeSeries, config: &DetectorConfig, k: usize) -> Result<ScoreSeries> {
    if k == 0 {
        return Err(Error::Parameter("k must be ≥ 1".into()));
    }
    let t_c = config.center_offset()?;
    let scored = map_window_pairs(series, config, |past, present| ssa_theta_score(past, present, k))?;
    Ok(ScoreSeries {
        points: scored
            .into_iter()
            .map(|(t, degree)| ScorePoint {
                time_index: t - t_c,
                degree,
                flag: None,
            })
            .collect(),
    })
}
