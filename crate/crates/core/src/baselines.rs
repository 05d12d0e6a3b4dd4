//! Autoregressive prediction baseline: Yule-Walker fits with AIC order
//! selection, scored by squared one-step prediction error.

use crate::detector::{ScorePoint, ScoreSeries};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_MAX_ORDER: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    /// `a_1..a_p` in `ĥ(t) = mean + Σ aᵢ·(h(t−i) − mean)`.
    pub coefficients: Vec<f64>,
    pub noise_variance: f64,
    pub aic: f64,
    /// Sample mean removed before fitting.
    pub mean: f64,
    /// AIC for every order `0..=max_order`.
    pub aic_curve: Vec<f64>,
}

impl ArModel {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }
}

/// Biased (`1/n`) sample autocovariances of a mean-removed sequence for lags `0..=max_lag`.
pub fn autocovariance(centered: &[f64], max_lag: usize) -> Vec<f64> {
    let n = centered.len();
    (0..=max_lag)
        .map(|k| {
            if k >= n {
                return 0.0;
            }
            centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Residual `‖R·a − r‖ / ‖r‖` of the Yule-Walker normal equations, `R` the
/// Toeplitz autocovariance matrix of order `a.len()`.
pub fn yule_walker_residual(autocov: &[f64], coefficients: &[f64]) -> f64 {
    let p = coefficients.len();
    if p == 0 {
        return 0.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..p {
        let lhs: f64 = (0..p)
            .map(|j| autocov[i.abs_diff(j)] * coefficients[j])
            .sum();
        let rhs = autocov[i + 1];
        num += (lhs - rhs).powi(2);
        den += rhs * rhs;
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Fits AR models of every order up to `max_order` by Levinson-Durbin and
/// returns the one minimizing `AIC = n·ln σ̂² + 2p` (ties go to the smaller order).
pub fn fit_ar(series: &TimeSeries, max_order: usize) -> Result<ArModel> {
    let x = series.samples();
    let n = x.len();
    if n <= 2 * max_order {
        return Err(Error::Bounds(format!(
            "length > 2·max_order violated (length = {n}, max_order = {max_order})"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let r = autocovariance(&centered, max_order);
    let scale = (mean * mean).max(f64::MIN_POSITIVE);
    if !(r[0] > 1e-14 * scale) {
        return Err(Error::Conditioning {
            order: 0,
            reason: "zero sample variance".into(),
        });
    }

    let nf = n as f64;
    let mut coeffs: Vec<f64> = Vec::new();
    let mut err = r[0];
    let mut best = (nf * err.ln(), Vec::new(), err);
    let mut aic_curve = vec![best.0];
    for p in 1..=max_order {
        let acc: f64 = (1..p).map(|i| coeffs[i - 1] * r[p - i]).sum();
        let k = (r[p] - acc) / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::Conditioning {
                order: p,
                reason: format!("reflection coefficient {k} outside (−1, 1)"),
            });
        }
        let prev = coeffs.clone();
        for i in 1..p {
            coeffs[i - 1] = prev[i - 1] - k * prev[p - i - 1];
        }
        coeffs.push(k);
        err *= 1.0 - k * k;
        if !(err > 0.0) {
            return Err(Error::Conditioning {
                order: p,
                reason: "non-positive prediction error variance".into(),
            });
        }
        let aic = nf * err.ln() + 2.0 * p as f64;
        aic_curve.push(aic);
        if aic < best.0 {
            best = (aic, coeffs.clone(), err);
        }
    }
    let (aic, coefficients, noise_variance) = best;
    Ok(ArModel {
        coefficients,
        noise_variance,
        aic,
        mean,
        aic_curve,
    })
}

/// Squared one-step prediction error at every 1-based index `t > order`.
pub fn ar_residual_score(model: &ArModel, series: &TimeSeries) -> Result<ScoreSeries> {
    let p = model.order();
    let h = series.samples();
    if h.len() <= p {
        return Err(Error::Bounds(format!(
            "length > order violated (length = {}, order = {p})",
            h.len()
        )));
    }
    let points = (p..h.len())
        .map(|i| {
            let predicted = model.mean
                + model
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * (h[i - j - 1] - model.mean))
                    .sum::<f64>();
            ScorePoint {
                time_index: i + 1,
                degree: (h[i] - predicted).powi(2),
                flag: None,
            }
        })
        .collect();
    Ok(ScoreSeries { points })
}
