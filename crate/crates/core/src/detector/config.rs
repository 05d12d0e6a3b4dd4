use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_DELTA_FLOOR;
use crate::ssa::RankRule;

/// Lag between the past and present segments, given directly or as an overlap rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lag {
    Tau(usize),
    Overlap(f64),
}

/// Window geometry and the fixed minor parameters of the detector.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    /// `w`: rows of each trajectory matrix (samples per window).
    pub window_width: usize,
    /// `M`: number of sliding windows (columns).
    pub window_count: usize,
    pub lag: Lag,
    /// `sig_dims`: rank of the past and present signal subspaces.
    pub signal_rank: RankRule,
    /// `δ`: eigenvalue floor for difference-subspace directions.
    pub delta_floor: f64,
    /// `nor_dims`: dimension cap of the reference difference subspace.
    pub reference_dims: usize,
    /// `c`: canonical angles averaged by the direction index.
    pub angle_count: usize,
    /// Samples between successive detection positions.
    pub stride: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window_width: 64,
            window_count: 64,
            lag: Lag::Overlap(0.5),
            signal_rank: RankRule::Fixed(30),
            delta_floor: DEFAULT_DELTA_FLOOR,
            reference_dims: 90,
            angle_count: 5,
            stride: 1,
        }
    }
}

/// Lag for an overlap rate: `max(1, round((1 − ov_rate)·(w + M − 1)))`.
pub fn tau_from_overlap(width: usize, window_count: usize, ov_rate: f64) -> Result<usize> {
    if !(ov_rate > 0.0 && ov_rate < 1.0) {
        return Err(Error::Parameter(format!("ov_rate {ov_rate} outside (0, 1)")));
    }
    let span = (width + window_count - 1) as f64;
    Ok((((1.0 - ov_rate) * span).round() as usize).max(1))
}

impl DetectorConfig {
    /// Resolved lag in samples.
    pub fn tau(&self) -> Result<usize> {
        match self.lag {
            Lag::Tau(t) => Ok(t),
            Lag::Overlap(ov) => tau_from_overlap(self.window_width, self.window_count, ov),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, m) = (self.window_width, self.window_count);
        if w < 2 || m < 2 {
            return Err(Error::Parameter(format!("w and M must be ≥ 2 (w = {w}, M = {m})")));
        }
        let tau = self.tau()?;
        if tau < 1 || tau >= w + m - 1 {
            return Err(Error::Parameter(format!(
                "1 ≤ tau < w + M − 1 violated (tau = {tau}, w + M − 1 = {})",
                w + m - 1
            )));
        }
        if let RankRule::Fixed(r) = self.signal_rank {
            if r == 0 || r > w.min(m) {
                return Err(Error::Parameter(format!(
                    "sig_dims {r} outside 1..=min(w, M) = {}",
                    w.min(m)
                )));
            }
        }
        if !(self.delta_floor > 0.0 && self.delta_floor < 1.0) {
            return Err(Error::Parameter(format!(
                "delta_floor {} outside (0, 1)",
                self.delta_floor
            )));
        }
        if self.reference_dims == 0 {
            return Err(Error::Parameter("nor_dims must be ≥ 1".into()));
        }
        if self.angle_count == 0 {
            return Err(Error::Parameter("c must be ≥ 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::Parameter("stride must be ≥ 1".into()));
        }
        Ok(())
    }

    /// `t_c = round((w + M + τ)/2)`, rounding halves up.
    pub fn center_offset(&self) -> Result<usize> {
        Ok((self.window_width + self.window_count + self.tau()? + 1) / 2)
    }

    /// Earliest 1-based position whose past segment is fully in range.
    pub fn first_position(&self) -> Result<usize> {
        Ok(self.window_width + self.window_count + self.tau()? - 1)
    }

    /// Detection positions (1-based) for a series of `len` samples.
    pub fn positions(&self, len: usize) -> Result<Vec<usize>> {
        self.validate()?;
        let first = self.first_position()?;
        if len < first {
            return Err(Error::Bounds(format!(
                "series of length {len} shorter than one window pair (w + M + tau − 1 = {first})"
            )));
        }
        Ok((first..=len).step_by(self.stride).collect())
    }

    /// Applies one `key = value` setting. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        let bad = |what: &str| Error::Parameter(format!("bad value '{value}' for {what}"));
        let value = value.trim();
        match key {
            "w" => self.window_width = value.parse().map_err(|_| bad("w"))?,
            "M" | "m" => self.window_count = value.parse().map_err(|_| bad("M"))?,
            "tau" => self.lag = Lag::Tau(value.parse().map_err(|_| bad("tau"))?),
            "ov_rate" => self.lag = Lag::Overlap(value.parse().map_err(|_| bad("ov_rate"))?),
            "sig_dims" => self.signal_rank = value.parse()?,
            "delta_floor" => self.delta_floor = value.parse().map_err(|_| bad("delta_floor"))?,
            "nor_dims" => self.reference_dims = value.parse().map_err(|_| bad("nor_dims"))?,
            "c" => self.angle_count = value.parse().map_err(|_| bad("c"))?,
            "stride" => self.stride = value.parse().map_err(|_| bad("stride"))?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// `key = value` pairs understood by [`DetectorConfig::set`].
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let lag = match self.lag {
            Lag::Tau(t) => ("tau", t.to_string()),
            Lag::Overlap(o) => ("ov_rate", o.to_string()),
        };
        vec![
            ("w", self.window_width.to_string()),
            ("M", self.window_count.to_string()),
            lag,
            ("sig_dims", self.signal_rank.to_string()),
            ("delta_floor", format!("{:e}", self.delta_floor)),
            ("nor_dims", self.reference_dims.to_string()),
            ("c", self.angle_count.to_string()),
            ("stride", self.stride.to_string()),
        ]
    }
}

impl fmt::Display for DetectorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}
