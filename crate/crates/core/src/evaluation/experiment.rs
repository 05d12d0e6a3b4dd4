//! Train/test experiments and parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{ar_residual_score, fit_ar, DEFAULT_MAX_ORDER};
use crate::detector::{detect, detect_baseline, train, DetectorConfig, Lag, ScoreSeries};
use crate::error::{Error, Result};
use crate::evaluation::auc;
use crate::series::TimeSeries;

/// Share of a series used for training when no explicit length is given.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.3;

/// A labelled series split into an anomaly-free training prefix and a test part.
#[derive(Debug, Clone)]
pub struct Dataset {
    series: TimeSeries,
    train_len: usize,
    test_len: usize,
}

impl Dataset {
    pub fn new(series: TimeSeries, train_len: usize, test_len: usize) -> Result<Self> {
        let labels = series
            .labels()
            .ok_or_else(|| Error::Evaluation(format!("series '{}' has no labels", series.name())))?;
        if train_len == 0 || test_len == 0 || train_len + test_len > series.len() {
            return Err(Error::Bounds(format!(
                "split ({train_len}, {test_len}) does not fit a series of length {}",
                series.len()
            )));
        }
        if let Some(i) = labels[..train_len].iter().position(|&l| l == 1) {
            return Err(Error::Evaluation(format!(
                "training prefix contains an anomalous sample at index {i}"
            )));
        }
        Ok(Self {
            series,
            train_len,
            test_len,
        })
    }

    /// Splits at `round(fraction·len)`; the rest is test data.
    pub fn with_fraction(series: TimeSeries, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::Parameter(format!("train fraction {fraction} outside (0, 1)")));
        }
        let n = series.len();
        let train_len = (fraction * n as f64).round() as usize;
        Self::new(series, train_len, n - train_len)
    }

    pub fn series(&self) -> &TimeSeries {
        &self.series
    }

    pub fn split(&self) -> (usize, usize) {
        (self.train_len, self.test_len)
    }

    pub fn train_part(&self) -> Result<TimeSeries> {
        self.series.slice(0, self.train_len)
    }

    pub fn test_part(&self) -> Result<TimeSeries> {
        self.series.slice(self.train_len, self.train_len + self.test_len)
    }
}

/// Scoring method under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    /// Difference-subspace change degree.
    DifferenceSubspace,
    /// Mean of `1 − cos θ` over the `k` smallest angles; `usize::MAX` uses all.
    SsaTheta(usize),
    /// Autoregressive one-step prediction error.
    Ar,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::DifferenceSubspace,
        Method::SsaTheta(1),
        Method::SsaTheta(5),
        Method::SsaTheta(usize::MAX),
        Method::Ar,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::DifferenceSubspace => f.write_str("ds"),
            Method::SsaTheta(usize::MAX) => f.write_str("ssaall"),
            Method::SsaTheta(k) => write!(f, "ssa{k}"),
            Method::Ar => f.write_str("ar"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ds" => Ok(Method::DifferenceSubspace),
            "ssaall" => Ok(Method::SsaTheta(usize::MAX)),
            "ar" => Ok(Method::Ar),
            _ => s
                .strip_prefix("ssa")
                .and_then(|k| k.parse().ok())
                .filter(|&k: &usize| k > 0)
                .map(Method::SsaTheta)
                .ok_or_else(|| Error::Parameter(format!("unknown method '{s}'"))),
        }
    }
}

/// Everything a single experiment run depends on besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentParams {
    pub detector: DetectorConfig,
    pub max_order: usize,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl ExperimentParams {
    /// Applies one `key = value` setting; `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        if key == "max_order" {
            self.max_order = value
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad value '{value}' for max_order")))?;
            return Ok(true);
        }
        self.detector.set(key, value)
    }
}

/// Pairs each score with the label at its time index (1-based) and computes AUC.
pub fn aligned_auc(scores: &ScoreSeries, labels: &[u8]) -> Result<f64> {
    let mut s = Vec::with_capacity(scores.len());
    let mut l = Vec::with_capacity(scores.len());
    for p in &scores.points {
        let label = p
            .time_index
            .checked_sub(1)
            .and_then(|i| labels.get(i))
            .ok_or_else(|| Error::Evaluation(format!("time index {} has no label", p.time_index)))?;
        s.push(p.degree);
        l.push(*label);
    }
    auc(&s, &l)
}

/// Fits on the training prefix (where the method needs it), scores the test
/// part and computes AUC over the scored indices.
pub fn run_experiment(dataset: &Dataset, method: Method, params: &ExperimentParams) -> Result<(ScoreSeries, f64)> {
    let test = dataset.test_part()?;
    let scores = match method {
        Method::DifferenceSubspace => {
            let model = train(&dataset.train_part()?, &params.detector)?;
            detect(&test, &model)?
        }
        Method::SsaTheta(k) => detect_baseline(&test, &params.detector, k)?,
        Method::Ar => {
            let model = fit_ar(&dataset.train_part()?, params.max_order)?;
            ar_residual_score(&model, &test)?
        }
    };
    let labels = test.labels().expect("dataset series carry labels");
    let value = aligned_auc(&scores, labels)?;
    Ok((scores, value))
}

/// Cartesian product of parameter values, keyed like the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid {
    axes: Vec<(String, Vec<String>)>,
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds (or replaces) an axis. Later axes vary fastest.
    pub fn axis<T: ToString>(mut self, key: &str, values: impl IntoIterator<Item = T>) -> Self {
        let values: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
        self.axes.retain(|(k, _)| k != key);
        self.axes.push((key.to_string(), values));
        self
    }

    pub fn axes(&self) -> &[(String, Vec<String>)] {
        &self.axes
    }

    /// Every cell, applied on top of `base`, in row-major axis order.
    pub fn cells(&self, base: &ExperimentParams) -> Result<Vec<ExperimentParams>> {
        let mut cells = vec![base.clone()];
        for (key, values) in &self.axes {
            if values.is_empty() {
                return Err(Error::Parameter(format!("grid axis '{key}' has no values")));
            }
            let mut next = Vec::with_capacity(cells.len() * values.len());
            for cell in &cells {
                for v in values {
                    let mut c = cell.clone();
                    // tau and ov_rate are alternative spellings of one axis
                    if !c.set(key, v)? {
                        return Err(Error::Parameter(format!("unknown grid key '{key}'")));
                    }
                    next.push(c);
                }
            }
            cells = next;
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub method: Method,
    pub params: ExperimentParams,
    /// AUC, or the failure message of this cell.
    pub auc: std::result::Result<f64, String>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Highest-AUC row per method (first row wins ties).
    pub best_per_method: BTreeMap<Method, (ExperimentParams, f64)>,
}

/// Runs every `(method, cell)` combination. Cells run in parallel; rows are
/// reported in method-major, grid order. Failed cells are recorded, not fatal.
pub fn sweep(dataset: &Dataset, methods: &[Method], grid: &Grid, base: &ExperimentParams) -> Result<SweepReport> {
    if methods.is_empty() {
        return Err(Error::Parameter("no methods to sweep".into()));
    }
    let cells = grid.cells(base)?;
    let jobs: Vec<(Method, ExperimentParams)> = methods
        .iter()
        .flat_map(|&m| cells.iter().map(move |c| (m, c.clone())))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .into_par_iter()
        .map(|(method, params)| {
            let start = Instant::now();
            let auc = run_experiment(dataset, method, &params)
                .map(|(_, a)| a)
                .map_err(|e| e.to_string());
            SweepRow {
                method,
                params,
                auc,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let mut best_per_method: BTreeMap<Method, (ExperimentParams, f64)> = BTreeMap::new();
    for row in &rows {
        if let Ok(a) = row.auc {
            let better = best_per_method.get(&row.method).is_none_or(|(_, b)| a > *b);
            if better {
                best_per_method.insert(row.method, (row.params.clone(), a));
            }
        }
    }
    Ok(SweepReport { rows, best_per_method })
}

/// AUC per signal-subspace dimension for each method, everything else fixed.
pub fn dimension_sweep(
    dataset: &Dataset,
    methods: &[Method],
    base: &ExperimentParams,
    dims: &[usize],
) -> Result<SweepReport> {
    sweep(dataset, methods, &Grid::new().axis("sig_dims", dims), base)
}

pub const REPORT_HEADER: &str = "method,w,M,tau,ov_rate,r,nor_dims,c,delta_floor,auc,seconds";

/// One delimiter-separated line per row, preceded by [`REPORT_HEADER`].
pub fn write_report(report: &SweepReport) -> Result<String> {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&report_line(row)?);
        out.push('\n');
    }
    Ok(out)
}

fn report_line(row: &SweepRow) -> Result<String> {
    let d = &row.params.detector;
    let ov_rate = match d.lag {
        Lag::Overlap(o) => o.to_string(),
        Lag::Tau(_) => String::new(),
    };
    let tau = d.tau().map(|t| t.to_string()).unwrap_or_default();
    let auc = match &row.auc {
        Ok(a) => format!("{a:.6}"),
        Err(_) => "failed".to_string(),
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{},{:e},{},{:.3}",
        row.method,
        d.window_width,
        d.window_count,
        tau,
        ov_rate,
        d.signal_rank,
        d.reference_dims,
        d.angle_count,
        d.delta_floor,
        auc,
        row.seconds
    ))
}
