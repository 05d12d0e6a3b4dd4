use crate::error::{Error, Result};

/// A univariate series with optional per-sample anomaly labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    name: String,
    samples: Vec<f64>,
    labels: Option<Vec<u8>>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        Self::build(name.into(), samples, None)
    }

    pub fn with_labels(name: impl Into<String>, samples: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        Self::build(name.into(), samples, Some(labels))
    }

    fn build(name: String, samples: Vec<f64>, labels: Option<Vec<u8>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Degenerate(format!("series '{name}' has no samples")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::Degenerate(format!(
                "series '{name}' has a non-finite sample at index {i}"
            )));
        }
        if let Some(labels) = &labels {
            if labels.len() != samples.len() {
                return Err(Error::Shape(format!(
                    "series '{name}': {} labels for {} samples",
                    labels.len(),
                    samples.len()
                )));
            }
            if let Some(i) = labels.iter().position(|&l| l > 1) {
                return Err(Error::Parameter(format!(
                    "series '{name}': label at index {i} is not 0 or 1"
                )));
            }
        }
        Ok(Self {
            name,
            samples,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sub-series over the half-open sample range `start..end`, labels included.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::Bounds(format!(
                "slice {start}..{end} outside series of length {}",
                self.len()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            samples: self.samples[start..end].to_vec(),
            labels: self.labels.as_ref().map(|l| l[start..end].to_vec()),
        })
    }

    /// Multiplies every sample by `factor`, keeping labels.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::build(
            self.name.clone(),
            self.samples.iter().map(|x| x * factor).collect(),
            self.labels.clone(),
        )
    }
}
