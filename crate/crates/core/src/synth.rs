//! Seeded synthetic series built from concatenated generator segments.
//!
//! Each segment restarts its own sample counter `n = 0, 1, ...`:
//!
//! * `sine`:  `amp·sin(2π·freq·n + phase)`, plus `N(0, σ²)` when `sigma > 0`
//! * `ar2`:   `h(n) = a1·h(n−1) + a2·h(n−2) + N(0, σ²)`, zero initial state
//! * `noise`: `N(0, σ²)`
//!
//! Labels are 1 within `label_half_width` samples (inclusive) of every
//! segment boundary, where a boundary is the 0-based index of a segment's
//! first sample.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Sine { freq: f64, amp: f64, phase: f64, sigma: f64 },
    Ar2 { a1: f64, a2: f64, sigma: f64 },
    Noise { sigma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub generator: Generator,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub segments: Vec<Segment>,
    pub seed: u64,
    pub label_half_width: usize,
}

impl SyntheticSpec {
    /// 0-based indices where a new segment starts.
    pub fn boundaries(&self) -> Vec<usize> {
        self.segments
            .iter()
            .scan(0usize, |acc, s| {
                let start = *acc;
                *acc += s.length;
                Some(start)
            })
            .skip(1)
            .collect()
    }

    /// Parses the line-oriented spec format:
    ///
    /// ```text
    /// seed = 7
    /// label_half_width = 128
    /// segment = ar2 a1=1.5 a2=-0.9 sigma=1 length=1800
    /// segment = sine freq=0.0625 amp=5 phase=0 length=300
    /// segment = noise sigma=0.5 length=100
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SyntheticSpec {
            segments: Vec::new(),
            seed: 0,
            label_half_width: 0,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (key, value) = l
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found '{l}'")))?;
            let value = value.trim();
            match key.trim() {
                "seed" => {
                    spec.seed = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad seed '{value}'")))?
                }
                "label_half_width" => {
                    spec.label_half_width = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad half-width '{value}'")))?
                }
                "segment" => spec.segments.push(parse_segment(line, value)?),
                other => return Err(Error::parse(line, format!("unknown key '{other}'"))),
            }
        }
        Ok(spec)
    }
}

fn parse_segment(line: usize, text: &str) -> Result<Segment> {
    let mut tokens = text.split_whitespace();
    let kind = tokens
        .next()
        .ok_or_else(|| Error::parse(line, "empty segment"))?;
    let mut fields = std::collections::HashMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected name=value, found '{tok}'")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Error::parse(line, format!("bad number '{v}' for {k}")))?;
        fields.insert(k, v);
    }
    let mut get = |name: &str, default: Option<f64>| {
        fields
            .remove(name)
            .or(default)
            .ok_or_else(|| Error::parse(line, format!("{kind} segment needs '{name}'")))
    };
    let length = get("length", None)?;
    if length < 0.0 || length.fract() != 0.0 {
        return Err(Error::parse(line, format!("length {length} is not a count")));
    }
    let generator = match kind {
        "sine" => Generator::Sine {
            freq: get("freq", None)?,
            amp: get("amp", Some(1.0))?,
            phase: get("phase", Some(0.0))?,
            sigma: get("sigma", Some(0.0))?,
        },
        "ar2" => Generator::Ar2 {
            a1: get("a1", None)?,
            a2: get("a2", None)?,
            sigma: get("sigma", Some(1.0))?,
        },
        "noise" => Generator::Noise {
            sigma: get("sigma", Some(1.0))?,
        },
        other => return Err(Error::parse(line, format!("unknown generator '{other}'"))),
    };
    if let Some(extra) = fields.keys().next() {
        return Err(Error::parse(line, format!("unexpected field '{extra}'")));
    }
    Ok(Segment {
        generator,
        length: length as usize,
    })
}

/// Stationarity triangle for `h(n) = a1·h(n−1) + a2·h(n−2) + e(n)`.
fn ar2_is_stable(a1: f64, a2: f64) -> bool {
    a2.abs() < 1.0 && a1 + a2 < 1.0 && a2 - a1 < 1.0
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TimeSeries> {
    let total: usize = spec.segments.iter().map(|s| s.length).sum();
    if total == 0 {
        return Err(Error::Parameter("synthetic spec produces no samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = Vec::with_capacity(total);
    for seg in &spec.segments {
        match seg.generator {
            Generator::Sine { freq, amp, phase, sigma } => {
                let tau = 2.0 * std::f64::consts::PI;
                let clean = (0..seg.length).map(|n| amp * (tau * freq * n as f64 + phase).sin());
                if sigma > 0.0 {
                    let normal = gaussian(sigma)?;
                    samples.extend(clean.map(|x| x + normal.sample(&mut rng)));
                } else {
                    samples.extend(clean);
                }
            }
            Generator::Ar2 { a1, a2, sigma } => {
                if !ar2_is_stable(a1, a2) {
                    return Err(Error::Parameter(format!(
                        "AR(2) coefficients a1 = {a1}, a2 = {a2} are not stationary"
                    )));
                }
                let normal = gaussian(sigma)?;
                let (mut h1, mut h2) = (0.0, 0.0);
                for _ in 0..seg.length {
                    let h = a1 * h1 + a2 * h2 + normal.sample(&mut rng);
                    samples.push(h);
                    h2 = h1;
                    h1 = h;
                }
            }
            Generator::Noise { sigma } => {
                let normal = gaussian(sigma)?;
                samples.extend((0..seg.length).map(|_| normal.sample(&mut rng)));
            }
        }
    }
    let mut labels = vec![0u8; total];
    let hw = spec.label_half_width;
    for b in spec.boundaries() {
        let lo = b.saturating_sub(hw);
        let hi = (b + hw).min(total - 1);
        labels[lo..=hi].iter_mut().for_each(|l| *l = 1);
    }
    TimeSeries::with_labels("synthetic", samples, labels)
}

fn gaussian(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|_| Error::Parameter(format!("bad noise sigma {sigma}")))
}
