//! Text formats: series files and flat `key = value` configuration.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::{ExperimentParams, Grid};
use crate::series::TimeSeries;

/// Column selection for [`load_series`]. Columns are 0-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub value_column: usize,
    /// Explicit label column. Without one, a second column holding only 0/1
    /// is taken as labels when the values are in column 0.
    pub label_column: Option<usize>,
    /// Leading lines to ignore (header rows).
    pub skip_rows: usize,
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

fn parse_sample(line: usize, tok: &str) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("non-numeric value '{tok}'")))?;
    if !x.is_finite() {
        return Err(Error::parse(line, format!("non-finite value '{tok}'")));
    }
    Ok(x)
}

fn parse_label(tok: &str) -> Option<u8> {
    match tok.parse::<f64>() {
        Ok(x) if x == 0.0 => Some(0),
        Ok(x) if x == 1.0 => Some(1),
        _ => None,
    }
}

/// Parses series text: one sample per line, or delimited rows (`,` `;` tab or
/// spaces) with a column selector. Blank lines and `#` comments are skipped.
pub fn parse_series(name: &str, text: &str, opts: &LoadOptions) -> Result<TimeSeries> {
    let mut samples = Vec::new();
    let mut label_tokens: Vec<(usize, Option<String>)> = Vec::new();
    let mut all_two_columns = true;
    for (i, raw) in text.lines().enumerate().skip(opts.skip_rows) {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let f = fields(l);
        let tok = f.get(opts.value_column).ok_or_else(|| {
            Error::parse(line, format!("missing column {}", opts.value_column))
        })?;
        samples.push(parse_sample(line, tok)?);
        all_two_columns &= f.len() == 2;
        let label_col = opts.label_column.unwrap_or(1);
        label_tokens.push((line, f.get(label_col).map(|s| s.to_string())));
    }
    if samples.is_empty() {
        return Err(Error::parse(0, "no samples found"));
    }

    let labels = if let Some(col) = opts.label_column {
        let mut labels = Vec::with_capacity(samples.len());
        for (line, tok) in &label_tokens {
            let tok = tok
                .as_deref()
                .ok_or_else(|| Error::parse(*line, format!("missing label column {col}")))?;
            labels.push(
                parse_label(tok)
                    .ok_or_else(|| Error::parse(*line, format!("label '{tok}' is not 0 or 1")))?,
            );
        }
        Some(labels)
    } else if opts.value_column == 0 && all_two_columns {
        label_tokens
            .iter()
            .map(|(_, tok)| tok.as_deref().and_then(parse_label))
            .collect::<Option<Vec<u8>>>()
    } else {
        None
    };
    match labels {
        Some(l) => TimeSeries::with_labels(name, samples, l),
        None => TimeSeries::new(name, samples),
    }
}

pub fn load_series(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_series(&name, &text, opts)
}

/// One sample per line at 17 significant digits, `,label` appended when labelled.
pub fn write_series(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(series.len() * 26);
    for (i, x) in series.samples().iter().enumerate() {
        out.push_str(&format!("{x:.16e}"));
        if let Some(labels) = series.labels() {
            out.push_str(&format!(",{}", labels[i]));
        }
        out.push('\n');
    }
    out
}

/// `(line, key, value)` triples from flat `key = value` text; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found '{l}'")))?;
        out.push((line, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Detector parameters plus how to split data for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ExperimentParams,
    /// Explicit training length; otherwise `train_fraction` of the series.
    pub train_len: Option<usize>,
    pub train_fraction: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ExperimentParams::default(),
            train_len: None,
            train_fraction: crate::evaluation::DEFAULT_TRAIN_FRACTION,
        }
    }
}

impl RunConfig {
    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<bool> {
        let wrap = |e: Error| Error::parse(line, e.to_string());
        match key {
            "train_len" => {
                self.train_len = Some(
                    value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad train_len '{value}'")))?,
                )
            }
            "train_fraction" => {
                self.train_fraction = value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad train_fraction '{value}'")))?
            }
            _ => return self.params.set(key, value).map_err(wrap),
        }
        Ok(true)
    }

    /// Parses a config file. Unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (line, k, v) in parse_key_values(text)? {
            if !cfg.set(line, &k, &v)? {
                return Err(Error::parse(line, format!("unknown key '{k}'")));
            }
        }
        Ok(cfg)
    }

    /// Parses a grid file: same keys as a config file, where any detector key
    /// may list comma-separated values to sweep.
    pub fn parse_grid(text: &str) -> Result<(Self, Grid)> {
        let mut cfg = RunConfig::default();
        let mut grid = Grid::new();
        for (line, k, v) in parse_key_values(text)? {
            let values: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if values.len() > 1 {
                // validate each value against a scratch copy
                for value in &values {
                    if !cfg.clone().set(line, &k, value)? {
                        return Err(Error::parse(line, format!("unknown key '{k}'")));
                    }
                }
                if matches!(k.as_str(), "train_len" | "train_fraction") {
                    return Err(Error::parse(line, format!("'{k}' cannot be swept")));
                }
                grid = grid.axis(&k, values);
            } else if !cfg.set(line, &k, &v)? {
                return Err(Error::parse(line, format!("unknown key '{k}'")));
            }
        }
        Ok((cfg, grid))
    }
}
