//! Plain-text serialization of [`TrainedModel`].
//!
//! ```text
//! # dsad trained model v1
//! [config]
//! w = 64
//! ...
//! [summary]
//! reference_magnitude = -1.2345678901234567e0
//! threshold = ...
//! training_window_count = 812
//! [reference_ds]
//! rows = 64
//! cols = 8
//! <rows × cols values, one matrix row per line, space separated>
//! [reference_spectrum]
//! <cols values, one per line>
//! [training_degrees]
//! <one value per line>
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every f64.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::{DetectorConfig, TrainedModel};
use crate::error::{Error, Result};
use crate::ssa::{Span, Subspace};

const MAGIC: &str = "# dsad trained model v1";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_model(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "[config]");
    for (k, v) in model.config.to_pairs() {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "[summary]");
    let _ = writeln!(out, "reference_magnitude = {}", real(model.reference_magnitude));
    let _ = writeln!(out, "threshold = {}", real(model.threshold));
    let _ = writeln!(out, "training_window_count = {}", model.training_window_count);
    let basis = model.reference_ds.basis();
    let _ = writeln!(out, "[reference_ds]");
    let _ = writeln!(out, "rows = {}", basis.nrows());
    let _ = writeln!(out, "cols = {}", basis.ncols());
    for row in basis.row_iter() {
        let line: Vec<String> = row.iter().map(|&x| real(x)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    let _ = writeln!(out, "[reference_spectrum]");
    for &x in model.reference_ds.spectrum() {
        let _ = writeln!(out, "{}", real(x));
    }
    let _ = writeln!(out, "[training_degrees]");
    for &x in &model.training_degrees {
        let _ = writeln!(out, "{}", real(x));
    }
    out
}

struct Section<'a> {
    header_line: usize,
    lines: Vec<(usize, &'a str)>,
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a real number, found '{tok}'")))?;
    if !x.is_finite() {
        return Err(Error::parse(line, format!("non-finite value '{tok}'")));
    }
    Ok(x)
}

fn key_value(line: usize, text: &str) -> Result<(&str, &str)> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found '{text}'")))?;
    Ok((k.trim(), v.trim()))
}

fn lookup<'a>(section: &Section<'a>, key: &str) -> Result<(usize, &'a str)> {
    for &(line, text) in &section.lines {
        if let Ok((k, v)) = key_value(line, text) {
            if k == key {
                return Ok((line, v));
            }
        }
    }
    Err(Error::parse(section.header_line, format!("missing key '{key}'")))
}

pub fn read_model(text: &str) -> Result<TrainedModel> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, first)) if first == MAGIC => {}
        Some((line, _)) => return Err(Error::parse(line, "not a trained model file")),
        None => return Err(Error::parse(1, "empty model file")),
    }
    let mut sections: HashMap<&str, Section> = HashMap::new();
    let mut current: Option<&str> = None;
    for (line, l) in lines {
        if l.starts_with('#') {
            continue;
        }
        if let Some(name) = l.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if sections.contains_key(name) {
                return Err(Error::parse(line, format!("duplicate section [{name}]")));
            }
            sections.insert(
                name,
                Section {
                    header_line: line,
                    lines: Vec::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let name = current.ok_or_else(|| Error::parse(line, "content before the first section"))?;
        sections.get_mut(name).expect("inserted").lines.push((line, l));
    }
    let section = |name: &str| {
        sections
            .get(name)
            .ok_or_else(|| Error::parse(1, format!("missing section [{name}]")))
    };

    let mut config = DetectorConfig::default();
    for &(line, l) in &section("config")?.lines {
        let (k, v) = key_value(line, l)?;
        let known = config.set(k, v).map_err(|e| Error::parse(line, e.to_string()))?;
        if !known {
            return Err(Error::parse(line, format!("unknown config key '{k}'")));
        }
    }
    config.validate()?;

    let summary = section("summary")?;
    let (l, v) = lookup(summary, "reference_magnitude")?;
    let reference_magnitude = parse_real(l, v)?;
    let (l, v) = lookup(summary, "threshold")?;
    let threshold = parse_real(l, v)?;
    let (l, v) = lookup(summary, "training_window_count")?;
    let training_window_count = v
        .parse()
        .map_err(|_| Error::parse(l, format!("bad count '{v}'")))?;

    let ds = section("reference_ds")?;
    let (l, v) = lookup(ds, "rows")?;
    let rows: usize = v.parse().map_err(|_| Error::parse(l, format!("bad rows '{v}'")))?;
    let (l, v) = lookup(ds, "cols")?;
    let cols: usize = v.parse().map_err(|_| Error::parse(l, format!("bad cols '{v}'")))?;
    let data: Vec<(usize, &str)> = ds.lines.iter().filter(|(_, t)| !t.contains('=')).copied().collect();
    if data.len() != rows {
        return Err(Error::parse(
            ds.header_line,
            format!("expected {rows} matrix rows, found {}", data.len()),
        ));
    }
    let mut values = Vec::with_capacity(rows * cols);
    for (line, text) in data {
        let row: Vec<f64> = text
            .split_whitespace()
            .map(|t| parse_real(line, t))
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(Error::parse(line, format!("expected {cols} values, found {}", row.len())));
        }
        values.extend(row);
    }
    let basis = DMatrix::from_row_slice(rows, cols, &values);

    let column = |name: &str| -> Result<Vec<f64>> {
        section(name)?
            .lines
            .iter()
            .map(|&(line, t)| parse_real(line, t))
            .collect()
    };
    let spectrum = column("reference_spectrum")?;
    let training_degrees = column("training_degrees")?;
    let reference_ds = Subspace::new(basis, spectrum)?;

    Ok(TrainedModel {
        reference_ds,
        reference_magnitude,
        threshold,
        training_degrees,
        config,
        training_window_count,
    })
}
