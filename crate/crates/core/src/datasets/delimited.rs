use std::path::Path;

use super::{Features, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelimitedOptions {
    pub delimiter: u8,
    /// Column holding the class label; every other column is a feature.
    pub label_column: Option<usize>,
    pub has_header: bool,
    /// z-score every feature column.
    pub standardize: bool,
}

impl Default for DelimitedOptions {
    fn default() -> Self {
        Self { delimiter: b',', label_column: None, has_header: false, standardize: false }
    }
}

pub fn load_delimited<T: Real>(path: &Path, opts: &DelimitedOptions) -> Result<LabeledDataset<T>> {
    let text = std::fs::read_to_string(path)?;
    let mut data = parse_delimited(&text, opts)?;
    data.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(data)
}

/// Parses delimited numeric rows. Lines starting with `#` and blank lines
/// are skipped; rows containing `?` are dropped and counted.
pub fn parse_delimited<T: Real>(text: &str, opts: &DelimitedOptions) -> Result<LabeledDataset<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.has_header)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut points: Vec<Vec<T>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    let mut arity = None;
    let mut dropped = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse { line: csv_line(&e), message: e.to_string() })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let width = *arity.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        if let Some(col) = opts.label_column {
            if col >= width {
                return Err(Error::Parse { line, message: format!("label column {col} out of range for {width} fields") });
            }
        }
        if record.iter().any(|f| f == "?") {
            dropped += 1;
            continue;
        }
        let mut row = Vec::with_capacity(width);
        for (c, field) in record.iter().enumerate() {
            if Some(c) == opts.label_column {
                raw_labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {c}: `{field}` is not a number"),
            })?;
            row.push(T::lit(v));
        }
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: if dropped > 0 { "every row has missing values".into() } else { "no data rows".into() },
        });
    }
    if opts.standardize {
        standardize(&mut points);
    }
    let (gold_labels, label_names) = match opts.label_column {
        Some(_) => {
            let mut names: Vec<String> = Vec::new();
            let ids = raw_labels
                .iter()
                .map(|l| match names.iter().position(|n| n == l) {
                    Some(i) => i,
                    None => {
                        names.push(l.clone());
                        names.len() - 1
                    }
                })
                .collect();
            (Some(ids), names)
        }
        None => (None, Vec::new()),
    };
    Ok(LabeledDataset {
        name: "delimited".into(),
        features: Features::Vectors(points),
        gold_labels,
        label_names,
        true_centers: None,
        dropped_rows: dropped,
    })
}

fn csv_line(e: &csv::Error) -> usize {
    e.position().map_or(0, |p| p.line() as usize)
}

fn standardize<T: Real>(points: &mut [Vec<T>]) {
    let n = T::from_count(points.len());
    for c in 0..points[0].len() {
        let mean = points.iter().map(|p| p[c]).sum::<T>() / n;
        let var = points.iter().map(|p| (p[c] - mean) * (p[c] - mean)).sum::<T>() / n;
        let sd = var.sqrt();
        for p in points.iter_mut() {
            p[c] -= mean;
            if sd > T::zero() {
                p[c] /= sd;
            }
        }
    }
}
