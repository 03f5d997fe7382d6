//! Clustering quality metrics and run statistics.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use pathfinding::prelude::{kuhn_munkres, Matrix};

use crate::error::{Error, Result};
use crate::kernels::sq_euclidean;
use crate::scalar::Real;

/// How gold classes are matched to predicted clusters for F1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Matching {
    /// Each class takes its best-F1 cluster; a cluster may serve several classes.
    #[default]
    BestMatch,
    /// One-to-one assignment maximizing total F1; unmatched classes score 0.
    Hungarian,
}

impl FromStr for Matching {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" | "best-match" => Ok(Matching::BestMatch),
            "hungarian" => Ok(Matching::Hungarian),
            _ => Err(Error::InvalidArgument(format!("unknown matching `{s}` (expected best or hungarian)"))),
        }
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Matching::BestMatch => "best",
            Matching::Hungarian => "hungarian",
        })
    }
}

/// Maps arbitrary ids to dense ids by first appearance.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (dense, map.len())
}

/// F1 of every (class, cluster) pair, indexed `[class][cluster]`.
pub fn f1_table(predicted: &[usize], gold: &[usize]) -> Result<Vec<Vec<f64>>> {
    if predicted.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            what: "predicted vs gold labels".into(),
            expected: gold.len(),
            found: predicted.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::InvalidArgument("cannot score an empty labelling".into()));
    }
    let (pred, n_clusters) = densify(predicted);
    let (gold, n_classes) = densify(gold);
    let mut overlap = vec![vec![0usize; n_clusters]; n_classes];
    let mut class_size = vec![0usize; n_classes];
    let mut cluster_size = vec![0usize; n_clusters];
    for (&p, &g) in pred.iter().zip(&gold) {
        overlap[g][p] += 1;
        class_size[g] += 1;
        cluster_size[p] += 1;
    }
    Ok(overlap
        .iter()
        .enumerate()
        .map(|(g, row)| {
            row.iter()
                .enumerate()
                .map(|(p, &o)| {
                    // F1 = 2·overlap / (|class| + |cluster|)
                    2.0 * o as f64 / (class_size[g] + cluster_size[p]) as f64
                })
                .collect()
        })
        .collect())
}

/// Unweighted mean over gold classes of the matched F1.
pub fn f1_macro(predicted: &[usize], gold: &[usize], matching: Matching) -> Result<f64> {
    let table = f1_table(predicted, gold)?;
    let classes = table.len();
    let total = match matching {
        Matching::BestMatch => table.iter().map(|row| row.iter().copied().fold(0.0, f64::max)).sum(),
        Matching::Hungarian => hungarian_total(&table),
    };
    Ok(total / classes as f64)
}

fn hungarian_total(table: &[Vec<f64>]) -> f64 {
    const SCALE: f64 = 1e12;
    let rows = table.len();
    let cols = table[0].len();
    let side = rows.max(cols);
    let weights = Matrix::from_fn(side, side, |(r, c)| {
        if r < rows && c < cols {
            (table[r][c] * SCALE).round() as i64
        } else {
            0
        }
    });
    let (_, assignment) = kuhn_munkres(&weights);
    assignment
        .iter()
        .enumerate()
        .filter(|&(r, &c)| r < rows && c < cols)
        .map(|(r, &c)| table[r][c])
        .sum()
}

/// Number of true centers that no final centroid is nearest to.
pub fn missed_clusters<T: Real>(centroids: &[Vec<T>], true_centers: &[Vec<T>]) -> Result<usize> {
    if centroids.is_empty() || true_centers.is_empty() {
        return Err(Error::InvalidArgument("missed_clusters needs centroids and true centers".into()));
    }
    let dim = true_centers[0].len();
    if let Some(bad) = centroids.iter().chain(true_centers).find(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch { what: "center".into(), expected: dim, found: bad.len() });
    }
    let mut hit = vec![false; true_centers.len()];
    for c in centroids {
        let mut best = (0, T::infinity());
        for (t, center) in true_centers.iter().enumerate() {
            let d = sq_euclidean(c, center);
            if d < best.1 {
                best = (t, d);
            }
        }
        hit[best.0] = true;
    }
    Ok(hit.iter().filter(|h| !**h).count())
}

/// Sample Pearson correlation.
pub fn pearson<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { what: "pearson inputs".into(), expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("pearson needs at least two pairs".into()));
    }
    let n = T::from_count(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(Error::Degenerate("pearson of a constant series".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Base-10 logarithm.
    Log,
    Sqrt,
}

pub fn heuristic_k(n: usize, kind: Heuristic) -> f64 {
    let n = n.max(1) as f64;
    match kind {
        Heuristic::Log => n.log10(),
        Heuristic::Sqrt => n.sqrt(),
    }
}

/// Truncates toward zero at `places` decimals (sqrt(148) = 12.1655 gives 12.16).
pub fn truncate_decimals(x: f64, places: u32) -> f64 {
    let scale = 10f64.powi(places as i32);
    // nudge absorbs representation error like 2.2 * 100 = 220.00000000000003
    ((x * scale) + 1e-9).trunc() / scale
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary<T> {
    pub metric_name: String,
    pub mean: T,
    pub std: T,
    pub n_runs: usize,
}

/// Sample mean and standard deviation (n − 1 denominator).
pub fn summarize<T: Real>(values: &[T], name: &str) -> Result<RunSummary<T>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument(format!("no values to summarize for `{name}`")));
    }
    let n = values.len();
    let mean = values.iter().copied().sum::<T>() / T::from_count(n);
    let std = if n == 1 {
        T::zero()
    } else {
        let ss: T = values.iter().map(|&v| (v - mean) * (v - mean)).sum();
        (ss / T::from_count(n - 1)).sqrt()
    };
    Ok(RunSummary { metric_name: name.to_string(), mean, std, n_runs: n })
}

/// Median; the mean of the two middle values for even lengths.
pub fn median<T: Real>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("median of an empty list".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / T::lit(2.0) })
}
