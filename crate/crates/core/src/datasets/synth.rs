use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{Features, LabeledDataset};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square grid of isotropic 2-D Gaussians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub grid_side: usize,
    pub separation: f64,
    pub variance: f64,
    pub points_per: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { grid_side: 5, separation: 10.0, variance: 1.0, points_per: 100 }
    }
}

impl GridSpec {
    pub fn k_true(&self) -> usize {
        self.grid_side * self.grid_side
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_side == 0 || self.points_per == 0 {
            return Err(Error::InvalidArgument("grid side and points per cluster must be at least 1".into()));
        }
        if !(self.separation > 0.0) || !(self.variance > 0.0) {
            return Err(Error::InvalidArgument("separation and variance must be positive".into()));
        }
        Ok(())
    }
}

/// Center `i * grid_side + j` sits at `(i * separation, j * separation)`;
/// points are emitted cluster by cluster.
pub fn synth_gaussian_grid<T: Real, R: Rng + ?Sized>(spec: &GridSpec, rng: &mut R) -> Result<LabeledDataset<T>> {
    spec.validate()?;
    let noise = Normal::new(0.0, spec.variance.sqrt()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let g = spec.grid_side;
    let mut centers = Vec::with_capacity(g * g);
    let mut points = Vec::with_capacity(g * g * spec.points_per);
    let mut labels = Vec::with_capacity(points.capacity());
    for i in 0..g {
        for j in 0..g {
            let c = [i as f64 * spec.separation, j as f64 * spec.separation];
            for _ in 0..spec.points_per {
                points.push(c.iter().map(|&x| T::lit(x + noise.sample(rng))).collect());
                labels.push(centers.len());
            }
            centers.push(c.iter().map(|&x| T::lit(x)).collect());
        }
    }
    Ok(LabeledDataset {
        name: format!("gaussian-grid-{g}x{g}"),
        features: Features::Vectors(points),
        gold_labels: Some(labels),
        label_names: (0..g * g).map(|c| c.to_string()).collect(),
        true_centers: Some(centers),
        dropped_rows: 0,
    })
}

/// TSV dump with a parameter/seed comment line and an `x y gold_label` header.
pub fn write_synthetic_tsv<T: Real, W: Write>(
    out: &mut W,
    data: &LabeledDataset<T>,
    spec: &GridSpec,
    seed: u64,
) -> Result<()> {
    let points = data
        .vectors()
        .ok_or_else(|| Error::InvalidArgument("synthetic dump needs vector data".into()))?;
    let labels = data.require_gold()?;
    writeln!(
        out,
        "# grid_side={} separation={} variance={} points_per={} seed={}",
        spec.grid_side, spec.separation, spec.variance, spec.points_per, seed
    )?;
    writeln!(out, "x\ty\tgold_label")?;
    for (p, l) in points.iter().zip(labels) {
        writeln!(out, "{}\t{}\t{}", p[0], p[1], l)?;
    }
    Ok(())
}
