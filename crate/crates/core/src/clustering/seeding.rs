use rand::Rng;

use super::{SeedMethod, SeedSet};
use crate::dpp::{sequential_sample, DppSampler};
use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::scalar::{weighted_index, Real};

/// Redraws allowed when the spectral sampler returns an empty set.
pub const MAX_EMPTY_REDRAWS: usize = 100;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")))
    } else {
        Ok(())
    }
}

pub fn init_random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SeedSet> {
    check_k(n, k)?;
    SeedSet::new(rand::seq::index::sample(rng, n, k).into_vec(), SeedMethod::Rand)
}

/// kmeans++ seeding over an arbitrary squared-distance accessor.
///
/// The first seed is uniform; each further seed is drawn with probability
/// proportional to its squared distance to the nearest seed chosen so far.
pub fn init_kmeanspp<T, F, R>(dist2: F, n: usize, k: usize, rng: &mut R) -> Result<SeedSet>
where
    T: Real,
    F: Fn(usize, usize) -> T,
    R: Rng + ?Sized,
{
    check_k(n, k)?;
    let first = rng.random_range(0..n);
    init_kmeanspp_with_first(dist2, n, k, first, rng)
}

/// kmeans++ continuation from a fixed first seed.
pub fn init_kmeanspp_with_first<T, F, R>(dist2: F, n: usize, k: usize, first: usize, rng: &mut R) -> Result<SeedSet>
where
    T: Real,
    F: Fn(usize, usize) -> T,
    R: Rng + ?Sized,
{
    check_k(n, k)?;
    if first >= n {
        return Err(Error::IndexOutOfRange { index: first, len: n });
    }
    let mut seeds = Vec::with_capacity(k);
    seeds.push(first);
    let mut nearest: Vec<T> = (0..n).map(|i| dist2(i, first)).collect();
    while seeds.len() < k {
        for &s in &seeds {
            nearest[s] = T::zero();
        }
        let next = weighted_index(&nearest, rng).ok_or_else(|| {
            Error::Degenerate(format!("only {} distinct points, cannot place {k} seeds", seeds.len()))
        })?;
        seeds.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            let candidate = dist2(i, next);
            if candidate < *d {
                *d = candidate;
            }
        }
    }
    SeedSet::new(seeds, SeedMethod::PlusPlus)
}

/// Spectral DPP seeding; k is the sample's cardinality. Empty draws are
/// redrawn up to [`MAX_EMPTY_REDRAWS`] times.
pub fn init_dpp<T: Real, R: Rng + ?Sized>(sampler: &DppSampler<T>, rng: &mut R) -> Result<SeedSet> {
    for _ in 0..MAX_EMPTY_REDRAWS {
        let sample = sampler.sample(rng);
        if !sample.is_empty() {
            return SeedSet::new(sample.order().to_vec(), SeedMethod::Dpp);
        }
    }
    Err(Error::Degenerate(format!(
        "spectral DPP returned the empty set {MAX_EMPTY_REDRAWS} times in a row"
    )))
}

pub fn init_kdpp<T: Real, R: Rng + ?Sized>(sampler: &DppSampler<T>, k: usize, rng: &mut R) -> Result<SeedSet> {
    check_k(sampler.ground_size(), k)?;
    SeedSet::new(sampler.sample_k(k, rng)?.order().to_vec(), SeedMethod::DppK)
}

pub fn init_sequential<T: Real, R: Rng + ?Sized>(g: &GramMatrix<T>, k: usize, rng: &mut R) -> Result<SeedSet> {
    SeedSet::new(sequential_sample(g, k, rng)?.order().to_vec(), SeedMethod::Sequential)
}
