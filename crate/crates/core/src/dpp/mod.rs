//! Determinantal point process sampling over a Gram matrix treated as an
//! L-ensemble (`P(Y = A) ∝ det(L_A)`).
//!
//! Three samplers are provided: the spectral sampler (random cardinality),
//! its fixed-cardinality k-DPP variant driven by elementary symmetric
//! polynomials, and the greedy sequential sampler that draws each new point
//! with probability proportional to `det(L_{S∪{x}}) / det(L_S)`.

mod counterexample;
mod exact;

pub use counterexample::{
    counterexample_bound, scan_counterexample, verify_counterexample, CounterexampleConfig,
    CounterexampleReport,
};
pub use exact::{brute_force_kdpp_pmf, brute_force_pmf, marginal_kernel, SubsetPmf, MAX_ENUMERATION};

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::linalg::{sym_eig, EigenDecomposition, SchurComplement, DEFAULT_RIDGE};
use crate::scalar::{weighted_index, Real};

/// Eigenvalues at or below this are treated as zero when computing rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Determinant ratios below this are treated as zero by the sequential
/// sampler. The ridge on `L_S` leaves an exact duplicate of a selected point
/// with a ratio of about `DEFAULT_RIDGE`, so the floor sits above it.
/// Largest ground set the sampler will eigendecompose; the dense solver is
/// cubic in time and quadratic in memory.
pub const DENSE_EIGEN_MAX: usize = 5000;

pub const SEQUENTIAL_RATIO_FLOOR: f64 = 1e-14 + 10.0 * DEFAULT_RIDGE;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleSource {
    Spectral,
    KDpp,
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DppSample {
    indices: Vec<usize>,
    order: Vec<usize>,
    source: SampleSource,
    uniform_fallbacks: usize,
}

impl DppSample {
    fn new(order: Vec<usize>, source: SampleSource, uniform_fallbacks: usize) -> Self {
        let mut indices = order.clone();
        indices.sort_unstable();
        Self { indices, order, source, uniform_fallbacks }
    }

    /// Selected indices, strictly increasing.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Selected indices in the order the sampler picked them.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn source(&self) -> SampleSource {
        self.source
    }

    /// Rounds in which the sequential sampler found every remaining ratio
    /// negligible and drew uniformly instead.
    pub fn uniform_fallbacks(&self) -> usize {
        self.uniform_fallbacks
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Bitmask of the selected indices (ground sets of up to 64 points).
    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
    }
}

/// `Σ λ / (1 + λ)`, the expected cardinality of a spectral sample.
pub fn expected_size<T: Real>(eigenvalues: &[T]) -> T {
    eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(T::zero());
            l / (T::one() + l)
        })
        .sum()
}

/// Table `e[n][k]` of elementary symmetric polynomials of the first `n`
/// eigenvalues, `n = 0..=len`, `k = 0..=kmax`.
pub fn elementary_symmetric<T: Real>(eigenvalues: &[T], kmax: usize) -> Vec<Vec<T>> {
    let n = eigenvalues.len();
    let mut e = vec![vec![T::zero(); kmax + 1]; n + 1];
    for row in e.iter_mut() {
        row[0] = T::one();
    }
    for m in 1..=n {
        let lambda = eigenvalues[m - 1];
        for k in 1..=kmax {
            e[m][k] = e[m - 1][k] + lambda * e[m - 1][k - 1];
        }
    }
    e
}

/// Eigendecomposition of an L-ensemble kernel, reusable across draws.
#[derive(Clone, Debug)]
pub struct DppSampler<T> {
    eig: EigenDecomposition<T>,
}

impl<T: Real> DppSampler<T> {
    pub fn new(g: &GramMatrix<T>) -> Result<Self> {
        if g.len() > DENSE_EIGEN_MAX {
            return Err(Error::TooLarge { n: g.len(), max: DENSE_EIGEN_MAX });
        }
        let mut eig = sym_eig(g.matrix())?;
        eig.clamp_nonnegative();
        Ok(Self { eig })
    }

    pub fn ground_size(&self) -> usize {
        self.eig.dim()
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.eig.eigenvalues()
    }

    pub fn decomposition(&self) -> &EigenDecomposition<T> {
        &self.eig
    }

    pub fn expected_size(&self) -> T {
        expected_size(self.eig.eigenvalues())
    }

    /// Variance of the spectral sample size, `Σ λ / (1 + λ)²`.
    pub fn size_variance(&self) -> T {
        self.eig
            .eigenvalues()
            .iter()
            .map(|&l| l / ((T::one() + l) * (T::one() + l)))
            .sum()
    }

    pub fn rank(&self) -> usize {
        self.eig.rank(T::lit(RANK_THRESHOLD))
    }

    /// Spectral sampler: keep eigenvector `n` with probability
    /// `λ_n / (λ_n + 1)`, then draw one point per kept eigenvector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DppSample {
        let selected: Vec<usize> = self
            .eig
            .eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, &l)| {
                let keep = (l / (l + T::one())).as_f64();
                rng.random::<f64>() < keep
            })
            .map(|(k, _)| k)
            .collect();
        DppSample::new(self.project_and_draw(&selected, rng), SampleSource::Spectral, 0)
    }

    /// k-DPP sampler: exactly `k` eigenvectors chosen by descending the
    /// elementary symmetric polynomial table, then the same point-drawing
    /// phase as [`DppSampler::sample`].
    pub fn sample_k<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<DppSample> {
        let selected = self.select_k_eigenvectors(k, rng)?;
        Ok(DppSample::new(self.project_and_draw(&selected, rng), SampleSource::KDpp, 0))
    }

    fn select_k_eigenvectors<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Vec<usize>> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        let rank = self.rank();
        if k > rank {
            return Err(Error::Rank { k, rank });
        }
        // The table is built in f64 on eigenvalues scaled by the largest one;
        // the inclusion probabilities are invariant to that scale and the
        // scaled table stays finite for ground sets of a few thousand points.
        let top = self.eig.eigenvalues()[0].as_f64();
        let lambdas: Vec<f64> = self.eig.eigenvalues().iter().map(|l| l.as_f64() / top).collect();
        let e = elementary_symmetric(&lambdas, k);
        let mut remaining = k;
        let mut selected = Vec::with_capacity(k);
        for m in (1..=lambdas.len()).rev() {
            if remaining == 0 {
                break;
            }
            let p = if m == remaining {
                1.0
            } else {
                lambdas[m - 1] * e[m - 1][remaining - 1] / e[m][remaining]
            };
            if rng.random::<f64>() < p {
                selected.push(m - 1);
                remaining -= 1;
            }
        }
        debug_assert_eq!(remaining, 0);
        Ok(selected)
    }

    /// Draws one ground-set point per eigenvector in `selected`, projecting
    /// the retained subspace orthogonal to each chosen coordinate axis.
    fn project_and_draw<R: Rng + ?Sized>(&self, selected: &[usize], rng: &mut R) -> Vec<usize> {
        let n = self.eig.dim();
        let mut basis: Vec<Vec<T>> = selected.iter().map(|&k| self.eig.eigenvector(k).to_vec()).collect();
        let mut chosen = Vec::with_capacity(basis.len());
        let mut taken = vec![false; n];
        let mut weights = vec![T::zero(); n];
        while !basis.is_empty() {
            for (i, w) in weights.iter_mut().enumerate() {
                *w = if taken[i] {
                    T::zero()
                } else {
                    basis.iter().map(|v| v[i] * v[i]).sum()
                };
            }
            let i = weighted_index(&weights, rng)
                .or_else(|| taken.iter().position(|t| !t))
                .expect("fewer kept eigenvectors than ground-set points");
            chosen.push(i);
            taken[i] = true;

            let pivot_at = (0..basis.len())
                .max_by(|&a, &b| {
                    basis[a][i]
                        .abs()
                        .partial_cmp(&basis[b][i].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("basis is nonempty");
            let pivot = basis.swap_remove(pivot_at);
            let pivot_i = pivot[i];
            if pivot_i != T::zero() {
                for v in basis.iter_mut() {
                    let f = v[i] / pivot_i;
                    for (x, &p) in v.iter_mut().zip(&pivot) {
                        *x -= f * p;
                    }
                }
            }
            orthonormalize(&mut basis);
        }
        chosen
    }
}

/// Modified Gram-Schmidt in place.
fn orthonormalize<T: Real>(basis: &mut [Vec<T>]) {
    for a in 0..basis.len() {
        let (done, rest) = basis.split_at_mut(a);
        let v = &mut rest[0];
        for u in done.iter() {
            let dot: T = u.iter().zip(&**v).map(|(&x, &y)| x * y).sum();
            for (x, &y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm > T::zero() {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    }
}

pub fn dpp_sample<T: Real, R: Rng + ?Sized>(g: &GramMatrix<T>, rng: &mut R) -> Result<DppSample> {
    Ok(DppSampler::new(g)?.sample(rng))
}

pub fn kdpp_sample<T: Real, R: Rng + ?Sized>(g: &GramMatrix<T>, k: usize, rng: &mut R) -> Result<DppSample> {
    DppSampler::new(g)?.sample_k(k, rng)
}

/// Normalized draw distribution of the sequential sampler's next pick given
/// the already-selected `chosen` points: each unselected `x` weighted by
/// `det(L_{S∪{x}}) / det(L_S)`. Returns `(candidate, probability)` pairs;
/// an empty `chosen` yields the uniform distribution.
pub fn sequential_step_distribution<T: Real>(g: &GramMatrix<T>, chosen: &[usize]) -> Result<Vec<(usize, T)>> {
    let remaining: Vec<usize> = (0..g.len()).filter(|i| !chosen.contains(i)).collect();
    if remaining.is_empty() {
        return Ok(Vec::new());
    }
    if chosen.is_empty() {
        let p = T::one() / T::from_count(remaining.len());
        return Ok(remaining.into_iter().map(|i| (i, p)).collect());
    }
    let schur = SchurComplement::new(g.matrix(), chosen, T::lit(DEFAULT_RIDGE))?;
    let ratios = remaining
        .iter()
        .map(|&x| schur.ratio(x))
        .collect::<Result<Vec<T>>>()?;
    let floor = T::lit(SEQUENTIAL_RATIO_FLOOR);
    let total: T = ratios.iter().copied().filter(|&r| r >= floor).sum();
    if !(total > T::zero()) {
        let p = T::one() / T::from_count(remaining.len());
        return Ok(remaining.into_iter().map(|i| (i, p)).collect());
    }
    Ok(remaining
        .into_iter()
        .zip(ratios)
        .map(|(i, r)| (i, if r >= floor { r / total } else { T::zero() }))
        .collect())
}

/// Sequential conditional sampler: the first point is uniform, each of the
/// next `k − 1` is drawn with probability proportional to its determinant
/// ratio against the points already chosen.
pub fn sequential_sample<T: Real, R: Rng + ?Sized>(g: &GramMatrix<T>, k: usize, rng: &mut R) -> Result<DppSample> {
    let n = g.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 1..={n}")));
    }
    let mut chosen = vec![rng.random_range(0..n)];
    let mut fallbacks = 0;
    let floor = T::lit(SEQUENTIAL_RATIO_FLOOR);
    while chosen.len() < k {
        let remaining: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        let schur = SchurComplement::new(g.matrix(), &chosen, T::lit(DEFAULT_RIDGE))?;
        let mut ratios = remaining
            .iter()
            .map(|&x| schur.ratio(x))
            .collect::<Result<Vec<T>>>()?;
        for r in ratios.iter_mut() {
            if *r < floor {
                *r = T::zero();
            }
        }
        let pick = match weighted_index(&ratios, rng) {
            Some(p) => p,
            None => {
                fallbacks += 1;
                rng.random_range(0..remaining.len())
            }
        };
        chosen.push(remaining[pick]);
    }
    Ok(DppSample::new(chosen, SampleSource::Sequential, fallbacks))
}
