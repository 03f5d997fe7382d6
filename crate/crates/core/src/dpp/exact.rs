//! Exact subset distributions by enumeration, for small ground sets.

use crate::error::{Error, Result};
use crate::kernels::GramMatrix;
use crate::linalg::{determinant, sym_eig, SymMatrix};
use crate::scalar::Real;

use super::{elementary_symmetric, DppSample};

/// Largest ground set the enumerators accept (`2^12` subsets).
pub const MAX_ENUMERATION: usize = 12;

/// Probability of every subset of a ground set of size `n`, indexed by
/// bitmask (bit `i` set when element `i` is in the subset).
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetPmf<T> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Real> SubsetPmf<T> {
    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn prob_of_mask(&self, mask: usize) -> T {
        self.probs[mask]
    }

    pub fn prob(&self, subset: &[usize]) -> T {
        self.probs[subset.iter().fold(0usize, |m, &i| m | (1 << i))]
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, T)> + '_ {
        self.probs.iter().enumerate().map(|(mask, &p)| (members(mask, self.n), p))
    }

    /// `P(A ⊆ Y)`.
    pub fn inclusion(&self, subset: &[usize]) -> T {
        let want = subset.iter().fold(0usize, |m, &i| m | (1 << i));
        self.probs
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask & want == want)
            .map(|(_, &p)| p)
            .sum()
    }

    /// Relative frequencies of the samples' subsets.
    pub fn empirical<'a>(n: usize, samples: impl IntoIterator<Item = &'a DppSample>) -> Self {
        assert!(n <= MAX_ENUMERATION);
        let mut counts = vec![0u64; 1 << n];
        let mut total = 0u64;
        for s in samples {
            counts[s.mask() as usize] += 1;
            total += 1;
        }
        let denom = T::from_u64(total.max(1)).expect("count representable");
        Self {
            n,
            probs: counts
                .into_iter()
                .map(|c| T::from_u64(c).expect("count representable") / denom)
                .collect(),
        }
    }

    pub fn from_counts(n: usize, counts: &[u64]) -> Self {
        assert_eq!(counts.len(), 1 << n);
        let total: u64 = counts.iter().sum();
        let denom = T::from_u64(total.max(1)).expect("count representable");
        Self {
            n,
            probs: counts.iter().map(|&c| T::from_u64(c).expect("count representable") / denom).collect(),
        }
    }

    /// `½ Σ |p(A) − q(A)|`.
    pub fn total_variation(&self, other: &Self) -> T {
        assert_eq!(self.n, other.n, "ground sets differ");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(&a, &b)| (a - b).abs())
            .sum::<T>()
            / T::lit(2.0)
    }
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ENUMERATION {
        Err(Error::SizeLimit { n, max: MAX_ENUMERATION })
    } else {
        Ok(())
    }
}

fn subset_det<T: Real>(l: &SymMatrix<T>, mask: usize) -> Result<T> {
    if mask == 0 {
        return Ok(T::one());
    }
    let idx = members(mask, l.dim());
    Ok(determinant(&l.principal_submatrix(&idx)?).max(T::zero()))
}

/// `P(Y = A) = det(L_A) / det(L + I)` for every subset `A`.
pub fn brute_force_pmf<T: Real>(g: &GramMatrix<T>) -> Result<SubsetPmf<T>> {
    let l = g.matrix();
    let n = l.dim();
    check_size(n)?;
    let normalizer = determinant(&l.shifted(T::one()));
    let probs = (0..1usize << n)
        .map(|mask| Ok(subset_det(l, mask)? / normalizer))
        .collect::<Result<Vec<T>>>()?;
    Ok(SubsetPmf { n, probs })
}

/// k-DPP law: `det(L_A) / e_k(λ)` on subsets of size `k`, zero elsewhere.
pub fn brute_force_kdpp_pmf<T: Real>(g: &GramMatrix<T>, k: usize) -> Result<SubsetPmf<T>> {
    let l = g.matrix();
    let n = l.dim();
    check_size(n)?;
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds ground set size {n}")));
    }
    let mut eig = sym_eig(l)?;
    eig.clamp_nonnegative();
    let ek = elementary_symmetric(eig.eigenvalues(), k)[n][k];
    let probs = (0..1usize << n)
        .map(|mask| {
            if mask.count_ones() as usize == k {
                Ok(subset_det(l, mask)? / ek)
            } else {
                Ok(T::zero())
            }
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(SubsetPmf { n, probs })
}

/// Marginal kernel `K = L (L + I)⁻¹` of an L-ensemble.
pub fn marginal_kernel<T: Real>(l: &SymMatrix<T>) -> Result<SymMatrix<T>> {
    let mut eig = sym_eig(l)?;
    eig.clamp_nonnegative();
    let n = l.dim();
    let scale: Vec<T> = eig.eigenvalues().iter().map(|&v| v / (T::one() + v)).collect();
    Ok(SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| scale[k] * eig.eigenvector(k)[i] * eig.eigenvector(k)[j])
            .sum()
    }))
}
