//! Gram matrices over vector data (RBF) and token sequences (contiguous word
//! n-gram kernel), plus the kernel-induced squared distance.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind<T> {
    /// `exp(-sigma * ||x - y||²)`.
    Rbf { sigma: T },
    /// Cosine-normalized count of shared contiguous word n-grams, `n = 1..=max_n`.
    WordNgram { max_n: usize },
}

/// Symmetric PSD similarity matrix with unit diagonal.
#[derive(Clone, Debug)]
pub struct GramMatrix<T> {
    base: SymMatrix<T>,
    kind: KernelKind<T>,
}

impl<T: Real> GramMatrix<T> {
    /// Wraps an arbitrary symmetric matrix, e.g. a hand-built L-ensemble in
    /// tests. No PSD or unit-diagonal check is made.
    pub fn from_matrix(base: SymMatrix<T>, kind: KernelKind<T>) -> Self {
        Self { base, kind }
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.base
    }

    pub fn kind(&self) -> KernelKind<T> {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.base.dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.base.get(i, j)
    }

    /// `K(i,i) + K(j,j) − 2K(i,j)`, floored at zero.
    #[inline]
    pub fn sq_distance(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::zero();
        }
        let d = self.base.get(i, i) + self.base.get(j, j) - self.base.get(i, j) * T::lit(2.0);
        d.max(T::zero())
    }
}

pub fn kernel_sq_distance<T: Real>(g: &GramMatrix<T>, i: usize, j: usize) -> T {
    g.sq_distance(i, j)
}

#[inline]
pub fn sq_euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn check_dims<T>(points: &[Vec<T>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidArgument("no points".into()));
    };
    let dim = first.len();
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "point dimension".into(),
                expected: dim,
                found: p.len(),
            });
        }
    }
    Ok(dim)
}

pub fn rbf_gram<T: Real>(points: &[Vec<T>], sigma: T) -> Result<GramMatrix<T>> {
    check_dims(points)?;
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let base = SymMatrix::from_fn(points.len(), |i, j| {
        if i == j {
            T::one()
        } else {
            (-sigma * sq_euclidean(&points[i], &points[j])).exp()
        }
    });
    Ok(GramMatrix { base, kind: KernelKind::Rbf { sigma } })
}

/// Median-heuristic bandwidth: `1 / (2 · median pairwise squared distance)`.
///
/// The median of an even number of pairs is the mean of the two middle
/// values.
pub fn median_sigma<T: Real>(points: &[Vec<T>]) -> Result<T> {
    check_dims(points)?;
    if points.len() < 2 {
        return Err(Error::Degenerate("median bandwidth needs at least two points".into()));
    }
    let mut d2 = Vec::with_capacity(points.len() * (points.len() - 1) / 2);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d2.push(sq_euclidean(&points[i], &points[j]));
        }
    }
    let median = median_in_place(&mut d2);
    if !(median > T::zero()) {
        return Err(Error::Degenerate(
            "median pairwise squared distance is zero (points identical)".into(),
        ));
    }
    Ok(T::one() / (median * T::lit(2.0)))
}

fn median_in_place<T: Real>(v: &mut [T]) -> T {
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal);
    let len = v.len();
    let mid = len / 2;
    let (lower, upper, _) = v.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(T::neg_infinity(), T::max);
        (below + upper) / T::lit(2.0)
    }
}

/// Counts of contiguous n-grams of lengths `1..=max_n`.
fn ngram_counts<S: AsRef<str>>(tokens: &[S], max_n: usize) -> HashMap<Vec<&str>, usize> {
    let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let mut counts = HashMap::new();
    for n in 1..=max_n.min(toks.len()) {
        for w in toks.windows(n) {
            *counts.entry(w.to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

fn raw_kernel(a: &HashMap<Vec<&str>, usize>, b: &HashMap<Vec<&str>, usize>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(g, &ca)| large.get(g).map(|&cb| ca * cb))
        .sum()
}

/// Contiguous word kernel over already-normalized token lists.
///
/// `k(s,t) = Σ_{n=1..p} Σ_g count_s(g)·count_t(g)` over shared n-grams `g`,
/// returned cosine-normalized so the diagonal is one.
pub fn word_ngram_gram<T: Real, S: AsRef<str>>(texts: &[Vec<S>], p: usize) -> Result<GramMatrix<T>> {
    if p == 0 {
        return Err(Error::InvalidArgument("n-gram length must be >= 1".into()));
    }
    if texts.is_empty() {
        return Err(Error::InvalidArgument("no texts".into()));
    }
    if let Some(bad) = texts.iter().position(|t| t.is_empty()) {
        return Err(Error::InvalidArgument(format!("text record {bad} has no tokens")));
    }
    let counts: Vec<_> = texts.iter().map(|t| ngram_counts(t, p)).collect();
    let norms: Vec<T> = counts
        .iter()
        .map(|c| T::from_count(raw_kernel(c, c)).sqrt())
        .collect();
    let base = SymMatrix::from_fn(texts.len(), |i, j| {
        if i == j {
            T::one()
        } else {
            (T::from_count(raw_kernel(&counts[i], &counts[j])) / (norms[i] * norms[j])).min(T::one())
        }
    });
    Ok(GramMatrix { base, kind: KernelKind::WordNgram { max_n: p } })
}
