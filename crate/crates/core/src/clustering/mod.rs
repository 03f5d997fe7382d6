//! k-means in vector and kernel modes with four seeding strategies.

mod lloyd;
mod seeding;

pub use lloyd::{kernel_cost, lloyd_kernel, lloyd_vector, vector_cost, DEFAULT_MAX_ITER};
pub use seeding::{
    init_dpp, init_kdpp, init_kmeanspp, init_kmeanspp_with_first, init_random, init_sequential,
    MAX_EMPTY_REDRAWS,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeedMethod {
    /// Uniform without replacement.
    Rand,
    /// D²-weighted (kmeans++).
    PlusPlus,
    /// Spectral DPP sample; the cardinality sets k.
    Dpp,
    /// k-DPP sample with k supplied.
    DppK,
    /// Sequential determinant-ratio sampler with k supplied.
    Sequential,
}

impl SeedMethod {
    pub const ALL: [SeedMethod; 5] = [
        SeedMethod::Rand,
        SeedMethod::PlusPlus,
        SeedMethod::Dpp,
        SeedMethod::DppK,
        SeedMethod::Sequential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SeedMethod::Rand => "rand",
            SeedMethod::PlusPlus => "pp",
            SeedMethod::Dpp => "dpp",
            SeedMethod::DppK => "dppk",
            SeedMethod::Sequential => "seq",
        }
    }

    /// Whether the caller supplies k.
    pub fn needs_k(self) -> bool {
        self != SeedMethod::Dpp
    }
}

impl fmt::Display for SeedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeedMethod::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown seeding method `{s}` (expected rand, pp, dpp, dppk or seq)")))
    }
}

/// Indices of the data points chosen as initial centers, in selection order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSet {
    indices: Vec<usize>,
    method: SeedMethod,
}

impl SeedSet {
    pub fn new(indices: Vec<usize>, method: SeedMethod) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidArgument("seed set must be nonempty".into()));
        }
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("seed set contains duplicate indices".into()));
        }
        Ok(Self { indices, method })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn method(&self) -> SeedMethod {
        self.method
    }

    /// Number of seeds, i.e. the k the clustering will run with.
    pub fn inferred_k(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterMode {
    Vector,
    Kernel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Centers<T> {
    /// Explicit centroids (vector mode).
    Centroids(Vec<Vec<T>>),
    /// Member indices per cluster (kernel mode, where centroids live in
    /// feature space and are never formed).
    Members(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering<T> {
    pub assignments: Vec<usize>,
    pub centers: Centers<T>,
    pub cost: T,
    /// Cost after every completed iteration, first entry after the first
    /// assignment/update pass.
    pub cost_history: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
    pub mode: ClusterMode,
}

impl<T: Clone> Clustering<T> {
    pub fn k(&self) -> usize {
        match &self.centers {
            Centers::Centroids(c) => c.len(),
            Centers::Members(m) => m.len(),
        }
    }

    pub fn centroids(&self) -> Option<&[Vec<T>]> {
        match &self.centers {
            Centers::Centroids(c) => Some(c),
            Centers::Members(_) => None,
        }
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &c) in self.assignments.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

impl<T: crate::scalar::Real> Clustering<T> {
    pub fn cost_per_point(&self) -> T {
        self.cost / T::from_count(self.assignments.len().max(1))
    }
}

#[cfg(test)]
mod tests;
