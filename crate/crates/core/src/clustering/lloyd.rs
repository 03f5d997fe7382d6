use super::{Centers, ClusterMode, Clustering, SeedSet};
use crate::error::{Error, Result};
use crate::kernels::{sq_euclidean, GramMatrix};
use crate::scalar::Real;

pub const DEFAULT_MAX_ITER: usize = 300;

fn check_seeds(seeds: &SeedSet, n: usize) -> Result<()> {
    if let Some(&bad) = seeds.indices().iter().find(|&&s| s >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    Ok(())
}

fn argmin<T: Real>(dists: impl Iterator<Item = T>) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (c, d) in dists.enumerate() {
        // strict comparison keeps the lowest id on ties
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn cluster_sizes(assignments: &[usize], k: usize) -> Vec<usize> {
    let mut sizes = vec![0; k];
    for &c in assignments {
        sizes[c] += 1;
    }
    sizes
}

/// Moves, for every empty cluster, the point farthest from its own center
/// (taken from clusters with at least two members) into that cluster.
fn repair_empty<T: Real>(assignments: &mut [usize], own_dist: &mut [T], k: usize) -> Vec<usize> {
    let mut sizes = cluster_sizes(assignments, k);
    let mut moved = Vec::new();
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let mut far: Option<usize> = None;
        for i in 0..assignments.len() {
            if sizes[assignments[i]] >= 2 && far.is_none_or(|f| own_dist[i] > own_dist[f]) {
                far = Some(i);
            }
        }
        let i = far.expect("k <= n guarantees a donor cluster");
        sizes[assignments[i]] -= 1;
        sizes[c] = 1;
        assignments[i] = c;
        own_dist[i] = T::zero();
        moved.push(i);
    }
    moved
}

fn means<T: Real>(points: &[Vec<T>], assignments: &[usize], k: usize) -> Vec<Vec<T>> {
    let dim = points[0].len();
    let mut sums = vec![vec![T::zero(); dim]; k];
    let sizes = cluster_sizes(assignments, k);
    for (p, &c) in points.iter().zip(assignments) {
        for (s, &x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &m) in sums.iter_mut().zip(&sizes) {
        let m = T::from_count(m.max(1));
        s.iter_mut().for_each(|v| *v /= m);
    }
    sums
}

/// Sum of squared Euclidean distances to the cluster means implied by
/// `assignments`.
pub fn vector_cost<T: Real>(points: &[Vec<T>], assignments: &[usize], k: usize) -> T {
    if points.is_empty() {
        return T::zero();
    }
    let centers = means(points, assignments, k);
    points
        .iter()
        .zip(assignments)
        .map(|(p, &c)| sq_euclidean(p, &centers[c]))
        .sum()
}

/// Lloyd's algorithm on explicit vectors.
pub fn lloyd_vector<T: Real>(points: &[Vec<T>], seeds: &SeedSet, max_iter: usize) -> Result<Clustering<T>> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidArgument("no data points".into()));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { what: "point".into(), expected: dim, found: p.len() });
    }
    check_seeds(seeds, n)?;
    let k = seeds.inferred_k();
    let mut centroids: Vec<Vec<T>> = seeds.indices().iter().map(|&s| points[s].clone()).collect();
    let mut assignments = vec![usize::MAX; n];
    let mut own_dist = vec![T::zero(); n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter.max(1) {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, d) = argmin(centroids.iter().map(|m| sq_euclidean(p, m)));
            changed |= assignments[i] != c;
            assignments[i] = c;
            own_dist[i] = d;
        }
        if !changed {
            converged = true;
            break;
        }
        iterations += 1;
        repair_empty(&mut assignments, &mut own_dist, k);
        centroids = means(points, &assignments, k);
        history.push(
            points
                .iter()
                .zip(&assignments)
                .map(|(p, &c)| sq_euclidean(p, &centroids[c]))
                .sum(),
        );
    }
    let cost = *history.last().expect("at least one iteration");
    Ok(Clustering {
        assignments,
        centers: Centers::Centroids(centroids),
        cost,
        cost_history: history,
        iterations,
        converged,
        mode: ClusterMode::Vector,
    })
}

struct KernelStats<T> {
    sizes: Vec<usize>,
    /// (1/|C|²) Σ_{j,l∈C} K(j,l)
    self_term: Vec<T>,
}

fn kernel_stats<T: Real>(g: &GramMatrix<T>, assignments: &[usize], k: usize) -> KernelStats<T> {
    let sizes = cluster_sizes(assignments, k);
    let mut self_term = vec![T::zero(); k];
    let m = g.matrix();
    for j in 0..assignments.len() {
        let row = m.row(j);
        let cj = assignments[j];
        for (l, &cl) in assignments.iter().enumerate() {
            if cl == cj {
                self_term[cj] += row[l];
            }
        }
    }
    for (s, &size) in self_term.iter_mut().zip(&sizes) {
        if size > 0 {
            *s /= T::from_count(size * size);
        }
    }
    KernelStats { sizes, self_term }
}

/// Feature-space squared distance from `i` to the mean of every cluster.
fn kernel_dists<T: Real>(g: &GramMatrix<T>, i: usize, assignments: &[usize], stats: &KernelStats<T>, out: &mut [T]) {
    out.iter_mut().for_each(|v| *v = T::zero());
    for (&c, &kij) in assignments.iter().zip(g.matrix().row(i)) {
        out[c] += kij;
    }
    let kii = g.get(i, i);
    for (c, v) in out.iter_mut().enumerate() {
        *v = if stats.sizes[c] == 0 {
            T::infinity()
        } else {
            let two = T::lit(2.0);
            (kii - two * *v / T::from_count(stats.sizes[c]) + stats.self_term[c]).max(T::zero())
        };
    }
}

/// Kernel-space k-means cost of a partition.
pub fn kernel_cost<T: Real>(g: &GramMatrix<T>, assignments: &[usize], k: usize) -> T {
    let stats = kernel_stats(g, assignments, k);
    let mut diag = vec![T::zero(); k];
    for (i, &c) in assignments.iter().enumerate() {
        diag[c] += g.get(i, i);
    }
    (0..k)
        .filter(|&c| stats.sizes[c] > 0)
        .map(|c| (diag[c] - stats.self_term[c] * T::from_count(stats.sizes[c])).max(T::zero()))
        .sum()
}

/// Kernel k-means over a Gram matrix.
pub fn lloyd_kernel<T: Real>(g: &GramMatrix<T>, seeds: &SeedSet, max_iter: usize) -> Result<Clustering<T>> {
    let n = g.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty Gram matrix".into()));
    }
    check_seeds(seeds, n)?;
    let k = seeds.inferred_k();
    let mut seed_of = vec![None; n];
    for (c, &s) in seeds.indices().iter().enumerate() {
        seed_of[s] = Some(c);
    }
    let mut assignments: Vec<usize> = (0..n)
        .map(|i| seed_of[i].unwrap_or_else(|| argmin(seeds.indices().iter().map(|&s| g.sq_distance(i, s))).0))
        .collect();
    let mut history = vec![kernel_cost(g, &assignments, k)];
    let mut iterations = 1;
    let mut converged = false;
    let mut dists = vec![T::zero(); k];
    let mut own_dist = vec![T::zero(); n];

    while iterations < max_iter.max(1) {
        let stats = kernel_stats(g, &assignments, k);
        let mut next = assignments.clone();
        for i in 0..n {
            kernel_dists(g, i, &assignments, &stats, &mut dists);
            let (c, d) = argmin(dists.iter().copied());
            next[i] = c;
            own_dist[i] = d;
        }
        if next == assignments {
            converged = true;
            break;
        }
        iterations += 1;
        repair_empty(&mut next, &mut own_dist, k);
        assignments = next;
        history.push(kernel_cost(g, &assignments, k));
    }
    let members = {
        let mut m = vec![Vec::new(); k];
        for (i, &c) in assignments.iter().enumerate() {
            m[c].push(i);
        }
        m
    };
    Ok(Clustering {
        cost: *history.last().expect("initial cost recorded"),
        assignments,
        centers: Centers::Members(members),
        cost_history: history,
        iterations,
        converged,
        mode: ClusterMode::Kernel,
    })
}
