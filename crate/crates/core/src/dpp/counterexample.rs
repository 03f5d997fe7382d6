//! Numerical check of the three-point line configuration on which the
//! sequential DPP seeder prefers a point that is *not* the farthest from the
//! chosen seeds.
//!
//! Points: `x₁ = −D`, `x₂ = +D` (both already selected), and two candidate
//! third points `x₃′ = 2D − ε` (beyond `x₂`) and `x₃″ = 0` (midway). The
//! report carries both conditional probabilities and the chain of
//! successively stronger sufficient inequalities used to prove that
//! `P(x₃′|S) > P(x₃″|S)` for small `ε`.

use crate::error::{Error, Result};
use crate::kernels::rbf_gram;
use crate::linalg::det_ratio;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleConfig<T> {
    /// `D`: distance of each selected seed from the origin.
    pub half_separation: T,
    pub sigma: T,
    /// `ε ∈ (0, D)`: how much closer `x₃′` is to `x₂` than `x₃″` is.
    pub epsilon: T,
}

/// `√(ln 6 / (4σ))`; the configuration requires `D` strictly above it.
pub fn counterexample_bound<T: Real>(sigma: T) -> T {
    (T::lit(6.0).ln() / (T::lit(4.0) * sigma)).sqrt()
}

impl<T: Real> CounterexampleConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) {
            return Err(Error::Precondition(format!("sigma must be positive, got {}", self.sigma)));
        }
        let bound = counterexample_bound(self.sigma);
        if !(self.half_separation > bound) {
            return Err(Error::Precondition(format!(
                "D = {} must exceed sqrt(ln 6 / (4 sigma)) = {:.4}",
                self.half_separation, bound
            )));
        }
        if !(self.epsilon > T::zero() && self.epsilon < self.half_separation) {
            return Err(Error::Precondition(format!(
                "epsilon = {} must lie in (0, D = {})",
                self.epsilon, self.half_separation
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterexampleReport<T> {
    pub epsilon: T,
    /// `P(x₃′ | S)` for the far candidate `2D − ε`.
    pub p_far: T,
    /// `P(x₃″ | S)` for the midpoint candidate `0`.
    pub p_mid: T,
    /// `P(x₃′|S) > P(x₃″|S)`.
    pub far_preferred: bool,
    /// Cross term dropped:
    /// `e^{−2σ(3D−ε)²} + e^{−2σ(D−ε)²} ≤ 2e^{−2σD²} − 2e^{−6σD²}`.
    pub drop_cross_term: bool,
    /// Far term bounded by `e^{−8σD²}`:
    /// `2e^{−6σD²} + e^{−8σD²} + e^{−2σ(D−ε)²} < 2e^{−2σD²}`.
    pub bound_far_term: bool,
    /// Tail terms merged:
    /// `3e^{−6σD²} + e^{−2σ(D−ε)²} ≤ 2e^{−2σD²}`.
    pub merge_tail_terms: bool,
    /// Strongest form, equivalent to
    /// `e^{−2σ(D−ε)²} − e^{−2σD²} < e^{−2σD²} / 2`.
    pub near_term_gap: bool,
}

impl<T: Real> CounterexampleReport<T> {
    /// Each inequality in the chain implies the next weaker one and finally
    /// the preference for the far point. `true` when no link is broken.
    pub fn chain_consistent(&self) -> bool {
        let links = [
            (self.near_term_gap, self.merge_tail_terms),
            (self.merge_tail_terms, self.bound_far_term),
            (self.bound_far_term, self.drop_cross_term),
            (self.drop_cross_term, self.far_preferred),
        ];
        links.iter().all(|&(strong, weak)| !strong || weak)
    }

    pub fn all_finite(&self) -> bool {
        self.p_far.is_finite() && self.p_mid.is_finite()
    }
}

pub fn verify_counterexample<T: Real>(cfg: &CounterexampleConfig<T>) -> Result<CounterexampleReport<T>> {
    cfg.validate()?;
    let d = cfg.half_separation;
    let sigma = cfg.sigma;
    let eps = cfg.epsilon;
    let two = T::lit(2.0);

    let points = vec![vec![-d], vec![d], vec![two * d - eps], vec![T::zero()]];
    let gram = rbf_gram(&points, sigma)?;
    let p_far = det_ratio(gram.matrix(), &[0, 1], 2)?;
    let p_mid = det_ratio(gram.matrix(), &[0, 1], 3)?;

    let d2 = d * d;
    let e = |c: f64| (-T::lit(c) * sigma * d2).exp();
    let base = e(2.0);
    let tail6 = e(6.0);
    let tail8 = e(8.0);
    let far = (-two * sigma * (T::lit(3.0) * d - eps).powi(2)).exp();
    let near = (-two * sigma * (d - eps).powi(2)).exp();

    Ok(CounterexampleReport {
        epsilon: eps,
        p_far,
        p_mid,
        far_preferred: p_far > p_mid,
        drop_cross_term: far + near <= two * base - two * tail6,
        bound_far_term: two * tail6 + tail8 + near < two * base,
        merge_tail_terms: T::lit(3.0) * tail6 + near <= two * base,
        near_term_gap: base / two + near < two * base,
    })
}

/// Evaluates the configuration on `grid_points` uniformly spaced
/// `ε = D·i/(grid_points+1)`, `i = 1..=grid_points`, strictly inside `(0, D)`.
pub fn scan_counterexample<T: Real>(
    half_separation: T,
    sigma: T,
    grid_points: usize,
) -> Result<Vec<CounterexampleReport<T>>> {
    if grid_points == 0 {
        return Err(Error::InvalidArgument("epsilon grid needs at least one point".into()));
    }
    let step = half_separation / T::from_count(grid_points + 1);
    (1..=grid_points)
        .map(|i| {
            verify_counterexample(&CounterexampleConfig {
                half_separation,
                sigma,
                epsilon: step * T::from_count(i),
            })
        })
        .collect()
}
