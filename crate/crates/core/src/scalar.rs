//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the numeric core is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used for symmetry checks: `1e-12`, widened to a few
    /// ulps for lower precision types.
    #[inline]
    fn symmetry_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(16.0))
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + LowerExp
        + Sum
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Send
        + Sync
        + 'static
{
}

/// Draws an index with probability proportional to `weights`.
///
/// Returns `None` when no weight is positive. Negative and NaN weights are
/// treated as zero.
pub fn weighted_index<T: Real, R: rand::Rng + ?Sized>(weights: &[T], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().map(|w| positive_part(w.as_f64())).sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, w) in weights.iter().enumerate() {
        let w = positive_part(w.as_f64());
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    // Round-off can leave `target` at the very top of the range.
    last_positive
}

#[inline]
fn positive_part(w: f64) -> f64 {
    if w > 0.0 {
        w
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weighted_index_skips_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let i = weighted_index(&[0.0f64, 2.0, 0.0, 1.0], &mut rng).unwrap();
            assert!(i == 1 || i == 3);
        }
        assert_eq!(weighted_index(&[0.0f64, -1.0], &mut rng), None);
        assert_eq!(weighted_index::<f32, _>(&[], &mut rng), None);
    }

    #[test]
    fn symmetry_tolerance_widens_for_f32() {
        assert_eq!(f64::symmetry_tolerance(), 1e-12);
        assert!(f32::symmetry_tolerance() > 1e-7);
    }
}
