//! Stochastic block model: sampling, expected edge and wedge counts, and the
//! predicates describing when closing a random wedge helps integration.

mod centrality;
mod counts;
mod effects;
mod monte_carlo;
mod sample;

pub use centrality::{centrality_analysis, measured_centrality_ratio, CentralityReport};
pub use counts::{exact_expected_counts, expected_counts, ExpectedCounts};
pub use effects::{absolute_effect_sign, gamma_relative_effect_sign, l_star, relative_bounds, RelativeBounds};
pub use monte_carlo::{replicate_effects, simulate_effects, EffectSummary, ReplicateEffect};
pub use sample::sample_sbm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SbmParams<T> {
    pub group_sizes: Vec<usize>,
    /// Within-type link probability.
    pub p: T,
    /// Cross-type link probability.
    pub q: T,
}

impl<T: Scalar> SbmParams<T> {
    pub fn new(group_sizes: Vec<usize>, p: T, q: T) -> Result<Self> {
        let params = Self { group_sizes, p, q };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.group_sizes.len() < 2 {
            return Err(Error::InvalidParams("an SBM needs at least two groups".into()));
        }
        if self.group_sizes.contains(&0) {
            return Err(Error::InvalidParams("group sizes must be positive".into()));
        }
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(self.p) || !unit(self.q) {
            return Err(Error::InvalidParams(format!("p = {:?} and q = {:?} must lie in [0, 1]", self.p, self.q)));
        }
        Ok(())
    }

    pub fn num_groups(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn node_count(&self) -> usize {
        self.group_sizes.iter().sum()
    }

    pub fn moments(&self) -> MomentSums<T> {
        MomentSums::from_counts(&self.group_sizes)
    }

    /// Moments of the group fractions `n_k / n`. Every closed form built from
    /// ratios of moments is homogeneous, so this avoids overflow for narrow scalars.
    pub(crate) fn normalized_moments(&self) -> MomentSums<T> {
        let n = T::from_count(self.node_count());
        let fractions: Vec<T> = self.group_sizes.iter().map(|&s| T::from_count(s) / n).collect();
        MomentSums::new(&fractions)
    }
}

/// Power sums of the group sizes and the combinations the closed forms use.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSums<T> {
    pub n: T,
    pub m2: T,
    pub m3: T,
    /// `n^2 - m2`
    pub a: T,
    /// `n m2 - m3`
    pub b: T,
    /// `m3 A - m2 B`
    pub c: T,
}

impl<T: Scalar> MomentSums<T> {
    pub fn new(sizes: &[T]) -> Self {
        let (mut n, mut m2, mut m3) = (T::zero(), T::zero(), T::zero());
        for &x in sizes {
            n = n + x;
            m2 = m2 + x * x;
            m3 = m3 + x * x * x;
        }
        let a = n * n - m2;
        let b = n * m2 - m3;
        Self { n, m2, m3, a, b, c: m3 * a - m2 * b }
    }

    pub fn from_counts(sizes: &[usize]) -> Self {
        let sizes: Vec<T> = sizes.iter().map(|&s| T::from_count(s)).collect();
        Self::new(&sizes)
    }

    /// The five moment inequalities, in order:
    /// `n^2 >= m2`, `n m2 >= m3`, `n m3 >= m2^2`, `2 m2^2 >= n m3`,
    /// `2 n m2^2 >= n^2 m3 + m2 m3`.
    pub fn inequalities(&self) -> [bool; 5] {
        let Self { n, m2, m3, .. } = *self;
        let two = T::one() + T::one();
        [
            n * n >= m2,
            n * m2 >= m3,
            n * m3 >= m2 * m2,
            two * m2 * m2 >= n * m3,
            two * n * m2 * m2 >= n * n * m3 + m2 * m3,
        ]
    }
}

/// Evaluates the moment inequalities for `group_sizes`; use an integer or
/// rational `T` for an exact check.
pub fn moment_inequalities<T: Scalar>(group_sizes: &[T]) -> [bool; 5] {
    MomentSums::new(group_sizes).inequalities()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_inequality_examples() {
        assert_eq!(moment_inequalities::<i128>(&[1, 2, 3]), [true; 5]);
        let m = MomentSums::<i128>::new(&[5, 5]);
        assert_eq!(m.inequalities(), [true; 5]);
        // Equal sizes make the third inequality tight: n m3 = m2^2.
        assert_eq!(m.n * m.m3, m.m2 * m.m2);
        // A single group makes the first two tight.
        let single = MomentSums::<i128>::new(&[7]);
        assert_eq!(single.a, 0);
        assert_eq!(single.b, 0);
    }

    #[test]
    fn c_identity() {
        // C = m3 A - m2 B = n (n m3 - m2^2)
        let m = MomentSums::<i128>::new(&[3, 8, 1, 5]);
        assert_eq!(m.c, m.n * (m.n * m.m3 - m.m2 * m.m2));
    }

    #[test]
    fn validation() {
        assert!(SbmParams::new(vec![10], 0.2, 0.1).is_err());
        assert!(SbmParams::new(vec![10, 0], 0.2, 0.1).is_err());
        assert!(SbmParams::new(vec![10, 10], 1.2, 0.1).is_err());
        assert!(SbmParams::new(vec![10, 10], 0.2, -0.1).is_err());
        assert!(SbmParams::new(vec![10, 10], 0.2, 0.1).is_ok());
    }
}
