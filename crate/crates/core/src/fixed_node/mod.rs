//! Fixed-node rewiring model with two groups.
//!
//! Each iteration picks a focal node and a candidate, found by a two-step walk
//! with probability `c` and uniformly otherwise. A monochromatic candidate is
//! accepted with probability `s` (uniform) or `s'` (walk), a bichromatic one
//! with the complements. On acceptance the focal node drops one of its
//! existing edges, so the edge count never changes.

mod meanfield;
mod sim;

pub use meanfield::{find_fixed_points, meanfield_rhs, p_from_t, stable_fixed_point, t_from_p, FixedPoint};
pub use sim::{random_typed_graph, simulate_fixed_node, FixedNodeRun};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedNodeParams<T> {
    /// Probability that the candidate comes from a two-step walk.
    pub c: T,
    /// Acceptance of a monochromatic uniform candidate.
    pub s: T,
    /// Acceptance of a monochromatic walk candidate.
    pub s_prime: T,
    /// Group fractions `(n_1, n_2)`.
    pub n_theta: [T; 2],
}

impl<T: Real> FixedNodeParams<T> {
    /// Equal groups and unbiased closure, `s' = 1/2`.
    pub fn unbiased(c: T, s: T) -> Result<Self> {
        let half = T::lit(0.5);
        let params = Self { c, s, s_prime: half, n_theta: [half, half] };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(self.c) || !unit(self.s) || !unit(self.s_prime) {
            return Err(Error::InvalidParams("c, s and s' must lie in [0, 1]".into()));
        }
        let [a, b] = self.n_theta;
        if !unit(a) || !unit(b) || ((a + b) - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidParams("group fractions must be nonnegative and sum to 1".into()));
        }
        Ok(())
    }
}
