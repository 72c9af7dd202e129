//! Growing network with random typed attachment followed by friend-of-friend
//! links.
//!
//! Every arrival of type `θ` links to `N_S` uniform nodes of its own type and
//! `N_D` uniform nodes of other types, then to `N_F` out-neighbors of those
//! initial friends: a fraction `α` through similar friends and the rest
//! through dissimilar ones.

mod intervention;
mod sim;
mod theory;

pub use intervention::{
    closed_form_plan, immediate_effect, longterm_effect, optimal_interventions, step_changes, unclamped_regime,
    EffectBreakdown, InterventionPlan, OptimalPlan, PlannerModel, MIN_AGE_TO_WINDOW,
};
pub use sim::{simulate_jr, simulate_with_interventions, JrRun, PairedRun, SeedGraph, Trajectory};
pub use theory::{effect_predicates, equilibrium_integration, integration_at, mono_trajectory, EffectSigns};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JrParams<T> {
    pub k: usize,
    /// Probability of each arrival type.
    pub type_dist: Vec<T>,
    /// Similar initial friends per arrival.
    pub n_s: T,
    /// Dissimilar initial friends per arrival.
    pub n_d: T,
    /// Friend-of-friend links per arrival.
    pub n_f: T,
    /// Share of friend-of-friend links found through similar initial friends.
    pub alpha: T,
}

impl<T: Scalar> JrParams<T> {
    /// Parameters with a uniform type distribution.
    pub fn uniform(k: usize, n_s: T, n_d: T, n_f: T, alpha: T) -> Result<Self> {
        let share = T::one() / T::from_count(k.max(1));
        let params = Self { k, type_dist: vec![share; k], n_s, n_d, n_f, alpha };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("K = {} must be at least 2", self.k)));
        }
        if self.type_dist.len() != self.k {
            return Err(Error::InvalidParams(format!(
                "type distribution has {} entries for K = {}",
                self.type_dist.len(),
                self.k
            )));
        }
        let total = self.type_dist.iter().fold(T::zero(), |a, &b| a + b);
        if self.type_dist.iter().any(|&p| p < T::zero()) || (total.to_f64_lossy() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams("type distribution must be nonnegative and sum to 1".into()));
        }
        if self.n_s < T::zero() || self.n_d < T::zero() || self.n_f < T::zero() {
            return Err(Error::InvalidParams("link counts must be nonnegative".into()));
        }
        if (self.n_s + self.n_d).to_f64_lossy() <= 0.0 {
            return Err(Error::InvalidParams("an arrival needs at least one initial friend".into()));
        }
        if self.alpha < T::zero() || self.alpha > T::one() {
            return Err(Error::InvalidParams(format!("alpha = {:?} must lie in [0, 1]", self.alpha)));
        }
        Ok(())
    }

    /// Errors unless `1/K < alpha < 1`, the range the closed forms assume.
    pub fn check_alpha(&self) -> Result<()> {
        let lower = T::one() / T::from_count(self.k);
        if self.alpha <= lower || self.alpha >= T::one() {
            return Err(Error::AlphaOutOfRange { alpha: self.alpha.to_f64_lossy(), k: self.k });
        }
        Ok(())
    }

    pub fn total_links(&self) -> T {
        self.n_s + self.n_d + self.n_f
    }

    pub fn derived(&self) -> JrDerived<T> {
        let one = T::one();
        let k = T::from_count(self.k);
        let n = self.total_links();
        let initial = self.n_s + self.n_d;
        JrDerived {
            n,
            m_r: initial / n,
            m_s: self.n_f / n,
            d_r: (k * self.n_s / initial - one) / (k - one),
            d_s: (k * self.alpha - one) / (k - one),
        }
    }
}

/// Mixing quantities of the mean-field solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JrDerived<T> {
    pub n: T,
    /// Share of links formed at random.
    pub m_r: T,
    /// Share of links formed through friends.
    pub m_s: T,
    /// Homophily of random links: 1 all similar, 0 type-blind.
    pub d_r: T,
    /// Homophily of the friend-of-friend search.
    pub d_s: T,
}

impl<T: Real> JrDerived<T> {
    /// Exponent `m_s d_s - 1` governing how perturbations decay.
    pub fn decay_exponent(&self) -> T {
        self.m_s * self.d_s - T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn derived_quantities() {
        let p = JrParams::<f64>::uniform(2, 6.0, 2.0, 4.0, 0.75).unwrap();
        let d = p.derived();
        assert_eq!(d.n, 12.0);
        assert!((d.m_r + d.m_s - 1.0).abs() < 1e-15);
        assert!((d.d_r - 0.5).abs() < 1e-15);
        assert!((d.d_s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exact_derived_quantities() {
        let r = |a: i128, b: i128| Ratio::new(a, b);
        let p = JrParams::uniform(3, r(5, 1), r(1, 1), r(3, 1), r(2, 3)).unwrap();
        let d = p.derived();
        assert_eq!(d.m_r + d.m_s, r(1, 1));
        assert_eq!(d.d_r, r(3 * 5 - 6, 6 * 2));
        assert_eq!(d.d_s, r(1, 2));
    }

    #[test]
    fn validation() {
        assert!(JrParams::uniform(1, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(JrParams::uniform(2, 0.0, 0.0, 1.0, 0.75).is_err());
        assert!(JrParams::uniform(2, 1.0, -1.0, 1.0, 0.75).is_err());
        let mut p = JrParams::uniform(2, 1.0, 1.0, 1.0, 0.75).unwrap();
        p.type_dist = vec![0.7, 0.7];
        assert!(p.validate().is_err());
        let p = JrParams::uniform(3, 1.0, 1.0, 1.0, 0.3).unwrap();
        assert!(matches!(p.check_alpha(), Err(Error::AlphaOutOfRange { .. })));
    }
}
