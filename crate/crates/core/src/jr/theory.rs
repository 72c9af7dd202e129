use serde::Serialize;

use super::JrParams;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::sign::{Sign, RATIO_TOLERANCE};

/// Long-run fraction of bichromatic links. Does not depend on the type distribution.
pub fn equilibrium_integration<T: Scalar>(params: &JrParams<T>) -> Result<T> {
    params.check_alpha()?;
    let one = T::one();
    let k = T::from_count(params.k);
    let friends = (one - params.alpha) * params.n_f;
    Ok((params.n_d + friends) / (params.n_s + params.n_d + k / (k - one) * friends))
}

/// Leading-order expected number of monochromatic links after `t` arrivals.
pub fn mono_trajectory<T: Scalar>(params: &JrParams<T>, t: usize) -> Result<T> {
    params.check_alpha()?;
    let one = T::one();
    let k = T::from_count(params.k);
    let d = params.derived();
    let bracket = one / (one - d.m_s) + (k - one) * d.d_r / (one - d.m_s * d.d_s);
    Ok(T::from_count(t) * d.n * d.m_r / k * bracket)
}

/// Integration implied by [`mono_trajectory`] at time `t >= 1`.
pub fn integration_at<T: Scalar>(params: &JrParams<T>, t: usize) -> Result<T> {
    let mono = mono_trajectory(params, t)?;
    Ok(T::one() - mono / (params.total_links() * T::from_count(t)))
}

/// Effects of friend-of-friend linking on long-run integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EffectSigns {
    /// Adding friend-of-friend links on top of fixed initial links.
    pub absolute: Sign,
    /// Replacing initial links by friend-of-friend links at fixed total and fixed `N_S : N_D`.
    pub relative: Sign,
}

pub fn effect_predicates<T: Scalar>(params: &JrParams<T>) -> EffectSigns {
    let one = T::one();
    let k = T::from_count(params.k);
    let absolute = Sign::compare(params.n_s, params.n_d / (k - one), RATIO_TOLERANCE);

    // With b = N_F / N and x = N_S / (N_S + N_D) fixed, the equilibrium is
    // (a0 + a1 b) / (1 + c1 b); its derivative in b has the sign of a1 - a0 c1.
    let x = params.n_s / (params.n_s + params.n_d);
    let a0 = one - x;
    let a1 = x - params.alpha;
    let c1 = (one - k * params.alpha) / (k - one);
    let relative = Sign::compare(a1, a0 * c1, RATIO_TOLERANCE);
    EffectSigns { absolute, relative }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn params(k: usize, n_s: f64, n_d: f64, n_f: f64, alpha: f64) -> JrParams<f64> {
        JrParams::uniform(k, n_s, n_d, n_f, alpha).unwrap()
    }

    #[test]
    fn equilibrium_examples() {
        let f = equilibrium_integration(&params(2, 6.0, 2.0, 4.0, 0.75)).unwrap();
        assert!((f - 0.3).abs() < 1e-15);
        let exact = JrParams::uniform(2, Ratio::from(6i64), Ratio::from(2), Ratio::from(4), Ratio::new(3, 4)).unwrap();
        assert_eq!(equilibrium_integration(&exact).unwrap(), Ratio::new(3, 10));
        let f = equilibrium_integration(&params(2, 3.0, 1.0, 0.0, 0.75)).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
        for n_f in [0.0, 1.0, 7.0] {
            let f = equilibrium_integration(&params(2, 4.0, 4.0, n_f, 0.8)).unwrap();
            assert!((f - 0.5).abs() < 1e-15);
        }
        assert!(matches!(equilibrium_integration(&params(2, 1.0, 1.0, 1.0, 0.5)), Err(Error::AlphaOutOfRange { .. })));
    }

    #[test]
    fn type_distribution_is_irrelevant() {
        let mut p = params(3, 4.0, 2.0, 3.0, 0.6);
        let base = equilibrium_integration(&p).unwrap();
        for dist in [[0.2, 0.3, 0.5], [0.6, 0.3, 0.1], [0.01, 0.01, 0.98]] {
            p.type_dist = dist.to_vec();
            assert_eq!(equilibrium_integration(&p).unwrap(), base);
        }
    }

    #[test]
    fn trajectory_without_friend_links() {
        let p = params(3, 4.0, 2.0, 0.0, 0.6);
        let d = p.derived();
        let per_step = mono_trajectory(&p, 10).unwrap() / 10.0;
        assert!((per_step - d.n * d.m_r * (1.0 + 2.0 * d.d_r) / 3.0).abs() < 1e-12);
        assert!((per_step - 4.0).abs() < 1e-12);
    }

    #[test]
    fn trajectory_limit_is_equilibrium() {
        let p = params(2, 6.0, 2.0, 4.0, 0.75);
        let f = equilibrium_integration(&p).unwrap();
        assert!((integration_at(&p, 1_000_000).unwrap() - f).abs() < 1e-12);
    }

    #[test]
    fn predicate_examples() {
        let s = effect_predicates(&params(2, 3.0, 1.0, 2.0, 0.75));
        assert_eq!((s.absolute, s.relative), (Sign::Positive, Sign::Positive));
        let s = effect_predicates(&params(3, 1.0, 2.0, 2.0, 0.75));
        assert_eq!((s.absolute, s.relative), (Sign::Neutral, Sign::Neutral));
        let s = effect_predicates(&params(2, 1.0, 3.0, 2.0, 0.75));
        assert_eq!((s.absolute, s.relative), (Sign::Negative, Sign::Negative));
    }

    fn strategy() -> impl Strategy<Value = JrParams<f64>> {
        (2usize..6, 0.0f64..8.0, 0.0f64..8.0, 0.0f64..8.0, 0.01f64..0.99).prop_filter_map(
            "valid",
            |(k, n_s, n_d, n_f, t)| {
                let alpha = 1.0 / k as f64 + t * (1.0 - 1.0 / k as f64);
                JrParams::uniform(k, n_s, n_d, n_f, alpha).ok().filter(|p| p.n_s + p.n_d > 0.1)
            },
        )
    }

    proptest! {
        #[test]
        fn absolute_predicate_matches_finite_difference(p in strategy()) {
            let h = 1e-4;
            let mut up = p.clone();
            up.n_f += h;
            let slope = (equilibrium_integration(&up).unwrap() - equilibrium_integration(&p).unwrap()) / h;
            let s = effect_predicates(&p);
            prop_assume!(slope.abs() > 1e-9);
            prop_assert_eq!(s.absolute, Sign::of(slope));
        }

        #[test]
        fn relative_predicate_matches_finite_difference(p in strategy()) {
            // Move links from the initial phase to the friend phase keeping N and N_S : N_D.
            let h = 1e-4;
            let initial = p.n_s + p.n_d;
            prop_assume!(initial > 10.0 * h);
            let mut up = p.clone();
            up.n_s -= h * p.n_s / initial;
            up.n_d -= h * p.n_d / initial;
            up.n_f += h;
            let slope = (equilibrium_integration(&up).unwrap() - equilibrium_integration(&p).unwrap()) / h;
            prop_assume!(slope.abs() > 1e-9);
            prop_assert_eq!(effect_predicates(&p).relative, Sign::of(slope));
        }

        #[test]
        fn decay_exponent_is_negative(p in strategy()) {
            prop_assert!(p.derived().decay_exponent() < 0.0);
        }
    }
}
