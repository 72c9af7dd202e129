use serde::Serialize;

use super::counts::leading_order;
use super::SbmParams;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::sign::{Sign, RATIO_TOLERANCE};

/// Absolute effect of closing one random wedge on integration.
///
/// Positive when a closed wedge is bichromatic more often than an existing
/// edge, i.e. `w_b / w_m > e_b / e_m`, evaluated on leading-order counts.
pub fn absolute_effect_sign<T: Scalar>(params: &SbmParams<T>) -> Result<Sign> {
    if params.p == T::zero() && params.q == T::zero() {
        return Err(Error::NoEdges);
    }
    let c = leading_order(&params.normalized_moments(), params.p, params.q);
    Ok(Sign::compare(c.w_b * c.e_m, c.e_b * c.w_m, RATIO_TOLERANCE))
}

/// Relative effect of closing a wedge versus adding a `gamma`-homophilous edge:
/// the sign of `w_b / w_m - o_b / (gamma o_m)`.
pub fn gamma_relative_effect_sign<T: Scalar>(params: &SbmParams<T>, gamma: T) -> Result<Sign> {
    if gamma < T::zero() {
        return Err(Error::InvalidParams(format!("gamma must be >= 0, got {gamma:?}")));
    }
    if params.p == T::zero() && params.q == T::zero() {
        return Err(Error::NoEdges);
    }
    let c = leading_order(&params.normalized_moments(), params.p, params.q);
    Ok(Sign::compare(c.w_b * gamma * c.o_m, c.o_b * c.w_m, RATIO_TOLERANCE))
}

/// Band of `p / q` inside which wedge closure beats the `gamma` baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelativeBounds<T> {
    pub lower: T,
    pub upper: T,
    /// Lower bound at `gamma = 1`.
    pub l_star: T,
}

impl<T: Real> RelativeBounds<T> {
    /// Whether `ratio = p / q` lies in the closed band.
    pub fn contains(&self, ratio: T) -> bool {
        self.lower <= ratio && ratio <= self.upper
    }

    /// Signed distance to the nearest boundary: positive inside the band.
    pub fn margin(&self, ratio: T) -> T {
        (ratio - self.lower).min(self.upper - ratio)
    }
}

/// Lower band edge at `gamma = 1`, exact for rational `T`.
pub fn l_star<T: Scalar>(params: &SbmParams<T>) -> Result<T> {
    let m = params.normalized_moments();
    let denom = m.m3 * m.a;
    if denom <= T::zero() {
        return Err(Error::DegenerateGrouping);
    }
    let two = T::one() + T::one();
    Ok((two * m.m2 * m.b - denom) / denom)
}

/// Roots of the quadratic in `p / q` that decides the relative effect.
/// Depends only on the group sizes and `gamma`.
pub fn relative_bounds<T: Real>(params: &SbmParams<T>, gamma: T) -> Result<RelativeBounds<T>> {
    if !(gamma >= T::one()) {
        return Err(Error::InvalidParams(format!("gamma must be >= 1, got {gamma}")));
    }
    let m = params.normalized_moments();
    let denom = m.m3 * m.a;
    if denom <= T::zero() {
        return Err(Error::DegenerateGrouping);
    }
    let g_m2_b = gamma * m.m2 * m.b;
    let disc = (g_m2_b - denom).powi(2) + (gamma - T::one()) * m.n * m.m2 * m.m3 * m.a * m.a;
    let root = disc.sqrt();
    Ok(RelativeBounds { lower: (g_m2_b - root) / denom, upper: (g_m2_b + root) / denom, l_star: l_star(params)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn params(sizes: &[usize], p: f64, q: f64) -> SbmParams<f64> {
        SbmParams::new(sizes.to_vec(), p, q).unwrap()
    }

    #[test]
    fn absolute_effect_examples() {
        assert_eq!(absolute_effect_sign(&params(&[100, 100], 0.2, 0.1)).unwrap(), Sign::Positive);
        assert_eq!(absolute_effect_sign(&params(&[100, 100], 0.15, 0.15)).unwrap(), Sign::Neutral);
        assert_eq!(absolute_effect_sign(&params(&[100, 100], 0.05, 0.2)).unwrap(), Sign::Negative);
        assert!(matches!(absolute_effect_sign(&params(&[100, 100], 0.0, 0.0)), Err(Error::NoEdges)));
    }

    #[test]
    fn exact_rational_neutrality() {
        let r = Ratio::new(3i128, 20);
        let sp = SbmParams::new(vec![17, 40, 3], r, r).unwrap();
        assert_eq!(absolute_effect_sign(&sp).unwrap(), Sign::Neutral);
    }

    #[test]
    fn bounds_at_gamma_one() {
        let b = relative_bounds(&params(&[20, 40], 0.2, 0.1), 1.0).unwrap();
        assert!((b.upper - 1.0).abs() < 1e-12);
        assert!((b.lower - b.l_star).abs() < 1e-12);
    }

    #[test]
    fn balanced_groups_have_unit_l_star() {
        for k in 2..=6 {
            let b = relative_bounds(&params(&vec![50; k], 0.2, 0.1), 2.5).unwrap();
            assert!((b.l_star - 1.0).abs() < 1e-12, "K = {k}: {}", b.l_star);
        }
        let exact = SbmParams::new(vec![7; 4], Ratio::new(1i128, 5), Ratio::new(1, 10)).unwrap();
        assert_eq!(l_star(&exact).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn single_group_is_degenerate() {
        let sp = SbmParams { group_sizes: vec![10], p: 0.2, q: 0.1 };
        assert!(matches!(relative_bounds(&sp, 2.0), Err(Error::DegenerateGrouping)));
        assert!(relative_bounds(&params(&[10, 10], 0.2, 0.1), 0.5).is_err());
    }

    #[test]
    fn upper_bound_grows_with_group_count() {
        let mut last = 0.0;
        for k in 2..=6 {
            let b = relative_bounds(&params(&vec![100; k], 0.2, 0.1), 3.0).unwrap();
            assert!(b.upper >= last, "K = {k}");
            last = b.upper;
        }
    }

    #[test]
    fn bounds_work_in_single_precision() {
        let sp = SbmParams::<f32>::new(vec![20_000, 40_000], 0.2, 0.1).unwrap();
        let b = relative_bounds(&sp, 3.0f32).unwrap();
        let b64 = relative_bounds(&params(&[20_000, 40_000], 0.2, 0.1), 3.0).unwrap();
        assert!((f64::from(b.upper) - b64.upper).abs() < 1e-4 * b64.upper);
        assert!((f64::from(b.lower) - b64.lower).abs() < 1e-4);
    }

    fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(1usize..500, 2..7)
    }

    proptest! {
        #[test]
        fn absolute_sign_follows_homophily(sizes in sizes_strategy(), p in 0.01f64..0.99, q in 0.01f64..0.99) {
            prop_assume!((p - q).abs() > 1e-6);
            let sign = absolute_effect_sign(&params(&sizes, p, q)).unwrap();
            prop_assert_eq!(sign, Sign::of(p - q));
        }

        #[test]
        fn absolute_sign_is_scale_invariant(sizes in sizes_strategy(), scale in 2usize..20, p in 0.01f64..0.99, q in 0.01f64..0.99) {
            let scaled: Vec<usize> = sizes.iter().map(|s| s * scale).collect();
            prop_assert_eq!(
                absolute_effect_sign(&params(&sizes, p, q)).unwrap(),
                absolute_effect_sign(&params(&scaled, p, q)).unwrap()
            );
        }

        #[test]
        fn bounds_bracket_one_and_widen_with_gamma(sizes in sizes_strategy(), g1 in 1.0f64..10.0, dg in 0.0f64..10.0) {
            let sp = params(&sizes, 0.2, 0.1);
            let (a, b) = (relative_bounds(&sp, g1).unwrap(), relative_bounds(&sp, g1 + dg).unwrap());
            prop_assert!(a.lower <= 1.0 + 1e-9 && a.upper >= 1.0 - 1e-9);
            prop_assert!(b.upper >= a.upper - 1e-9);
            prop_assert!(a.l_star <= 1.0 + 1e-9);
        }

        #[test]
        fn band_agrees_with_count_comparison(
            sizes in sizes_strategy(),
            gamma in 1.0f64..6.0,
            q in 0.01f64..0.5,
            ratio in 0.05f64..20.0,
        ) {
            let p = ratio * q;
            prop_assume!(p < 0.99);
            let sp = params(&sizes, p, q);
            let b = relative_bounds(&sp, gamma).unwrap();
            prop_assume!(b.margin(ratio).abs() > 1e-6 * ratio.max(1.0));
            let sign = gamma_relative_effect_sign(&sp, gamma).unwrap();
            let expected = if b.contains(ratio) { Sign::Positive } else { Sign::Negative };
            prop_assert_eq!(sign, expected, "bounds {:?}", b);
        }
    }
}
