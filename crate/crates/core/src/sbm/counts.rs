use serde::Serialize;

use super::{MomentSums, SbmParams};
use crate::scalar::Scalar;

/// Expected numbers of edges, missing edges and wedges by color.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedCounts<T> {
    pub e_m: T,
    pub e_b: T,
    pub o_m: T,
    pub o_b: T,
    pub w_m: T,
    pub w_b: T,
}

impl<T: Scalar> ExpectedCounts<T> {
    /// Expected total wedge count `w_m + w_b`.
    pub fn wedges(&self) -> T {
        self.w_m + self.w_b
    }

    pub fn edges(&self) -> T {
        self.e_m + self.e_b
    }
}

/// Leading-order counts, exact up to the dropped lower powers of the group sizes.
pub fn expected_counts<T: Scalar>(params: &SbmParams<T>) -> ExpectedCounts<T> {
    leading_order(&params.moments(), params.p, params.q)
}

pub(crate) fn leading_order<T: Scalar>(m: &MomentSums<T>, p: T, q: T) -> ExpectedCounts<T> {
    let one = T::one();
    let two = one + one;
    let three = two + one;
    let half = T::half();
    let n3 = m.n * m.n * m.n;
    ExpectedCounts {
        e_m: half * p * m.m2,
        e_b: half * q * m.a,
        o_m: half * (one - p) * m.m2,
        o_b: half * (one - q) * m.a,
        w_m: half * p * p * (one - p) * m.m3 + half * q * q * (one - p) * m.b,
        w_b: p * q * (one - q) * m.b + half * q * q * (one - q) * (n3 + two * m.m3 - three * m.n * m.m2),
    }
}

/// Counts with every binomial coefficient kept exactly.
pub fn exact_expected_counts<T: Scalar>(params: &SbmParams<T>) -> ExpectedCounts<T> {
    let (p, q) = (params.p, params.q);
    let one = T::one();
    let two = one + one;
    let sizes: Vec<T> = params.group_sizes.iter().map(|&s| T::from_count(s)).collect();
    let n = sizes.iter().fold(T::zero(), |acc, &s| acc + s);
    let pairs = |s: T| s * (s - one) / two;

    let mut c = ExpectedCounts {
        e_m: T::zero(),
        e_b: T::zero(),
        o_m: T::zero(),
        o_b: T::zero(),
        w_m: T::zero(),
        w_b: T::zero(),
    };
    for (k, &nk) in sizes.iter().enumerate() {
        let mono = pairs(nk);
        c.e_m = c.e_m + mono * p;
        c.o_m = c.o_m + mono * (one - p);
        // Mediator in the same group, or in any other group.
        c.w_m = c.w_m + mono * (one - p) * ((nk - two) * p * p + (n - nk) * q * q);
        for &nl in &sizes[k + 1..] {
            let bi = nk * nl;
            c.e_b = c.e_b + bi * q;
            c.o_b = c.o_b + bi * (one - q);
            // Mediator in either endpoint's group, or in a third group.
            c.w_b = c.w_b + bi * (one - q) * ((nk + nl - two) * p * q + (n - nk - nl) * q * q);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    type Q = Ratio<i128>;

    fn rational(num: i128, den: i128) -> Q {
        Ratio::new(num, den)
    }

    /// Sums existence probabilities over every pair and mediator-pair triple.
    fn brute_force(sizes: &[usize], p: Q, q: Q) -> ExpectedCounts<Q> {
        let types: Vec<usize> = sizes.iter().enumerate().flat_map(|(k, &s)| std::iter::repeat_n(k, s)).collect();
        let n = types.len();
        let prob = |a: usize, b: usize| if types[a] == types[b] { p } else { q };
        let one = Q::from_integer(1);
        let zero = Q::from_integer(0);
        let mut c = ExpectedCounts { e_m: zero, e_b: zero, o_m: zero, o_b: zero, w_m: zero, w_b: zero };
        for i in 0..n {
            for j in i + 1..n {
                let mono = types[i] == types[j];
                let pij = prob(i, j);
                if mono {
                    c.e_m += pij;
                    c.o_m += one - pij;
                } else {
                    c.e_b += pij;
                    c.o_b += one - pij;
                }
                for h in 0..n {
                    if h == i || h == j {
                        continue;
                    }
                    let w = prob(i, h) * prob(h, j) * (one - pij);
                    if mono {
                        c.w_m += w;
                    } else {
                        c.w_b += w;
                    }
                }
            }
        }
        c
    }

    #[test]
    fn exact_matches_brute_force_at_eight_eight() {
        let params = SbmParams::new(vec![8, 8], rational(3, 10), rational(1, 10)).unwrap();
        assert_eq!(exact_expected_counts(&params), brute_force(&[8, 8], params.p, params.q));
    }

    #[test]
    fn exact_small_example() {
        let one = Q::from_integer(1);
        let params = SbmParams::new(vec![2, 2], one, one).unwrap();
        let c = exact_expected_counts(&params);
        assert_eq!(c.e_m, Q::from_integer(2));
        assert_eq!(c.e_b, Q::from_integer(4));
        assert_eq!(c.w_m, Q::from_integer(0));
    }

    #[test]
    fn leading_order_equal_probabilities_preserve_ratio() {
        let params = SbmParams::new(vec![30, 70, 20], rational(3, 20), rational(3, 20)).unwrap();
        let c = expected_counts(&params);
        assert_eq!(c.w_b * c.e_m, c.e_b * c.w_m);
    }

    #[test]
    fn leading_order_is_the_dominant_part_of_exact() {
        let params = SbmParams::<f64>::new(vec![3000, 1000], 0.2, 0.05).unwrap();
        let (lo, ex) = (expected_counts(&params), exact_expected_counts(&params));
        for (a, b) in [(lo.e_m, ex.e_m), (lo.e_b, ex.e_b), (lo.w_m, ex.w_m), (lo.w_b, ex.w_b)] {
            assert!((a - b).abs() / b < 2e-3, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn exact_counts_equal_brute_force(
            sizes in prop::collection::vec(1usize..6, 2..4),
            pn in 0i128..=10,
            qn in 0i128..=10,
        ) {
            let params = SbmParams::new(sizes.clone(), rational(pn, 10), rational(qn, 10)).unwrap();
            prop_assert_eq!(exact_expected_counts(&params), brute_force(&sizes, params.p, params.q));
        }

        #[test]
        fn leading_order_pair_totals(sizes in prop::collection::vec(1i128..200, 2..6), pn in 0i128..=20, qn in 0i128..=20) {
            let m = MomentSums::<Q>::new(&sizes.iter().map(|&s| Q::from_integer(s)).collect::<Vec<_>>());
            let c = leading_order(&m, rational(pn, 20), rational(qn, 20));
            prop_assert_eq!(c.e_m + c.o_m, m.m2 / 2);
            prop_assert_eq!(c.e_b + c.o_b, m.a / 2);
        }
    }
}
