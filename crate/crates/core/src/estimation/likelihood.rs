use rayon::prelude::*;
use serde::Serialize;

use super::{FeasibleSet, ObservedCounts, Theta};
use crate::error::{Error, Result};

/// Distinct observed-count vectors of one node's feasible assignments with their multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodeEvidence {
    pub counts: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

impl NodeEvidence {
    pub fn new(counts: impl IntoIterator<Item = ObservedCounts>) -> Self {
        let mut all: Vec<[f64; 4]> = counts.into_iter().map(|c| c.as_array()).collect();
        all.sort_by(|a, b| {
            a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut evidence = Self { counts: Vec::new(), weights: Vec::new() };
        for c in all {
            if evidence.counts.last() == Some(&c) {
                *evidence.weights.last_mut().expect("parallel vectors") += 1.0;
            } else {
                evidence.counts.push(c);
                evidence.weights.push(1.0);
            }
        }
        evidence
    }

    pub fn from_set(g: &super::DescendantGraph, set: &FeasibleSet) -> Result<Self> {
        let counts = set.assignments.iter().map(|phi| super::assignment_stats(g, phi)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(counts))
    }
}

fn rates(theta: &Theta) -> Result<[f64; 4]> {
    let t = theta.as_array();
    if t.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain(format!("every component of theta must be positive, got {t:?}")));
    }
    Ok(t.map(|x| 1.0 / x))
}

fn log_likelihood_with(evidence: &NodeEvidence, rates: &[f64; 4]) -> f64 {
    let log_norm: f64 = rates.iter().map(|r| r.ln()).sum();
    let exponents: Vec<f64> = evidence
        .counts
        .iter()
        .zip(&evidence.weights)
        .map(|(c, w)| w.ln() - c.iter().zip(rates).map(|(x, r)| x * r).sum::<f64>())
        .collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = evidence.weights.iter().sum();
    log_norm + top + exponents.iter().map(|e| (e - top).exp()).sum::<f64>().ln() - total.ln()
}

/// Log of the mean over feasible assignments of the product of exponential densities.
pub fn node_log_likelihood(evidence: &NodeEvidence, theta: &Theta) -> Result<f64> {
    Ok(log_likelihood_with(evidence, &rates(theta)?))
}

/// Sum of [`node_log_likelihood`] in node order.
pub fn cluster_log_likelihood(nodes: &[NodeEvidence], theta: &Theta) -> Result<f64> {
    let r = rates(theta)?;
    let terms: Vec<f64> = nodes.par_iter().map(|e| log_likelihood_with(e, &r)).collect();
    Ok(terms.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(x: [f64; 4]) -> ObservedCounts {
        ObservedCounts { n_s: x[0], n_d: x[1], n_fs: x[2], n_fd: x[3] }
    }

    const THETA: Theta = Theta { n_s: 6.0, n_d: 2.0, n_fs: 3.0, n_fd: 1.0 };

    #[test]
    fn zero_counts() {
        let e = NodeEvidence::new([counts([0.0; 4])]);
        assert!((node_log_likelihood(&e, &THETA).unwrap() + (36.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn two_assignments_average() {
        let (a, b) = ([2.0, 1.0, 0.0, 0.0], [1.0, 1.0, 0.5, 0.5]);
        let e = NodeEvidence::new([counts(a), counts(b)]);
        let density = |x: [f64; 4]| (-(x[0] / 6.0 + x[1] / 2.0 + x[2] / 3.0 + x[3])).exp() / 36.0;
        let expected = (0.5 * (density(a) + density(b))).ln();
        assert!((node_log_likelihood(&e, &THETA).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn duplicates_keep_their_weight() {
        let (a, b) = ([2.0, 0.0, 0.0, 0.0], [1.0, 0.0, 1.0, 0.0]);
        let merged = NodeEvidence::new([counts(a), counts(a), counts(b)]);
        assert_eq!(merged.weights, vec![1.0, 2.0]);
        let density = |x: [f64; 4]| (-(x[0] / 6.0 + x[2] / 3.0)).exp() / 36.0;
        let expected = ((2.0 * density(a) + density(b)) / 3.0).ln();
        assert!((node_log_likelihood(&merged, &THETA).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn larger_counts_lower_the_likelihood() {
        let base = NodeEvidence::new([counts([2.0, 1.0, 1.0, 0.0]), counts([3.0, 1.0, 0.0, 0.0])]);
        let scaled = NodeEvidence::new([counts([4.0, 2.0, 2.0, 0.0]), counts([6.0, 2.0, 0.0, 0.0])]);
        assert!(node_log_likelihood(&scaled, &THETA).unwrap() < node_log_likelihood(&base, &THETA).unwrap());
    }

    #[test]
    fn nonpositive_theta_is_rejected() {
        let e = NodeEvidence::new([counts([1.0; 4])]);
        for bad in [0.0, -1.0, f64::NAN] {
            let theta = Theta { n_fd: bad, ..THETA };
            assert!(matches!(node_log_likelihood(&e, &theta), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn concave_in_each_rate_for_one_assignment() {
        let e = NodeEvidence::new([counts([3.0, 1.0, 2.0, 0.5])]);
        for i in 0..4 {
            let at = |r: f64| {
                let mut t = THETA.as_array();
                t[i] = 1.0 / r;
                node_log_likelihood(&e, &Theta::from_array(t)).unwrap()
            };
            for r in [0.05, 0.3, 1.0, 4.0] {
                let h = 1e-3 * r;
                assert!(at(r + h) - 2.0 * at(r) + at(r - h) < 0.0);
            }
        }
    }

    #[test]
    fn node_order_does_not_matter() {
        let nodes: Vec<NodeEvidence> =
            (0..200).map(|i| NodeEvidence::new([counts([i as f64 % 7.0, 1.0, (i % 3) as f64, 0.0])])).collect();
        let mut reversed = nodes.clone();
        reversed.reverse();
        let a = cluster_log_likelihood(&nodes, &THETA).unwrap();
        let b = cluster_log_likelihood(&reversed, &THETA).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs());
    }
}
