use serde::Serialize;

use super::counts::exact_expected_counts;
use super::SbmParams;
use crate::error::{Error, Result};
use crate::graph::TypedGraph;
use crate::scalar::Real;
use crate::sign::{Sign, RATIO_TOLERANCE};

/// Ratio of mean eigenvector centralities (minority over majority) in a
/// two-group SBM and its first-order change under one wedge closure or one
/// `gamma`-homophilous random edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CentralityReport<T> {
    pub beta: T,
    /// Centrality ratio of the expected adjacency before any edge is added.
    pub ratio_before: T,
    /// First-order change of the ratio from closing a random wedge.
    pub delta_tc: T,
    /// First-order change of the ratio from adding a `gamma`-homophilous edge.
    pub delta_edge: T,
    pub baseline_gamma: T,
    pub c: T,
    /// Wedge closure beats the baseline iff `baseline_gamma > gamma_threshold`.
    pub gamma_threshold: T,
}

impl<T: Real> CentralityReport<T> {
    pub fn absolute_sign(&self) -> Sign {
        Sign::compare(self.delta_tc, T::zero(), RATIO_TOLERANCE)
    }

    pub fn relative_sign(&self) -> Sign {
        Sign::compare(self.baseline_gamma, self.gamma_threshold, RATIO_TOLERANCE)
    }
}

pub fn centrality_analysis<T: Real>(params: &SbmParams<T>, baseline_gamma: T) -> Result<CentralityReport<T>> {
    let &[n1, n2] = params.group_sizes.as_slice() else {
        return Err(Error::InvalidParams("centrality analysis needs exactly two groups".into()));
    };
    if n1 < n2 {
        return Err(Error::InvalidParams(format!("the first group must be the larger one, got {n1} < {n2}")));
    }
    if !(baseline_gamma >= T::one()) {
        return Err(Error::InvalidParams(format!("gamma must be >= 1, got {baseline_gamma}")));
    }
    let (p, q) = (params.p, params.q);
    if q <= T::zero() || q >= T::one() {
        return Err(Error::DegenerateProbability(format!("q = {q} must lie strictly inside (0, 1)")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let (n1, n2) = (T::from_count(n1), T::from_count(n2));
    let n = n1 + n2;
    let diff = n1 - n2;

    let beta = (diff * diff * p * p + four * n1 * n2 * q * q).sqrt();
    let head = beta - diff * p;
    let ratio_before = head / (two * n2 * q);
    let tail = head / (two * q * beta);

    let counts = exact_expected_counts(params);
    let delta_tc = n / counts.wedges() * diff / n2 * (p - q) * p * p * tail;
    let o_gamma = counts.o_b + baseline_gamma * counts.o_m;
    // (1 - p) [p (1 - q) / (q (1 - p)) - gamma], written without dividing by 1 - p.
    let bracket = p * (one - q) / q - baseline_gamma * (one - p);
    let delta_edge = diff / n2 * bracket * tail / o_gamma;

    let cubes = n1 * n1 * n1 + n2 * n2 * n2;
    let cross = n * n1 * n2;
    let c_num = cubes * p * p + cross * q * (two * p + q);
    let c_den = cubes * p * p + cross * (p * (two * q + p) + (one - p) / (one - q) * (q * q - p * p));
    let c = c_num / c_den;

    Ok(CentralityReport { beta, ratio_before, delta_tc, delta_edge, baseline_gamma, c, gamma_threshold: p / q * c })
}

const MAX_POWER_ITERATIONS: usize = 200_000;
const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Mean eigenvector centrality of type-1 nodes over that of type-0 nodes.
///
/// Power iteration runs on `A + I`, which has the same eigenvectors as the
/// adjacency `A` of the underlying undirected graph but no eigenvalue of equal
/// modulus on bipartite components.
pub fn measured_centrality_ratio(g: &TypedGraph) -> Result<f64> {
    let n = g.node_count();
    let counts = g.type_counts();
    if counts.len() < 2 || counts[0] == 0 || counts[1] == 0 {
        return Err(Error::InvalidGraph("both type 0 and type 1 must be present".into()));
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let adjacency: Vec<Vec<usize>> = (0..n).map(|u| g.neighbors(u).into_owned()).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for (u, nbrs) in adjacency.iter().enumerate() {
            y[u] = nbrs.iter().map(|&v| x[v]).sum();
        }
    };
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();

    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut ax = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_POWER_ITERATIONS {
        apply(&x, &mut ax);
        let lambda: f64 = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        residual = x.iter().zip(&ax).map(|(xi, ai)| (ai - lambda * xi).powi(2)).sum::<f64>().sqrt();
        if residual <= RESIDUAL_TOLERANCE * lambda.max(1.0) {
            let mut sums = [0.0; 2];
            for (u, &t) in g.node_types().iter().enumerate() {
                if t < 2 {
                    sums[t] += x[u].abs();
                }
            }
            return Ok((sums[1] / counts[1] as f64) / (sums[0] / counts[0] as f64));
        }
        for (xi, ai) in x.iter_mut().zip(&ax) {
            *xi += ai;
        }
        let s = norm(&x);
        x.iter_mut().for_each(|v| *v /= s);
    }
    Err(Error::NoDominantEigenvalue { iterations: MAX_POWER_ITERATIONS, residual })
}
