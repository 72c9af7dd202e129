use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason, TerminationStatus};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::BFGS;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{cluster_log_likelihood, NodeEvidence, Theta};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Smallest and largest value any component of theta may take.
pub const THETA_BOUNDS: (f64, f64) = (1e-3, 1e3);
const MIN_NODES: usize = 50;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitOptions {
    pub starts: usize,
    /// Start points are log-uniform in this range.
    pub start_range: (f64, f64),
    pub max_iterations: u64,
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { starts: 8, start_range: (0.1, 50.0), max_iterations: 500, tolerance: 1e-8 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StartResult {
    pub start: Theta,
    pub theta: Theta,
    /// Mean negative log-likelihood per node at `theta`.
    pub objective: f64,
    pub iterations: u64,
    pub converged: bool,
    pub termination: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub theta: Theta,
    pub log_likelihood: f64,
    pub nodes: usize,
    pub starts: Vec<StartResult>,
    /// Largest over components of (max / min) across converged starts.
    pub spread: f64,
    /// Components that ended within a factor of 2 of the lower bound.
    pub at_lower_bound: [bool; 4],
    pub warnings: Vec<String>,
}

fn clamp_log(y: f64) -> f64 {
    y.clamp(THETA_BOUNDS.0.ln(), THETA_BOUNDS.1.ln())
}

/// Log-space coordinates; values beyond the bounds map onto them.
fn to_theta(y: &[f64]) -> Theta {
    Theta::from_array(std::array::from_fn(|i| clamp_log(y[i]).exp()))
}

fn to_log(theta: &Theta) -> Vec<f64> {
    theta.as_array().iter().map(|t| clamp_log(t.ln())).collect()
}

struct Objective<'a> {
    nodes: &'a [NodeEvidence],
}

impl Objective<'_> {
    /// Mean negative log-likelihood plus a quadratic penalty outside the bounds.
    fn value(&self, y: &[f64]) -> f64 {
        let ll = cluster_log_likelihood(self.nodes, &to_theta(y)).unwrap_or(f64::NEG_INFINITY);
        let excess: f64 = y.iter().map(|&v| (v - clamp_log(v)).powi(2)).sum();
        -ll / self.nodes.len() as f64 + excess
    }
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, z: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.value(z))
    }
}

impl Gradient for Objective<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, z: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let h = 1e-6;
        Ok((0..z.len())
            .map(|i| {
                let (mut up, mut down) = (z.clone(), z.clone());
                up[i] += h;
                down[i] -= h;
                (self.value(&up) - self.value(&down)) / (2.0 * h)
            })
            .collect())
    }
}

fn run_start(nodes: &[NodeEvidence], start: Theta, options: &FitOptions) -> StartResult {
    let problem = Objective { nodes };
    let y0 = to_log(&start);
    let identity: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let solver = BFGS::new(MoreThuenteLineSearch::new())
        .with_tolerance_grad(options.tolerance)
        .and_then(|s| s.with_tolerance_cost(options.tolerance * 1e-4));
    let outcome = solver.and_then(|solver| {
        Executor::new(problem, solver)
            .configure(|s| s.param(y0.clone()).inv_hessian(identity).max_iters(options.max_iterations))
            .run()
    });
    match outcome {
        Ok(res) => {
            let state = res.state();
            let y = state.get_best_param().cloned().unwrap_or(y0);
            let status = state.get_termination_status().clone();
            let converged = matches!(
                status,
                TerminationStatus::Terminated(
                    TerminationReason::SolverConverged | TerminationReason::TargetCostReached
                )
            );
            StartResult {
                start,
                theta: to_theta(&y),
                objective: state.get_best_cost(),
                iterations: state.get_iter(),
                converged,
                termination: status.to_string(),
            }
        }
        Err(e) => StartResult {
            start,
            theta: start,
            objective: Objective { nodes }.value(&y0),
            iterations: 0,
            converged: false,
            termination: e.to_string(),
        },
    }
}

/// Maximizes the summed log-likelihood from several random starts.
pub fn fit_theta(nodes: &[NodeEvidence], options: &FitOptions, seeds: &SeedStream) -> Result<FitReport> {
    if nodes.len() < MIN_NODES {
        return Err(Error::EmptyDataset(format!("{} usable nodes, at least {MIN_NODES} required", nodes.len())));
    }
    if options.starts == 0 {
        return Err(Error::InvalidParams("at least one start is required".into()));
    }
    let (lo, hi) = (options.start_range.0.ln(), options.start_range.1.ln());
    let starts: Vec<StartResult> = (0..options.starts as u64)
        .map(|i| {
            let mut rng = seeds.stream(i);
            let t: [f64; 4] = std::array::from_fn(|_| (lo + (hi - lo) * rng.gen::<f64>()).exp());
            run_start(nodes, Theta::from_array(t), options)
        })
        .collect();

    let best =
        starts.iter().filter(|s| s.converged).min_by(|a, b| a.objective.total_cmp(&b.objective)).ok_or_else(|| {
            let best = starts.iter().min_by(|a, b| a.objective.total_cmp(&b.objective)).expect("starts is nonempty");
            Error::NotConverged { best_value: best.objective, best_theta: best.theta.as_array() }
        })?;
    let converged: Vec<[f64; 4]> = starts.iter().filter(|s| s.converged).map(|s| s.theta.as_array()).collect();
    let spread = (0..4)
        .map(|i| {
            let max = converged.iter().map(|t| t[i]).fold(f64::MIN, f64::max);
            let min = converged.iter().map(|t| t[i]).fold(f64::MAX, f64::min);
            max / min
        })
        .fold(1.0, f64::max);
    let theta = best.theta;
    let at_lower_bound = theta.as_array().map(|t| t < 2.0 * THETA_BOUNDS.0);
    let mut warnings = Vec::new();
    if at_lower_bound.iter().any(|&b| b) {
        warnings.push(format!("components {at_lower_bound:?} reached the lower bound {}", THETA_BOUNDS.0));
    }
    Ok(FitReport {
        theta,
        log_likelihood: -best.objective * nodes.len() as f64,
        nodes: nodes.len(),
        spread,
        at_lower_bound,
        warnings,
        starts,
    })
}
