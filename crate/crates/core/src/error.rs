use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("integration is undefined for a graph without edges")]
    UndefinedIntegration,
    #[error("graph has no wedge to close")]
    NoWedge,
    #[error("graph has no missing edge")]
    NoMissingEdge,
    #[error("no edges are expected (p = q = 0)")]
    NoEdges,
    #[error("degenerate grouping: at least two non-empty groups are required")]
    DegenerateGrouping,
    #[error("degenerate probability: {0}")]
    DegenerateProbability(String),
    #[error("alpha = {alpha} is outside (1/K, 1) for K = {k}")]
    AlphaOutOfRange { alpha: f64, k: usize },
    #[error("no dominant eigenvalue after {iterations} iterations (residual {residual:e})")]
    NoDominantEigenvalue { iterations: usize, residual: f64 },
    #[error("no stable equilibrium found")]
    NoStableEquilibrium,
    #[error("infeasible phase assignment: {0}")]
    Infeasible(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty dataset: {0}")]
    EmptyDataset(String),
    #[error("optimizer did not converge from any start (best objective {best_value})")]
    NotConverged { best_value: f64, best_theta: [f64; 4] },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
