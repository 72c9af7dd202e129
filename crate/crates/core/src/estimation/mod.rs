//! Fitting the growth model to citation data.
//!
//! Each citing paper's references are split into initial and friend-of-friend
//! links by every feasible phase assignment; the per-arrival link counts are
//! modeled as exponential with means `θ = (n_s, n_d, n_fs, n_fd)`, fitted by
//! maximum likelihood, and plugged into the equilibrium formula.

mod assign;
mod cluster;
mod data;
mod fit;
mod likelihood;
mod pipeline;
mod predict;
mod synthetic;

pub use assign::{
    assignment_stats, enumerate_feasible_assignments, DescendantGraph, FeasibleSet, ObservedCounts, Phase,
    PhaseAssignment, DEFAULT_CAP, DEFAULT_SAMPLES,
};
pub use cluster::{cluster_fields, field_graph, FieldClusters};
pub use data::{from_records, ingest, ingest_reader, CitationRecord, Dataset, FieldWeight, IngestOptions, Paper};
pub use fit::{fit_theta, FitOptions, FitReport, StartResult, THETA_BOUNDS};
pub use likelihood::{cluster_log_likelihood, node_log_likelihood, NodeEvidence};
pub use pipeline::{estimate, extract_clusters, ClusterData, ClusterReport, EstimateOptions};
pub use predict::{predict_equilibrium, Prediction};
pub use synthetic::{synthetic_citations, SyntheticData};

use serde::{Deserialize, Serialize};

/// Means of the per-arrival similar, dissimilar, friend-via-similar and
/// friend-via-dissimilar link counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub n_s: f64,
    pub n_d: f64,
    pub n_fs: f64,
    pub n_fd: f64,
}

impl Theta {
    pub fn from_array(t: [f64; 4]) -> Self {
        Self { n_s: t[0], n_d: t[1], n_fs: t[2], n_fd: t[3] }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.n_s, self.n_d, self.n_fs, self.n_fd]
    }

    pub fn n_f(&self) -> f64 {
        self.n_fs + self.n_fd
    }

    /// Share of friend-of-friend links found through similar friends.
    pub fn alpha(&self) -> f64 {
        self.n_fs / self.n_f()
    }
}
