use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cluster_fields, enumerate_feasible_assignments, fit_theta, predict_equilibrium, Dataset, DescendantGraph,
    FieldClusters, FitOptions, FitReport, NodeEvidence, Prediction, DEFAULT_CAP, DEFAULT_SAMPLES,
};
use crate::error::Result;
use crate::rng::SeedStream;

/// Papers whose primary field lies in one cluster, with citations restricted to the cluster.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterData {
    pub fields: Vec<String>,
    /// Dataset index of each member paper.
    pub papers: Vec<usize>,
    /// Index into `fields` of each paper's primary field.
    pub types: Vec<usize>,
    /// Local indices of each paper's in-cluster references.
    pub references: Vec<Vec<usize>>,
}

impl ClusterData {
    pub fn citations(&self) -> usize {
        self.references.iter().map(Vec::len).sum()
    }

    /// Bichromatic share of in-cluster citations.
    pub fn observed_integration(&self) -> f64 {
        let bi: usize = self
            .references
            .iter()
            .enumerate()
            .map(|(u, r)| r.iter().filter(|&&v| self.types[v] != self.types[u]).count())
            .sum();
        bi as f64 / self.citations() as f64
    }

    /// The references of paper `u` and the citations among them.
    pub fn descendant_graph(&self, u: usize) -> DescendantGraph {
        let refs = &self.references[u];
        let local: HashMap<usize, usize> = refs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for (i, &v) in refs.iter().enumerate() {
            for w in &self.references[v] {
                if let Some(&j) = local.get(w) {
                    edges.push((i, j));
                }
            }
        }
        let similar = refs.iter().map(|&v| self.types[v] == self.types[u]).collect();
        DescendantGraph::new(similar, &edges).expect("local indices are in range")
    }

    /// Likelihood evidence of every paper with at least one in-cluster reference, in paper order.
    pub fn evidence(&self, cap: usize, samples: usize, seeds: &SeedStream) -> Result<Vec<NodeEvidence>> {
        (0..self.papers.len())
            .into_par_iter()
            .filter(|&u| !self.references[u].is_empty())
            .map(|u| {
                let g = self.descendant_graph(u);
                let set = enumerate_feasible_assignments(&g, cap, samples, &mut seeds.stream(u as u64));
                NodeEvidence::from_set(&g, &set)
            })
            .collect()
    }
}

pub fn extract_clusters(dataset: &Dataset, clusters: &FieldClusters) -> Vec<ClusterData> {
    let mut out: Vec<ClusterData> = (0..clusters.k)
        .map(|c| ClusterData {
            fields: clusters.members(c).into_iter().map(String::from).collect(),
            papers: Vec::new(),
            types: Vec::new(),
            references: Vec::new(),
        })
        .collect();
    let mut local = vec![(usize::MAX, usize::MAX); dataset.papers.len()];
    for (i, paper) in dataset.papers.iter().enumerate() {
        let field = paper.primary_field();
        let c = clusters.labels[field];
        let data = &mut out[c];
        local[i] = (c, data.papers.len());
        data.types.push(data.fields.iter().position(|f| f == field).expect("field belongs to its cluster"));
        data.papers.push(i);
    }
    for data in &mut out {
        data.references = data
            .papers
            .iter()
            .map(|&i| {
                let c = local[i].0;
                dataset.papers[i].references.iter().filter(|&&r| local[r].0 == c).map(|&r| local[r].1).collect()
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub cluster_k: Option<usize>,
    pub cap: usize,
    pub samples: usize,
    pub fit: FitOptions,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { cluster_k: None, cap: DEFAULT_CAP, samples: DEFAULT_SAMPLES, fit: FitOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub cluster: usize,
    pub fields: Vec<String>,
    pub papers: usize,
    pub usable_nodes: usize,
    pub citations: usize,
    pub observed_integration: f64,
    pub fit: Option<FitReport>,
    pub prediction: Option<Prediction>,
    pub error: Option<String>,
}

/// Clusters the fields, then fits and predicts every cluster.
pub fn estimate(
    dataset: &Dataset,
    options: &EstimateOptions,
    seeds: &SeedStream,
) -> Result<(FieldClusters, Vec<ClusterReport>)> {
    let clusters = cluster_fields(dataset, options.cluster_k, &seeds.child(0))?;
    let reports = extract_clusters(dataset, &clusters)
        .into_iter()
        .enumerate()
        .map(|(c, data)| {
            let cluster_seeds = seeds.child(1 + c as u64);
            let fitted = data
                .evidence(options.cap, options.samples, &cluster_seeds.child(0))
                .and_then(|nodes| fit_theta(&nodes, &options.fit, &cluster_seeds.child(1)).map(|f| (nodes.len(), f)));
            let usable = data.references.iter().filter(|r| !r.is_empty()).count();
            let (fit, prediction, error) = match fitted {
                Ok((_, fit)) => {
                    let p = predict_equilibrium(&fit.theta, data.fields.len());
                    (Some(fit), Some(p), None)
                }
                Err(e) => (None, None, Some(e.to_string())),
            };
            ClusterReport {
                cluster: c,
                papers: data.papers.len(),
                usable_nodes: usable,
                citations: data.citations(),
                observed_integration: data.observed_integration(),
                fields: data.fields,
                fit,
                prediction,
                error,
            }
        })
        .collect();
    Ok((clusters, reports))
}
