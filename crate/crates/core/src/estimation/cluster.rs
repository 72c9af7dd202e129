use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng::SeedStream;

const KMEANS_RESTARTS: u64 = 10;
const KMEANS_ITERATIONS: usize = 100;

#[derive(Clone, Debug, Serialize)]
pub struct FieldClusters {
    pub k: usize,
    /// Normalized-Laplacian spectrum, ascending.
    pub eigenvalues: Vec<f64>,
    /// Cluster of every major field. Clusters are numbered by their first field.
    pub labels: BTreeMap<String, usize>,
}

impl FieldClusters {
    pub fn members(&self, cluster: usize) -> Vec<&str> {
        self.labels.iter().filter(|&(_, &c)| c == cluster).map(|(f, _)| f.as_str()).collect()
    }
}

/// Symmetric field-to-field citation counts, indexed like `dataset.fields`.
pub fn field_graph(dataset: &Dataset) -> DMatrix<f64> {
    let n = dataset.fields.len();
    let index: BTreeMap<&str, usize> = dataset.fields.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
    let mut w = DMatrix::zeros(n, n);
    for paper in &dataset.papers {
        for &r in &paper.references {
            for a in &paper.fields {
                for b in &dataset.papers[r].fields {
                    let (i, j) = (index[a.name.as_str()], index[b.name.as_str()]);
                    w[(i, j)] += 1.0;
                    w[(j, i)] += 1.0;
                }
            }
        }
    }
    w
}

fn components(w: &DMatrix<f64>) -> Vec<usize> {
    let n = w.nrows();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = next;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if label[j] == usize::MAX && (w[(i, j)] > 0.0 || w[(j, i)] > 0.0) {
                    label[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    label
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding; returns labels and inertia.
fn kmeans(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> (Vec<usize>, f64) {
    let mut centers = vec![points[rng.gen_range(0..points.len())].clone()];
    while centers.len() < k {
        let d: Vec<f64> =
            points.iter().map(|p| centers.iter().map(|c| sq_dist(p, c)).fold(f64::INFINITY, f64::min)).collect();
        let total: f64 = d.iter().sum();
        let pick = if total > 0.0 {
            let mut x = rng.gen::<f64>() * total;
            d.iter()
                .position(|&di| {
                    x -= di;
                    x <= 0.0
                })
                .unwrap_or(points.len() - 1)
        } else {
            rng.gen_range(0..points.len())
        };
        centers.push(points[pick].clone());
    }
    let mut labels = vec![0; points.len()];
    for _ in 0..KMEANS_ITERATIONS {
        let mut changed = false;
        for (p, l) in points.iter().zip(labels.iter_mut()) {
            let best = (0..k).min_by(|&a, &b| sq_dist(p, &centers[a]).total_cmp(&sq_dist(p, &centers[b]))).unwrap_or(0);
            changed |= best != *l;
            *l = best;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> =
                points.iter().zip(&labels).filter(|&(_, &l)| l == c).map(|(p, _)| p).collect();
            if !members.is_empty() {
                for (d, x) in center.iter_mut().enumerate() {
                    *x = members.iter().map(|m| m[d]).sum::<f64>() / members.len() as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    (labels, inertia)
}

/// Renumbers labels in order of first appearance.
fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Normalized-Laplacian spectral clustering of the field graph. Without `k`,
/// the number of clusters is the larger of the eigengap choice and the number
/// of connected components.
pub fn cluster_fields(dataset: &Dataset, k: Option<usize>, seeds: &SeedStream) -> Result<FieldClusters> {
    let n = dataset.fields.len();
    if n < 2 {
        return Err(Error::InvalidParams(format!("clustering needs at least 2 major fields, found {n}")));
    }
    if k.is_some_and(|k| k == 0 || k > n) {
        return Err(Error::InvalidParams(format!("cluster count must lie in 1..={n}")));
    }
    let w = field_graph(dataset);
    let degree: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        let scale = (degree[i] * degree[j]).sqrt();
        let off = if scale > 0.0 { w[(i, j)] / scale } else { 0.0 };
        if i == j {
            if degree[i] > 0.0 {
                1.0 - off
            } else {
                0.0
            }
        } else {
            -off
        }
    });
    let eig = SymmetricEigen::new(laplacian);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();

    let comp = components(&w);
    let n_comp = comp.iter().max().map_or(0, |m| m + 1);
    let k = k.unwrap_or_else(|| {
        let gap = (1..n)
            .max_by(|&a, &b| (eigenvalues[a] - eigenvalues[a - 1]).total_cmp(&(eigenvalues[b] - eigenvalues[b - 1])));
        gap.unwrap_or(1).max(n_comp)
    });

    let labels = if k == n_comp {
        comp
    } else if k == 1 {
        vec![0; n]
    } else {
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let row: Vec<f64> = order[..k].iter().map(|&c| eig.eigenvectors[(i, c)]).collect();
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter().map(|x| x / norm).collect()
                } else {
                    row
                }
            })
            .collect();
        (0..KMEANS_RESTARTS)
            .map(|r| kmeans(&points, k, &mut seeds.stream(r)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one restart")
            .0
    };
    let labels = canonical(&labels);
    let k = labels.iter().max().map_or(0, |m| m + 1);
    Ok(FieldClusters { k, eigenvalues, labels: dataset.fields.iter().cloned().zip(labels).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{from_records, CitationRecord, FieldWeight, IngestOptions};
    use rand::Rng;

    /// Papers with one field each; `rate(a, b)` is the chance a paper in field `a` cites one in `b`.
    fn planted(fields: usize, papers_per_field: usize, rate: impl Fn(usize, usize) -> f64, seed: u64) -> Dataset {
        let mut rng = SeedStream::new(seed).stream(0);
        let field_of = |i: usize| i / papers_per_field;
        let n = fields * papers_per_field;
        let records = (0..n)
            .map(|i| CitationRecord {
                id: format!("p{i}"),
                year: 2016,
                fos: vec![FieldWeight { name: format!("f{:02}", field_of(i)), w: 1.0 }],
                references: (0..n)
                    .filter(|&j| j != i && rng.gen::<f64>() < rate(field_of(i), field_of(j)))
                    .map(|j| format!("p{j}"))
                    .collect(),
            })
            .collect();
        from_records(records, &IngestOptions { years: None, min_field_share: 0.0 }, 0).unwrap()
    }

    fn adjusted_rand(a: &[usize], b: &[usize]) -> f64 {
        let choose2 = |x: usize| (x * x.saturating_sub(1) / 2) as f64;
        let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let (mut ra, mut rb) = (BTreeMap::new(), BTreeMap::new());
        for (&x, &y) in a.iter().zip(b) {
            *table.entry((x, y)).or_insert(0) += 1;
            *ra.entry(x).or_insert(0) += 1;
            *rb.entry(y).or_insert(0) += 1;
        }
        let index: f64 = table.values().map(|&v| choose2(v)).sum();
        let sa: f64 = ra.values().map(|&v| choose2(v)).sum();
        let sb: f64 = rb.values().map(|&v| choose2(v)).sum();
        let expected = sa * sb / choose2(a.len());
        (index - expected) / ((sa + sb) / 2.0 - expected)
    }

    #[test]
    fn disconnected_groups_split() {
        let d = planted(4, 30, |a, b| if a / 2 == b / 2 { 0.1 } else { 0.0 }, 1);
        let c = cluster_fields(&d, None, &SeedStream::new(0)).unwrap();
        assert_eq!(c.k, 2);
        assert_eq!(c.members(0), vec!["f00", "f01"]);
        assert_eq!(c.members(1), vec!["f02", "f03"]);
    }

    #[test]
    fn planted_three_blocks_are_recovered() {
        let block = |f: usize| f / 3;
        let d = planted(9, 20, |a, b| if block(a) == block(b) { 0.08 } else { 0.004 }, 2);
        let c = cluster_fields(&d, None, &SeedStream::new(0)).unwrap();
        assert_eq!(c.k, 3);
        let found: Vec<usize> = c.labels.values().copied().collect();
        let truth: Vec<usize> = (0..9).map(block).collect();
        assert_eq!(adjusted_rand(&found, &truth), 1.0);
    }

    #[test]
    fn explicit_k_overrides_eigengap() {
        let block = |f: usize| f / 3;
        let d = planted(9, 20, |a, b| if block(a) == block(b) { 0.08 } else { 0.004 }, 3);
        assert_eq!(cluster_fields(&d, Some(9), &SeedStream::new(0)).unwrap().k, 9);
        assert_eq!(cluster_fields(&d, Some(1), &SeedStream::new(0)).unwrap().k, 1);
        assert!(cluster_fields(&d, Some(10), &SeedStream::new(0)).is_err());
    }
}
