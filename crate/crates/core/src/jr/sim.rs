use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample as sample_indices;
use serde::Serialize;

use super::{InterventionPlan, JrParams};
use crate::error::{Error, Result};
use crate::graph::{link_counts, TypedGraph};
use crate::rng::{stochastic_round, SeedStream, SimRng};
use crate::scalar::Scalar;

/// Starting network for a growth run.
#[derive(Clone, Debug)]
pub enum SeedGraph {
    /// `2N` nodes with types drawn from the type distribution, all pairs linked both ways.
    Complete,
    /// As `Complete`, but only same-type pairs are linked.
    Segregated,
    /// A caller-supplied directed graph.
    Custom(TypedGraph),
}

/// Integration after each arrival. `values[i]` is the value once the network has `start + i` nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub start: usize,
    pub values: Vec<f64>,
}

impl Trajectory {
    /// Integration when the network has `t` nodes.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.start).and_then(|i| self.values.get(i)).copied()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("trajectory always holds the seed value")
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct JrRun {
    pub trajectory: Trajectory,
    pub graph: TypedGraph,
    /// Links that could not be formed because a candidate pool ran dry.
    pub shortfall: u64,
}

/// Baseline and treated runs sharing every random draw.
#[derive(Clone, Debug)]
pub struct PairedRun {
    pub baseline: JrRun,
    pub treated: JrRun,
}

#[derive(Clone)]
struct Grower {
    graph: TypedGraph,
    by_type: Vec<Vec<usize>>,
    mono: u64,
    bi: u64,
    shortfall: u64,
    types: WeightedIndex<f64>,
    n_f: f64,
    alpha: f64,
    trajectory: Trajectory,
}

impl Grower {
    fn new<T: Scalar>(params: &JrParams<T>, seed: &SeedGraph, seeds: &SeedStream) -> Result<Self> {
        params.validate()?;
        let weights: Vec<f64> = params.type_dist.iter().map(|p| p.to_f64_lossy()).collect();
        let types = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParams(e.to_string()))?;
        let graph = match seed {
            SeedGraph::Custom(g) => {
                if !g.is_directed() || g.num_types() != params.k {
                    return Err(Error::InvalidGraph(format!(
                        "seed graph must be directed with K = {} types",
                        params.k
                    )));
                }
                g.clone()
            }
            SeedGraph::Complete | SeedGraph::Segregated => {
                let mut rng = seeds.stream(0);
                let size = (2.0 * params.total_links().to_f64_lossy()).ceil().max(2.0) as usize;
                let node_types: Vec<usize> = (0..size).map(|_| types.sample(&mut rng)).collect();
                let mixed = matches!(seed, SeedGraph::Complete);
                let mut arcs = Vec::new();
                for u in 0..size {
                    for v in 0..size {
                        if u != v && (mixed || node_types[u] == node_types[v]) {
                            arcs.push((u, v));
                        }
                    }
                }
                TypedGraph::from_edge_vec(node_types, params.k, true, &arcs)?
            }
        };
        let (mono, bi) = link_counts(&graph);
        let start = graph.node_count();
        Ok(Self {
            by_type: graph.nodes_by_type(),
            graph,
            mono,
            bi,
            shortfall: 0,
            types,
            n_f: params.n_f.to_f64_lossy(),
            alpha: params.alpha.to_f64_lossy(),
            trajectory: Trajectory { start, values: vec![ratio(bi, mono + bi)] },
        })
    }

    /// Uniform draw of up to `count` members of `pool`, recording any shortfall.
    fn draw(&mut self, pool: &[usize], count: usize, rng: &mut SimRng, into: &mut Vec<usize>) {
        let take = count.min(pool.len());
        self.shortfall += (count - take) as u64;
        into.extend(sample_indices(rng, pool.len(), take).into_iter().map(|i| pool[i]));
    }

    /// Splits `total` into `parts` near-equal integers whose expectations are equal.
    fn split(total: usize, parts: usize, rng: &mut SimRng) -> Vec<usize> {
        let mut shares = vec![total / parts; parts];
        for i in sample_indices(rng, parts, total % parts) {
            shares[i] += 1;
        }
        shares
    }

    /// Union of out-neighbors of `friends`, minus nodes already in `linked`.
    fn pool(&self, friends: &[usize], linked: &[usize]) -> Vec<usize> {
        let mut pool: Vec<usize> = friends.iter().flat_map(|&v| self.graph.out_neighbors(v).iter().copied()).collect();
        pool.sort_unstable();
        pool.dedup();
        pool.retain(|w| !linked.contains(w));
        pool
    }

    fn arrive(&mut self, n_s: f64, n_d: f64, rng: &mut SimRng) {
        let k = self.by_type.len();
        let theta = self.types.sample(rng);
        let n_s = stochastic_round(n_s, rng).max(0) as usize;
        let n_d = stochastic_round(n_d, rng).max(0) as usize;
        let n_f = stochastic_round(self.n_f, rng).max(0) as usize;

        let mut similar = Vec::new();
        let same_type = std::mem::take(&mut self.by_type[theta]);
        self.draw(&same_type, n_s, rng, &mut similar);
        self.by_type[theta] = same_type;

        let mut dissimilar = Vec::new();
        let others: Vec<usize> = (0..k).filter(|&l| l != theta).collect();
        for (l, share) in others.iter().zip(Self::split(n_d, k - 1, rng)) {
            let group = std::mem::take(&mut self.by_type[*l]);
            self.draw(&group, share, rng, &mut dissimilar);
            self.by_type[*l] = group;
        }

        let mut linked: Vec<usize> = similar.iter().chain(&dissimilar).copied().collect();
        let via_similar = stochastic_round(self.alpha * n_f as f64, rng).clamp(0, n_f as i64) as usize;
        let pool = self.pool(&similar, &linked);
        let mut found = Vec::new();
        self.draw(&pool, via_similar, rng, &mut found);
        linked.append(&mut found);

        let rest = n_f - via_similar;
        if dissimilar.is_empty() {
            self.shortfall += rest as u64;
        } else {
            for (i, share) in Self::split(rest, dissimilar.len(), rng).into_iter().enumerate() {
                let pool = self.pool(&dissimilar[i..=i], &linked);
                self.draw(&pool, share, rng, &mut found);
                linked.append(&mut found);
            }
        }

        let u = self.graph.add_node(theta).expect("type drawn from the distribution");
        for &v in &linked {
            self.graph.add_edge(u, v).expect("targets are distinct existing nodes");
            if self.graph.node_type(v) == theta {
                self.mono += 1;
            } else {
                self.bi += 1;
            }
        }
        self.by_type[theta].push(u);
        self.trajectory.values.push(ratio(self.bi, self.mono + self.bi));
    }

    fn grow_to(&mut self, t_max: usize, seeds: &SeedStream, mut counts: impl FnMut(usize) -> (f64, f64)) {
        while self.graph.node_count() < t_max {
            let t = self.graph.node_count() + 1;
            let mut rng = seeds.stream(t as u64);
            let (n_s, n_d) = counts(t);
            self.arrive(n_s, n_d, &mut rng);
        }
    }

    fn finish(self) -> JrRun {
        JrRun { trajectory: self.trajectory, graph: self.graph, shortfall: self.shortfall }
    }
}

fn ratio(bi: u64, total: u64) -> f64 {
    if total == 0 {
        f64::NAN
    } else {
        bi as f64 / total as f64
    }
}

/// Grows the network until it has `t_max` nodes. Arrival `t` (the node that
/// brings the count to `t`) draws from stream `t` of `seeds`.
pub fn simulate_jr<T: Scalar>(
    params: &JrParams<T>,
    t_max: usize,
    seeds: &SeedStream,
    seed_graph: &SeedGraph,
) -> Result<JrRun> {
    let mut grower = Grower::new(params, seed_graph, seeds)?;
    let (n_s, n_d) = (params.n_s.to_f64_lossy(), params.n_d.to_f64_lossy());
    grower.grow_to(t_max, seeds, |_| (n_s, n_d));
    Ok(grower.finish())
}

/// Runs the baseline and the plan's treatment from a shared history up to `T`.
/// Arrival `T + i` of the treated run uses `N_S + ΔN_S` similar and `N_D - ΔN_S`
/// dissimilar initial friends.
pub fn simulate_with_interventions<T: Scalar>(
    params: &JrParams<T>,
    plan: &InterventionPlan<T>,
    t_max: usize,
    seeds: &SeedStream,
    seed_graph: &SeedGraph,
) -> Result<PairedRun> {
    plan.validate(params)?;
    let mut baseline = Grower::new(params, seed_graph, seeds)?;
    if plan.t < baseline.graph.node_count() {
        return Err(Error::InvalidParams(format!(
            "intervention age {} precedes the seed size {}",
            plan.t,
            baseline.graph.node_count()
        )));
    }
    let (n_s, n_d) = (params.n_s.to_f64_lossy(), params.n_d.to_f64_lossy());
    baseline.grow_to(plan.t, seeds, |_| (n_s, n_d));
    let mut treated = baseline.clone();
    baseline.grow_to(t_max, seeds, |_| (n_s, n_d));
    let deltas: Vec<f64> = plan.delta_ns.iter().map(|d| d.to_f64_lossy()).collect();
    treated.grow_to(t_max, seeds, |t| match deltas.get(t - plan.t - 1) {
        Some(&d) => (n_s + d, n_d - d),
        None => (n_s, n_d),
    });
    Ok(PairedRun { baseline: baseline.finish(), treated: treated.finish() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::integration;

    #[test]
    fn phase_one_only_converges_to_split() {
        let p = JrParams::uniform(2, 3.0, 1.0, 0.0, 0.75).unwrap();
        let run = simulate_jr(&p, 4000, &SeedStream::new(1), &SeedGraph::Segregated).unwrap();
        assert!((run.trajectory.last() - 0.25).abs() < 0.02, "{}", run.trajectory.last());
        // Only the first few arrivals can find a type group smaller than N_S.
        assert!(run.shortfall < 20, "{}", run.shortfall);
        assert_eq!(run.graph.node_count(), 4000);
    }

    #[test]
    fn trajectory_matches_graph_and_is_reproducible() {
        let p = JrParams::uniform(3, 2.0, 2.0, 3.0, 0.6).unwrap();
        let seeds = SeedStream::new(9);
        let a = simulate_jr(&p, 500, &seeds, &SeedGraph::Complete).unwrap();
        let b = simulate_jr(&p, 500, &seeds, &SeedGraph::Complete).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.trajectory.last(), integration(&a.graph).unwrap().integration);
        assert_eq!(a.trajectory.at(500), Some(a.trajectory.last()));
        assert_eq!(a.trajectory.end(), 500);
    }

    #[test]
    fn every_arrival_forms_its_links() {
        let p = JrParams::uniform(2, 2.0, 1.0, 3.0, 0.75).unwrap();
        let run = simulate_jr(&p, 300, &SeedStream::new(2), &SeedGraph::Complete).unwrap();
        let seed_nodes = run.trajectory.start;
        for u in seed_nodes..300 {
            assert!(run.graph.out_neighbors(u).iter().all(|&v| v < u));
        }
        let formed: usize = (seed_nodes..300).map(|u| run.graph.out_neighbors(u).len()).sum();
        assert_eq!(formed as u64 + run.shortfall, 6 * (300 - seed_nodes) as u64);
    }

    #[test]
    fn zero_plan_reproduces_baseline() {
        let p = JrParams::uniform(2, 6.0, 2.0, 4.0, 0.75).unwrap();
        let plan = InterventionPlan::constant(200, 10, 0.0);
        let pair = simulate_with_interventions(&p, &plan, 400, &SeedStream::new(4), &SeedGraph::Complete).unwrap();
        assert_eq!(pair.baseline.trajectory, pair.treated.trajectory);
        let plan = InterventionPlan::constant(200, 10, -2.0);
        let pair = simulate_with_interventions(&p, &plan, 400, &SeedStream::new(4), &SeedGraph::Complete).unwrap();
        assert_eq!(pair.baseline.trajectory.at(200), pair.treated.trajectory.at(200));
        assert!(pair.treated.trajectory.at(210) > pair.baseline.trajectory.at(210));
    }
}
