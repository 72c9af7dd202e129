use rand::Rng;
use serde::Serialize;

use super::FixedNodeParams;
use crate::error::{Error, Result};
use crate::graph::TypedGraph;
use crate::rng::{SeedStream, SimRng};
use crate::scalar::Real;

/// Output of [`simulate_fixed_node`].
#[derive(Clone, Debug, Serialize)]
pub struct FixedNodeRun {
    /// Edge shares inside each group, recorded at time 0 and after every `L` iterations.
    pub p11: Vec<f64>,
    pub p22: Vec<f64>,
    #[serde(skip)]
    pub graph: TypedGraph,
    /// Iterations that changed nothing: linked or missing candidate, or rejection.
    pub idle: u64,
    /// Accepted moves whose focal node had no edge to give up.
    pub isolated_focal: u64,
}

impl FixedNodeRun {
    pub fn integration(&self) -> Vec<f64> {
        self.p11.iter().zip(&self.p22).map(|(a, b)| 1.0 - a - b).collect()
    }

    /// Mean integration over the recorded times after dropping the first `burn_in` share.
    pub fn tail_integration(&self, burn_in: f64) -> f64 {
        let f = self.integration();
        let skip = ((f.len() as f64 * burn_in) as usize).min(f.len() - 1);
        let tail = &f[skip..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

/// Undirected graph with `edges` distinct uniform pairs; nodes are numbered group by group.
pub fn random_typed_graph<R: Rng + ?Sized>(group_sizes: &[usize], edges: usize, rng: &mut R) -> Result<TypedGraph> {
    let types: Vec<usize> = group_sizes.iter().enumerate().flat_map(|(k, &s)| std::iter::repeat_n(k, s)).collect();
    let n = types.len();
    if edges > n * n.saturating_sub(1) / 2 {
        return Err(Error::InvalidParams(format!("{edges} edges do not fit on {n} nodes")));
    }
    let mut g = TypedGraph::undirected(types, group_sizes.len().max(1))?;
    while g.edge_count() < edges {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        g.try_add_edge(u, v);
    }
    Ok(g)
}

struct State {
    adj: Vec<Vec<usize>>,
    types: Vec<usize>,
    within: [u64; 2],
    edges: u64,
}

impl State {
    fn linked(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    fn remove(&mut self, u: usize, v: usize) {
        for (a, b) in [(u, v), (v, u)] {
            let pos = self.adj[a].iter().position(|&x| x == b).expect("edge present");
            self.adj[a].swap_remove(pos);
        }
        if self.types[u] == self.types[v] {
            self.within[self.types[u]] -= 1;
        }
    }

    fn add(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
        if self.types[u] == self.types[v] {
            self.within[self.types[u]] += 1;
        }
    }

    fn shares(&self) -> (f64, f64) {
        let l = self.edges as f64;
        (self.within[0] as f64 / l, self.within[1] as f64 / l)
    }

    /// Endpoint of a two-step walk from `u` that does not return to `u`.
    fn walk(&self, u: usize, rng: &mut SimRng) -> Option<usize> {
        let first = &self.adj[u];
        if first.is_empty() {
            return None;
        }
        let mid = first[rng.gen_range(0..first.len())];
        let second = &self.adj[mid];
        if second.len() < 2 {
            return None;
        }
        // Uniform over the neighbors of `mid` other than `u`.
        let at = second.iter().position(|&x| x == u).expect("undirected adjacency");
        let mut pick = rng.gen_range(0..second.len() - 1);
        if pick >= at {
            pick += 1;
        }
        Some(second[pick])
    }
}

/// Runs `iterations` rewiring steps on an undirected two-type graph.
///
/// A walk candidate already linked to the focal node, or a uniform candidate
/// already linked, wastes the iteration. If the focal node is isolated the
/// walk branch falls back to a uniform candidate and, on acceptance, the
/// candidate gives up one of its edges instead.
pub fn simulate_fixed_node<T: Real>(
    initial: &TypedGraph,
    params: &FixedNodeParams<T>,
    iterations: u64,
    seeds: &SeedStream,
) -> Result<FixedNodeRun> {
    params.validate()?;
    if initial.is_directed() || initial.num_types() != 2 {
        return Err(Error::InvalidGraph("the rewiring model needs an undirected graph with 2 types".into()));
    }
    let n = initial.node_count();
    if n < 2 || initial.edge_count() == 0 {
        return Err(Error::InvalidGraph("the rewiring model needs at least 2 nodes and 1 edge".into()));
    }
    let (c, s, s_prime) = (params.c.to_f64_lossy(), params.s.to_f64_lossy(), params.s_prime.to_f64_lossy());
    let mut state = State {
        adj: (0..n).map(|u| initial.out_neighbors(u).to_vec()).collect(),
        types: initial.node_types().to_vec(),
        within: [0, 0],
        edges: initial.edge_count() as u64,
    };
    for (u, v) in initial.edges() {
        if state.types[u] == state.types[v] {
            state.within[state.types[u]] += 1;
        }
    }

    let mut rng = seeds.stream(0);
    let (mut idle, mut isolated_focal) = (0, 0);
    let (a, b) = state.shares();
    let (mut p11, mut p22) = (vec![a], vec![b]);
    for it in 1..=iterations {
        let u = rng.gen_range(0..n);
        let triadic = rng.gen::<f64>() < c && !state.adj[u].is_empty();
        let candidate = if triadic {
            state.walk(u, &mut rng)
        } else {
            let v = rng.gen_range(0..n - 1);
            Some(if v >= u { v + 1 } else { v })
        };
        let accepted = match candidate {
            Some(v) if !state.linked(u, v) => {
                let same = state.types[u] == state.types[v];
                let base = if triadic { s_prime } else { s };
                let prob = if same { base } else { 1.0 - base };
                rng.gen::<f64>() < prob
            }
            _ => false,
        };
        if accepted {
            let v = candidate.expect("accepted moves have a candidate");
            let donor = if state.adj[u].is_empty() {
                isolated_focal += 1;
                v
            } else {
                u
            };
            if state.adj[donor].is_empty() {
                idle += 1;
            } else {
                let w = state.adj[donor][rng.gen_range(0..state.adj[donor].len())];
                state.remove(donor, w);
                state.add(u, v);
            }
        } else {
            idle += 1;
        }
        if it % state.edges == 0 {
            let (a, b) = state.shares();
            p11.push(a);
            p22.push(b);
        }
    }

    let mut graph = TypedGraph::undirected(state.types.clone(), 2)?;
    for (u, nbrs) in state.adj.iter().enumerate() {
        for &v in nbrs.iter().filter(|&&v| v > u) {
            graph.add_edge(u, v)?;
        }
    }
    Ok(FixedNodeRun { p11, p22, graph, idle, isolated_focal })
}
