//! Node-typed simple graphs, the integration metric and wedge operations.
//!
//! Directed graphs are analysed through their underlying undirected simple
//! graph: an arc pair `u -> v`, `v -> u` is one link, and wedges ignore
//! orientation.

use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the endpoints of an edge (or the outer nodes of a wedge) share a type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Mono,
    Bi,
}

impl Color {
    pub fn is_bi(self) -> bool {
        matches!(self, Color::Bi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypedGraph {
    node_types: Vec<usize>,
    num_types: usize,
    directed: bool,
    // Sorted adjacency lists. For undirected graphs `out` holds every neighbor
    // and `inc` stays empty.
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    edge_count: usize,
}

impl TypedGraph {
    pub fn new(node_types: Vec<usize>, num_types: usize, directed: bool) -> Result<Self> {
        if num_types == 0 {
            return Err(Error::InvalidGraph("K must be at least 1".into()));
        }
        if let Some(t) = node_types.iter().find(|&&t| t >= num_types) {
            return Err(Error::InvalidGraph(format!("type {t} is not below K = {num_types}")));
        }
        let n = node_types.len();
        Ok(Self {
            node_types,
            num_types,
            directed,
            out: vec![Vec::new(); n],
            inc: if directed { vec![Vec::new(); n] } else { Vec::new() },
            edge_count: 0,
        })
    }

    pub fn undirected(node_types: Vec<usize>, num_types: usize) -> Result<Self> {
        Self::new(node_types, num_types, false)
    }

    pub fn directed(node_types: Vec<usize>, num_types: usize) -> Result<Self> {
        Self::new(node_types, num_types, true)
    }

    /// Builds a graph and inserts `edges`, rejecting loops and duplicates.
    pub fn with_edges(
        node_types: Vec<usize>,
        num_types: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Self::new(node_types, num_types, directed)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Bulk construction: adjacency lists are filled first and sorted once.
    pub fn from_edge_vec(
        node_types: Vec<usize>,
        num_types: usize,
        directed: bool,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let mut g = Self::new(node_types, num_types, directed)?;
        for &(u, v) in edges {
            g.check_pair(u, v)?;
            g.out[u].push(v);
            if directed {
                g.inc[v].push(u);
            } else {
                g.out[v].push(u);
            }
        }
        for list in g.out.iter_mut().chain(g.inc.iter_mut()) {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph("duplicate edge in edge list".into()));
            }
        }
        g.edge_count = edges.len();
        Ok(g)
    }

    pub fn add_node(&mut self, node_type: usize) -> Result<usize> {
        if node_type >= self.num_types {
            return Err(Error::InvalidGraph(format!("type {node_type} is not below K = {}", self.num_types)));
        }
        self.node_types.push(node_type);
        self.out.push(Vec::new());
        if self.directed {
            self.inc.push(Vec::new());
        }
        Ok(self.node_types.len() - 1)
    }

    pub fn node_count(&self) -> usize {
        self.node_types.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn num_types(&self) -> usize {
        self.num_types
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_type(&self, u: usize) -> usize {
        self.node_types[u]
    }

    pub fn node_types(&self) -> &[usize] {
        &self.node_types
    }

    pub fn color(&self, u: usize, v: usize) -> Color {
        if self.node_types[u] == self.node_types[v] {
            Color::Mono
        } else {
            Color::Bi
        }
    }

    /// Number of nodes of each type.
    pub fn type_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_types];
        for &t in &self.node_types {
            counts[t] += 1;
        }
        counts
    }

    pub fn nodes_by_type(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_types];
        for (u, &t) in self.node_types.iter().enumerate() {
            groups[t].push(u);
        }
        groups
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        let n = self.node_count();
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) references a node >= {n}")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
        }
        Ok(())
    }

    /// Adds edge `(u, v)`; an arc `u -> v` for directed graphs.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_pair(u, v)?;
        if self.has_arc(u, v) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
        }
        self.insert_unchecked(u, v);
        Ok(())
    }

    /// Adds `(u, v)` unless it is a loop or already present. Returns whether it was added.
    pub fn try_add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_arc(u, v) {
            return false;
        }
        self.insert_unchecked(u, v);
        true
    }

    fn insert_unchecked(&mut self, u: usize, v: usize) {
        insert_sorted(&mut self.out[u], v);
        if self.directed {
            insert_sorted(&mut self.inc[v], u);
        } else {
            insert_sorted(&mut self.out[v], u);
        }
        self.edge_count += 1;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.node_count() || v >= self.node_count() || !remove_sorted(&mut self.out[u], v) {
            return false;
        }
        if self.directed {
            remove_sorted(&mut self.inc[v], u);
        } else {
            remove_sorted(&mut self.out[v], u);
        }
        self.edge_count -= 1;
        true
    }

    /// `u -> v` for directed graphs, `{u, v}` for undirected ones.
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Whether `u` and `v` are adjacent in the underlying undirected graph.
    pub fn linked(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || (self.directed && self.has_arc(v, u))
    }

    /// Out-neighbors (directed) or neighbors (undirected), sorted.
    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out[u]
    }

    /// In-neighbors (directed) or neighbors (undirected), sorted.
    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        if self.directed {
            &self.inc[u]
        } else {
            &self.out[u]
        }
    }

    /// Neighbors in the underlying undirected graph, sorted and distinct.
    pub fn neighbors(&self, u: usize) -> Cow<'_, [usize]> {
        if !self.directed {
            return Cow::Borrowed(&self.out[u]);
        }
        let (a, b) = (&self.out[u], &self.inc[u]);
        let mut merged = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (_, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            merged.push(next);
        }
        Cow::Owned(merged)
    }

    pub fn degree(&self, u: usize) -> usize {
        if self.directed {
            self.neighbors(u).len()
        } else {
            self.out[u].len()
        }
    }

    /// Stored edges: arcs for directed graphs, `u < v` pairs for undirected ones.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(move |(u, nbrs)| {
            nbrs.iter().copied().filter(move |&v| self.directed || u < v).map(move |v| (u, v))
        })
    }

    /// Links of the underlying undirected simple graph as `u < v` pairs.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges().filter_map(move |(u, v)| {
            if !self.directed {
                return Some((u, v));
            }
            if self.has_arc(v, u) && u > v {
                None
            } else {
                Some((u.min(v), u.max(v)))
            }
        })
    }
}

fn insert_sorted(list: &mut Vec<usize>, x: usize) {
    if let Err(pos) = list.binary_search(&x) {
        list.insert(pos, x);
    }
}

fn remove_sorted(list: &mut Vec<usize>, x: usize) -> bool {
    match list.binary_search(&x) {
        Ok(pos) => {
            list.remove(pos);
            true
        }
        Err(_) => false,
    }
}

/// Mono/bichromatic link counts and the fraction of bichromatic links.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EdgeStats {
    pub mono_edges: u64,
    pub bi_edges: u64,
    pub integration: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WedgeStats {
    pub mono_wedges: u64,
    pub bi_wedges: u64,
}

impl WedgeStats {
    pub fn total(&self) -> u64 {
        self.mono_wedges + self.bi_wedges
    }
}

/// Link counts by color, without requiring any link to exist.
pub fn link_counts(g: &TypedGraph) -> (u64, u64) {
    let (mut mono, mut bi) = (0, 0);
    for (u, v) in g.links() {
        match g.color(u, v) {
            Color::Mono => mono += 1,
            Color::Bi => bi += 1,
        }
    }
    (mono, bi)
}

pub fn integration(g: &TypedGraph) -> Result<EdgeStats> {
    let (mono_edges, bi_edges) = link_counts(g);
    let total = mono_edges + bi_edges;
    if total == 0 {
        return Err(Error::UndefinedIntegration);
    }
    Ok(EdgeStats { mono_edges, bi_edges, integration: bi_edges as f64 / total as f64 })
}

/// Counts wedges `(i, h, j)`: one per mediator `h` and unordered unlinked pair `{i, j}`.
pub fn count_wedges(g: &TypedGraph) -> WedgeStats {
    let mut stats = WedgeStats::default();
    for h in 0..g.node_count() {
        let nbrs = g.neighbors(h);
        for (a, &i) in nbrs.iter().enumerate() {
            for &j in &nbrs[a + 1..] {
                if !g.linked(i, j) {
                    match g.color(i, j) {
                        Color::Mono => stats.mono_wedges += 1,
                        Color::Bi => stats.bi_wedges += 1,
                    }
                }
            }
        }
    }
    stats
}

/// Open (unlinked) neighbor pairs at each node.
pub fn open_pairs_per_node(g: &TypedGraph) -> Vec<u64> {
    (0..g.node_count())
        .map(|h| {
            let nbrs = g.neighbors(h);
            let mut open = 0;
            for (a, &i) in nbrs.iter().enumerate() {
                open += nbrs[a + 1..].iter().filter(|&&j| !g.linked(i, j)).count() as u64;
            }
            open
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WedgeClosure {
    pub i: usize,
    pub mediator: usize,
    pub j: usize,
    pub color: Color,
}

const MAX_REJECTIONS: usize = 512;

fn sample_cumulative<R: Rng + ?Sized>(cumulative: &[u64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("non-empty weights");
    let r = rng.gen_range(0..total);
    cumulative.partition_point(|&c| c <= r)
}

fn cumulative(weights: impl Iterator<Item = u64>) -> Vec<u64> {
    weights
        .scan(0u64, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}

/// Closes a wedge drawn uniformly from all wedges `(i, h, j)`.
///
/// A mediator `h` is drawn with weight `C(deg h, 2)` and a neighbor pair
/// uniformly at `h`; linked pairs are rejected. Every wedge is therefore
/// accepted with the same probability. Dense graphs where rejection stalls
/// fall back to exact weighting by open pairs per mediator.
pub fn close_random_wedge<R: Rng + ?Sized>(g: &mut TypedGraph, rng: &mut R) -> Result<WedgeClosure> {
    let (i, h, j) = pick_wedge(g, rng)?;
    g.insert_unchecked(i, j);
    Ok(WedgeClosure { i, mediator: h, j, color: g.color(i, j) })
}

fn pick_wedge<R: Rng + ?Sized>(g: &TypedGraph, rng: &mut R) -> Result<(usize, usize, usize)> {
    let neighbor_lists: Vec<Cow<'_, [usize]>> = (0..g.node_count()).map(|h| g.neighbors(h)).collect();
    let cum = cumulative(neighbor_lists.iter().map(|n| {
        let d = n.len() as u64;
        d * d.saturating_sub(1) / 2
    }));
    if cum.last().copied().unwrap_or(0) == 0 {
        return Err(Error::NoWedge);
    }
    for _ in 0..MAX_REJECTIONS {
        let h = sample_cumulative(&cum, rng);
        let nbrs = &neighbor_lists[h];
        let a = rng.gen_range(0..nbrs.len());
        let mut b = rng.gen_range(0..nbrs.len() - 1);
        if b >= a {
            b += 1;
        }
        let (i, j) = (nbrs[a], nbrs[b]);
        if !g.linked(i, j) {
            return Ok((i.min(j), h, i.max(j)));
        }
    }

    let open = open_pairs_per_node(g);
    let cum = cumulative(open.iter().copied());
    if cum.last().copied().unwrap_or(0) == 0 {
        return Err(Error::NoWedge);
    }
    let h = sample_cumulative(&cum, rng);
    let mut r = rng.gen_range(0..open[h]);
    let nbrs = &neighbor_lists[h];
    for (a, &i) in nbrs.iter().enumerate() {
        for &j in &nbrs[a + 1..] {
            if !g.linked(i, j) {
                if r == 0 {
                    return Ok((i, h, j));
                }
                r -= 1;
            }
        }
    }
    unreachable!("open pair count out of sync with adjacency")
}

/// Adds a missing pair chosen with weight `gamma` if monochromatic and 1 otherwise.
/// `gamma = 1` is the uniform random-edge baseline.
pub fn add_random_edge<R: Rng + ?Sized>(g: &mut TypedGraph, gamma: f64, rng: &mut R) -> Result<(usize, usize, Color)> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("gamma must be finite and >= 0, got {gamma}")));
    }
    let groups = g.nodes_by_type();
    let sizes: Vec<u64> = groups.iter().map(|v| v.len() as u64).collect();
    let n = g.node_count() as u64;
    let mono_pairs: u64 = sizes.iter().map(|&s| s * s.saturating_sub(1) / 2).sum();
    let bi_pairs = n * n.saturating_sub(1) / 2 - mono_pairs;
    let (mono_e, bi_e) = link_counts(g);
    let (o_m, o_b) = (mono_pairs - mono_e, bi_pairs - bi_e);
    let (w_m, w_b) = (gamma * o_m as f64, o_b as f64);
    if w_m + w_b <= 0.0 {
        return Err(Error::NoMissingEdge);
    }
    let color = if rng.gen::<f64>() * (w_m + w_b) < w_m { Color::Mono } else { Color::Bi };

    let mono_cum = cumulative(sizes.iter().map(|&s| s * s.saturating_sub(1) / 2));
    let mut bi_types = Vec::new();
    for k in 0..sizes.len() {
        for l in k + 1..sizes.len() {
            bi_types.push((k, l, sizes[k] * sizes[l]));
        }
    }
    let bi_cum = cumulative(bi_types.iter().map(|t| t.2));

    for _ in 0..MAX_REJECTIONS {
        let (i, j) = match color {
            Color::Mono => {
                let grp = &groups[sample_cumulative(&mono_cum, rng)];
                let a = rng.gen_range(0..grp.len());
                let mut b = rng.gen_range(0..grp.len() - 1);
                if b >= a {
                    b += 1;
                }
                (grp[a], grp[b])
            }
            Color::Bi => {
                let (k, l, _) = bi_types[sample_cumulative(&bi_cum, rng)];
                (groups[k][rng.gen_range(0..groups[k].len())], groups[l][rng.gen_range(0..groups[l].len())])
            }
        };
        if !g.linked(i, j) {
            g.insert_unchecked(i, j);
            return Ok((i, j, color));
        }
    }

    let missing: Vec<(usize, usize)> = (0..g.node_count())
        .flat_map(|i| (i + 1..g.node_count()).map(move |j| (i, j)))
        .filter(|&(i, j)| g.color(i, j) == color && !g.linked(i, j))
        .collect();
    let (i, j) = missing[rng.gen_range(0..missing.len())];
    g.insert_unchecked(i, j);
    Ok((i, j, color))
}
