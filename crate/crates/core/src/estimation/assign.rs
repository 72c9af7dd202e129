use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact enumeration up to this many nodes with a possible mediator.
pub const DEFAULT_CAP: usize = 16;
/// Feasible assignments drawn when enumeration is too large.
pub const DEFAULT_SAMPLES: usize = 512;
const ATTEMPTS_PER_SAMPLE: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    Initial,
    Friend,
}

pub type PhaseAssignment = Vec<Phase>;

/// The references of one citing node and the citations among them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescendantGraph {
    /// Whether each reference has the citing node's type.
    pub similar: Vec<bool>,
    /// `mediators[w]`: references citing reference `w`.
    pub mediators: Vec<Vec<usize>>,
}

impl DescendantGraph {
    /// `edges` are `(v, w)` pairs of local indices meaning `v` cites `w`.
    pub fn new(similar: Vec<bool>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = similar.len();
        let mut mediators = vec![Vec::new(); n];
        for &(v, w) in edges {
            if v >= n || w >= n || v == w {
                return Err(Error::InvalidGraph(format!("bad descendant edge ({v}, {w})")));
            }
            mediators[w].push(v);
        }
        for m in &mut mediators {
            m.sort_unstable();
            m.dedup();
        }
        Ok(Self { similar, mediators })
    }

    pub fn len(&self) -> usize {
        self.similar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.similar.is_empty()
    }

    /// Nodes that could be reached through another reference.
    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&w| !self.mediators[w].is_empty()).collect()
    }

    pub fn is_feasible(&self, phi: &[Phase]) -> bool {
        phi.len() == self.len()
            && (0..self.len())
                .all(|w| phi[w] == Phase::Initial || self.mediators[w].iter().any(|&v| phi[v] == Phase::Initial))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FeasibleSet {
    pub assignments: Vec<PhaseAssignment>,
    /// False when the set is a uniform sample with replacement.
    pub exact: bool,
}

fn from_mask(n: usize, free: &[usize], mask: u64) -> PhaseAssignment {
    let mut phi = vec![Phase::Initial; n];
    for (bit, &w) in free.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            phi[w] = Phase::Friend;
        }
    }
    phi
}

/// Feasible phase assignments: exhaustive when at most `cap` nodes have a
/// mediator, otherwise `samples` uniform draws by rejection.
pub fn enumerate_feasible_assignments<R: Rng + ?Sized>(
    g: &DescendantGraph,
    cap: usize,
    samples: usize,
    rng: &mut R,
) -> FeasibleSet {
    let free = g.free_nodes();
    let n = g.len();
    if free.len() <= cap.min(63) {
        let assignments =
            (0..1u64 << free.len()).map(|m| from_mask(n, &free, m)).filter(|phi| g.is_feasible(phi)).collect();
        return FeasibleSet { assignments, exact: true };
    }
    let mut assignments = Vec::with_capacity(samples);
    for _ in 0..samples * ATTEMPTS_PER_SAMPLE {
        if assignments.len() == samples {
            break;
        }
        let mut phi = vec![Phase::Initial; n];
        for &w in &free {
            if rng.gen::<bool>() {
                phi[w] = Phase::Friend;
            }
        }
        if g.is_feasible(&phi) {
            assignments.push(phi);
        }
    }
    if assignments.is_empty() {
        assignments.push(vec![Phase::Initial; n]);
    }
    FeasibleSet { assignments, exact: false }
}

/// Per-node counts implied by an assignment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservedCounts {
    pub n_s: f64,
    pub n_d: f64,
    pub n_fs: f64,
    pub n_fd: f64,
}

impl ObservedCounts {
    pub fn as_array(&self) -> [f64; 4] {
        [self.n_s, self.n_d, self.n_fs, self.n_fd]
    }
}

/// Phase-1 references split by type; each phase-2 reference is shared between
/// `n_fs` and `n_fd` by the type mix of its phase-1 mediators.
pub fn assignment_stats(g: &DescendantGraph, phi: &[Phase]) -> Result<ObservedCounts> {
    if phi.len() != g.len() {
        return Err(Error::Infeasible(format!("assignment covers {} of {} references", phi.len(), g.len())));
    }
    let mut c = ObservedCounts { n_s: 0.0, n_d: 0.0, n_fs: 0.0, n_fd: 0.0 };
    for w in 0..g.len() {
        match phi[w] {
            Phase::Initial if g.similar[w] => c.n_s += 1.0,
            Phase::Initial => c.n_d += 1.0,
            Phase::Friend => {
                let active: Vec<usize> = g.mediators[w].iter().copied().filter(|&v| phi[v] == Phase::Initial).collect();
                if active.is_empty() {
                    return Err(Error::Infeasible(format!("reference {w} has no phase-1 mediator")));
                }
                let similar = active.iter().filter(|&&v| g.similar[v]).count() as f64;
                let share = similar / active.len() as f64;
                c.n_fs += share;
                c.n_fd += 1.0 - share;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;
    use proptest::prelude::*;
    use Phase::{Friend as F, Initial as I};

    fn brute_force(g: &DescendantGraph) -> Vec<PhaseAssignment> {
        let n = g.len();
        (0..1u64 << n)
            .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { F } else { I }).collect::<Vec<_>>())
            .filter(|phi| g.is_feasible(phi))
            .collect()
    }

    fn sorted(mut v: Vec<PhaseAssignment>) -> Vec<PhaseAssignment> {
        v.sort_by_key(|phi| phi.iter().map(|&p| p == F).collect::<Vec<_>>());
        v
    }

    fn enumerate(g: &DescendantGraph) -> FeasibleSet {
        enumerate_feasible_assignments(g, DEFAULT_CAP, DEFAULT_SAMPLES, &mut SeedStream::new(0).stream(0))
    }

    #[test]
    fn chain_of_three_has_three_assignments() {
        // v -> w -> x
        let g = DescendantGraph::new(vec![true, false, false], &[(0, 1), (1, 2)]).unwrap();
        let set = enumerate(&g);
        assert!(set.exact);
        assert_eq!(sorted(set.assignments), sorted(vec![vec![I, I, I], vec![I, F, I], vec![I, I, F]]));
    }

    #[test]
    fn small_cases() {
        let g = DescendantGraph::new(vec![true, true, false], &[]).unwrap();
        assert_eq!(enumerate(&g).assignments, vec![vec![I, I, I]]);
        let g = DescendantGraph::new(vec![true, false], &[(0, 1)]).unwrap();
        assert_eq!(enumerate(&g).assignments.len(), 2);
    }

    #[test]
    fn stats_examples() {
        // Citing node similar to v, dissimilar to w and x.
        let g = DescendantGraph::new(vec![true, false, false], &[(0, 1), (1, 2)]).unwrap();
        let c = assignment_stats(&g, &[I, F, I]).unwrap();
        assert_eq!(c.as_array(), [1.0, 1.0, 1.0, 0.0]);
        let c = assignment_stats(&g, &[I, I, I]).unwrap();
        assert_eq!(c.as_array(), [1.0, 2.0, 0.0, 0.0]);
        let g = DescendantGraph::new(vec![true, false, true], &[(0, 2), (1, 2)]).unwrap();
        let c = assignment_stats(&g, &[I, I, F]).unwrap();
        assert_eq!(c.as_array(), [1.0, 1.0, 0.5, 0.5]);
        assert!(matches!(assignment_stats(&g, &[F, I, I]), Err(Error::Infeasible(_))));
    }

    #[test]
    fn large_sets_are_sampled() {
        let n = 30;
        let edges: Vec<(usize, usize)> = (1..n).map(|w| (0, w)).collect();
        let g = DescendantGraph::new(vec![true; n], &edges).unwrap();
        let set = enumerate(&g);
        assert!(!set.exact);
        assert_eq!(set.assignments.len(), DEFAULT_SAMPLES);
        assert!(set.assignments.iter().all(|phi| g.is_feasible(phi)));
    }

    fn graph_strategy() -> impl Strategy<Value = DescendantGraph> {
        (1usize..=12).prop_flat_map(|n| {
            (prop::collection::vec(any::<bool>(), n), prop::collection::vec((0..n, 0..n), 0..2 * n)).prop_map(
                |(similar, edges)| {
                    let edges: Vec<_> = edges.into_iter().filter(|(a, b)| a != b).collect();
                    DescendantGraph::new(similar, &edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn enumeration_matches_brute_force(g in graph_strategy()) {
            let set = enumerate(&g);
            prop_assert!(set.exact);
            prop_assert_eq!(sorted(set.assignments), sorted(brute_force(&g)));
        }

        #[test]
        fn friend_shares_sum_to_phase_two_count(g in graph_strategy()) {
            for phi in enumerate(&g).assignments {
                let c = assignment_stats(&g, &phi).unwrap();
                let friends = phi.iter().filter(|&&p| p == F).count() as f64;
                prop_assert!((c.n_fs + c.n_fd - friends).abs() < 1e-12);
                prop_assert_eq!(c.n_s + c.n_d + friends, g.len() as f64);
            }
        }
    }
}
