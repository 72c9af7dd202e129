use rayon::prelude::*;
use serde::Serialize;

use super::{sample_sbm, SbmParams};
use crate::graph::{add_random_edge, close_random_wedge, link_counts, Color};
use crate::rng::SeedStream;
use crate::scalar::Scalar;
use crate::stats::MeanCi;

/// Outcome of one sampled graph: integration changes from one wedge closure
/// and, separately, from one `gamma`-homophilous random edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplicateEffect {
    pub edges: u64,
    pub integration_before: f64,
    pub wedge_color: Color,
    pub edge_color: Color,
    pub delta_tc: f64,
    pub delta_edge: f64,
}

impl ReplicateEffect {
    pub fn relative(&self) -> f64 {
        self.delta_tc - self.delta_edge
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EffectSummary {
    pub absolute: MeanCi,
    pub edge: MeanCi,
    pub relative: MeanCi,
    /// Samples without any edge or wedge, excluded from the intervals.
    pub skipped: usize,
}

fn one_replicate<T: Scalar>(params: &SbmParams<T>, gamma: f64, seeds: &SeedStream, r: u64) -> Option<ReplicateEffect> {
    let mut rng = seeds.stream(r);
    let mut g = sample_sbm(params, &mut rng);
    let (mono, bi) = link_counts(&g);
    let edges = mono + bi;
    if edges == 0 {
        return None;
    }
    let before = bi as f64 / edges as f64;
    let after = |c: Color| (bi + u64::from(c.is_bi())) as f64 / (edges + 1) as f64 - before;

    let closure = close_random_wedge(&mut g, &mut rng).ok()?;
    g.remove_edge(closure.i, closure.j);
    let (_, _, edge_color) = add_random_edge(&mut g, gamma, &mut rng).ok()?;
    Some(ReplicateEffect {
        edges,
        integration_before: before,
        wedge_color: closure.color,
        edge_color,
        delta_tc: after(closure.color),
        delta_edge: after(edge_color),
    })
}

/// Per-replicate effects, in replicate order. Replicate `r` uses stream `r` of `seeds`.
pub fn replicate_effects<T: Scalar + Sync>(
    params: &SbmParams<T>,
    gamma: f64,
    replicates: usize,
    seeds: &SeedStream,
) -> Vec<Option<ReplicateEffect>> {
    (0..replicates as u64).into_par_iter().map(|r| one_replicate(params, gamma, seeds, r)).collect()
}

/// Confidence intervals at quantile `z` for the absolute, baseline and relative effects.
pub fn simulate_effects<T: Scalar + Sync>(
    params: &SbmParams<T>,
    gamma: f64,
    replicates: usize,
    seeds: &SeedStream,
    z: f64,
) -> EffectSummary {
    let effects = replicate_effects(params, gamma, replicates, seeds);
    let kept: Vec<&ReplicateEffect> = effects.iter().flatten().collect();
    let column = |f: fn(&ReplicateEffect) -> f64| kept.iter().map(|e| f(e)).collect::<Vec<_>>();
    EffectSummary {
        absolute: MeanCi::from_samples(&column(|e| e.delta_tc), z),
        edge: MeanCi::from_samples(&column(|e| e.delta_edge), z),
        relative: MeanCi::from_samples(&column(ReplicateEffect::relative), z),
        skipped: effects.len() - kept.len(),
    }
}
