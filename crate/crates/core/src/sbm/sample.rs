use rand::Rng;

use super::SbmParams;
use crate::graph::TypedGraph;
use crate::scalar::Scalar;

/// Draws an undirected SBM graph. Nodes are numbered group by group.
///
/// Each row of each block is scanned with geometric jumps between successes,
/// drawn by inversion, so the cost is proportional to the number of edges
/// rather than pairs.
pub fn sample_sbm<T: Scalar, R: Rng + ?Sized>(params: &SbmParams<T>, rng: &mut R) -> TypedGraph {
    let sizes = &params.group_sizes;
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let types: Vec<usize> = sizes.iter().enumerate().flat_map(|(k, &s)| std::iter::repeat_n(k, s)).collect();
    let (p, q) = (params.p.to_f64_lossy(), params.q.to_f64_lossy());

    let mut edges = Vec::new();
    for k in 0..sizes.len() {
        for l in k..sizes.len() {
            let prob = if k == l { p } else { q };
            if prob <= 0.0 {
                continue;
            }
            // Failures before the next success: floor(ln U / ln(1 - prob)), U in (0, 1].
            let log_miss = (1.0 - prob.min(1.0)).ln();
            for i in 0..sizes[k] {
                let u = offsets[k] + i;
                let (mut j, end) = if k == l { (i + 1, sizes[k]) } else { (0, sizes[l]) };
                loop {
                    let draw: f64 = 1.0 - rng.gen::<f64>();
                    let skip = (draw.ln() / log_miss).floor();
                    if !(skip < (end - j) as f64) {
                        break;
                    }
                    j += skip as usize;
                    edges.push((u, offsets[l] + j));
                    j += 1;
                }
            }
        }
    }
    TypedGraph::from_edge_vec(types, sizes.len(), false, &edges).expect("sampled edges are simple")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{count_wedges, integration};
    use crate::rng::SeedStream;
    use crate::sbm::exact_expected_counts;
    use crate::stats::MeanCi;

    #[test]
    fn deterministic_limits() {
        let mut rng = SeedStream::new(3).stream(0);
        let g = sample_sbm(&SbmParams::new(vec![3, 3], 1.0, 0.0).unwrap(), &mut rng);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(integration(&g).unwrap().bi_edges, 0);
        assert_eq!(count_wedges(&g).total(), 0);
        let g = sample_sbm(&SbmParams::new(vec![4, 2, 3], 0.0, 0.0).unwrap(), &mut rng);
        assert_eq!(g.edge_count(), 0);
        let g = sample_sbm(&SbmParams::new(vec![4, 2, 3], 1.0, 1.0).unwrap(), &mut rng);
        assert_eq!(g.edge_count(), 36);
    }

    #[test]
    fn edge_counts_match_expectation() {
        let params = SbmParams::new(vec![100, 100], 0.3, 0.1).unwrap();
        let streams = SeedStream::new(11);
        let mut mono = Vec::new();
        let mut bi = Vec::new();
        for r in 0..300 {
            let g = sample_sbm(&params, &mut streams.stream(r));
            let s = integration(&g).unwrap();
            mono.push(s.mono_edges as f64);
            bi.push(s.bi_edges as f64);
        }
        let exact = exact_expected_counts(&params);
        let (m, b) = (MeanCi::from_samples(&mono, 3.0), MeanCi::from_samples(&bi, 3.0));
        assert!(m.contains(exact.e_m), "{m:?} vs {}", exact.e_m);
        assert!(b.contains(exact.e_b), "{b:?} vs {}", exact.e_b);
    }
}
