use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use super::{CitationRecord, FieldWeight, Theta};
use crate::error::{Error, Result};
use crate::rng::{stochastic_round, SeedStream, SimRng};

#[derive(Clone, Debug, Serialize)]
pub struct SyntheticData {
    pub records: Vec<CitationRecord>,
    /// Bichromatic share of all citations.
    pub observed_integration: f64,
    /// Citations requested but not formed because a pool ran dry.
    pub shortfall: u64,
}

fn draw(pool: &[usize], count: usize, rng: &mut SimRng, linked: &mut Vec<usize>) -> u64 {
    let pool: Vec<usize> = pool.iter().copied().filter(|v| !linked.contains(v)).collect();
    let take = count.min(pool.len());
    linked.extend(sample_indices(rng, pool.len(), take).into_iter().map(|i| pool[i]));
    (count - take) as u64
}

fn friends_of(out: &[Vec<usize>], via: &[usize]) -> Vec<usize> {
    let mut pool: Vec<usize> = via.iter().flat_map(|&v| out[v].iter().copied()).collect();
    pool.sort_unstable();
    pool.dedup();
    pool
}

/// Citation records grown by the two-phase process with per-paper counts
/// drawn from exponentials with means `theta`. Papers get `k` uniform types,
/// one field each, and years spread over 2000..=2019. The first
/// `2 ⌈Σθ⌉` papers form a reference-free seed.
pub fn synthetic_citations(theta: &Theta, k: usize, papers: usize, seeds: &SeedStream) -> Result<SyntheticData> {
    if k < 2 || theta.as_array().iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidParams("need K >= 2 and a positive theta".into()));
    }
    let exp: Vec<Exp<f64>> = theta.as_array().iter().map(|&m| Exp::new(1.0 / m).expect("positive rate")).collect();
    let seed_size = 2 * theta.as_array().iter().sum::<f64>().ceil() as usize;
    if papers <= seed_size {
        return Err(Error::InvalidParams(format!("need more than {seed_size} papers")));
    }
    let mut init = seeds.stream(0);
    let mut types: Vec<usize> = (0..seed_size).map(|_| init.gen_range(0..k)).collect();
    let mut by_type: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (u, &t) in types.iter().enumerate() {
        by_type[t].push(u);
    }
    // Seed papers cite each other so that the first arrivals have friends to follow.
    let mut out: Vec<Vec<usize>> = (0..seed_size).map(|u| (0..seed_size).filter(|&v| v != u).collect()).collect();
    let mut shortfall = 0;
    let (mut bi, mut total) = (0u64, 0u64);

    for u in seed_size..papers {
        let mut rng = seeds.stream(u as u64);
        let theta_u = rng.gen_range(0..k);
        let counts: Vec<usize> =
            exp.iter().map(|d| stochastic_round(d.sample(&mut rng), &mut rng).max(0) as usize).collect();
        let mut linked = Vec::new();
        shortfall += draw(&by_type[theta_u], counts[0], &mut rng, &mut linked);
        let similar = linked.clone();
        let others: Vec<usize> = (0..k).filter(|&t| t != theta_u).flat_map(|t| by_type[t].iter().copied()).collect();
        shortfall += draw(&others, counts[1], &mut rng, &mut linked);
        let dissimilar = linked[similar.len()..].to_vec();
        shortfall += draw(&friends_of(&out, &similar), counts[2], &mut rng, &mut linked);
        shortfall += draw(&friends_of(&out, &dissimilar), counts[3], &mut rng, &mut linked);

        for &v in &linked {
            total += 1;
            bi += u64::from(types[v] != theta_u);
        }
        linked.sort_unstable();
        out.push(linked);
        types.push(theta_u);
        by_type[theta_u].push(u);
    }

    let records = (0..papers)
        .map(|u| CitationRecord {
            id: format!("p{u}"),
            year: 2000 + (20 * u / papers) as i32,
            fos: vec![FieldWeight { name: format!("field{}", types[u]), w: 1.0 }],
            references: if u < seed_size { Vec::new() } else { out[u].iter().map(|v| format!("p{v}")).collect() },
        })
        .collect();
    Ok(SyntheticData { records, observed_integration: bi as f64 / total as f64, shortfall })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_shaped() {
        let theta = Theta { n_s: 6.0, n_d: 2.0, n_fs: 3.0, n_fd: 1.0 };
        let a = synthetic_citations(&theta, 2, 600, &SeedStream::new(3)).unwrap();
        let b = synthetic_citations(&theta, 2, 600, &SeedStream::new(3)).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 600);
        let refs: usize = a.records.iter().map(|r| r.references.len()).sum();
        assert!((refs as f64 / 576.0 - 12.0).abs() < 2.0, "{refs}");
        assert!(a.observed_integration > 0.2 && a.observed_integration < 0.4);
    }
}
