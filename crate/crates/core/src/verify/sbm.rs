use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Cell, Experiment, Table, VerifyOptions};
use crate::error::Result;
use crate::graph::{count_wedges, link_counts};
use crate::rng::SeedStream;
use crate::sbm::{
    absolute_effect_sign, centrality_analysis, exact_expected_counts, gamma_relative_effect_sign, l_star,
    relative_bounds, sample_sbm, simulate_effects, ExpectedCounts, MomentSums, RelativeBounds, SbmParams,
};
use crate::sign::Sign;
use crate::stats::{MeanCi, Z99};

type Q = Ratio<i128>;

pub(crate) fn sign_label(s: Sign) -> &'static str {
    match s {
        Sign::Negative => "negative",
        Sign::Neutral => "neutral",
        Sign::Positive => "positive",
    }
}

fn resolved_label(ci: &MeanCi) -> &'static str {
    match ci.resolved_sign() {
        Some(x) if x > 0.0 => "positive",
        Some(_) => "negative",
        None => "unresolved",
    }
}

/// Mean integration change from one wedge closure at two homophilous,
/// two heterophilous and one neutral setting.
pub fn sbm_absolute_effect(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed);
    let replicates = options.scale.pick(20_000usize, 400);
    let sizes = vec![200, 200];
    let mut exp = Experiment::new("sbm absolute effect");
    let mut table = Table::new(
        "absolute-effect",
        &["p", "q", "replicates", "skipped", "predicted", "mean", "ci_lower", "ci_upper", "observed"],
    );
    for (i, (p, q)) in [(0.2, 0.1), (0.1, 0.2), (0.15, 0.15)].into_iter().enumerate() {
        let params = SbmParams::new(sizes.clone(), p, q)?;
        let predicted = absolute_effect_sign(&params)?;
        let summary = simulate_effects(&params, 1.0, replicates, &seeds.child(i as u64), Z99);
        let ci = summary.absolute;
        let ok = match predicted {
            Sign::Neutral => ci.contains(0.0),
            s => ci.resolved_sign() == Some(if s == Sign::Positive { 1.0 } else { -1.0 }),
        };
        exp.check(
            format!("p={p} q={q}"),
            ok,
            format!("predicted {}, 99% CI [{:.3e}, {:.3e}]", sign_label(predicted), ci.lower(), ci.upper()),
        );
        table.push(vec![
            p.into(),
            q.into(),
            replicates.into(),
            summary.skipped.into(),
            sign_label(predicted).into(),
            ci.mean.into(),
            ci.lower().into(),
            ci.upper().into(),
            resolved_label(&ci).into(),
        ]);
    }
    exp.tables.push(table);
    Ok(exp)
}

/// Edge and wedge expectations summed pair by pair and mediator by mediator.
fn brute_force_counts(sizes: &[usize], p: Q, q: Q) -> ExpectedCounts<Q> {
    let types: Vec<usize> = sizes.iter().enumerate().flat_map(|(k, &s)| std::iter::repeat_n(k, s)).collect();
    let n = types.len();
    let one = Q::from_integer(1);
    let prob = |i: usize, j: usize| if types[i] == types[j] { p } else { q };
    let zero = Q::from_integer(0);
    let mut c = ExpectedCounts { e_m: zero, e_b: zero, o_m: zero, o_b: zero, w_m: zero, w_b: zero };
    for i in 0..n {
        for j in i + 1..n {
            let pij = prob(i, j);
            let wedges =
                (0..n).filter(|&h| h != i && h != j).fold(zero, |acc, h| acc + prob(i, h) * prob(h, j) * (one - pij));
            if types[i] == types[j] {
                c.e_m += pij;
                c.o_m += one - pij;
                c.w_m += wedges;
            } else {
                c.e_b += pij;
                c.o_b += one - pij;
                c.w_b += wedges;
            }
        }
    }
    c
}

/// Exact finite-size expectations against sampled graphs and a brute-force sum.
pub fn sbm_expected_counts(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed);
    let samples = options.scale.pick(1000usize, 100);
    let params = SbmParams::new(vec![100, 100], 0.2, 0.1)?;
    let exact = exact_expected_counts(&params);
    let draws: Vec<[f64; 4]> = (0..samples as u64)
        .into_par_iter()
        .map(|r| {
            let g = sample_sbm(&params, &mut seeds.stream(r));
            let (mono, bi) = link_counts(&g);
            let w = count_wedges(&g);
            [mono as f64, bi as f64, w.mono_wedges as f64, w.bi_wedges as f64]
        })
        .collect();

    let mut exp = Experiment::new("sbm expected counts");
    let mut table = Table::new("expected-counts", &["quantity", "exact", "mc_mean", "mc_std_err", "z"]);
    let targets = [("e_m", exact.e_m), ("e_b", exact.e_b), ("w_m", exact.w_m), ("w_b", exact.w_b)];
    for (idx, (name, value)) in targets.into_iter().enumerate() {
        let column: Vec<f64> = draws.iter().map(|d| d[idx]).collect();
        let ci = MeanCi::from_samples(&column, Z99);
        let z = ci.z_score(value);
        exp.check(
            format!("{name} within 3 sigma"),
            z <= 3.0,
            format!("exact {value:.4}, mean {:.4}, z {z:.2}", ci.mean),
        );
        table.push(vec![name.into(), value.into(), ci.mean.into(), ci.std_err.into(), z.into()]);
    }

    let (p, q) = (Q::new(1, 5), Q::new(1, 10));
    let small = SbmParams::new(vec![8, 8], p, q)?;
    let closed = exact_expected_counts(&small);
    let brute = brute_force_counts(&small.group_sizes, p, q);
    exp.check("exact counts equal brute force at [8, 8]", closed == brute, format!("closed {closed:?}"));
    exp.tables.push(table);
    Ok(exp)
}

/// One simulated point of the relative-effect sweep.
#[derive(Clone, Debug, Serialize)]
pub struct BandPoint {
    pub gamma: f64,
    pub p_over_q: f64,
    pub bounds: RelativeBounds<f64>,
    pub predicted: Sign,
    /// Wedge-closure gain minus `gamma`-edge gain.
    pub effect: MeanCi,
}

impl BandPoint {
    /// False only when the interval excludes zero on the side opposite to the prediction.
    pub fn agrees(&self) -> bool {
        self.effect.resolved_sign().is_none_or(|s| Sign::of(s) == self.predicted)
    }
}

/// Simulates every `(gamma, p / q)` pair at fixed `q`; point `i` in row-major
/// order uses `seeds.child(i)`. Ratios with `p > 1` are skipped.
pub fn relative_band_sweep(
    sizes: &[usize],
    q: f64,
    ratios: &[f64],
    gammas: &[f64],
    replicates: usize,
    seeds: &SeedStream,
) -> Result<Vec<BandPoint>> {
    let mut out = Vec::new();
    let mut stream = 0u64;
    for &gamma in gammas {
        for &ratio in ratios.iter().filter(|&&r| r * q <= 1.0) {
            let params = SbmParams::new(sizes.to_vec(), ratio * q, q)?;
            let bounds = relative_bounds(&params, gamma)?;
            let predicted = gamma_relative_effect_sign(&params, gamma)?;
            let effect = simulate_effects(&params, gamma, replicates, &seeds.child(stream), Z99).relative;
            stream += 1;
            out.push(BandPoint { gamma, p_over_q: ratio, bounds, predicted, effect });
        }
    }
    Ok(out)
}

pub fn band_table(points: &[BandPoint]) -> Table {
    let mut table = Table::new(
        "relative-band",
        &["gamma", "p_over_q", "lower", "upper", "sim_effect_mean", "sim_effect_ci", "predicted", "observed", "agrees"],
    );
    for pt in points {
        table.push(vec![
            pt.gamma.into(),
            pt.p_over_q.into(),
            pt.bounds.lower.into(),
            pt.bounds.upper.into(),
            pt.effect.mean.into(),
            pt.effect.half_width.into(),
            sign_label(pt.predicted).into(),
            resolved_label(&pt.effect).into(),
            pt.agrees().into(),
        ]);
    }
    table
}

/// Wedge closure against a `gamma`-homophilous random edge over a `p / q` grid.
pub fn sbm_relative_band(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed);
    let replicates = options.scale.pick(3000usize, 150);
    let ratios = [0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 18.0];
    let points = relative_band_sweep(&[100, 200], 0.04, &ratios, &[1.0, 2.0, 3.0, 4.0], replicates, &seeds)?;

    let mut exp = Experiment::new("sbm relative band");
    let resolved = points.iter().filter(|p| p.effect.resolved_sign().is_some()).count();
    let disagreements: Vec<String> =
        points.iter().filter(|p| !p.agrees()).map(|p| format!("gamma={} p/q={}", p.gamma, p.p_over_q)).collect();
    exp.check(
        "resolved points agree with the band",
        disagreements.is_empty(),
        format!("{resolved} of {} points resolved; disagreements: [{}]", points.len(), disagreements.join("; ")),
    );

    let mut exact_unit = true;
    for k in 2..=6 {
        for n in [1usize, 7, 250] {
            let balanced = SbmParams::new(vec![n; k], Q::new(1, 5), Q::new(1, 10))?;
            exact_unit &= l_star(&balanced)? == Q::from_integer(1);
        }
    }
    exp.check("balanced groups have l* = 1 exactly", exact_unit, "K = 2..6, n_k in {1, 7, 250}");
    exp.tables.push(band_table(&points));
    Ok(exp)
}

/// Minority-over-majority ratio of the dominant eigenvector of the expected
/// adjacency (zero diagonal).
fn dense_ratio(n1: usize, n2: usize, p: f64, q: f64) -> f64 {
    let n = n1 + n2;
    let m = DMatrix::from_fn(n, n, |i, j| match (i == j, (i < n1) == (j < n1)) {
        (true, _) => 0.0,
        (false, true) => p,
        (false, false) => q,
    });
    let eig = SymmetricEigen::new(m);
    let v = eig.eigenvectors.column(eig.eigenvalues.imax());
    let mean = |r: std::ops::Range<usize>| r.clone().map(|i| v[i].abs()).sum::<f64>() / r.len() as f64;
    mean(n1..n) / mean(0..n1)
}

/// Closed-form centrality ratio against a dense eigensolver, and the sign
/// and threshold properties over a `(p, q)` grid.
pub fn sbm_centrality(options: &VerifyOptions) -> Result<Experiment> {
    let (n1, n2) = options.scale.pick((750, 250), (150, 50));
    let mut exp = Experiment::new("sbm centrality");
    let mut ratios = Table::new("centrality-ratio", &["n1", "n2", "p", "q", "closed_form", "dense", "rel_error"]);
    for (p, q) in [(0.2, 0.1), (0.1, 0.2)] {
        let report = centrality_analysis(&SbmParams::new(vec![n1, n2], p, q)?, 1.0)?;
        let dense = dense_ratio(n1, n2, p, q);
        let err = (report.ratio_before - dense).abs() / dense;
        exp.check(
            format!("ratio within 1% at p={p} q={q}"),
            err <= 0.01,
            format!("closed {:.6}, dense {dense:.6}", report.ratio_before),
        );
        ratios.push(vec![
            n1.into(),
            n2.into(),
            p.into(),
            q.into(),
            report.ratio_before.into(),
            dense.into(),
            err.into(),
        ]);
    }

    let grid = [0.05, 0.1, 0.2, 0.35, 0.5];
    let mut signs = Table::new("centrality-grid", &["p", "q", "delta_tc", "c", "p_over_q_times_c"]);
    let (mut sign_ok, mut c_ok, mut threshold_ok) = (true, true, true);
    for &p in &grid {
        for &q in &grid {
            let r = centrality_analysis(&SbmParams::new(vec![n1, n2], p, q)?, 1.0)?;
            sign_ok &= r.absolute_sign() == Sign::of(p - q);
            c_ok &= r.c <= 1.0 + 1e-12;
            threshold_ok &= (r.gamma_threshold > 1.0) == (p > q);
            signs.push(vec![p.into(), q.into(), r.delta_tc.into(), r.c.into(), r.gamma_threshold.into()]);
        }
    }
    exp.check("closure correction has the sign of p - q", sign_ok, "5 x 5 grid");
    exp.check("c(p, q) <= 1", c_ok, "5 x 5 grid");
    exp.check("(p/q) c(p, q) > 1 iff p > q", threshold_ok, "5 x 5 grid");
    exp.tables.push(ratios);
    exp.tables.push(signs);
    Ok(exp)
}

/// The five moment inequalities on random integer size vectors, in exact arithmetic.
pub fn moment_inequality_suite(options: &VerifyOptions) -> Result<Experiment> {
    let vectors = options.scale.pick(10_000usize, 1000);
    let mut rng = SeedStream::new(options.seed).stream(0);
    let mut violations = [0usize; 5];
    let mut first_violation = None;
    for _ in 0..vectors {
        let k = rng.gen_range(1..=8);
        let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=1000)).collect();
        let holds = MomentSums::<i128>::from_counts(&sizes).inequalities();
        for (v, ok) in violations.iter_mut().zip(holds) {
            if !ok {
                *v += 1;
                first_violation.get_or_insert_with(|| sizes.clone());
            }
        }
    }
    let mut exp = Experiment::new("moment inequalities");
    let mut table = Table::new("moment-inequalities", &["inequality", "vectors", "violations"]);
    for (i, &v) in violations.iter().enumerate() {
        table.push(vec![Cell::from(i + 1), vectors.into(), v.into()]);
    }
    exp.check(
        "all five inequalities hold",
        violations.iter().all(|&v| v == 0),
        match first_violation {
            None => format!("{vectors} vectors, K <= 8, n_k <= 1000"),
            Some(s) => format!("violated by {s:?}"),
        },
    );
    exp.tables.push(table);
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Scale;

    #[test]
    fn brute_force_matches_closed_form_on_three_groups() {
        let (p, q) = (Q::new(2, 7), Q::new(1, 3));
        let params = SbmParams::new(vec![3, 5, 2], p, q).unwrap();
        assert_eq!(brute_force_counts(&params.group_sizes, p, q), exact_expected_counts(&params));
    }

    #[test]
    fn quick_moment_suite_passes() {
        let exp = moment_inequality_suite(&VerifyOptions { seed: 3, scale: Scale::Quick }).unwrap();
        assert!(exp.passed());
        assert_eq!(exp.tables[0].rows.len(), 5);
    }
}
