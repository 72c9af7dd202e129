use rand::Rng;

use super::{Experiment, Table, VerifyOptions};
use crate::error::{Error, Result};
use crate::estimation::{
    enumerate_feasible_assignments, estimate, from_records, synthetic_citations, DescendantGraph, EstimateOptions,
    IngestOptions, Phase, PhaseAssignment, Theta, DEFAULT_CAP, DEFAULT_SAMPLES,
};
use crate::rng::SeedStream;

const RELATIVE_TOLERANCE: f64 = 0.15;

fn brute_force(g: &DescendantGraph) -> Vec<PhaseAssignment> {
    let n = g.len();
    (0..1u64 << n)
        .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { Phase::Friend } else { Phase::Initial }).collect::<Vec<_>>())
        .filter(|phi| g.is_feasible(phi))
        .collect()
}

fn sorted(mut v: Vec<PhaseAssignment>) -> Vec<PhaseAssignment> {
    v.sort_by_key(|phi| phi.iter().map(|&p| p == Phase::Friend).collect::<Vec<_>>());
    v
}

fn random_descendant_graph<R: Rng>(rng: &mut R) -> Result<DescendantGraph> {
    let n = rng.gen_range(1..=12);
    let density = rng.gen_range(0.0..0.5);
    let similar = (0..n).map(|_| rng.gen::<bool>()).collect();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|v| (0..n).map(move |w| (v, w))).filter(|&(v, w)| v != w && rng.gen_bool(density)).collect();
    DescendantGraph::new(similar, &edges)
}

/// Fits synthetic citations with known means and checks the enumeration of
/// feasible phase assignments.
pub fn estimation_recovery(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed).child(400);
    let papers = options.scale.pick(5000usize, 600);
    let truth = Theta { n_s: 6.0, n_d: 2.0, n_fs: 3.0, n_fd: 1.0 };
    let data = synthetic_citations(&truth, 2, papers, &seeds.child(0))?;
    let dataset = from_records(data.records, &IngestOptions { years: None, min_field_share: 0.01 }, 0)?;
    let est_options = EstimateOptions { cluster_k: Some(1), ..EstimateOptions::default() };
    let (_, reports) = estimate(&dataset, &est_options, &seeds.child(1))?;
    let report = reports.first().ok_or_else(|| Error::EmptyDataset("no cluster to fit".into()))?;
    let (fit, prediction) = match (&report.fit, &report.prediction) {
        (Some(f), Some(p)) => (f, p),
        _ => return Err(Error::Domain(format!("fit failed: {}", report.error.as_deref().unwrap_or("unknown")))),
    };

    let mut exp = Experiment::new("estimation recovery");
    let names = ["n_s", "n_d", "n_fs", "n_fd"];
    let mut table = Table::new("estimation-theta", &["parameter", "truth", "estimate", "relative_error"]);
    let mut off = Vec::new();
    for ((name, t), e) in names.iter().zip(truth.as_array()).zip(fit.theta.as_array()) {
        let rel = (e - t).abs() / t;
        if rel > RELATIVE_TOLERANCE {
            off.push(format!("{name} {e:.4} vs {t}"));
        }
        table.push(vec![(*name).into(), t.into(), e.into(), rel.into()]);
    }
    exp.check(
        "theta recovered within 15% componentwise",
        off.is_empty(),
        format!("{} usable nodes; outside tolerance: [{}]", report.usable_nodes, off.join("; ")),
    );
    let gap = (prediction.f_inf - data.observed_integration).abs();
    exp.check(
        "predicted equilibrium within 0.03 of observed integration",
        gap <= 0.03,
        format!("predicted {:.4}, observed {:.4}", prediction.f_inf, data.observed_integration),
    );

    let mut summary = Table::new(
        "estimation-summary",
        &["papers", "usable_nodes", "observed_integration", "f_inf", "f_inf_no_tc", "tc_contribution"],
    );
    summary.push(vec![
        report.papers.into(),
        report.usable_nodes.into(),
        data.observed_integration.into(),
        prediction.f_inf.into(),
        prediction.f_inf_no_tc.into(),
        prediction.tc_contribution.into(),
    ]);

    let graphs = options.scale.pick(500usize, 50);
    let mut rng = seeds.stream(2);
    let mut mismatches = 0;
    for _ in 0..graphs {
        let g = random_descendant_graph(&mut rng)?;
        let set = enumerate_feasible_assignments(&g, DEFAULT_CAP, DEFAULT_SAMPLES, &mut rng);
        if !set.exact || sorted(set.assignments) != sorted(brute_force(&g)) {
            mismatches += 1;
        }
    }
    exp.check(
        "enumeration matches brute force up to 12 references",
        mismatches == 0,
        format!("{mismatches} mismatches over {graphs} random graphs"),
    );

    let chain = DescendantGraph::new(vec![true, false, false], &[(0, 1), (1, 2)])?;
    let chain_count = enumerate_feasible_assignments(&chain, DEFAULT_CAP, DEFAULT_SAMPLES, &mut rng).assignments.len();
    exp.check("three-node chain has exactly 3 feasible assignments", chain_count == 3, format!("{chain_count} found"));

    exp.tables.push(table);
    exp.tables.push(summary);
    Ok(exp)
}
