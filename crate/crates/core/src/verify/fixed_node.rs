use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Experiment, Table, VerifyOptions};
use crate::error::Result;
use crate::fixed_node::{random_typed_graph, simulate_fixed_node, stable_fixed_point, FixedNodeParams};
use crate::rng::SeedStream;
use crate::stats::{MeanCi, Z99};

/// Share of recorded times dropped before averaging a run's integration.
pub const BURN_IN: f64 = 0.25;

#[derive(Clone, Debug, Serialize)]
pub struct GridPoint {
    pub s: f64,
    pub c: f64,
    /// Integration at the stable fixed point with the largest integration.
    pub theory: f64,
    pub sim: MeanCi,
}

/// Rewiring setup shared by every point of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedNodeSweep {
    pub s_values: Vec<f64>,
    pub c_values: Vec<f64>,
    pub s_prime: f64,
    pub group_sizes: [usize; 2],
    pub edges: usize,
    pub iterations: u64,
    pub replicates: usize,
}

/// Theory and simulation at every `(s, c)`, `s` outermost. Point `i` uses
/// `seeds.child(i)`; replicate `r` draws its start graph and run from
/// `seeds.child(i).child(r)`.
pub fn fixed_node_sweep(sweep: &FixedNodeSweep, seeds: &SeedStream) -> Result<Vec<GridPoint>> {
    let total = (sweep.group_sizes[0] + sweep.group_sizes[1]) as f64;
    let n_theta = sweep.group_sizes.map(|g| g as f64 / total);
    let cells: Vec<(usize, f64, f64)> = sweep
        .s_values
        .iter()
        .flat_map(|&s| sweep.c_values.iter().map(move |&c| (s, c)))
        .enumerate()
        .map(|(i, (s, c))| (i, s, c))
        .collect();
    cells
        .into_par_iter()
        .map(|(i, s, c)| {
            let params = FixedNodeParams { c, s, s_prime: sweep.s_prime, n_theta };
            let theory = stable_fixed_point(&params)?.integration;
            let point_seeds = seeds.child(i as u64);
            let sims = (0..sweep.replicates as u64)
                .map(|r| {
                    let run_seeds = point_seeds.child(r);
                    let initial = random_typed_graph(&sweep.group_sizes, sweep.edges, &mut run_seeds.stream(u64::MAX))?;
                    Ok(simulate_fixed_node(&initial, &params, sweep.iterations, &run_seeds)?.tail_integration(BURN_IN))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(GridPoint { s, c, theory, sim: MeanCi::from_samples(&sims, Z99) })
        })
        .collect()
}

pub fn grid_table(points: &[GridPoint]) -> Table {
    let mut table =
        Table::new("fixed-node", &["s", "c", "integration_theory", "integration_sim_mean", "integration_sim_ci"]);
    for p in points {
        table.push(vec![p.s.into(), p.c.into(), p.theory.into(), p.sim.mean.into(), p.sim.half_width.into()]);
    }
    table
}

/// Rewiring simulations against the stable mean-field equilibrium over an `(s, c)` grid.
pub fn fixed_node_grid(options: &VerifyOptions) -> Result<Experiment> {
    let sweep = FixedNodeSweep {
        s_values: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
        c_values: vec![0.0, 0.3, 0.6, 0.9],
        s_prime: 0.5,
        group_sizes: [100, 100],
        edges: 1000,
        iterations: options.scale.pick(200_000, 20_000),
        replicates: options.scale.pick(2, 1),
    };
    let points = fixed_node_sweep(&sweep, &SeedStream::new(options.seed).child(300))?;

    let worst = points.iter().map(|p| (p.sim.mean - p.theory).abs()).fold(0.0, f64::max);
    let mut monotone = true;
    for pair in points.windows(2).filter(|w| w[0].s == w[1].s) {
        let step = pair[1].theory - pair[0].theory;
        let s = pair[0].s;
        if (s > 0.5 && step < -1e-9) || (s < 0.5 && step > 1e-9) {
            monotone = false;
        }
    }
    let c0_worst = points.iter().filter(|p| p.c == 0.0).map(|p| (p.sim.mean - (1.0 - p.s)).abs()).fold(0.0, f64::max);

    let mut exp = Experiment::new("fixed-node grid");
    exp.check("simulation within 0.03 of theory", worst <= 0.03, format!("max |sim - theory| = {worst:.4}"));
    exp.check("equilibrium monotone in c on each side of s = 1/2", monotone, "9 x 4 grid");
    exp.check("c = 0 simulation within 0.02 of 1 - s", c0_worst <= 0.02, format!("max deviation {c0_worst:.4}"));
    exp.tables.push(grid_table(&points));
    Ok(exp)
}
