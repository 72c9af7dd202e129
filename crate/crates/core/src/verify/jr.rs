use rand::Rng;
use rayon::prelude::*;

use super::{Experiment, Table, VerifyOptions};
use crate::error::Result;
use crate::jr::{
    closed_form_plan, equilibrium_integration, immediate_effect, optimal_interventions, simulate_jr,
    simulate_with_interventions, unclamped_regime, InterventionPlan, JrParams, PlannerModel, SeedGraph, Trajectory,
};
use crate::rng::SeedStream;
use crate::stats::{linear_fit, mean_series, MeanCi, Z99};

fn seed_label(seed: &SeedGraph) -> &'static str {
    match seed {
        SeedGraph::Complete => "complete",
        SeedGraph::Segregated => "segregated",
        SeedGraph::Custom(_) => "custom",
    }
}

/// Random parameters whose perturbations decay at least like `t^(-2/3)`.
fn random_params<R: Rng>(rng: &mut R) -> Result<JrParams<f64>> {
    let k = rng.gen_range(2..=3);
    let n_s = f64::from(rng.gen_range(1..=8));
    let n_d = f64::from(rng.gen_range(1..=8));
    let n_f = f64::from(rng.gen_range(0..=((n_s + n_d) / 2.0) as u32));
    let lower = 1.0 / k as f64 + 0.05;
    let alpha = rng.gen_range(lower..0.95);
    JrParams::uniform(k, n_s, n_d, n_f, alpha)
}

fn random_type_dist<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Replicate trajectories; replicate `r` is seeded by `seeds.child(r)`.
pub fn replicate_trajectories(
    params: &JrParams<f64>,
    t_max: usize,
    replicates: usize,
    seeds: &SeedStream,
    seed_graph: &SeedGraph,
) -> Result<Vec<Trajectory>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| simulate_jr(params, t_max, &seeds.child(r), seed_graph).map(|run| run.trajectory))
        .collect()
}

/// Up to `points` distinct integer times spaced evenly in `ln t` over `[from, to]`.
pub fn log_spaced_times(from: usize, to: usize, points: usize) -> Vec<usize> {
    let (lo, hi) = ((from.max(1) as f64).ln(), (to.max(from).max(1) as f64).ln());
    let mut times: Vec<usize> = (0..points.max(1))
        .map(|i| {
            let frac = if points > 1 { i as f64 / (points - 1) as f64 } else { 1.0 };
            (lo + (hi - lo) * frac).exp().round() as usize
        })
        .collect();
    times.dedup();
    times
}

/// Mean simulated integration with its 99% half-width at each of `times`
/// covered by every run, next to the closed form.
pub fn trajectory_table(runs: &[Trajectory], times: &[usize], theory: f64) -> Table {
    let mut table = Table::new("jr-trajectory", &["t", "f_sim_mean", "f_sim_ci", "f_theory"]);
    for &t in times {
        let at: Option<Vec<f64>> = runs.iter().map(|r| r.at(t)).collect();
        if let Some(at) = at.filter(|v| !v.is_empty()) {
            let ci = MeanCi::from_samples(&at, Z99);
            table.push(vec![t.into(), ci.mean.into(), ci.half_width.into(), theory.into()]);
        }
    }
    table
}

/// Simulated long-run integration against the closed form from two seed graphs.
pub fn jr_equilibrium(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed);
    let t_max = options.scale.pick(10_000usize, 1500);
    let replicates = options.scale.pick(20usize, 4);
    let mut rng = seeds.stream(0);
    let mut exp = Experiment::new("jr equilibrium");
    let mut table = Table::new(
        "jr-equilibrium",
        &[
            "set",
            "k",
            "n_s",
            "n_d",
            "n_f",
            "alpha",
            "seed_graph",
            "t",
            "f_theory",
            "f_sim_mean",
            "f_sim_ci",
            "tolerance",
            "within",
        ],
    );
    let mut misses = Vec::new();
    let mut invariant = true;
    for set in 0..10u64 {
        let params = random_params(&mut rng)?;
        let theory = equilibrium_integration(&params)?;
        for _ in 0..5 {
            let mut other = params.clone();
            other.type_dist = random_type_dist(params.k, &mut rng);
            invariant &= equilibrium_integration(&other)? == theory;
        }
        for (g, seed_graph) in [SeedGraph::Segregated, SeedGraph::Complete].iter().enumerate() {
            let runs =
                replicate_trajectories(&params, t_max, replicates, &seeds.child(1 + set).child(g as u64), seed_graph)?;
            let finals: Vec<f64> = runs.iter().map(Trajectory::last).collect();
            let ci = MeanCi::from_samples(&finals, Z99);
            let tolerance = (3.0 * ci.half_width).max(0.02);
            let within = (ci.mean - theory).abs() <= tolerance;
            if !within {
                misses.push(format!("set {set} {}: sim {:.4} vs {theory:.4}", seed_label(seed_graph), ci.mean));
            }
            table.push(vec![
                (set as usize).into(),
                params.k.into(),
                params.n_s.into(),
                params.n_d.into(),
                params.n_f.into(),
                params.alpha.into(),
                seed_label(seed_graph).into(),
                t_max.into(),
                theory.into(),
                ci.mean.into(),
                ci.half_width.into(),
                tolerance.into(),
                within.into(),
            ]);
        }
    }
    exp.check(
        "simulated equilibrium matches closed form",
        misses.is_empty(),
        format!("10 sets x 2 seed graphs, {replicates} replicates; misses: [{}]", misses.join("; ")),
    );
    exp.check("closed form ignores the type distribution", invariant, "5 random distributions per set");
    exp.tables.push(table);
    Ok(exp)
}

/// Power-law decay of the distance to equilibrium from a segregated start.
pub fn jr_convergence_rate(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed).child(100);
    let t_max = options.scale.pick(10_000usize, 2000);
    let replicates = options.scale.pick(20usize, 4);
    let params = JrParams::uniform(2, 1.0, 1.0, 3.0, 0.99)?;
    let theory = equilibrium_integration(&params)?;
    let runs = replicate_trajectories(&params, t_max, replicates, &seeds, &SeedGraph::Segregated)?;
    let values: Vec<Vec<f64>> = runs.iter().map(|r| r.values.clone()).collect();
    let mean = mean_series(&values);
    let start = runs[0].start;

    let times = log_spaced_times(100, t_max, 25);
    let table = trajectory_table(&runs, &times, theory);
    let xs: Vec<f64> = times.iter().map(|&t| (t as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|&t| (mean[t - start] - theory).abs().ln()).collect();
    let (_, slope) = linear_fit(&xs, &ys);
    let d = params.derived();
    let expected = -d.m_r;
    let mut exp = Experiment::new("jr convergence rate");
    exp.check(
        "log-log slope equals -(N_S + N_D) / N within 0.15",
        (slope - expected).abs() <= 0.15,
        format!("slope {slope:.4}, expected {expected:.4}, mean-field exponent {:.4}", d.decay_exponent()),
    );
    let mut fit =
        Table::new("jr-convergence-fit", &["n_s", "n_d", "n_f", "alpha", "slope", "expected", "decay_exponent"]);
    fit.push(vec![
        params.n_s.into(),
        params.n_d.into(),
        params.n_f.into(),
        params.alpha.into(),
        slope.into(),
        expected.into(),
        d.decay_exponent().into(),
    ]);
    exp.tables.push(table);
    exp.tables.push(fit);
    Ok(exp)
}

/// Paired-seed intervention runs against the first-order effect, and the
/// rate-limited planner against its closed form.
pub fn jr_interventions(options: &VerifyOptions) -> Result<Experiment> {
    let seeds = SeedStream::new(options.seed).child(200);
    let replicates = options.scale.pick(200usize, 10);
    let params = JrParams::uniform(2, 6.0, 2.0, 4.0, 0.75)?;
    let (t, window) = (2000, 50);
    let plan = InterventionPlan::constant(t, window, -2.0);
    let predicted = immediate_effect(&params, &plan)?.total;
    let deltas: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let pair = simulate_with_interventions(&params, &plan, t + window, &seeds.child(r), &SeedGraph::Complete)?;
            Ok(pair.treated.trajectory.last() - pair.baseline.trajectory.last())
        })
        .collect::<Result<_>>()?;
    let ci = MeanCi::from_samples(&deltas, Z99);
    let z = ci.z_score(predicted);

    let mut exp = Experiment::new("jr interventions");
    exp.check(
        "paired simulation matches the immediate effect within 3 sigma",
        z <= 3.0,
        format!("predicted {predicted:.6e}, simulated {:.6e} +/- {:.2e} (se), z {z:.2}", ci.mean, ci.std_err),
    );
    let mut effect = Table::new(
        "jr-intervention-effect",
        &["T", "I", "delta_ns", "replicates", "predicted", "sim_mean", "sim_std_err", "z"],
    );
    effect.push(vec![
        t.into(),
        window.into(),
        (-2.0).into(),
        replicates.into(),
        predicted.into(),
        ci.mean.into(),
        ci.std_err.into(),
        z.into(),
    ]);

    let rate = 1e-4;
    let unclamped = unclamped_regime(&params, t, window, rate);
    let greedy = optimal_interventions(&params, t, window, rate, PlannerModel::FirstOrder)?;
    let corrected = optimal_interventions(&params, t, window, rate, PlannerModel::HorizonCorrected)?;
    let closed = closed_form_plan(&params, t, window, rate);
    let max_diff = greedy.plan.delta_ns.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let max_step = greedy.step_changes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gain_error = (greedy.predicted_gain - window as f64 * rate).abs();
    exp.check("planner runs in the unclamped regime", unclamped && !greedy.clamped, format!("rate limit {rate}"));
    exp.check("greedy plan equals the closed form to 1e-9", max_diff <= 1e-9, format!("max difference {max_diff:.3e}"));
    exp.check("every step respects the rate limit", max_step <= rate + 1e-12, format!("largest step {max_step:.6e}"));
    exp.check("predicted gain equals I * rate to 1e-9", gain_error <= 1e-9, format!("error {gain_error:.3e}"));

    let mut planner = Table::new(
        "jr-planner",
        &["step", "delta_ns", "delta_ns_closed_form", "step_change", "delta_ns_horizon", "step_change_horizon"],
    );
    for (j, &closed_j) in closed.iter().enumerate() {
        planner.push(vec![
            (j + 1).into(),
            greedy.plan.delta_ns[j].into(),
            closed_j.into(),
            greedy.step_changes[j].into(),
            corrected.plan.delta_ns[j].into(),
            corrected.step_changes[j].into(),
        ]);
    }
    exp.tables.push(effect);
    exp.tables.push(planner);
    Ok(exp)
}
