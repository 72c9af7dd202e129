//! `netseg` command-line front end. Every subcommand parses its settings,
//! calls the library and writes the results under the output directory.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use netseg::estimation::{estimate, ingest, EstimateOptions, IngestOptions};
use netseg::fixed_node::{find_fixed_points, stable_fixed_point};
use netseg::jr::{
    effect_predicates, equilibrium_integration, immediate_effect, integration_at, longterm_effect,
    optimal_interventions, simulate_with_interventions, InterventionPlan, PlannerModel, SeedGraph,
};
use netseg::sbm::{
    absolute_effect_sign, centrality_analysis, exact_expected_counts, expected_counts, gamma_relative_effect_sign,
    l_star, relative_bounds, simulate_effects,
};
use netseg::stats::{MeanCi, Z99};
use netseg::verify::{
    band_table, fixed_node_sweep, grid_table, log_spaced_times, relative_band_sweep, replicate_trajectories,
    trajectory_table, FixedNodeSweep, Scale, Suite, VerifyOptions,
};
use netseg::{FixedNodeParams64, InterventionPlan64, JrParams64, SbmParams64, SeedStream};

use config::{ConfigFile, RunConfig};
use output::{Format, Output};

#[derive(Parser, Debug)]
#[command(name = "netseg", version, about = "Homophily and triadic closure models: theory, simulation, estimation")]
struct Cli {
    /// JSON object of settings keyed like the long flags (`group_sizes`, `n_s`, ...); flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $NETSEG_OUT_DIR, else ./netseg-out].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Master seed, required by every stochastic run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stochastic block model predictions, simulated effects and the relative-effect sweep.
    Sbm(SbmArgs),
    /// Growing network with friend-of-friend links.
    #[command(subcommand)]
    Jr(JrCommand),
    /// Fixed-size rewiring model.
    #[command(subcommand)]
    FixedNode(FixedNodeCommand),
    /// Fits the growth model to JSON-lines citation data.
    Estimate(EstimateArgs),
    /// Runs a verification suite and writes its tables.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SbmArgs {
    /// Group sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    group_sizes: Option<Vec<usize>>,
    /// Within-group link probability.
    #[arg(long)]
    p: Option<f64>,
    /// Between-group link probability.
    #[arg(long)]
    q: Option<f64>,
    /// Homophily of the random-edge baseline, comma separated.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Values of p / q for the sweep at the given q, comma separated.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    /// Sampled graphs per simulated point; 0 skips simulation.
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Args, Debug)]
struct JrParamArgs {
    /// Number of types.
    #[arg(long)]
    k: Option<usize>,
    /// Type probabilities, comma separated [default: uniform].
    #[arg(long, value_delimiter = ',')]
    type_dist: Option<Vec<f64>>,
    #[arg(long)]
    n_s: Option<f64>,
    #[arg(long)]
    n_d: Option<f64>,
    #[arg(long)]
    n_f: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SeedKind {
    Complete,
    Segregated,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModelArg {
    FirstOrder,
    HorizonCorrected,
}

#[derive(Subcommand, Debug)]
enum JrCommand {
    /// Replicate growth runs; writes the mean trajectory next to the closed form.
    Simulate {
        #[command(flatten)]
        params: JrParamArgs,
        /// Final node count.
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, value_enum)]
        seed_graph: Option<SeedKind>,
        /// Log-spaced output times.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Closed-form equilibrium, effect signs and finite-time integration.
    Predict {
        #[command(flatten)]
        params: JrParamArgs,
        /// Node counts at which to evaluate the finite-time formula, comma separated.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<usize>>,
    },
    /// Evaluates an intervention plan or plans one under a rate limit.
    Intervene {
        #[command(flatten)]
        params: JrParamArgs,
        /// JSON plan `{T, I, delta_ns, rate_limit}`; flags override its fields.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Network age when the window opens.
        #[arg(long = "T")]
        t: Option<usize>,
        /// Window length.
        #[arg(long = "I")]
        window: Option<usize>,
        /// Per-step changes of N_S; omitted means plan under the rate limit.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta_ns: Option<Vec<f64>>,
        #[arg(long)]
        rate_limit: Option<f64>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Late time for the long-run effect [default: 10 (T + I)].
        #[arg(long)]
        horizon: Option<usize>,
        /// Paired simulation replicates; 0 skips simulation.
        #[arg(long)]
        replicates: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct FixedNodeShared {
    /// Share of walk candidates.
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    /// Acceptance probability of a same-group uniform candidate.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Acceptance probability of a same-group walk candidate.
    #[arg(long)]
    s_prime: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    group_sizes: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
enum FixedNodeCommand {
    /// Rewiring runs over an (s, c) grid against the stable equilibrium.
    Simulate {
        #[command(flatten)]
        shared: FixedNodeShared,
        #[arg(long)]
        mean_degree: Option<f64>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// All mean-field fixed points for each (s, c).
    Solve {
        #[command(flatten)]
        shared: FixedNodeShared,
    },
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// JSON-lines citation file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Inclusive year window `FROM:TO`.
    #[arg(long)]
    years: Option<String>,
    #[arg(long)]
    min_field_share: Option<f64>,
    /// Number of field clusters [default: eigengap].
    #[arg(long)]
    cluster_k: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(value_parser = parse_suites)]
    suite: SuiteSet,
    /// Reduced replicate budgets.
    #[arg(long)]
    quick: bool,
}

#[derive(Clone, Debug)]
struct SuiteSet(Vec<Suite>);

fn parse_suites(s: &str) -> std::result::Result<SuiteSet, String> {
    if s == "all" {
        return Ok(SuiteSet(Suite::ALL.to_vec()));
    }
    s.parse::<Suite>().map(|suite| SuiteSet(vec![suite])).map_err(|e| e.to_string())
}

const DEFAULT_RATIOS: [f64; 8] = [0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0, 18.0];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every check passed.
fn run(cli: Cli) -> Result<bool> {
    let config = ConfigFile::load(cli.config.as_deref())?;
    let run = RunConfig::resolve(&config, cli.out_dir, cli.format, cli.seed)?;
    let out = Output::new(&run.out_dir, run.format)?;
    match cli.command {
        Command::Sbm(args) => sbm(&config, &run, &out, args),
        Command::Jr(cmd) => jr(&config, &run, &out, cmd),
        Command::FixedNode(cmd) => fixed_node(&config, &run, &out, cmd),
        Command::Estimate(args) => estimate_cmd(&config, &run, &out, args),
        Command::Verify(args) => return verify(&config, &run, &out, args),
    }?;
    Ok(true)
}

fn announce(path: PathBuf) {
    println!("wrote {}", path.display());
}

fn sbm(config: &ConfigFile, run: &RunConfig, out: &Output, args: SbmArgs) -> Result<()> {
    let sizes: Vec<usize> = config.require(args.group_sizes, "group_sizes")?;
    let p: f64 = config.require(args.p, "p")?;
    let q: f64 = config.require(args.q, "q")?;
    let gammas = config.merge_or(args.gamma, "gamma", vec![1.0])?;
    let ratios = config.merge_or(args.ratios, "ratios", DEFAULT_RATIOS.to_vec())?;
    let replicates = config.merge_or(args.replicates, "replicates", 1000)?;
    let params = SbmParams64::new(sizes.clone(), p, q)?;

    let bands = gammas
        .iter()
        .map(|&gamma| {
            Ok(json!({
                "gamma": gamma,
                "bounds": relative_bounds(&params, gamma).ok(),
                "predicted_sign": gamma_relative_effect_sign(&params, gamma)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = json!({
        "params": params,
        "expected_counts_exact": exact_expected_counts(&params),
        "expected_counts_leading": expected_counts(&params),
        "absolute_sign": absolute_effect_sign(&params)?,
        "l_star": l_star(&params).ok(),
        "relative": bands,
        "centrality": if sizes.len() == 2 { Some(centrality_analysis(&params, gammas[0])?) } else { None },
    });
    if replicates > 0 {
        let seeds = SeedStream::new(run.seed()?);
        let sims: Vec<_> = gammas
            .iter()
            .enumerate()
            .map(|(i, &gamma)| json!({ "gamma": gamma, "effects": simulate_effects(&params, gamma, replicates, &seeds.child(i as u64), Z99) }))
            .collect();
        report["simulation"] = json!({ "replicates": replicates, "effects": sims });
        let sweep = relative_band_sweep(&sizes, q, &ratios, &gammas, replicates, &seeds.child(1 << 32))?;
        announce(out.table(&band_table(&sweep))?);
    }
    announce(out.report("sbm", &report)?);
    Ok(())
}

fn jr_params(config: &ConfigFile, args: JrParamArgs) -> Result<JrParams64> {
    let k = config.merge_or(args.k, "k", 2)?;
    let mut params = JrParams64::uniform(
        k,
        config.require(args.n_s, "n_s")?,
        config.require(args.n_d, "n_d")?,
        config.require(args.n_f, "n_f")?,
        config.require(args.alpha, "alpha")?,
    )?;
    if let Some(dist) = config.merge(args.type_dist, "type_dist")? {
        params.type_dist = dist;
        params.validate()?;
    }
    Ok(params)
}

fn jr(config: &ConfigFile, run: &RunConfig, out: &Output, cmd: JrCommand) -> Result<()> {
    match cmd {
        JrCommand::Simulate { params, t_max, replicates, seed_graph, points } => {
            let params = jr_params(config, params)?;
            let t_max = config.merge_or(t_max, "t_max", 10_000)?;
            let replicates = config.merge_or(replicates, "replicates", 20)?;
            let points = config.merge_or(points, "points", 25)?;
            let seed_graph = match config.merge_or(seed_graph, "seed_graph", SeedKind::Segregated)? {
                SeedKind::Complete => SeedGraph::Complete,
                SeedKind::Segregated => SeedGraph::Segregated,
            };
            let runs = replicate_trajectories(&params, t_max, replicates, &SeedStream::new(run.seed()?), &seed_graph)?;
            let start = runs.first().map_or(1, |r| r.start);
            let times = log_spaced_times(start, t_max, points);
            announce(out.table(&trajectory_table(&runs, &times, equilibrium_integration(&params)?))?);
        }
        JrCommand::Predict { params, times } => {
            let params = jr_params(config, params)?;
            let times: Vec<usize> = config.merge_or(times, "times", Vec::new())?;
            let trajectory = times
                .iter()
                .map(|&t| Ok(json!({ "t": t, "f": integration_at(&params, t)? })))
                .collect::<Result<Vec<_>>>()?;
            let report = json!({
                "params": params,
                "derived": params.derived(),
                "decay_exponent": params.derived().decay_exponent(),
                "f_inf": equilibrium_integration(&params)?,
                "effects": effect_predicates(&params),
                "trajectory": trajectory,
            });
            announce(out.report("jr-predict", &report)?);
        }
        JrCommand::Intervene { params, plan, t, window, delta_ns, rate_limit, model, horizon, replicates } => {
            let params = jr_params(config, params)?;
            let file: Option<InterventionPlan64> = match config.merge(plan, "plan")? {
                Some(path) => {
                    let path: PathBuf = path;
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    Some(serde_json::from_str(&text).with_context(|| format!("parsing plan {}", path.display()))?)
                }
                None => None,
            };
            let t = match config.merge(t, "T")? {
                Some(t) => t,
                None => file.as_ref().map(|p| p.t).context("missing --T (or a plan file)")?,
            };
            let window = match config.merge(window, "I")? {
                Some(w) => w,
                None => file.as_ref().map(|p| p.window).context("missing --I (or a plan file)")?,
            };
            let rate_limit =
                config.merge(rate_limit, "rate_limit")?.or(file.as_ref().map(|p| p.rate_limit)).unwrap_or(0.0);
            let delta_ns =
                config.merge(delta_ns, "delta_ns")?.or(file.map(|p| p.delta_ns)).filter(|d: &Vec<f64>| !d.is_empty());
            let model = match config.merge_or(model, "model", ModelArg::FirstOrder)? {
                ModelArg::FirstOrder => PlannerModel::FirstOrder,
                ModelArg::HorizonCorrected => PlannerModel::HorizonCorrected,
            };
            let mut report = json!({ "params": params });
            let plan = match delta_ns {
                Some(delta_ns) => InterventionPlan { t, window, delta_ns, rate_limit },
                None => {
                    let optimal = optimal_interventions(&params, t, window, rate_limit, model)?;
                    let plan = optimal.plan.clone();
                    report["optimal"] = json!(optimal);
                    plan
                }
            };
            let horizon = config.merge_or(horizon, "horizon", 10 * (t + window))?;
            report["plan"] = json!(plan);
            report["immediate"] = json!(immediate_effect(&params, &plan)?);
            report["longterm"] = json!({ "t": horizon, "effect": longterm_effect(&params, &plan, horizon)? });
            let replicates = config.merge_or(replicates, "replicates", 0)?;
            if replicates > 0 {
                let seeds = SeedStream::new(run.seed()?);
                let deltas = (0..replicates as u64)
                    .map(|r| {
                        let pair = simulate_with_interventions(
                            &params,
                            &plan,
                            t + window,
                            &seeds.child(r),
                            &SeedGraph::Complete,
                        )?;
                        Ok(pair.treated.trajectory.last() - pair.baseline.trajectory.last())
                    })
                    .collect::<Result<Vec<f64>>>()?;
                report["simulation"] =
                    json!({ "replicates": replicates, "effect": MeanCi::from_samples(&deltas, Z99) });
            }
            announce(out.report("jr-intervene", &report)?);
        }
    }
    Ok(())
}

struct Grid {
    s_values: Vec<f64>,
    c_values: Vec<f64>,
    s_prime: f64,
    group_sizes: [usize; 2],
}

fn grid(config: &ConfigFile, shared: FixedNodeShared) -> Result<Grid> {
    let sizes: Vec<usize> = config.merge_or(shared.group_sizes, "group_sizes", vec![100, 100])?;
    let Ok(group_sizes) = <[usize; 2]>::try_from(sizes) else {
        bail!("the rewiring model needs exactly two group sizes")
    };
    Ok(Grid {
        s_values: config.require(shared.s, "s")?,
        c_values: config.require(shared.c, "c")?,
        s_prime: config.merge_or(shared.s_prime, "s_prime", 0.5)?,
        group_sizes,
    })
}

fn fixed_node(config: &ConfigFile, run: &RunConfig, out: &Output, cmd: FixedNodeCommand) -> Result<()> {
    match cmd {
        FixedNodeCommand::Simulate { shared, mean_degree, iterations, replicates } => {
            let Grid { s_values, c_values, s_prime, group_sizes } = grid(config, shared)?;
            let mean_degree: f64 = config.merge_or(mean_degree, "mean_degree", 10.0)?;
            let nodes = (group_sizes[0] + group_sizes[1]) as f64;
            let sweep = FixedNodeSweep {
                s_values,
                c_values,
                s_prime,
                group_sizes,
                edges: (mean_degree * nodes / 2.0).round() as usize,
                iterations: config.merge_or(iterations, "iterations", 200_000)?,
                replicates: config.merge_or(replicates, "replicates", 2)?,
            };
            let points = fixed_node_sweep(&sweep, &SeedStream::new(run.seed()?))?;
            announce(out.table(&grid_table(&points))?);
        }
        FixedNodeCommand::Solve { shared } => {
            let Grid { s_values, c_values, s_prime, group_sizes } = grid(config, shared)?;
            let total = (group_sizes[0] + group_sizes[1]) as f64;
            let n_theta = group_sizes.map(|g| g as f64 / total);
            let mut solutions = Vec::new();
            for &s in &s_values {
                for &c in &c_values {
                    let params = FixedNodeParams64 { c, s, s_prime, n_theta };
                    solutions.push(json!({
                        "s": s,
                        "c": c,
                        "fixed_points": find_fixed_points(&params)?,
                        "stable": stable_fixed_point(&params)?,
                    }));
                }
            }
            announce(out.report(
                "fixed-node-solve",
                &json!({ "s_prime": s_prime, "group_sizes": group_sizes, "solutions": solutions }),
            )?);
        }
    }
    Ok(())
}

fn parse_years(s: &str) -> Result<(i32, i32)> {
    let (from, to) = s.split_once(':').context("--years takes FROM:TO")?;
    let years = (from.trim().parse()?, to.trim().parse()?);
    if years.0 > years.1 {
        bail!("empty year window {s}");
    }
    Ok(years)
}

fn estimate_cmd(config: &ConfigFile, run: &RunConfig, out: &Output, args: EstimateArgs) -> Result<()> {
    let input: PathBuf = config.require(args.input, "input")?;
    let years = config.merge::<String>(args.years, "years")?.map(|s| parse_years(&s)).transpose()?;
    let ingest_options =
        IngestOptions { years, min_field_share: config.merge_or(args.min_field_share, "min_field_share", 0.01)? };
    let options =
        EstimateOptions { cluster_k: config.merge(args.cluster_k, "cluster_k")?, ..EstimateOptions::default() };
    let seed = run.seed()?;
    let dataset = ingest(&input, &ingest_options)?;
    let (clusters, reports) = estimate(&dataset, &options, &SeedStream::new(seed))?;
    let report = json!({
        "input": input,
        "papers": dataset.papers.len(),
        "fields": dataset.fields,
        "malformed": dataset.malformed,
        "dropped": dataset.dropped,
        "clusters": clusters,
        "reports": reports,
    });
    announce(out.report("estimate", &report)?);
    Ok(())
}

fn verify(config: &ConfigFile, run: &RunConfig, out: &Output, args: VerifyArgs) -> Result<bool> {
    let options = VerifyOptions {
        seed: run.seed()?,
        scale: if config.switch(args.quick, "quick")? { Scale::Quick } else { Scale::Full },
    };
    let mut all_passed = true;
    let mut summary = Vec::new();
    for suite in args.suite.0 {
        let dir = out.subdir(suite.name())?;
        for exp in suite.run(&options)? {
            println!("{} {suite}: {}", if exp.passed() { "PASS" } else { "FAIL" }, exp.name);
            for check in &exp.checks {
                println!("    {} {}: {}", if check.passed { "ok" } else { "FAILED" }, check.name, check.detail);
            }
            for table in &exp.tables {
                dir.table(table)?;
            }
            all_passed &= exp.passed();
            summary
                .push(json!({ "suite": suite, "experiment": exp.name, "passed": exp.passed(), "checks": exp.checks }));
        }
    }
    out.report(
        "verify-summary",
        &json!({ "seed": options.seed, "scale": options.scale, "passed": all_passed, "experiments": summary }),
    )?;
    Ok(all_passed)
}
