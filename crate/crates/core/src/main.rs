use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use caterpillar::exact::{
    beta_marginal_params, dirichlet_limit_params, pa_cov, pa_joint_log_pmf, pa_mean,
    uniform_asymptotic_cov, uniform_degree_pmf, uniform_degree_pmf_pushforward, uniform_leaf_pmf,
};
use caterpillar::gini::{
    gini1_hat_from_moments, gini1_hat_pa_closed, gini1_hat_uniform_closed, gini1_limit, gini_type1,
    gini_type2, lorenz, lorenz_sorted,
};
use caterpillar::montecarlo::{
    lorenz_rows, run_gini_sweep, run_lorenz_batch, run_marginal, run_moments, ExperimentConfig,
    ExperimentResult, LorenzView, Metric,
};
use caterpillar::output::{experiment_csv, experiment_json, lorenz_csv};
use caterpillar::plot::{PlotSpec, Series};
use caterpillar::{grow, CaterpillarTree, Error, GrowthModel, SeedSpec};

const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "rct", version, about = "Random caterpillar trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow one tree and print it as JSON
    Simulate(SimulateArgs),
    /// Exact moments, probabilities and limits
    #[command(subcommand)]
    Exact(ExactCommand),
    /// Gini index of a tree stored as JSON
    Gini(GiniArgs),
    /// Replicated experiments written as CSV (and optionally SVG)
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Uniform,
    Pa,
}

impl From<ModelArg> for GrowthModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Uniform => GrowthModel::Uniform,
            ModelArg::Pa => GrowthModel::PreferentialAttachment,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long = "m")]
    m: usize,
    #[arg(long = "n")]
    n: u64,
    #[arg(long)]
    seed: u64,
    /// Write to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelShape {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long = "m")]
    m: usize,
}

#[derive(Subcommand)]
enum ExactCommand {
    /// Expected degree vector at time n
    Mean {
        #[command(flatten)]
        shape: ModelShape,
        #[arg(long = "n")]
        n: u64,
    },
    /// Dispersion matrix (PA: exact at time n; uniform: limiting covariance of the scaled leaf counts)
    Cov {
        #[command(flatten)]
        shape: ModelShape,
        #[arg(long = "n", default_value_t = 0)]
        n: u64,
    },
    /// Joint probability of a count vector
    Pmf {
        #[command(flatten)]
        shape: ModelShape,
        /// PA: draws per color; uniform: leaf counts
        #[arg(long = "s", value_delimiter = ',', conflicts_with = "d")]
        s: Option<Vec<u64>>,
        /// Uniform only: degree vector
        #[arg(long = "d", value_delimiter = ',')]
        d: Option<Vec<u64>>,
    },
    /// Limits as n grows: type I Gini index and the Dirichlet/Beta laws
    Limit {
        #[command(flatten)]
        shape: ModelShape,
    },
    /// Finite-n type I Gini estimators
    Gini1 {
        #[command(flatten)]
        shape: ModelShape,
        #[arg(long = "n")]
        n: u64,
    },
}

#[derive(Args)]
struct GiniArgs {
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=2))]
    kind: u8,
    #[arg(long)]
    tree: PathBuf,
    /// Also print the Lorenz curve as CSV
    #[arg(long)]
    lorenz: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    metric: Metric,
    #[arg(long, value_delimiter = ',', default_value = "uniform,pa")]
    models: Vec<GrowthModel>,
    /// Comma-separated list, or start:stop:step
    #[arg(long = "m-list")]
    m_list: String,
    #[arg(long = "n")]
    n: u64,
    #[arg(long = "R")]
    replications: usize,
    #[arg(long)]
    seed: u64,
    /// CSV destination (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write rows plus provenance as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG plot; Lorenz runs write one file per (view, m) with `-gini{1,2}-m{m}` appended to the stem
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Directory for per-(model, m) Lorenz curve CSVs
    #[arg(long = "lorenz-dir")]
    lorenz_dir: Option<PathBuf>,
}

fn parse_m_list(text: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidConfig(format!("cannot parse m-list `{text}`"));
    if text.contains(':') {
        let parts: Vec<usize> = text
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if step == 0 || start > stop {
            return Err(bad());
        }
        Ok((start..=stop).step_by(step).collect())
    } else {
        text.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect()
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Error> {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn print_json(value: serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("json value")
    );
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let tree = grow(args.model.into(), args.m, args.n, SeedSpec::new(args.seed))?;
    emit(args.out.as_deref(), &format!("{}\n", tree.to_json()))
}

fn exact(cmd: ExactCommand) -> Result<(), Error> {
    match cmd {
        ExactCommand::Mean { shape, n } => {
            let mean = match shape.model.into() {
                GrowthModel::PreferentialAttachment => pa_mean(shape.m, n)?,
                GrowthModel::Uniform => {
                    CaterpillarTree::new(shape.m)?;
                    // E[L_i] = n/m plus the spine offsets.
                    caterpillar::tree::initial_degrees(shape.m)
                        .into_iter()
                        .map(|o| n as f64 / shape.m as f64 + o as f64)
                        .collect()
                }
            };
            print_json(json!(mean));
        }
        ExactCommand::Cov { shape, n } => match shape.model.into() {
            GrowthModel::PreferentialAttachment => print_json(json!(pa_cov(shape.m, n)?)),
            GrowthModel::Uniform => print_json(json!(uniform_asymptotic_cov(shape.m)?.cov)),
        },
        ExactCommand::Pmf { shape, s, d } => {
            CaterpillarTree::new(shape.m)?;
            match (shape.model.into(), s, d) {
                (GrowthModel::PreferentialAttachment, Some(s), None) => {
                    let log_p = pa_joint_log_pmf(shape.m, &s)?;
                    print_json(json!({
                        "model": "pa",
                        "m": shape.m,
                        "n": s.iter().sum::<u64>(),
                        "s": s,
                        "probability": log_p.exp(),
                        "log_probability": log_p,
                    }));
                }
                (GrowthModel::Uniform, Some(l), None) => {
                    let p = uniform_leaf_pmf(shape.m, &l)?;
                    print_json(json!({
                        "model": "uniform",
                        "m": shape.m,
                        "n": l.iter().sum::<u64>(),
                        "leaves": l,
                        "probability": p,
                        "log_probability": p.ln(),
                    }));
                }
                (GrowthModel::Uniform, None, Some(d)) => {
                    let total: u64 = d.iter().sum();
                    let n =
                        total
                            .checked_sub(2 * shape.m as u64 - 2)
                            .ok_or(Error::InvalidConfig(
                                "degree vector sums to less than 2m - 2".into(),
                            ))?;
                    let direct = uniform_degree_pmf(shape.m, &d, n)?;
                    let shifted = uniform_degree_pmf_pushforward(shape.m, &d, n)?;
                    print_json(json!({
                        "model": "uniform",
                        "m": shape.m,
                        "n": n,
                        "degrees": d,
                        "probability_direct_form": direct,
                        "probability_shifted_leaf_law": shifted,
                        "log_probability_direct_form": direct.ln(),
                        "log_probability_shifted_leaf_law": shifted.ln(),
                        "discrepancy": direct - shifted,
                    }));
                }
                (GrowthModel::PreferentialAttachment, None, Some(_)) => {
                    return Err(Error::InvalidConfig(
                        "--d is only defined for the uniform model; use --s".into(),
                    ))
                }
                _ => {
                    return Err(Error::InvalidConfig(
                        "give a count vector with --s (or --d for uniform degrees)".into(),
                    ))
                }
            }
        }
        ExactCommand::Limit { shape } => {
            let model: GrowthModel = shape.model.into();
            let gini = gini1_limit(model, shape.m)?;
            let mut report = json!({
                "model": model.as_str(),
                "m": shape.m,
                "gini1_limit": gini,
            });
            if model == GrowthModel::PreferentialAttachment {
                let alpha = dirichlet_limit_params(shape.m)?.alpha().to_vec();
                let marginals: Vec<_> = (1..=shape.m)
                    .map(|i| beta_marginal_params(shape.m, i).map(|(a, b)| json!([a, b])))
                    .collect::<Result<_, _>>()?;
                report["dirichlet_alpha"] = json!(alpha);
                report["beta_marginals"] = json!(marginals);
            }
            print_json(report);
        }
        ExactCommand::Gini1 { shape, n } => {
            let model: GrowthModel = shape.model.into();
            let from_moments = gini1_hat_from_moments(model, shape.m, n)?;
            let report = match model {
                GrowthModel::Uniform => {
                    let forms = gini1_hat_uniform_closed(shape.m, n);
                    json!({
                        "model": "uniform",
                        "m": shape.m,
                        "n": n,
                        "closed_form_expanded": forms.expanded,
                        "closed_form_factored": forms.factored,
                        "closed_form_discrepancy": forms.discrepancy(),
                        "from_moments": from_moments,
                    })
                }
                GrowthModel::PreferentialAttachment => json!({
                    "model": "pa",
                    "m": shape.m,
                    "n": n,
                    "closed_form": gini1_hat_pa_closed(shape.m, n),
                    "from_moments": from_moments,
                }),
            };
            print_json(report);
        }
    }
    Ok(())
}

fn gini(args: GiniArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.tree).map_err(|e| Error::Io {
        path: args.tree.clone(),
        source: e,
    })?;
    let tree = CaterpillarTree::from_json(&text)?;
    let (value, curve) = if args.kind == 1 {
        let depths = tree.depths().to_sorted_vec();
        (gini_type1(&tree)?, lorenz_sorted(&depths))
    } else {
        let leaves: Vec<f64> = tree.leaves().iter().map(|&l| l as f64).collect();
        (gini_type2(&tree)?, lorenz(&leaves))
    };
    println!("{value}");
    if args.lorenz {
        print!("{}", lorenz_csv(&curve?));
    }
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("svg");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

const GATE_NOTES: [&str; 3] = [
    "stderr is the sample standard deviation over replications divided by sqrt(R); 0 when R = 1",
    "acceptance gates (4 standard errors, KS < 0.05) are chosen by this software, not taken from the source analysis",
    "lorenz rows report the Gini index of the pointwise-mean curve",
];

fn experiment(args: ExperimentArgs) -> Result<(), Error> {
    let config = ExperimentConfig {
        models: args.models.clone(),
        m_values: parse_m_list(&args.m_list)?,
        n: args.n,
        replications: args.replications,
        base_seed: args.seed,
        metric: args.metric,
    };
    let result: ExperimentResult = match config.metric {
        Metric::GiniI | Metric::GiniII => {
            let result = run_gini_sweep(&config)?;
            if let Some(svg) = &args.svg {
                let series = config
                    .models
                    .iter()
                    .map(|&model| Series {
                        label: model.to_string(),
                        points: result
                            .rows
                            .iter()
                            .filter(|r| r.model == model)
                            .map(|r| (r.m as f64, r.mean))
                            .collect(),
                    })
                    .collect();
                let kind = if config.metric == Metric::GiniI {
                    "I"
                } else {
                    "II"
                };
                let title = format!(
                    "Type {kind} Gini index, n = {}, R = {}",
                    config.n, config.replications
                );
                write_file(svg, &PlotSpec::gini_vs_m(title, series).render()?)?;
            }
            result
        }
        Metric::Lorenz => {
            let entries = run_lorenz_batch(&config)?;
            if let Some(dir) = &args.lorenz_dir {
                fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.clone(),
                    source: e,
                })?;
                for e in &entries {
                    let name = format!("lorenz-{}-{}-m{}.csv", e.view.as_str(), e.model, e.m);
                    write_file(&dir.join(name), &lorenz_csv(&e.curve))?;
                }
            }
            if let Some(svg) = &args.svg {
                for &m in &config.m_values {
                    for view in [LorenzView::Depths, LorenzView::Leaves] {
                        let series = entries
                            .iter()
                            .filter(|e| e.m == m && e.view == view)
                            .map(|e| Series {
                                label: e.model.to_string(),
                                points: e.curve.points.clone(),
                            })
                            .collect();
                        let title = format!(
                            "Lorenz curves ({}), m = {m}, n = {}, R = {}",
                            if view == LorenzView::Depths {
                                "depths"
                            } else {
                                "leaves"
                            },
                            config.n,
                            config.replications
                        );
                        let path = with_suffix(svg, &format!("-{}-m{m}", view.as_str()));
                        write_file(&path, &PlotSpec::lorenz(title, series).render()?)?;
                    }
                }
            }
            lorenz_rows(&config, &entries)
        }
        Metric::Moments => run_moments(&config)?,
        Metric::Marginal => run_marginal(&config)?,
    };
    if let Some(path) = &args.json {
        write_file(path, &experiment_json(&result, &GATE_NOTES))?;
    }
    emit(args.out.as_deref(), &experiment_csv(&result))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Exact(cmd) => exact(cmd),
        Command::Gini(args) => gini(args),
        Command::Experiment(args) => experiment(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } => ExitCode::from(EXIT_IO),
                _ => ExitCode::from(EXIT_DOMAIN),
            }
        }
    }
}
