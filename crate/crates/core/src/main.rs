use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use museum_swn::config::{parse_config, PolicyKind, SimConfig};
use museum_swn::experiment::{self, SweepResult, DEFAULT_P_VALUES, DEFAULT_SEED_COUNT};
use museum_swn::netgraph::graph_metrics;
use museum_swn::simcore::{self, bunching_index, satisfaction};

type CliResult<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "museum-swn", version, about = "Small-world gallery routing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the painting graph and print its metrics.
    Graph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a single simulation.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a grid of rewiring probabilities, policies and seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rewiring probabilities.
        #[arg(long = "p", value_delimiter = ',')]
        p_values: Option<Vec<f64>>,
        /// Comma-separated policy names.
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<PolicyKind>>,
        /// Comma-separated seeds, or a half-open range `a..b`.
        #[arg(long)]
        seeds: Option<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Aggregate an existing sweep CSV into per-(p, policy) means and CIs.
    Summary {
        /// Sweep CSV produced by `sweep`.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> CliResult<SimConfig> {
    match path {
        None => Ok(SimConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("reading {}: {e}", p.display()))?;
            Ok(parse_config(&text).map_err(|e| format!("{}: {e}", p.display()))?)
        }
    }
}

fn parse_seeds(spec: &str) -> CliResult<Vec<u64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        return Ok((a..b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|e| format!("bad seed {s:?}: {e}").into()))
        .collect()
}

fn out_dir(out: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| format!("creating {}: {e}", dir.display()))?;
    Ok(dir)
}

fn write(path: PathBuf, contents: &str) -> CliResult<()> {
    fs::write(&path, contents).map_err(|e| format!("writing {}: {e}", path.display()))?;
    Ok(())
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Graph { common, seed } => {
            let cfg = load_config(common.config.as_deref())?;
            let seed = seed.unwrap_or(cfg.seed);
            let graph = cfg.painting_graph(seed)?;
            let m = graph_metrics(&graph);
            println!("nodes          {}", graph.node_count());
            println!("edges          {}", graph.edge_count());
            println!("clustering     {:.6}", m.clustering);
            match m.path_length {
                Some(l) => println!("path_length    {l:.6}"),
                None => println!("path_length    NA (disconnected)"),
            }
            println!("degree         min {} max {} mean {:.6}", m.degree_min, m.degree_max, m.degree_mean);
            if let Some(out) = common.out {
                let dir = out_dir(Some(out))?;
                let gallery = cfg.build_gallery(graph.clone(), seed)?;
                write(dir.join("graph.txt"), &graph.to_edge_list())?;
                write(dir.join("gallery.txt"), &gallery.to_text())?;
            }
        }
        Command::Run { common, seed } => {
            let cfg = load_config(common.config.as_deref())?;
            let seed = seed.unwrap_or(cfg.seed);
            let result = simcore::run(&cfg, seed)?;
            let dir = out_dir(common.out)?;
            let width = cfg.topology.node_count();
            write(dir.join("events.csv"), &result.events_csv())?;
            write(dir.join("occupancy.csv"), &result.occupancy_csv(width))?;
            write(dir.join("queues.csv"), &result.queue_csv(width))?;
            write(dir.join("summary.json"), &result.summary_json())?;
            let b = bunching_index(&result);
            println!(
                "policy {} seed {seed}: overflow_minutes {} peak_queue {} mona_lisa {:.6} satisfaction {:.6}",
                cfg.policy.kind.name(),
                b.overflow_minutes,
                b.peak_queue,
                b.mona_lisa,
                satisfaction(&result).unwrap_or(0.0)
            );
            println!("wrote {}", dir.display());
        }
        Command::Sweep {
            common,
            p_values,
            policies,
            seeds,
            threads,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let p_values = p_values.unwrap_or_else(|| DEFAULT_P_VALUES.to_vec());
            let policies = policies.unwrap_or_else(|| PolicyKind::ALL.to_vec());
            let seeds = match seeds {
                Some(s) => parse_seeds(&s)?,
                None => (0..DEFAULT_SEED_COUNT).collect(),
            };
            if p_values.is_empty() || policies.is_empty() || seeds.is_empty() {
                return Err("sweep needs at least one p value, policy and seed".into());
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()?;
            let result = pool.install(|| experiment::sweep(&cfg, &p_values, &policies, &seeds))?;
            let dir = out_dir(common.out)?;
            result.write_csv(&dir.join("sweep.csv"))?;
            let summary = experiment::summarize(&result)?;
            experiment::write_summary(&summary, &dir.join("summary.csv"))?;
            print!("{}", experiment::summary_csv(&summary));
            println!("wrote {} rows to {}", result.rows.len(), dir.display());
        }
        Command::Summary { input, out } => {
            let text = fs::read_to_string(&input).map_err(|e| format!("reading {}: {e}", input.display()))?;
            let sweep = SweepResult::from_csv(&text)?;
            let summary = experiment::summarize(&sweep)?;
            let csv = experiment::summary_csv(&summary);
            match out {
                Some(out) => write(out_dir(Some(out))?.join("summary.csv"), &csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
