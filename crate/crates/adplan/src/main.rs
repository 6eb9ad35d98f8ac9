use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adplan::generate::{generate_graph, RandomGraphSpec};
use adplan::graph_io::write_graph;
use adplan::output::write_outputs;
use adplan::scenario::GraphSource;
use adplan::{run_scenario, HarnessError, RunOptions, Scenario, Strategy};
use adplan_core::planner::DEFAULT_NODE_LIMIT;
use adplan_core::Regime;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "adplan", version, about = "Plan advertising budgets over a social network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario's generator seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Baseline {
    None,
    Broadcast,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate without planning (no control, or broadcast)
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "none")]
        strategy: Baseline,
    },
    /// Exhaustive search over time allocations
    PlanBrute {
        #[command(flatten)]
        common: Common,
        /// Largest search space to accept
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u128,
    },
    /// Dynamic program (long regime)
    PlanDp {
        #[command(flatten)]
        common: Common,
    },
    /// Uncontrolled and broadcast costs; files describe the broadcast run
    Baselines {
        #[command(flatten)]
        common: Common,
    },
    /// Write a random graph as an edge list
    GenGraph {
        /// Take agents, threshold, seed and regime from a scenario
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        agents: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Accept graphs that split into several rooted clusters
        #[arg(long)]
        clustered: bool,
        /// Output directory; the graph goes to `graph.txt`
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<Scenario, HarnessError> {
    let mut s = Scenario::load(&common.scenario)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn plan(common: &Common, strategy: Strategy, options: RunOptions) -> Result<(), HarnessError> {
    let scenario = load(common)?;
    let loaded = scenario.resolve()?;
    let report = run_scenario(&loaded, strategy, &options)?;
    let summary = write_outputs(&loaded, &report, &common.out)?;
    println!("{}", summary.headline());
    Ok(())
}

fn gen_graph(
    scenario: Option<&Path>,
    agents: Option<usize>,
    threshold: Option<f64>,
    seed: Option<u64>,
    clustered: bool,
    out: &Path,
) -> Result<(), HarnessError> {
    let mut spec = RandomGraphSpec::new(0, 0);
    if let Some(path) = scenario {
        let s = Scenario::load(path)?;
        let GraphSource::Random { agents, threshold } = s.graph else {
            return Err(HarnessError::Scenario("scenario does not use the random generator".into()));
        };
        spec = RandomGraphSpec { agents, threshold, seed: s.seed, connected: s.regime != Regime::Clustered };
    }
    if let Some(n) = agents {
        spec.agents = n;
    }
    if let Some(t) = threshold {
        spec.threshold = t;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    if clustered {
        spec.connected = false;
    }
    let generated = generate_graph(&spec)?;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::Io { path: out.to_path_buf(), source: e })?;
    let path = out.join("graph.txt");
    write_graph(&generated.graph, &path)?;
    println!(
        "{} agents, {} edges, seed {} -> {}",
        generated.graph.agents(),
        generated.graph.edge_count(),
        generated.seed,
        path.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { common, strategy } => {
            let s = match strategy {
                Baseline::None => Strategy::None,
                Baseline::Broadcast => Strategy::Broadcast,
            };
            plan(common, s, RunOptions::default())
        }
        Command::PlanBrute { common, node_limit } => {
            plan(common, Strategy::BruteForce, RunOptions { node_limit: *node_limit, ..RunOptions::default() })
        }
        Command::PlanDp { common } => plan(common, Strategy::Dp, RunOptions::default()),
        Command::Baselines { common } => plan(common, Strategy::Broadcast, RunOptions::default()),
        Command::GenGraph { scenario, agents, threshold, seed, clustered, out } => {
            gen_graph(scenario.as_deref(), *agents, *threshold, *seed, *clustered, out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
