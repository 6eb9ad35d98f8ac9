//! Scenario files: one `key = value` per line, `#` starts a comment.
//!
//! | key         | value                                              | default       |
//! |-------------|----------------------------------------------------|---------------|
//! | `graph`     | edge-list path, relative to the scenario file      |               |
//! | `generator` | `random` (instead of `graph`)                      |               |
//! | `agents`    | agent count for the generator                      |               |
//! | `threshold` | generator weight threshold                         | `0.3`         |
//! | `x0`        | `equidistant`, `constant 0.5`, or `0.1, 0.4, ...`  | `equidistant` |
//! | `target`    | `0` or `1`                                         | `1`           |
//! | `cap`       | per-agent control cap in `(0, 1)`                  |               |
//! | `units`     | budget in cap-sized units                          |               |
//! | `campaigns` | number of campaigns                                |               |
//! | `delta`     | time between campaigns, or `long`                  |               |
//! | `regime`    | `short`, `long` or `clustered`                     |               |
//! | `seed`      | generator seed                                     | `0`           |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use adplan_core::{BudgetConfig, Network, OpinionState, Regime, SocialGraph, Spacing, Target};

use crate::error::{HarnessError, Result};
use crate::generate::{generate_graph, RandomGraphSpec};
use crate::graph_io::read_graph;

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    Random { agents: usize, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialOpinions {
    Equidistant,
    Constant(f64),
    Explicit(Vec<f64>),
}

impl InitialOpinions {
    pub fn state(&self, agents: usize) -> Result<OpinionState> {
        let state = match self {
            InitialOpinions::Equidistant => Ok(OpinionState::equidistant(agents)),
            InitialOpinions::Constant(c) => OpinionState::constant(agents, *c),
            InitialOpinions::Explicit(x) => {
                if x.len() != agents {
                    return Err(HarnessError::Scenario(format!(
                        "x0 lists {} opinions for {agents} agents",
                        x.len()
                    )));
                }
                OpinionState::new(x.clone(), 0.0)
            }
        };
        state.map_err(|e| HarnessError::model("x0", e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub graph: GraphSource,
    pub x0: InitialOpinions,
    pub target: Target,
    pub cap: f64,
    pub units: usize,
    pub campaigns: usize,
    pub spacing: Spacing,
    pub regime: Regime,
    pub seed: u64,
}

/// Scenario with its graph resolved.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub network: Network,
    pub initial: OpinionState,
    pub config: BudgetConfig,
    /// Seed that produced the graph, when it was generated.
    pub graph_seed: Option<u64>,
}

const KEYS: [&str; 12] = [
    "graph", "generator", "agents", "threshold", "x0", "target", "cap", "units", "campaigns", "delta", "regime",
    "seed",
];

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::Unreadable { path: path.to_path_buf(), source: e })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }

    /// Parses scenario text; relative graph paths resolve against `base`.
    pub fn parse(text: &str, base: &Path, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| HarnessError::Parse { origin: origin.to_string(), line, message };
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(idx + 1, format!("expected `key = value`, found `{line}`")));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(idx + 1, format!("unknown key `{key}`")));
            }
            if entries.insert(key, (idx + 1, value.trim())).is_some() {
                return Err(err(idx + 1, format!("`{key}` given twice")));
            }
        }

        let required = |key: &str| -> Result<(usize, &str)> {
            entries.get(key).copied().ok_or_else(|| HarnessError::Scenario(format!("missing `{key}`")))
        };
        fn number<T: std::str::FromStr>(
            err: &dyn Fn(usize, String) -> HarnessError,
            key: &str,
            (line, v): (usize, &str),
        ) -> Result<T> {
            v.parse().map_err(|_| err(line, format!("bad value for `{key}`: `{v}`")))
        }

        let graph = match (entries.get("graph"), entries.get("generator")) {
            (Some(_), Some(_)) => return Err(HarnessError::Scenario("give either `graph` or `generator`".into())),
            (Some(&(_, p)), None) => GraphSource::File(base.join(p)),
            (None, Some(&(line, kind))) => {
                if kind != "random" {
                    return Err(err(line, format!("unknown generator `{kind}`")));
                }
                let agents: usize = number(&err, "agents", required("agents")?)?;
                let threshold = match entries.get("threshold") {
                    Some(&e) => number(&err, "threshold", e)?,
                    None => 0.3,
                };
                GraphSource::Random { agents, threshold }
            }
            (None, None) => return Err(HarnessError::Scenario("missing `graph` or `generator`".into())),
        };
        if matches!(graph, GraphSource::File(_)) {
            for key in ["agents", "threshold"] {
                if let Some(&(line, _)) = entries.get(key) {
                    return Err(err(line, format!("`{key}` only applies to generated graphs")));
                }
            }
        }

        let x0 = match entries.get("x0") {
            None => InitialOpinions::Equidistant,
            Some(&(line, v)) => parse_opinions(v).ok_or_else(|| err(line, format!("bad value for `x0`: `{v}`")))?,
        };
        let target = match entries.get("target") {
            None => Target::One,
            Some(&(line, v)) => match v {
                "0" => Target::Zero,
                "1" => Target::One,
                _ => return Err(err(line, format!("target must be 0 or 1, found `{v}`"))),
            },
        };
        let cap: f64 = number(&err, "cap", required("cap")?)?;
        if !(cap > 0.0 && cap < 1.0) {
            return Err(HarnessError::Scenario(format!("cap {cap} outside (0, 1)")));
        }
        let units = number(&err, "units", required("units")?)?;
        let campaigns: usize = number(&err, "campaigns", required("campaigns")?)?;
        if campaigns == 0 {
            return Err(HarnessError::Scenario("at least one campaign is required".into()));
        }
        let (line, delta) = required("delta")?;
        let spacing = if delta == "long" {
            Spacing::Long
        } else {
            let d: f64 = number(&err, "delta", (line, delta))?;
            if !(d.is_finite() && d > 0.0) {
                return Err(err(line, format!("delta must be positive, found {d}")));
            }
            Spacing::Finite(d)
        };
        let (line, regime) = required("regime")?;
        let regime = match regime {
            "short" => Regime::Short,
            "long" => Regime::Long,
            "clustered" => Regime::Clustered,
            _ => return Err(err(line, format!("unknown regime `{regime}`"))),
        };
        if regime == Regime::Long && spacing != Spacing::Long {
            return Err(HarnessError::Scenario("the long regime needs `delta = long`".into()));
        }
        let seed = match entries.get("seed") {
            Some(&e) => number(&err, "seed", e)?,
            None => 0,
        };
        Ok(Self { graph, x0, target, cap, units, campaigns, spacing, regime, seed })
    }

    pub fn graph(&self) -> Result<(SocialGraph, Option<u64>)> {
        match &self.graph {
            GraphSource::File(path) => Ok((read_graph(path)?, None)),
            GraphSource::Random { agents, threshold } => {
                let spec = RandomGraphSpec {
                    agents: *agents,
                    threshold: *threshold,
                    seed: self.seed,
                    connected: self.regime != Regime::Clustered,
                };
                let g = generate_graph(&spec)?;
                Ok((g.graph, Some(g.seed)))
            }
        }
    }

    /// Reads or generates the graph and checks it against the regime.
    pub fn resolve(&self) -> Result<Loaded> {
        let (graph, graph_seed) = self.graph()?;
        let network = Network::new(graph).map_err(|e| HarnessError::model("graph", e))?;
        if self.regime != Regime::Clustered && !network.is_connected() {
            return Err(HarnessError::Scenario(format!(
                "regime `{}` needs a weakly connected graph, found {} clusters",
                self.regime.name(),
                network.partition().len()
            )));
        }
        let initial = self.x0.state(network.agents())?;
        let config = BudgetConfig::discrete(self.cap, self.units, self.target, self.campaigns)
            .map_err(|e| HarnessError::model("budget", e))?;
        Ok(Loaded { scenario: self.clone(), network, initial, config, graph_seed })
    }
}

fn parse_opinions(v: &str) -> Option<InitialOpinions> {
    if v == "equidistant" {
        return Some(InitialOpinions::Equidistant);
    }
    if let Some(c) = v.strip_prefix("constant") {
        return c.trim().parse().ok().map(InitialOpinions::Constant);
    }
    v.split(',').map(|s| s.trim().parse().ok()).collect::<Option<Vec<f64>>>().map(InitialOpinions::Explicit)
}
