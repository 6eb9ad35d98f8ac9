//! Random social graphs.
//!
//! Weights come from xoshiro256++ seeded through SplitMix64
//! (`Xoshiro256PlusPlus::seed_from_u64`), so a seed gives the same graph on
//! every platform. Off-diagonal entries are drawn row by row, `a_11, a_12,
//! ..., a_NN`, each uniform on `[0, 1)`; draws below the threshold become 0.

use adplan_core::{Network, SocialGraph};
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{HarnessError, Result};

/// Attempts before giving up on a usable graph.
pub const MAX_ATTEMPTS: u32 = 101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomGraphSpec {
    pub agents: usize,
    /// Weights below this are dropped; must lie in `[0, 1)`.
    pub threshold: f64,
    pub seed: u64,
    /// Insist on a single weakly connected cluster. Without it, every
    /// cluster still needs its own spanning tree.
    pub connected: bool,
}

impl RandomGraphSpec {
    pub fn new(agents: usize, seed: u64) -> Self {
        Self { agents, threshold: 0.3, seed, connected: true }
    }
}

/// A generated graph and the seed that produced it.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: SocialGraph,
    pub seed: u64,
}

/// One draw, with no validity check.
pub fn draw_graph(agents: usize, threshold: f64, seed: u64) -> SocialGraph {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..agents {
        for j in 0..agents {
            if i == j {
                continue;
            }
            let w: f64 = rng.random();
            if w >= threshold && w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    SocialGraph::from_edges(agents, edges).expect("drawn weights are valid")
}

/// Draws with `seed`, `seed + 1`, ... until the graph is usable.
pub fn generate_graph(spec: &RandomGraphSpec) -> Result<Generated> {
    if spec.agents == 0 {
        return Err(HarnessError::Scenario("random graph needs at least one agent".into()));
    }
    if !(0.0..1.0).contains(&spec.threshold) {
        return Err(HarnessError::Scenario(format!("threshold {} outside [0, 1)", spec.threshold)));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let seed = spec.seed.wrapping_add(attempt as u64);
        let graph = draw_graph(spec.agents, spec.threshold, seed);
        let usable = match Network::new(graph.clone()) {
            Ok(net) => !spec.connected || net.is_connected(),
            Err(_) => false,
        };
        if usable {
            return Ok(Generated { graph, seed });
        }
    }
    Err(HarnessError::GenerationFailed { seed: spec.seed, attempts: MAX_ATTEMPTS })
}
