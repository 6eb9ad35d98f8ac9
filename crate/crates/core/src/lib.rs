//! Budget allocation for advertising campaigns over a social network.
//!
//! Opinions evolve by linear consensus dynamics between campaigns and jump
//! towards a target opinion at each campaign. Given a discrete budget, the
//! planners decide which agents to target (water-filling on influence
//! scores) and when (exhaustive search, or a dynamic program when the
//! network has time to agree between campaigns).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod allocation;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod planner;

pub use allocation::{water_fill, BroadcastSchedule, CampaignAllocation, InfluenceScores, ScoreKind};
pub use dynamics::{BudgetConfig, ControlAction, OpinionState, Propagator, Target};
pub use error::{Error, Result};
pub use graph::{CentralityVector, ClusterPartition, Laplacian, Network, SocialGraph};
pub use planner::{
    brute_force_plan, dp_plan, AllocationPlan, DpSolution, Problem, Regime, Spacing, TimeAllocation,
};
