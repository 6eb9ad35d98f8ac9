//! Time allocation of discrete budget units across campaigns.
//!
//! A plan decides how many cap-sized units `b_k` each campaign receives; the
//! regime's water-filling rule then decides which agents get them.

mod brute;
mod dp;
mod evaluate;

use alloc::vec;
use alloc::vec::Vec;

use crate::allocation::broadcast_schedule;
use crate::dynamics::{BudgetConfig, OpinionState};
use crate::error::{Error, Result};
use crate::graph::Network;

pub use brute::{brute_force_plan, DEFAULT_NODE_LIMIT};
pub use dp::{dp_plan, DpSolution, ValueTable};
pub use evaluate::{evaluate_plan, Evaluator, Trace};

/// Costs closer than this are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Which spatial allocation rule fills each campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Weakly connected network, finite gaps, rank by `v_i |d - x_i|`.
    Short,
    /// Weakly connected network, consensus between campaigns.
    Long,
    /// Union of clusters, rank by `N_c v_i |d - x_i|`.
    Clustered,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Short => "short",
            Regime::Long => "long",
            Regime::Clustered => "clustered",
        }
    }
}

/// Time between consecutive campaigns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// Every gap lasts `delta`.
    Finite(f64),
    /// Gaps long enough for each cluster to reach agreement.
    Long,
}

/// Units `b_k` per campaign.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeAllocation(Vec<usize>);

impl TimeAllocation {
    pub fn new(units: Vec<usize>) -> Self {
        Self(units)
    }

    pub fn zeros(campaigns: usize) -> Self {
        Self(vec![0; campaigns])
    }

    pub fn units(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn campaigns(&self) -> usize {
        self.0.len()
    }

    /// Checks `sum b_k <= budget_units` and `b_k <= min(N, Q)`.
    pub fn is_feasible(&self, agents: usize, budget_units: usize) -> bool {
        let per_campaign = agents.min(budget_units);
        self.total() <= budget_units && self.0.iter().all(|&b| b <= per_campaign)
    }
}

/// One planning instance: network, initial opinions, budget and regime.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    network: &'a Network,
    initial: OpinionState,
    config: BudgetConfig,
    spacing: Spacing,
    regime: Regime,
}

impl<'a> Problem<'a> {
    pub fn new(
        network: &'a Network,
        initial: OpinionState,
        config: BudgetConfig,
        spacing: Spacing,
        regime: Regime,
    ) -> Result<Self> {
        if initial.agents() != network.agents() {
            return Err(Error::DimensionMismatch {
                expected: network.agents(),
                found: initial.agents(),
            });
        }
        if let Spacing::Finite(delta) = spacing {
            if !(delta.is_finite() && delta > 0.0) {
                return Err(Error::InvalidParameter("delta must be positive and finite"));
            }
        }
        match regime {
            Regime::Short | Regime::Long if !network.is_connected() => {
                return Err(Error::NotConnected { clusters: network.partition().len() });
            }
            Regime::Long if spacing != Spacing::Long => {
                return Err(Error::RegimeMismatch("long regime needs long spacing"));
            }
            _ => {}
        }
        Ok(Self { network, initial, config, spacing, regime })
    }

    pub fn network(&self) -> &'a Network {
        self.network
    }

    pub fn initial(&self) -> &OpinionState {
        &self.initial
    }

    pub fn config(&self) -> &BudgetConfig {
        &self.config
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn agents(&self) -> usize {
        self.network.agents()
    }

    /// Largest number of units a single campaign may use, `min(N, Q)`.
    pub fn max_units_per_campaign(&self) -> Result<usize> {
        Ok(self.config.units()?.min(self.agents()))
    }
}

/// Full control matrix for every campaign together with its final cost.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    units: Option<TimeAllocation>,
    controls: Vec<Vec<f64>>,
    cost_total: f64,
    cost_avg: f64,
    budget_spent: f64,
    regime: Regime,
}

impl AllocationPlan {
    pub(crate) fn from_trace(units: Option<TimeAllocation>, trace: Trace, regime: Regime) -> Self {
        Self {
            units,
            controls: trace.controls,
            cost_total: trace.cost_total,
            cost_avg: trace.cost_avg,
            budget_spent: trace.budget_spent,
            regime,
        }
    }

    /// The unit vector `b`; `None` for plans not built from whole units.
    pub fn units(&self) -> Option<&TimeAllocation> {
        self.units.as_ref()
    }

    /// `controls()[k][i]` is `u_i(t_k)`.
    pub fn controls(&self) -> &[Vec<f64>] {
        &self.controls
    }

    /// `sum_c N_c |x_c^inf - d|`.
    pub fn cost_total(&self) -> f64 {
        self.cost_total
    }

    /// `cost_total / N`.
    pub fn cost_avg(&self) -> f64 {
        self.cost_avg
    }

    pub fn budget_spent(&self) -> f64 {
        self.budget_spent
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Budget spent at each campaign.
    pub fn campaign_spend(&self) -> Vec<f64> {
        self.controls.iter().map(|u| u.iter().sum()).collect()
    }
}

/// No advertising at all.
pub fn uncontrolled_plan(problem: &Problem<'_>) -> Result<AllocationPlan> {
    let units = TimeAllocation::zeros(problem.config().campaigns());
    let trace = Evaluator::new(problem)?.evaluate_units(&units)?;
    Ok(AllocationPlan::from_trace(Some(units), trace, problem.regime()))
}

/// Uniform spend on every agent, as much and as early as the budget allows.
pub fn broadcast_plan(problem: &Problem<'_>) -> Result<AllocationPlan> {
    let cfg = problem.config();
    let n = problem.agents();
    let schedule = broadcast_schedule(cfg.total_budget(), n, cfg.cap(), cfg.campaigns());
    let controls: Vec<Vec<f64>> = schedule.alphas().iter().map(|&a| vec![a; n]).collect();
    let trace = Evaluator::new(problem)?.evaluate_controls(&controls)?;
    Ok(AllocationPlan::from_trace(None, trace, problem.regime()))
}
