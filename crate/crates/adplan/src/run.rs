//! Runs one strategy on a resolved scenario.

use std::time::Instant;

use adplan_core::dynamics::PropagatorCache;
use adplan_core::planner::{broadcast_plan, uncontrolled_plan, Evaluator, Trace};
use adplan_core::{brute_force_plan, dp_plan, AllocationPlan, OpinionState, Problem, Spacing};

use crate::error::{HarnessError, Result};
use crate::scenario::Loaded;

/// How the budget is spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// No campaigns at all.
    None,
    /// Same spend on every agent, as early as possible.
    Broadcast,
    /// Exhaustive search over time allocations.
    BruteForce,
    /// Dynamic program; long regime only.
    Dp,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::None => "none",
            Strategy::Broadcast => "broadcast",
            Strategy::BruteForce => "brute-force",
            Strategy::Dp => "dp",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub node_limit: u128,
    /// Trajectory samples per inter-campaign gap.
    pub samples_per_gap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { node_limit: adplan_core::planner::DEFAULT_NODE_LIMIT, samples_per_gap: 10 }
    }
}

/// Total and per-agent final cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub total: f64,
    pub avg: f64,
}

impl From<&AllocationPlan> for Cost {
    fn from(p: &AllocationPlan) -> Self {
        Cost { total: p.cost_total(), avg: p.cost_avg() }
    }
}

/// One sampled row of the opinion trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub opinions: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub strategy: Strategy,
    pub plan: AllocationPlan,
    pub trace: Trace,
    pub uncontrolled: Cost,
    pub broadcast: Cost,
    /// Seconds spent computing the chosen plan.
    pub wall_time: f64,
    /// DP only: total cost predicted by the value recursion.
    pub predicted_total: Option<f64>,
    /// DP only: the first campaign alone reaches the target.
    pub degenerate: Option<bool>,
    pub trajectory: Vec<Sample>,
}

pub fn run_scenario(loaded: &Loaded, strategy: Strategy, options: &RunOptions) -> Result<Report> {
    let s = &loaded.scenario;
    let problem = Problem::new(&loaded.network, loaded.initial.clone(), loaded.config, s.spacing, s.regime)
        .map_err(|e| HarnessError::model("scenario", e))?;
    let ctx = |what: &'static str| move |e| HarnessError::model(what, e);

    let started = Instant::now();
    let mut predicted_total = None;
    let mut degenerate = None;
    let plan = match strategy {
        Strategy::None => uncontrolled_plan(&problem).map_err(ctx("uncontrolled"))?,
        Strategy::Broadcast => broadcast_plan(&problem).map_err(ctx("broadcast"))?,
        Strategy::BruteForce => brute_force_plan(&problem, options.node_limit).map_err(ctx("brute force"))?,
        Strategy::Dp => {
            let sol = dp_plan(&problem).map_err(ctx("dynamic program"))?;
            predicted_total = Some(sol.predicted_total_cost());
            degenerate = Some(sol.degenerate);
            sol.plan
        }
    };
    let wall_time = started.elapsed().as_secs_f64();

    let uncontrolled = Cost::from(&uncontrolled_plan(&problem).map_err(ctx("uncontrolled"))?);
    let broadcast = Cost::from(&broadcast_plan(&problem).map_err(ctx("broadcast"))?);
    let trace = Evaluator::new(&problem)
        .and_then(|e| e.evaluate_controls(plan.controls()))
        .map_err(ctx("replay"))?;
    let trajectory = sample_trajectory(loaded, &trace, options.samples_per_gap.max(1))?;
    Ok(Report { strategy, plan, trace, uncontrolled, broadcast, wall_time, predicted_total, degenerate, trajectory })
}

/// Displayed length of a gap: `delta`, or ten mixing times for long gaps.
pub fn display_gap(loaded: &Loaded) -> f64 {
    let settle = loaded.network.mixing_time().map_or(1.0, |t| 10.0 * t);
    match loaded.scenario.spacing {
        Spacing::Finite(delta) => delta,
        Spacing::Long => settle,
    }
}

/// Samples the flow between campaigns; each campaign gives a pre-jump and
/// a post-jump row at the same `t`. After the last campaign the flow runs
/// for ten mixing times.
fn sample_trajectory(loaded: &Loaded, trace: &Trace, per_gap: usize) -> Result<Vec<Sample>> {
    let gap = display_gap(loaded);
    let tail = loaded.network.mixing_time().map_or(gap, |t| 10.0 * t);
    let mut cache = PropagatorCache::new(loaded.network.laplacian().clone());
    let mut rows = Vec::new();
    let campaigns = trace.post_jump.len();
    let mut flow = |from: &[f64], t0: f64, span: f64, rows: &mut Vec<Sample>, keep_last: bool| -> Result<()> {
        let step = span / per_gap as f64;
        let mut state = OpinionState::new(from.to_vec(), 0.0).map_err(|e| HarnessError::model("trajectory", e))?;
        let last = if keep_last { per_gap } else { per_gap - 1 };
        for j in 1..=last {
            state = cache.propagate(&state, step).map_err(|e| HarnessError::model("trajectory", e))?;
            rows.push(Sample { t: t0 + j as f64 * step, opinions: state.opinions().to_vec() });
        }
        Ok(())
    };
    for k in 0..campaigns {
        let t = k as f64 * gap;
        rows.push(Sample { t, opinions: trace.pre_jump[k].clone() });
        rows.push(Sample { t, opinions: trace.post_jump[k].clone() });
        if k + 1 < campaigns {
            flow(&trace.post_jump[k], t, gap, &mut rows, false)?;
        } else {
            flow(&trace.post_jump[k], t, tail, &mut rows, true)?;
        }
    }
    Ok(rows)
}
