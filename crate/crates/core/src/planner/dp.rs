//! Dynamic program over log cost factors for the long regime.
//!
//! With consensus reached before every campaign, the distance to the target
//! after the last campaign factors as `f0(b_0) * prod_{k>=1} f(b_k)`, where
//! both factors only depend on how many units the campaign uses.

use alloc::vec;
use alloc::vec::Vec;

use super::{AllocationPlan, Evaluator, Problem, Regime, TimeAllocation, TIE_TOLERANCE};
use crate::allocation::long_campaign_scores;
use crate::error::{Error, Result};

/// `V_k(r)` together with the minimizing `b` for every stage and residual budget.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    values: Vec<Vec<f64>>,
    choices: Vec<Vec<usize>>,
}

impl ValueTable {
    /// Optimal log factor from campaign `k` on with `r` units left.
    pub fn value(&self, k: usize, r: usize) -> f64 {
        self.values[k][r]
    }

    /// Units the optimum spends at campaign `k` with `r` units left.
    pub fn choice(&self, k: usize, r: usize) -> usize {
        self.choices[k][r]
    }

    pub fn campaigns(&self) -> usize {
        self.values.len()
    }

    /// Largest residual budget stored, `Q`.
    pub fn units(&self) -> usize {
        self.values.first().map_or(0, |row| row.len() - 1)
    }
}

/// Output of [`dp_plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub table: ValueTable,
    pub plan: AllocationPlan,
    /// `f0(b)` for `b = 0..=min(N, Q)`.
    pub first_stage: Vec<f64>,
    /// `f(b)` for `b = 0..=min(N, Q)`.
    pub later_stage: Vec<f64>,
    /// Some `f0(b_0)` is zero. The plan then spends the smallest such `b_0`
    /// at the first campaign and nothing afterwards, at zero cost.
    pub degenerate: bool,
}

impl DpSolution {
    /// `N * exp(V_0(Q))`, the total cost the recursion predicts.
    pub fn predicted_total_cost(&self) -> f64 {
        let n = self.plan.controls().first().map_or(0, Vec::len) as f64;
        let q = self.table.units();
        n * libm::exp(self.table.value(0, q))
    }
}

/// Optimal time allocation for the long regime on a weakly connected network.
pub fn dp_plan(problem: &Problem<'_>) -> Result<DpSolution> {
    if problem.regime() != Regime::Long {
        return Err(Error::RegimeMismatch("dynamic program needs the long regime"));
    }
    let cfg = problem.config();
    let q = cfg.units()?;
    let bmax = problem.max_units_per_campaign()?;
    let campaigns = cfg.campaigns();
    if campaigns == 0 {
        return Err(Error::InvalidParameter("at least one campaign is required"));
    }
    let cap = cfg.cap();
    let target = cfg.target();
    let centrality = problem.network().centrality();
    let x0 = problem.initial();

    let first = long_campaign_scores(x0, centrality, target, 0);
    let first_stage = stage_factors(first.scores(), &first.priority_order(), cap, bmax);
    let later = long_campaign_scores(x0, centrality, target, 1);
    let later_stage = stage_factors(later.scores(), &later.priority_order(), cap, bmax);

    let table = backward(&first_stage, &later_stage, campaigns, q, bmax);

    // f0 hits zero: the target is reached by the first campaign, and the
    // log recursion has nothing left to compare
    let zero_at = first_stage.iter().position(|&f| f <= 0.0);
    let degenerate = zero_at.is_some();
    let units = if let Some(b0) = zero_at {
        let mut b = vec![0; campaigns];
        b[0] = b0;
        TimeAllocation::new(b)
    } else {
        let mut r = q;
        let mut b = Vec::with_capacity(campaigns);
        for k in 0..campaigns {
            let bk = table.choice(k, r);
            b.push(bk);
            r -= bk;
        }
        TimeAllocation::new(b)
    };
    let trace = Evaluator::new(problem)?.evaluate_units(&units)?;
    let plan = AllocationPlan::from_trace(Some(units), trace, Regime::Long);
    Ok(DpSolution { table, plan, first_stage, later_stage, degenerate })
}

/// `sum_i s_i - cap * (sum of the b largest s_i)` for every `b`.
fn stage_factors(scores: &[f64], order: &[usize], cap: f64, bmax: usize) -> Vec<f64> {
    let total: f64 = scores.iter().sum();
    let mut out = Vec::with_capacity(bmax + 1);
    let mut reached = 0.0;
    out.push(total);
    for &a in order.iter().take(bmax) {
        reached += scores[a];
        out.push((total - cap * reached).max(0.0));
    }
    out
}

fn log_factor(f: f64) -> f64 {
    if f > 0.0 {
        libm::log(f)
    } else {
        f64::NEG_INFINITY
    }
}

fn backward(first: &[f64], later: &[f64], campaigns: usize, q: usize, bmax: usize) -> ValueTable {
    let mut values = vec![vec![0.0; q + 1]; campaigns];
    let mut choices = vec![vec![0usize; q + 1]; campaigns];
    let last = campaigns - 1;
    let first_log: Vec<f64> = first.iter().map(|&f| log_factor(f)).collect();
    let later_log: Vec<f64> = later.iter().map(|&f| log_factor(f)).collect();

    // the last campaign spends whatever it may, since factors never grow with b
    let stage_log = |k: usize| if k == 0 { &first_log } else { &later_log };
    for r in 0..=q {
        let b = r.min(bmax);
        values[last][r] = stage_log(last)[b];
        choices[last][r] = b;
    }
    for k in (0..last).rev() {
        let logs = stage_log(k);
        for r in 0..=q {
            let mut best = f64::INFINITY;
            let mut arg = 0;
            // descending so near-ties keep the larger early spend
            for b in (0..=r.min(bmax)).rev() {
                let v = logs[b] + values[k + 1][r - b];
                if v < best - TIE_TOLERANCE {
                    best = v;
                    arg = b;
                }
            }
            values[k][r] = best;
            choices[k][r] = arg;
        }
    }
    ValueTable { values, choices }
}
