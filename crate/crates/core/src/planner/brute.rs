//! Exhaustive search over time allocations.
//!
//! Depth-first over campaigns so every prefix of `b` is simulated once and
//! shared by all of its completions. Prefixes that already spend more than
//! the budget are never expanded.

use alloc::vec::Vec;

use super::{AllocationPlan, Evaluator, Problem, TimeAllocation, TIE_TOLERANCE};
use crate::error::{Error, Result};

/// Default cap on `(min(N, Q) + 1)^(M + 1)`.
pub const DEFAULT_NODE_LIMIT: u128 = 100_000_000;

/// Finds the unit vector `b` with the lowest final cost.
///
/// Among allocations whose costs differ by at most [`TIE_TOLERANCE`], the
/// lexicographically largest `b` wins, so ties resolve towards spending early.
pub fn brute_force_plan(problem: &Problem<'_>, node_limit: u128) -> Result<AllocationPlan> {
    let q = problem.config().units()?;
    let per_campaign = problem.max_units_per_campaign()?;
    let campaigns = problem.config().campaigns();
    let candidates = search_space(per_campaign, campaigns);
    match candidates {
        Some(c) if c <= node_limit => {}
        _ => return Err(Error::SearchSpaceTooLarge { candidates, limit: node_limit }),
    }

    let evaluator = Evaluator::new(problem)?;
    let mut search = Search {
        evaluator: &evaluator,
        per_campaign,
        campaigns,
        prefix: Vec::with_capacity(campaigns),
        best_cost: f64::INFINITY,
        best: Vec::new(),
    };
    let x0 = problem.initial().opinions().to_vec();
    search.visit(0, q, &x0)?;

    let units = TimeAllocation::new(search.best);
    let trace = evaluator.evaluate_units(&units)?;
    Ok(AllocationPlan::from_trace(Some(units), trace, problem.regime()))
}

fn search_space(per_campaign: usize, campaigns: usize) -> Option<u128> {
    let base = per_campaign as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..campaigns {
        total = total.checked_mul(base)?;
    }
    Some(total)
}

struct Search<'e, 'p> {
    evaluator: &'e Evaluator<'p>,
    per_campaign: usize,
    campaigns: usize,
    prefix: Vec<usize>,
    best_cost: f64,
    best: Vec<usize>,
}

impl Search<'_, '_> {
    fn visit(&mut self, campaign: usize, remaining: usize, pre_jump: &[f64]) -> Result<()> {
        let order = self.evaluator.scores(pre_jump, campaign).priority_order();
        let last = campaign + 1 == self.campaigns;
        let top = self.per_campaign.min(remaining);
        // descending, so the first allocation found within a tie is the
        // lexicographically largest one
        for b in (0..=top).rev() {
            let mut x = pre_jump.to_vec();
            self.evaluator.jump_top(&mut x, &order, b);
            self.prefix.push(b);
            if last {
                let (_, _, cost) = self.evaluator.final_cost(&x);
                if cost < self.best_cost - TIE_TOLERANCE {
                    self.best_cost = cost;
                    self.best.clone_from(&self.prefix);
                }
            } else {
                self.evaluator.flow(&mut x)?;
                self.visit(campaign + 1, remaining - b, &x)?;
            }
            self.prefix.pop();
        }
        Ok(())
    }
}
