//! Spatial allocation of a campaign budget.
//!
//! Every rule here has the same water-filling shape: rank agents by an
//! influence score, give the cap to as many top agents as the budget allows,
//! the remainder to the next agent, and nothing to the rest. The rules differ
//! only in the score.

use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{OpinionState, Target};
use crate::graph::{CentralityVector, ClusterPartition};

/// Relative slack when deciding that `budget / cap` is a whole number.
const SNAP: f64 = 1e-9;

/// Which influence measure produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    /// `v_i |d - x_i|`, one campaign on a weakly connected network.
    PerCampaign,
    /// `v_i`, campaigns after the first under long spacing.
    LongCampaign,
    /// `N_c v_i |d - x_i|` with cluster-local centrality.
    Clustered,
}

/// Nonnegative per-agent priority scores.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceScores {
    scores: Vec<f64>,
    kind: ScoreKind,
}

impl InfluenceScores {
    /// Panics on a negative or non-finite score.
    pub fn new(scores: Vec<f64>, kind: ScoreKind) -> Self {
        assert!(
            scores.iter().all(|s| s.is_finite() && *s >= 0.0),
            "influence scores must be finite and nonnegative"
        );
        Self { scores, kind }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Agents by decreasing score; equal scores keep ascending index.
    pub fn priority_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        order
    }

    /// Same ranking with every score multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0);
        Self::new(self.scores.iter().map(|s| s * factor).collect(), self.kind)
    }
}

/// Water-filled controls for one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignAllocation {
    controls: Vec<f64>,
    budget: f64,
    unspent: f64,
}

impl CampaignAllocation {
    pub fn controls(&self) -> &[f64] {
        &self.controls
    }

    pub fn into_controls(self) -> Vec<f64> {
        self.controls
    }

    /// Requested campaign budget `beta`.
    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn spent(&self) -> f64 {
        self.controls.iter().sum()
    }

    /// Budget left over once every agent sits at the cap.
    pub fn unspent(&self) -> f64 {
        self.unspent
    }

    /// Entries strictly between 0 and the cap.
    pub fn fractional_count(&self, cap: f64) -> usize {
        self.controls.iter().filter(|&&u| u > 0.0 && u < cap).count()
    }
}

/// Distributes `beta` over agents in score order, at most `cap` each.
///
/// Panics unless `cap` is in `(0, 1)` and `beta >= 0`.
pub fn water_fill(scores: &InfluenceScores, beta: f64, cap: f64) -> CampaignAllocation {
    assert!(cap > 0.0 && cap < 1.0, "cap must lie in (0, 1)");
    assert!(beta.is_finite() && beta >= 0.0, "campaign budget must be nonnegative");
    let n = scores.len();
    let ratio = beta / cap;
    let nearest = libm::round(ratio);
    let (full, remainder) = if libm::fabs(ratio - nearest) <= SNAP * nearest.max(1.0) {
        (nearest as usize, 0.0)
    } else {
        let full = libm::floor(ratio);
        (full as usize, (beta - full * cap).max(0.0))
    };
    let mut controls = vec![0.0; n];
    let order = scores.priority_order();
    for &a in order.iter().take(full) {
        controls[a] = cap;
    }
    let mut unspent = 0.0;
    if full >= n {
        unspent = beta - n as f64 * cap;
        if unspent < 0.0 {
            unspent = 0.0;
        }
    } else if remainder > 0.0 {
        controls[order[full]] = remainder;
    }
    CampaignAllocation { controls, budget: beta, unspent }
}

/// Gives exactly `cap` to the top `units` agents.
pub fn water_fill_units(scores: &InfluenceScores, units: usize, cap: f64) -> CampaignAllocation {
    let n = scores.len();
    let mut controls = vec![0.0; n];
    for &a in scores.priority_order().iter().take(units) {
        controls[a] = cap;
    }
    CampaignAllocation {
        controls,
        budget: units as f64 * cap,
        unspent: units.saturating_sub(n) as f64 * cap,
    }
}

/// `v_i |d - x_i(t_k^-)|`.
pub fn per_campaign_scores(state: &OpinionState, centrality: &CentralityVector, target: Target) -> InfluenceScores {
    let d = target.value();
    let scores = state
        .opinions()
        .iter()
        .zip(centrality.values())
        .map(|(x, v)| v * libm::fabs(d - x))
        .collect();
    InfluenceScores::new(scores, ScoreKind::PerCampaign)
}

/// First campaign: as [`per_campaign_scores`]. Later campaigns: `v_i`.
pub fn long_campaign_scores(
    state: &OpinionState,
    centrality: &CentralityVector,
    target: Target,
    campaign: usize,
) -> InfluenceScores {
    if campaign == 0 {
        per_campaign_scores(state, centrality, target)
    } else {
        InfluenceScores::new(centrality.values().to_vec(), ScoreKind::LongCampaign)
    }
}

/// `N_c v_j |d - x_j(t_k^-)|` for agent `j` in cluster `c`.
pub fn cluster_scores(
    state: &OpinionState,
    partition: &ClusterPartition,
    centrality: &CentralityVector,
    target: Target,
) -> InfluenceScores {
    let d = target.value();
    let sizes = partition.sizes();
    let scores = state
        .opinions()
        .iter()
        .enumerate()
        .map(|(j, x)| sizes[partition.cluster_of(j)] as f64 * centrality.get(j) * libm::fabs(d - x))
        .collect();
    InfluenceScores::new(scores, ScoreKind::Clustered)
}

/// Uniform per-agent spend `alpha_k` for each campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastSchedule {
    alphas: Vec<f64>,
    unspent: f64,
}

impl BroadcastSchedule {
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Budget that did not fit into `campaigns * agents * cap`.
    pub fn unspent(&self) -> f64 {
        self.unspent
    }

    /// `prod_k (1 - alpha_k)`, the factor by which the gap to the target shrinks.
    pub fn retention(&self) -> f64 {
        self.alphas.iter().map(|a| 1.0 - a).product()
    }
}

/// Spends as much as possible as early as possible: full campaigns at the cap,
/// then one partial campaign, then nothing.
pub fn broadcast_schedule(total_budget: f64, agents: usize, cap: f64, campaigns: usize) -> BroadcastSchedule {
    assert!(cap > 0.0 && cap < 1.0, "cap must lie in (0, 1)");
    assert!(total_budget.is_finite() && total_budget >= 0.0, "budget must be nonnegative");
    assert!(agents > 0, "need at least one agent");
    let per_campaign = agents as f64 * cap;
    let ratio = total_budget / per_campaign;
    let nearest = libm::round(ratio);
    let (full, partial) = if libm::fabs(ratio - nearest) <= SNAP * nearest.max(1.0) {
        (nearest as usize, 0.0)
    } else {
        let full = libm::floor(ratio);
        (full as usize, total_budget / agents as f64 - cap * full)
    };
    let mut alphas = vec![0.0; campaigns];
    for a in alphas.iter_mut().take(full) {
        *a = cap;
    }
    if full < campaigns {
        alphas[full] = partial.max(0.0);
    }
    let spent: f64 = alphas.iter().map(|a| a * agents as f64).sum();
    BroadcastSchedule { alphas, unspent: (total_budget - spent).max(0.0) }
}

/// Closed-form broadcast cost `|N d - 1^T x_0^inf| prod_k (1 - alpha_k)` on a
/// weakly connected network whose uncontrolled agreement value is `consensus`.
pub fn broadcast_cost(consensus: f64, agents: usize, target: Target, alphas: &[f64]) -> f64 {
    let gap = agents as f64 * libm::fabs(target.value() - consensus);
    gap * alphas.iter().map(|a| 1.0 - a).product::<f64>()
}
