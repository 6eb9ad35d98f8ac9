use alloc::vec;
use alloc::vec::Vec;

use super::{Problem, Regime, Spacing, TimeAllocation};
use crate::allocation::{cluster_scores, long_campaign_scores, per_campaign_scores, InfluenceScores};
use crate::dynamics::{self, ControlAction, OpinionState, Propagator};
use crate::error::{Error, Result};

/// States and costs along one simulated plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// `x(t_k^-)` for each campaign.
    pub pre_jump: Vec<Vec<f64>>,
    /// `x(t_k)` right after each campaign.
    pub post_jump: Vec<Vec<f64>>,
    /// `u(t_k)` for each campaign.
    pub controls: Vec<Vec<f64>>,
    /// Agreement value of each cluster after the last campaign.
    pub final_consensus: Vec<f64>,
    pub cost_total: f64,
    pub cost_avg: f64,
    pub budget_spent: f64,
}

/// Simulates plans for one problem, reusing the inter-campaign exponential.
#[derive(Debug, Clone)]
pub struct Evaluator<'p> {
    problem: &'p Problem<'p>,
    propagator: Option<Propagator>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p Problem<'p>) -> Result<Self> {
        let propagator = match problem.spacing() {
            Spacing::Finite(delta) => Some(Propagator::new(problem.network().laplacian(), delta)?),
            Spacing::Long => None,
        };
        Ok(Self { problem, propagator })
    }

    pub fn problem(&self) -> &'p Problem<'p> {
        self.problem
    }

    /// Influence scores the regime uses before campaign `campaign`.
    pub fn scores(&self, pre_jump: &[f64], campaign: usize) -> InfluenceScores {
        let net = self.problem.network();
        let target = self.problem.config().target();
        let state = OpinionState::from_raw(pre_jump.to_vec());
        match self.problem.regime() {
            Regime::Short => per_campaign_scores(&state, net.centrality(), target),
            Regime::Long => long_campaign_scores(&state, net.centrality(), target, campaign),
            Regime::Clustered => cluster_scores(&state, net.partition(), net.centrality(), target),
        }
    }

    /// Moves `x` from just after one campaign to just before the next.
    pub(crate) fn flow(&self, x: &mut Vec<f64>) -> Result<()> {
        match &self.propagator {
            Some(p) => {
                let next = p.apply_slice(x)?;
                *x = next;
            }
            None => {
                let net = self.problem.network();
                let limits = dynamics::consensus_of(x, net.partition(), net.centrality());
                *x = dynamics::expand_clusters(&limits, net.partition());
            }
        }
        Ok(())
    }

    /// Cluster agreement values and `(total, average)` cost reached from `x`.
    pub(crate) fn final_cost(&self, x: &[f64]) -> (Vec<f64>, f64, f64) {
        let net = self.problem.network();
        let target = self.problem.config().target();
        let limits = dynamics::consensus_of(x, net.partition(), net.centrality());
        let total = dynamics::cost_infinity(&limits, net.partition(), target);
        let avg = total / net.agents() as f64;
        (limits, total, avg)
    }

    /// Jumps the first `units` agents of `order` by the cap.
    pub(crate) fn jump_top(&self, x: &mut [f64], order: &[usize], units: usize) {
        let cap = self.problem.config().cap();
        let d = self.problem.config().target().value();
        for &a in order.iter().take(units) {
            x[a] = cap * d + (1.0 - cap) * x[a];
        }
    }

    /// Simulates a unit vector, filling each campaign with the regime's rule.
    pub fn evaluate_units(&self, units: &TimeAllocation) -> Result<Trace> {
        let cfg = self.problem.config();
        let q = cfg.units()?;
        if units.campaigns() != cfg.campaigns() {
            return Err(Error::DimensionMismatch { expected: cfg.campaigns(), found: units.campaigns() });
        }
        if !units.is_feasible(self.problem.agents(), q) {
            return Err(Error::InvalidParameter("time allocation exceeds the budget or the per-campaign limit"));
        }
        let cap = cfg.cap();
        let n = self.problem.agents();
        let controls = self.run(|pre, k| {
            let order = self.scores(pre, k).priority_order();
            let mut u = vec![0.0; n];
            for &a in order.iter().take(units.units()[k]) {
                u[a] = cap;
            }
            u
        })?;
        Ok(controls)
    }

    /// Simulates an explicit control matrix `controls[k][i]`.
    pub fn evaluate_controls(&self, controls: &[Vec<f64>]) -> Result<Trace> {
        let cfg = self.problem.config();
        let n = self.problem.agents();
        if controls.len() != cfg.campaigns() {
            return Err(Error::DimensionMismatch { expected: cfg.campaigns(), found: controls.len() });
        }
        let mut spent = 0.0;
        for u in controls {
            if u.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: u.len() });
            }
            spent += ControlAction::new(u.clone(), cfg.cap())?.spent();
        }
        if spent > cfg.total_budget() * (1.0 + 1e-9) + 1e-12 {
            return Err(Error::InvalidParameter("controls exceed the total budget"));
        }
        self.run(|_, k| controls[k].clone())
    }

    fn run<F>(&self, mut choose: F) -> Result<Trace>
    where
        F: FnMut(&[f64], usize) -> Vec<f64>,
    {
        let cfg = self.problem.config();
        let campaigns = cfg.campaigns();
        let mut x = self.problem.initial().opinions().to_vec();
        let mut pre_jump = Vec::with_capacity(campaigns);
        let mut post_jump = Vec::with_capacity(campaigns);
        let mut all_controls = Vec::with_capacity(campaigns);
        let mut spent = 0.0;
        for k in 0..campaigns {
            if k > 0 {
                self.flow(&mut x)?;
            }
            pre_jump.push(x.clone());
            let u = choose(&x, k);
            dynamics::jump_in_place(&mut x, &u, cfg.target());
            dynamics::settle(&mut x)?;
            spent += u.iter().sum::<f64>();
            post_jump.push(x.clone());
            all_controls.push(u);
        }
        let (final_consensus, cost_total, cost_avg) = self.final_cost(&x);
        Ok(Trace {
            pre_jump,
            post_jump,
            controls: all_controls,
            final_consensus,
            cost_total,
            cost_avg,
            budget_spent: spent,
        })
    }
}

/// Simulates a unit vector from the problem's initial state.
pub fn evaluate_plan(problem: &Problem<'_>, units: &TimeAllocation) -> Result<Trace> {
    Evaluator::new(problem)?.evaluate_units(units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{apply_campaign, consensus_limit, propagate, BudgetConfig, Target};
    use crate::graph::{Network, SocialGraph};
    use crate::planner::{broadcast_plan, uncontrolled_plan};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    fn line4() -> Network {
        // undirected path 1 - 2 - 3 - 4 with distinct weights
        let g = SocialGraph::from_edges(
            4,
            [(0, 1, 1.0), (1, 0, 0.5), (1, 2, 0.8), (2, 1, 1.2), (2, 3, 0.3), (3, 2, 0.9)],
        )
        .unwrap();
        Network::new(g).unwrap()
    }

    #[test]
    fn zero_units_give_uncontrolled_cost() {
        let net = line4();
        let x0 = OpinionState::new(vec![0.1, 0.4, 0.7, 0.2], 0.0).unwrap();
        let cfg = BudgetConfig::discrete(0.2, 3, Target::One, 3).unwrap();
        let p = Problem::new(&net, x0.clone(), cfg, Spacing::Finite(0.5), Regime::Short).unwrap();
        let trace = evaluate_plan(&p, &TimeAllocation::zeros(3)).unwrap();
        let c = consensus_limit(&x0, net.partition(), net.centrality())[0];
        assert!(close(trace.cost_avg, 1.0 - c, 1e-12));
        assert_eq!(trace.budget_spent, 0.0);
        assert_eq!(uncontrolled_plan(&p).unwrap().cost_avg(), trace.cost_avg);
    }

    #[test]
    fn full_single_campaign_equals_broadcast_on_uniform_network() {
        let n = 4;
        let edges = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j, 1.0)));
        let net = Network::new(SocialGraph::from_edges(n, edges).unwrap()).unwrap();
        let x0 = OpinionState::constant(n, 0.3).unwrap();
        let cfg = BudgetConfig::discrete(0.2, n, Target::One, 1).unwrap();
        let p = Problem::new(&net, x0, cfg, Spacing::Finite(1.0), Regime::Short).unwrap();
        let planned = evaluate_plan(&p, &TimeAllocation::new(vec![n])).unwrap();
        let broadcast = broadcast_plan(&p).unwrap();
        assert!(close(planned.cost_avg, broadcast.cost_avg(), 1e-15));
        assert!(close(planned.cost_avg, 0.7 * 0.8, 1e-12));
    }

    #[test]
    fn line_graph_trace_matches_hand_composition() {
        let net = line4();
        let x0 = OpinionState::equidistant(4);
        let cfg = BudgetConfig::discrete(0.2, 2, Target::One, 2).unwrap();
        let p = Problem::new(&net, x0.clone(), cfg, Spacing::Finite(0.5), Regime::Short).unwrap();
        let trace = evaluate_plan(&p, &TimeAllocation::new(vec![1, 1])).unwrap();

        // hand composition from the public primitives
        let v = net.centrality();
        let pick = |s: &OpinionState| -> usize {
            let mut best = 0;
            for i in 1..4 {
                let si = v.get(i) * (1.0 - s.opinions()[i]);
                let sb = v.get(best) * (1.0 - s.opinions()[best]);
                if si > sb {
                    best = i;
                }
            }
            best
        };
        let mut u = vec![0.0; 4];
        u[pick(&x0)] = 0.2;
        let s = apply_campaign(&x0, &ControlAction::new(u.clone(), 0.2).unwrap(), Target::One).unwrap();
        assert_eq!(trace.controls[0], u);
        let s = propagate(&s, net.laplacian(), 0.5).unwrap();
        for (a, b) in trace.pre_jump[1].iter().zip(s.opinions()) {
            assert!(close(*a, *b, 1e-14));
        }
        let mut u = vec![0.0; 4];
        u[pick(&s)] = 0.2;
        let s = apply_campaign(&s, &ControlAction::new(u.clone(), 0.2).unwrap(), Target::One).unwrap();
        assert_eq!(trace.controls[1], u);
        let c = consensus_limit(&s, net.partition(), net.centrality())[0];
        assert!(close(trace.cost_avg, 1.0 - c, 1e-14));
        assert!(close(trace.cost_total, 4.0 * (1.0 - c), 1e-13));
        assert!(close(trace.budget_spent, 0.4, 1e-15));
    }

    #[test]
    fn infeasible_units_are_rejected() {
        let net = line4();
        let cfg = BudgetConfig::discrete(0.2, 3, Target::One, 2).unwrap();
        let p = Problem::new(&net, OpinionState::equidistant(4), cfg, Spacing::Long, Regime::Long).unwrap();
        assert!(evaluate_plan(&p, &TimeAllocation::new(vec![2, 2])).is_err());
        assert!(evaluate_plan(&p, &TimeAllocation::new(vec![1])).is_err());
        let e = Evaluator::new(&p).unwrap();
        assert!(e.evaluate_controls(&[vec![0.2; 4], vec![0.0; 4]]).is_err());
    }

    #[test]
    fn long_spacing_reaches_consensus_between_campaigns() {
        let net = line4();
        let cfg = BudgetConfig::discrete(0.2, 2, Target::One, 2).unwrap();
        let p = Problem::new(&net, OpinionState::equidistant(4), cfg, Spacing::Long, Regime::Long).unwrap();
        let trace = evaluate_plan(&p, &TimeAllocation::new(vec![1, 1])).unwrap();
        let first = trace.pre_jump[1][0];
        assert!(trace.pre_jump[1].iter().all(|&x| x == first));
    }

    #[test]
    fn regime_checks() {
        let pair = Network::new(SocialGraph::from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap()).unwrap();
        let cfg = BudgetConfig::discrete(0.2, 1, Target::One, 1).unwrap();
        let x0 = OpinionState::equidistant(3);
        assert!(matches!(
            Problem::new(&pair, x0.clone(), cfg, Spacing::Long, Regime::Long),
            Err(Error::NotConnected { clusters: 2 })
        ));
        assert!(Problem::new(&pair, x0, cfg, Spacing::Finite(0.5), Regime::Clustered).is_ok());
        let net = line4();
        assert!(matches!(
            Problem::new(&net, OpinionState::equidistant(4), cfg, Spacing::Finite(0.5), Regime::Long),
            Err(Error::RegimeMismatch(_))
        ));
    }
}
