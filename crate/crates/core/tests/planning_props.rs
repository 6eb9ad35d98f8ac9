mod common;

use adplan_core::allocation::{broadcast_cost, per_campaign_scores, water_fill};
use adplan_core::dynamics::{apply_campaign, consensus_limit};
use adplan_core::planner::{broadcast_plan, evaluate_plan, uncontrolled_plan, DEFAULT_NODE_LIMIT};
use adplan_core::{
    brute_force_plan, dp_plan, BudgetConfig, ControlAction, InfluenceScores, Network, OpinionState, Problem,
    Regime, ScoreKind, Spacing, Target, TimeAllocation,
};
use common::{connected_graph, with_opinions};
use proptest::prelude::*;

const CAPS: [f64; 3] = [0.1, 0.2, 0.3];

fn one_campaign_cost(net: &Network, x: &OpinionState, u: &[f64], cap: f64, d: Target) -> f64 {
    let after = apply_campaign(x, &ControlAction::new(u.to_vec(), cap).unwrap(), d).unwrap();
    let c = consensus_limit(&after, net.partition(), net.centrality())[0];
    net.agents() as f64 * (c - d.value()).abs()
}

fn target(one: bool) -> Target {
    if one {
        Target::One
    } else {
        Target::Zero
    }
}

#[derive(Debug, Clone)]
struct Instance {
    net: Network,
    x0: OpinionState,
    cap: f64,
    units: usize,
    campaigns: usize,
    target: Target,
}

impl Instance {
    fn problem(&self, spacing: Spacing, regime: Regime) -> Problem<'_> {
        let cfg = BudgetConfig::discrete(self.cap, self.units, self.target, self.campaigns).unwrap();
        Problem::new(&self.net, self.x0.clone(), cfg, spacing, regime).unwrap()
    }

    fn with_units(&self, units: usize) -> Self {
        Self { units, ..self.clone() }
    }
}

fn instance(max_n: usize, max_campaigns: usize, max_units: usize) -> impl Strategy<Value = Instance> {
    (with_opinions(connected_graph(1, max_n)), 0..3usize, 0..=max_units, 1..=max_campaigns, any::<bool>()).prop_map(
        |((g, x), cap, units, campaigns, one)| Instance {
            net: Network::new(g).unwrap(),
            x0: OpinionState::new(x, 0.0).unwrap(),
            cap: CAPS[cap],
            units,
            campaigns,
            target: target(one),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn at_most_one_partial_entry(
        scores in prop::collection::vec(0.0..1.0f64, 1..10),
        cap in 0.05..0.95f64,
        share in 0.0..=1.0f64,
    ) {
        let n = scores.len();
        let beta = share * n as f64 * cap;
        let alloc = water_fill(&InfluenceScores::new(scores, ScoreKind::PerCampaign), beta, cap);
        let partial = alloc.controls().iter().filter(|&&u| u > 0.0 && u < cap).count();
        prop_assert!(partial <= 1);
        prop_assert!((alloc.spent() - beta).abs() < 1e-9);
        prop_assert!(alloc.controls().iter().all(|&u| (0.0..=cap).contains(&u)));
    }

    #[test]
    fn allocation_ignores_score_scale(
        scores in prop::collection::vec(0.0..1.0f64, 1..10),
        factor in 1e-3..1e3f64,
        cap in 0.05..0.95f64,
        share in 0.0..=1.0f64,
    ) {
        let n = scores.len();
        let beta = share * n as f64 * cap;
        let s = InfluenceScores::new(scores, ScoreKind::PerCampaign);
        let plain = water_fill(&s, beta, cap).into_controls();
        let scaled = water_fill(&s.scaled(factor), beta, cap).into_controls();
        prop_assert_eq!(plain, scaled);
    }

    #[test]
    fn moving_budget_down_the_ranking_never_helps(
        (g, x) in with_opinions(connected_graph(1, 6)),
        cap in 0..3usize,
        share in 0.0..=1.0f64,
        one in any::<bool>(),
    ) {
        let net = Network::new(g).unwrap();
        let n = net.agents();
        let cap = CAPS[cap];
        let d = target(one);
        let state = OpinionState::new(x, 0.0).unwrap();
        let scores = per_campaign_scores(&state, net.centrality(), d);
        let beta = share * n as f64 * cap;
        let u = water_fill(&scores, beta, cap).into_controls();
        let base = one_campaign_cost(&net, &state, &u, cap, d);
        for eps in [0.01, 0.05] {
            for i in 0..n {
                for j in 0..n {
                    if scores.scores()[i] <= scores.scores()[j] || u[i] < eps || u[j] + eps > cap {
                        continue;
                    }
                    let mut w = u.clone();
                    w[i] -= eps;
                    w[j] += eps;
                    prop_assert!(one_campaign_cost(&net, &state, &w, cap, d) >= base - 1e-12);
                }
            }
        }
    }

    #[test]
    fn simulated_broadcast_matches_closed_form(inst in instance(8, 4, 20), delta in 0.1..3.0f64, long in any::<bool>()) {
        let spacing = if long { Spacing::Long } else { Spacing::Finite(delta) };
        let regime = if long { Regime::Long } else { Regime::Short };
        let p = inst.problem(spacing, regime);
        let plan = broadcast_plan(&p).unwrap();
        let c0 = consensus_limit(&inst.x0, inst.net.partition(), inst.net.centrality())[0];
        let sched = adplan_core::allocation::broadcast_schedule(
            p.config().total_budget(), inst.net.agents(), inst.cap, inst.campaigns,
        );
        let closed = broadcast_cost(c0, inst.net.agents(), inst.target, sched.alphas());
        prop_assert!((plan.cost_total() - closed).abs() < 1e-9, "{} vs {}", plan.cost_total(), closed);
    }

    #[test]
    fn dp_agrees_with_brute_force(inst in instance(6, 4, 6)) {
        let p = inst.problem(Spacing::Long, Regime::Long);
        let dp = dp_plan(&p).unwrap();
        let brute = brute_force_plan(&p, DEFAULT_NODE_LIMIT).unwrap();
        prop_assert!((dp.plan.cost_avg() - brute.cost_avg()).abs() < 1e-9);
        prop_assert_eq!(dp.plan.units(), brute.units());
        prop_assert!((dp.predicted_total_cost() - dp.plan.cost_total()).abs() < 1e-9);
    }

    #[test]
    fn value_table_improves_with_budget(inst in instance(8, 5, 12)) {
        let p = inst.problem(Spacing::Long, Regime::Long);
        let dp = dp_plan(&p).unwrap();
        let n = inst.net.agents();
        for k in 0..inst.campaigns {
            for r in 1..=inst.units {
                prop_assert!(dp.table.value(k, r) <= dp.table.value(k, r - 1) + 1e-12);
            }
        }
        let last = inst.campaigns - 1;
        for r in 0..=inst.units {
            let f = if last == 0 { dp.first_stage[r.min(n)] } else { dp.later_stage[r.min(n)] };
            prop_assert!((dp.table.value(last, r) - f.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn plans_are_feasible_and_monotone_in_budget(
        inst in instance(5, 3, 5),
        delta in 0.1..2.0f64,
        regime in 0..3usize,
    ) {
        let (spacing, regime) = match regime {
            0 => (Spacing::Finite(delta), Regime::Short),
            1 => (Spacing::Long, Regime::Long),
            _ => (Spacing::Finite(delta), Regime::Clustered),
        };
        let n = inst.net.agents();
        let mut previous = f64::INFINITY;
        for q in 0..=inst.units {
            let inst = inst.with_units(q);
            let p = inst.problem(spacing, regime);
            let plan = brute_force_plan(&p, DEFAULT_NODE_LIMIT).unwrap();
            let b = plan.units().unwrap();
            prop_assert!(b.is_feasible(n, q));
            prop_assert!(plan.budget_spent() <= q as f64 * inst.cap + 1e-12);
            for u in plan.controls() {
                prop_assert!(u.iter().all(|&x| x == 0.0 || x == inst.cap));
            }
            prop_assert!(plan.cost_avg() <= previous + 1e-12);
            previous = plan.cost_avg();
        }
    }

    #[test]
    fn optimal_beats_broadcast_beats_nothing(
        inst in instance(6, 3, 6),
        delta in 0.1..2.0f64,
        regime in 0..3usize,
    ) {
        let (spacing, regime) = match regime {
            0 => (Spacing::Finite(delta), Regime::Short),
            1 => (Spacing::Long, Regime::Long),
            _ => (Spacing::Finite(delta), Regime::Clustered),
        };
        let p = inst.problem(spacing, regime);
        let optimal = if regime == Regime::Long {
            dp_plan(&p).unwrap().plan
        } else {
            brute_force_plan(&p, DEFAULT_NODE_LIMIT).unwrap()
        };
        let broadcast = broadcast_plan(&p).unwrap();
        let none = uncontrolled_plan(&p).unwrap();
        prop_assert!(optimal.cost_avg() <= broadcast.cost_avg() + 1e-12, "{} > {}", optimal.cost_avg(), broadcast.cost_avg());
        prop_assert!(broadcast.cost_avg() <= none.cost_avg() + 1e-12);
    }

    #[test]
    fn zero_units_reproduce_the_uncontrolled_cost(inst in instance(6, 4, 0), delta in 0.1..2.0f64) {
        let p = inst.problem(Spacing::Finite(delta), Regime::Short);
        let trace = evaluate_plan(&p, &TimeAllocation::zeros(inst.campaigns)).unwrap();
        let c0 = consensus_limit(&inst.x0, inst.net.partition(), inst.net.centrality())[0];
        prop_assert!((trace.cost_avg - (c0 - inst.target.value()).abs()).abs() < 1e-9);
    }
}
