//! Linear-impulsive opinion dynamics.
//!
//! Between campaigns opinions follow `x' = -L x`, solved in closed form with
//! `exp(-L delta)`. At a campaign each agent jumps towards the target,
//! `x_i <- u_i d + (1 - u_i) x_i`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{CentralityVector, ClusterPartition, Laplacian};
use crate::linalg;

/// Opinions may leave `[0, 1]` by at most this much before it is an error.
pub const BOX_TOLERANCE: f64 = 1e-12;

/// Desired opinion `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Zero,
    One,
}

impl Target {
    pub fn value(self) -> f64 {
        match self {
            Target::Zero => 0.0,
            Target::One => 1.0,
        }
    }

    pub fn from_value(d: f64) -> Option<Self> {
        if d == 0.0 {
            Some(Target::Zero)
        } else if d == 1.0 {
            Some(Target::One)
        } else {
            None
        }
    }
}

/// Opinion vector at a point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionState {
    opinions: Vec<f64>,
    time: f64,
}

impl OpinionState {
    pub fn new(opinions: Vec<f64>, time: f64) -> Result<Self> {
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidParameter("time must be finite and nonnegative"));
        }
        let mut opinions = opinions;
        settle(&mut opinions)?;
        Ok(Self { opinions, time })
    }

    /// Trusted constructor for opinions already known to lie in `[0, 1]`.
    pub(crate) fn from_raw(opinions: Vec<f64>) -> Self {
        Self { opinions, time: 0.0 }
    }

    /// Opinions spread evenly over `[0, 1]`, first agent at 0, last at 1.
    pub fn equidistant(agents: usize) -> Self {
        let opinions = match agents {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        };
        Self { opinions, time: 0.0 }
    }

    pub fn constant(agents: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; agents], 0.0)
    }

    pub fn opinions(&self) -> &[f64] {
        &self.opinions
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn agents(&self) -> usize {
        self.opinions.len()
    }

    pub fn into_opinions(self) -> Vec<f64> {
        self.opinions
    }

    /// `true` when every agent already holds the target opinion.
    pub fn at_target(&self, target: Target) -> bool {
        self.opinions.iter().all(|&x| x == target.value())
    }
}

/// Per-agent control `u_i in [0, cap]` for one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlAction(Vec<f64>);

impl ControlAction {
    pub fn new(controls: Vec<f64>, cap: f64) -> Result<Self> {
        check_cap(cap)?;
        for (agent, &u) in controls.iter().enumerate() {
            if !(u.is_finite() && (0.0..=cap).contains(&u)) {
                return Err(Error::InvalidControl { agent, value: u });
            }
        }
        Ok(Self(controls))
    }

    pub fn zeros(agents: usize) -> Self {
        Self(vec![0.0; agents])
    }

    pub fn controls(&self) -> &[f64] {
        &self.0
    }

    pub fn spent(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub(crate) fn check_cap(cap: f64) -> Result<()> {
    if cap.is_finite() && cap > 0.0 && cap < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("cap must lie in (0, 1)"))
    }
}

/// Budget, per-agent cap, target opinion and number of campaigns `M + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetConfig {
    cap: f64,
    total_budget: f64,
    target: Target,
    campaigns: usize,
}

impl BudgetConfig {
    pub fn new(cap: f64, total_budget: f64, target: Target, campaigns: usize) -> Result<Self> {
        check_cap(cap)?;
        if !(total_budget.is_finite() && total_budget >= 0.0) {
            return Err(Error::InvalidParameter("budget must be finite and nonnegative"));
        }
        if campaigns == 0 {
            return Err(Error::InvalidParameter("at least one campaign is required"));
        }
        Ok(Self { cap, total_budget, target, campaigns })
    }

    /// Budget of `units` cap-sized quanta, `B = Q * cap`.
    pub fn discrete(cap: f64, units: usize, target: Target, campaigns: usize) -> Result<Self> {
        Self::new(cap, units as f64 * cap, target, campaigns)
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn total_budget(&self) -> f64 {
        self.total_budget
    }

    pub fn target(&self) -> Target {
        self.target
    }

    /// `M + 1`.
    pub fn campaigns(&self) -> usize {
        self.campaigns
    }

    /// `Q = B / cap`, provided it is an integer.
    pub fn units(&self) -> Result<usize> {
        let ratio = self.total_budget / self.cap;
        let q = libm::round(ratio);
        if libm::fabs(ratio - q) <= 1e-9 * q.max(1.0) {
            Ok(q as usize)
        } else {
            Err(Error::BudgetNotDiscrete { budget: self.total_budget, cap: self.cap })
        }
    }
}

/// Checks opinions against `[0, 1]`, clamping round-off.
pub(crate) fn settle(opinions: &mut [f64]) -> Result<()> {
    for (agent, x) in opinions.iter_mut().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        if *x < -BOX_TOLERANCE || *x > 1.0 + BOX_TOLERANCE {
            return Err(Error::OpinionOutOfRange { agent, value: *x });
        }
        *x = x.clamp(0.0, 1.0);
    }
    Ok(())
}

/// The inter-campaign flow map `exp(-L delta)` for one gap length.
#[derive(Debug, Clone)]
pub struct Propagator {
    delta: f64,
    transition: DMatrix<f64>,
}

impl Propagator {
    pub fn new(laplacian: &Laplacian, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter("delta must be positive and finite"));
        }
        let transition = linalg::expm(&(laplacian.matrix() * -delta))?;
        Ok(Self { delta, transition })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn apply(&self, state: &OpinionState) -> Result<OpinionState> {
        let opinions = self.apply_slice(state.opinions())?;
        Ok(OpinionState { opinions, time: state.time + self.delta })
    }

    pub(crate) fn apply_slice(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.transition.nrows();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        let mut out = vec![0.0; n];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.transition.nrows();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0.0;
            for (j, xj) in x.iter().enumerate() {
                acc += self.transition[(i, j)] * xj;
            }
            *o = acc;
        }
        settle(out)
    }
}

/// Propagators keyed by gap length, so repeated gaps reuse one exponential.
#[derive(Debug, Clone)]
pub struct PropagatorCache {
    laplacian: Laplacian,
    cache: BTreeMap<u64, Propagator>,
}

impl PropagatorCache {
    pub fn new(laplacian: Laplacian) -> Self {
        Self { laplacian, cache: BTreeMap::new() }
    }

    pub fn get(&mut self, delta: f64) -> Result<&Propagator> {
        let key = delta.to_bits();
        if !self.cache.contains_key(&key) {
            let p = Propagator::new(&self.laplacian, delta)?;
            self.cache.insert(key, p);
        }
        Ok(&self.cache[&key])
    }

    pub fn propagate(&mut self, state: &OpinionState, delta: f64) -> Result<OpinionState> {
        self.get(delta)?.apply(state)
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

/// Advances opinions by `delta` time units with no campaign.
pub fn propagate(state: &OpinionState, laplacian: &Laplacian, delta: f64) -> Result<OpinionState> {
    Propagator::new(laplacian, delta)?.apply(state)
}

/// Applies one campaign's jump; time is unchanged.
pub fn apply_campaign(state: &OpinionState, action: &ControlAction, target: Target) -> Result<OpinionState> {
    let n = state.agents();
    if action.controls().len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: action.controls().len() });
    }
    let mut opinions = state.opinions.clone();
    jump_in_place(&mut opinions, action.controls(), target);
    settle(&mut opinions)?;
    Ok(OpinionState { opinions, time: state.time })
}

pub(crate) fn jump_in_place(x: &mut [f64], u: &[f64], target: Target) {
    let d = target.value();
    for (xi, &ui) in x.iter_mut().zip(u) {
        *xi = ui * d + (1.0 - ui) * *xi;
    }
}

/// Agreement value `(v^c)^T x_c` reached by each cluster.
pub fn consensus_limit(state: &OpinionState, partition: &ClusterPartition, centrality: &CentralityVector) -> Vec<f64> {
    consensus_of(state.opinions(), partition, centrality)
}

pub(crate) fn consensus_of(x: &[f64], partition: &ClusterPartition, centrality: &CentralityVector) -> Vec<f64> {
    partition
        .clusters()
        .iter()
        .map(|members| members.iter().map(|&a| centrality.get(a) * x[a]).sum::<f64>().clamp(0.0, 1.0))
        .collect()
}

/// Replaces each opinion by its cluster's agreement value.
pub fn consensus_state(state: &OpinionState, partition: &ClusterPartition, centrality: &CentralityVector) -> OpinionState {
    let limits = consensus_limit(state, partition, centrality);
    OpinionState {
        opinions: expand_clusters(&limits, partition),
        time: state.time,
    }
}

pub(crate) fn expand_clusters(values: &[f64], partition: &ClusterPartition) -> Vec<f64> {
    (0..partition.agents()).map(|a| values[partition.cluster_of(a)]).collect()
}

/// `sum_c N_c |x_c - d|` over clusters.
pub fn cost_infinity(consensus: &[f64], partition: &ClusterPartition, target: Target) -> f64 {
    let d = target.value();
    partition
        .clusters()
        .iter()
        .zip(consensus)
        .map(|(members, &x)| members.len() as f64 * libm::fabs(x - d))
        .sum()
}

/// `cost_infinity / N`, the mean per-agent deviation.
pub fn average_cost_infinity(consensus: &[f64], partition: &ClusterPartition, target: Target) -> f64 {
    cost_infinity(consensus, partition, target) / partition.agents() as f64
}

/// `sum_i |x_i(T) - d|`.
pub fn cost_finite(state: &OpinionState, target: Target) -> f64 {
    let d = target.value();
    state.opinions().iter().map(|x| libm::fabs(x - d)).sum()
}

/// Applies `x <- exp(-L delta) x` to a plain vector; convenience for tests and
/// callers that hold raw opinions.
pub fn propagate_vector(x: &[f64], laplacian: &Laplacian, delta: f64) -> Result<Vec<f64>> {
    let p = Propagator::new(laplacian, delta)?;
    let v = DVector::from_column_slice(x);
    let mut out: Vec<f64> = (p.transition() * v).iter().copied().collect();
    settle(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Network, SocialGraph};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        libm::fabs(a - b) <= tol
    }

    fn chain3() -> SocialGraph {
        SocialGraph::from_edges(3, [(1, 0, 1.0), (2, 1, 1.0)]).unwrap()
    }

    /// Fixed-step RK4 for `x' = -L x`.
    fn rk4(l: &DMatrix<f64>, x0: &[f64], horizon: f64, step: f64) -> Vec<f64> {
        let f = |x: &DVector<f64>| -(l * x);
        let steps = libm::round(horizon / step) as usize;
        let h = horizon / steps as f64;
        let mut x = DVector::from_column_slice(x0);
        for _ in 0..steps {
            let k1 = f(&x);
            let k2 = f(&(&x + &k1 * (h / 2.0)));
            let k3 = f(&(&x + &k2 * (h / 2.0)));
            let k4 = f(&(&x + &k3 * h));
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        x.iter().copied().collect()
    }

    #[test]
    fn no_edges_leaves_state_unchanged() {
        let g = SocialGraph::isolated(3).unwrap();
        let s = OpinionState::new(vec![0.1, 0.5, 0.9], 0.0).unwrap();
        let out = propagate(&s, &g.laplacian(), 7.5).unwrap();
        assert_eq!(out.opinions(), s.opinions());
        assert_eq!(out.time(), 7.5);
    }

    #[test]
    fn symmetric_pair_meets_in_the_middle() {
        let g = SocialGraph::from_edges(2, [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let s = OpinionState::new(vec![0.0, 1.0], 0.0).unwrap();
        let out = propagate(&s, &g.laplacian(), 40.0).unwrap();
        for &x in out.opinions() {
            assert!(close(x, 0.5, 1e-12));
        }
    }

    #[test]
    fn chain_matches_rk4() {
        let g = chain3();
        let x0 = [0.0, 0.5, 1.0];
        let s = OpinionState::new(x0.to_vec(), 0.0).unwrap();
        let exact = propagate(&s, &g.laplacian(), 0.7).unwrap();
        let oracle = rk4(g.laplacian().matrix(), &x0, 0.7, 1e-4);
        for (a, b) in exact.opinions().iter().zip(&oracle) {
            assert!(close(*a, *b, 1e-6));
        }
    }

    #[test]
    fn jump_examples() {
        let s = OpinionState::new(vec![0.5], 0.0).unwrap();
        let a = ControlAction::new(vec![0.2], 0.2).unwrap();
        let out = apply_campaign(&s, &a, Target::One).unwrap();
        assert!(close(out.opinions()[0], 0.6, 1e-15));

        let s = OpinionState::new(vec![0.1, 0.9], 3.0).unwrap();
        let a = ControlAction::new(vec![0.2, 0.0], 0.2).unwrap();
        let out = apply_campaign(&s, &a, Target::One).unwrap();
        assert!(close(out.opinions()[0], 0.28, 1e-15));
        assert_eq!(out.opinions()[1], 0.9);
        assert_eq!(out.time(), 3.0);

        let out = apply_campaign(&s, &ControlAction::zeros(2), Target::Zero).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn control_validation() {
        assert!(ControlAction::new(vec![0.3], 0.2).is_err());
        assert!(ControlAction::new(vec![-0.01], 0.2).is_err());
        assert!(ControlAction::new(vec![0.1], 1.0).is_err());
    }

    #[test]
    fn state_validation_and_clamping() {
        let s = OpinionState::new(vec![-1e-13, 1.0 + 1e-13], 0.0).unwrap();
        assert_eq!(s.opinions(), &[0.0, 1.0]);
        assert!(matches!(
            OpinionState::new(vec![1.01], 0.0),
            Err(Error::OpinionOutOfRange { agent: 0, .. })
        ));
        assert_eq!(OpinionState::new(vec![f64::NAN], 0.0), Err(Error::NonFinite));
    }

    #[test]
    fn consensus_examples() {
        let single = Network::new(SocialGraph::isolated(1).unwrap()).unwrap();
        let s = OpinionState::new(vec![0.3], 0.0).unwrap();
        assert_eq!(consensus_limit(&s, single.partition(), single.centrality()), vec![0.3]);

        let tree = SocialGraph::from_edges(4, [(1, 0, 1.0), (2, 1, 0.4), (3, 0, 2.0)]).unwrap();
        let net = Network::new(tree).unwrap();
        let s = OpinionState::new(vec![0.17, 0.9, 0.4, 0.0], 0.0).unwrap();
        let c = consensus_limit(&s, net.partition(), net.centrality());
        assert!(close(c[0], 0.17, 1e-12));
    }

    #[test]
    fn consensus_matches_long_propagation() {
        let g = SocialGraph::from_edges(
            5,
            [(0, 1, 0.6), (1, 2, 0.9), (2, 0, 0.3), (3, 0, 0.5), (4, 3, 0.7), (0, 4, 0.2), (3, 4, 0.4)],
        )
        .unwrap();
        let net = Network::new(g).unwrap();
        let t = net.mixing_time().unwrap();
        let s = OpinionState::new(vec![0.05, 0.3, 0.6, 0.8, 1.0], 0.0).unwrap();
        let limit = consensus_limit(&s, net.partition(), net.centrality())[0];
        // 10 T leaves a transient of order exp(-10) times a non-normal factor;
        // go to 40 T so the oracle itself is within 1e-6
        let far = propagate(&s, net.laplacian(), 40.0 * t).unwrap();
        for &x in far.opinions() {
            assert!(close(x, limit, 1e-6));
        }
    }

    #[test]
    fn cost_examples() {
        let one = ClusterPartition::single(15);
        let c = [1.0 - 0.5135];
        assert!(close(average_cost_infinity(&c, &one, Target::One), 0.5135, 1e-12));
        assert_eq!(cost_infinity(&[1.0], &one, Target::One), 0.0);

        let two = ClusterPartition::new(15, vec![(0..4).collect(), (4..15).collect()]).unwrap();
        let total = cost_infinity(&[0.2, 0.6], &two, Target::One);
        assert!(close(total, 7.6, 1e-12));
        assert!(close(average_cost_infinity(&[0.2, 0.6], &two, Target::One), 7.6 / 15.0, 1e-12));

        let s = OpinionState::new(vec![0.0, 1.0], 0.0).unwrap();
        assert_eq!(cost_finite(&s, Target::One), 1.0);
        let s = OpinionState::constant(4, 1.0).unwrap();
        assert_eq!(cost_finite(&s, Target::One), 0.0);
    }

    #[test]
    fn finite_cost_approaches_infinite_cost() {
        let g = SocialGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 0.8), (3, 0, 0.3), (1, 3, 0.2)])
            .unwrap();
        let net = Network::new(g).unwrap();
        let t = net.mixing_time().unwrap();
        let s = OpinionState::new(vec![0.9, 0.1, 0.4, 0.7], 0.0).unwrap();
        let limit = consensus_limit(&s, net.partition(), net.centrality());
        let inf = cost_infinity(&limit, net.partition(), Target::Zero);
        let late = propagate(&s, net.laplacian(), 10.0 * t).unwrap();
        assert!(close(cost_finite(&late, Target::Zero), inf, 1e-4 * 4.0));
    }

    #[test]
    fn budget_units() {
        let c = BudgetConfig::discrete(0.2, 15, Target::One, 4).unwrap();
        assert_eq!(c.units(), Ok(15));
        assert!(close(c.total_budget(), 3.0, 1e-12));
        let c = BudgetConfig::new(0.2, 0.5, Target::One, 1).unwrap();
        assert!(matches!(c.units(), Err(Error::BudgetNotDiscrete { .. })));
        assert!(BudgetConfig::new(1.0, 1.0, Target::One, 1).is_err());
        assert!(BudgetConfig::new(0.2, 1.0, Target::One, 0).is_err());
    }

    #[test]
    fn cache_reuses_exponentials() {
        let mut cache = PropagatorCache::new(chain3().laplacian());
        let s = OpinionState::new(vec![1.0, 0.0, 0.0], 0.0).unwrap();
        let a = cache.propagate(&s, 0.5).unwrap();
        let b = cache.propagate(&a, 0.5).unwrap();
        assert_eq!(cache.len(), 1);
        let direct = propagate(&s, &chain3().laplacian(), 1.0).unwrap();
        for (x, y) in b.opinions().iter().zip(direct.opinions()) {
            assert!(close(*x, *y, 1e-12));
        }
        assert_eq!(b.time(), 1.0);
    }

    #[test]
    fn propagate_rejects_bad_delta() {
        let s = OpinionState::new(vec![0.5; 3], 0.0).unwrap();
        assert!(propagate(&s, &chain3().laplacian(), 0.0).is_err());
        assert!(propagate(&s, &chain3().laplacian(), f64::INFINITY).is_err());
    }
}
