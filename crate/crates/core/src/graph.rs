//! Influence graphs, their Laplacians, clusters and centralities.
//!
//! Weights follow the consensus convention: `a[i][j] > 0` means agent `j`
//! influences agent `i`, so information flows along the edge `j -> i`.
//! Agent indices are 0-based here; file formats shift them to 1-based.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Shift applied to `L^T` during inverse iteration for the left null vector.
const NULL_SHIFT: f64 = 1e-12;
/// Stop inverse iteration once successive iterates agree to this in max norm.
const NULL_TOL: f64 = 1e-12;
const NULL_MAX_ITER: usize = 200;
/// Negative centrality entries above this are treated as round-off.
const NEGATIVE_CLAMP: f64 = -1e-10;

/// Directed weighted influence graph among `N` agents.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialGraph {
    weights: DMatrix<f64>,
}

impl SocialGraph {
    /// Builds a graph from a dense `N x N` weight matrix.
    pub fn from_matrix(weights: DMatrix<f64>) -> Result<Self> {
        if weights.nrows() == 0 {
            return Err(Error::EmptyGraph);
        }
        if !weights.is_square() {
            return Err(Error::DimensionMismatch {
                expected: weights.nrows(),
                found: weights.ncols(),
            });
        }
        for i in 0..weights.nrows() {
            for j in 0..weights.ncols() {
                let w = weights[(i, j)];
                let bad = !w.is_finite() || w < 0.0 || (i == j && w != 0.0);
                if bad {
                    return Err(Error::InvalidWeight { row: i, col: j, value: w });
                }
            }
        }
        Ok(Self { weights })
    }

    /// Builds a graph from `(i, j, w)` triples meaning `a[i][j] = w`.
    ///
    /// A repeated pair keeps the last weight.
    pub fn from_edges<I>(agents: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if agents == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut weights = DMatrix::zeros(agents, agents);
        for (i, j, w) in edges {
            if i >= agents || j >= agents {
                return Err(Error::DimensionMismatch {
                    expected: agents,
                    found: i.max(j) + 1,
                });
            }
            weights[(i, j)] = w;
        }
        Self::from_matrix(weights)
    }

    /// A graph with no edges.
    pub fn isolated(agents: usize) -> Result<Self> {
        Self::from_edges(agents, core::iter::empty())
    }

    pub fn agents(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Nonzero weights as `(i, j, w)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.agents();
        (0..n).flat_map(move |i| {
            (0..n).filter_map(move |j| {
                let w = self.weights[(i, j)];
                (w > 0.0).then_some((i, j, w))
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Relabels agents: agent `i` of `self` becomes agent `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.agents();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter("permutation is not a bijection"));
            }
            seen[p] = true;
        }
        let mut weights = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                weights[(perm[i], perm[j])] = self.weights[(i, j)];
            }
        }
        Self::from_matrix(weights)
    }

    /// Drops every edge whose endpoints fall in different groups.
    ///
    /// `group[i]` is an arbitrary label for agent `i`.
    pub fn without_cross_edges(&self, group: &[usize]) -> Result<Self> {
        let n = self.agents();
        if group.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: group.len() });
        }
        let mut weights = self.weights.clone();
        for i in 0..n {
            for j in 0..n {
                if group[i] != group[j] {
                    weights[(i, j)] = 0.0;
                }
            }
        }
        Self::from_matrix(weights)
    }

    pub fn laplacian(&self) -> Laplacian {
        build_laplacian(self)
    }
}

/// Graph Laplacian `L = D - A`, every row summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian(DMatrix<f64>);

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn agents(&self) -> usize {
        self.0.nrows()
    }

    /// The principal submatrix on `members`, in the order given.
    pub fn restricted(&self, members: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(members.len(), members.len(), |r, c| self.0[(members[r], members[c])])
    }

    fn influences(&self, i: usize, j: usize) -> bool {
        i != j && self.0[(i, j)] < 0.0
    }
}

/// `L_ij = -a_ij` off the diagonal, `L_ii = sum_j a_ij`.
pub fn build_laplacian(graph: &SocialGraph) -> Laplacian {
    let n = graph.agents();
    let mut l = -graph.weights().clone();
    for i in 0..n {
        let degree: f64 = graph.weights().row(i).iter().sum();
        l[(i, i)] = degree;
    }
    Laplacian(l)
}

/// Disjoint clusters covering all agents, ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    clusters: Vec<Vec<usize>>,
    membership: Vec<usize>,
}

impl ClusterPartition {
    /// Every agent in one cluster.
    pub fn single(agents: usize) -> Self {
        Self {
            clusters: vec![(0..agents).collect()],
            membership: vec![0; agents],
        }
    }

    /// Validates that `clusters` partitions `0..agents`, then normalises
    /// member order and cluster order.
    pub fn new(agents: usize, mut clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut membership = vec![usize::MAX; agents];
        for c in clusters.iter_mut() {
            if c.is_empty() {
                return Err(Error::InvalidPartition);
            }
            c.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
        for (ci, c) in clusters.iter().enumerate() {
            for &a in c {
                if a >= agents || membership[a] != usize::MAX {
                    return Err(Error::InvalidPartition);
                }
                membership[a] = ci;
            }
        }
        if membership.contains(&usize::MAX) {
            return Err(Error::InvalidPartition);
        }
        Ok(Self { clusters, membership })
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn agents(&self) -> usize {
        self.membership.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    pub fn cluster_of(&self, agent: usize) -> usize {
        self.membership[agent]
    }

    /// `true` when the whole network is one cluster.
    pub fn is_connected(&self) -> bool {
        self.clusters.len() == 1
    }
}

/// Splits the graph into connected components of its undirected support and
/// checks that each one contains a directed spanning tree.
pub fn detect_clusters(graph: &SocialGraph) -> Result<ClusterPartition> {
    let n = graph.agents();
    let mut label = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut members = vec![start];
        label[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for (j, lab) in label.iter_mut().enumerate() {
                let linked = graph.weight(i, j) > 0.0 || graph.weight(j, i) > 0.0;
                if linked && *lab == usize::MAX {
                    *lab = id;
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }
    let laplacian = graph.laplacian();
    for (ci, members) in clusters.iter().enumerate() {
        if !has_spanning_tree(&laplacian, members) {
            return Err(Error::NoSpanningTree { cluster: ci });
        }
    }
    Ok(ClusterPartition { clusters, membership: label })
}

/// A directed spanning tree exists iff some member reaches every other member
/// along influence edges; equivalently, zero is a simple eigenvalue of the
/// restricted Laplacian.
pub fn has_spanning_tree(laplacian: &Laplacian, members: &[usize]) -> bool {
    let m = members.len();
    if m <= 1 {
        return true;
    }
    let mut visited = vec![false; m];
    let mut stack = Vec::with_capacity(m);
    (0..m).any(|root| {
        visited.iter_mut().for_each(|v| *v = false);
        visited[root] = true;
        stack.clear();
        stack.push(root);
        let mut count = 1;
        while let Some(p) = stack.pop() {
            for c in 0..m {
                // c listens to p
                if !visited[c] && laplacian.influences(members[c], members[p]) {
                    visited[c] = true;
                    count += 1;
                    stack.push(c);
                }
            }
        }
        count == m
    })
}

/// Per-cluster left null vectors of the Laplacian, each summing to one over
/// its cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector(Vec<f64>);

impl CentralityVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, agent: usize) -> f64 {
        self.0[agent]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Computes the centrality of every agent within its cluster.
///
/// For each cluster, inverse iteration on `L_c^T + 1e-12 I` from the uniform
/// vector, renormalised to unit sum, until iterates agree to `1e-12`.
pub fn centrality(laplacian: &Laplacian, partition: &ClusterPartition) -> Result<CentralityVector> {
    let n = laplacian.agents();
    if partition.agents() != n {
        return Err(Error::DimensionMismatch { expected: n, found: partition.agents() });
    }
    let mut values = vec![0.0; n];
    for (ci, members) in partition.clusters().iter().enumerate() {
        if !has_spanning_tree(laplacian, members) {
            return Err(Error::SingularStructure { cluster: ci });
        }
        let v = cluster_null_vector(laplacian, members).ok_or(Error::SingularStructure { cluster: ci })?;
        for (&a, x) in members.iter().zip(v) {
            values[a] = x;
        }
    }
    Ok(CentralityVector(values))
}

fn cluster_null_vector(laplacian: &Laplacian, members: &[usize]) -> Option<Vec<f64>> {
    let m = members.len();
    if m == 1 {
        return Some(vec![1.0]);
    }
    let mut shifted = laplacian.restricted(members).transpose();
    for i in 0..m {
        shifted[(i, i)] += NULL_SHIFT;
    }
    let lu = shifted.lu();
    let mut v = nalgebra::DVector::from_element(m, 1.0 / m as f64);
    for _ in 0..NULL_MAX_ITER {
        let mut next = lu.solve(&v)?;
        let total: f64 = next.iter().sum();
        if !total.is_finite() || total == 0.0 {
            return None;
        }
        next /= total;
        let delta = next.iter().zip(v.iter()).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
        v = next;
        if delta < NULL_TOL {
            break;
        }
    }
    let mut out: Vec<f64> = v.iter().copied().collect();
    if out.iter().any(|&x| !x.is_finite() || x < NEGATIVE_CLAMP) {
        return None;
    }
    for x in out.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    Some(out)
}

/// Inverse of the smallest nonzero real part among the Laplacian eigenvalues.
///
/// `None` when every eigenvalue is zero (no edges).
pub fn mixing_time(laplacian: &Laplacian) -> Option<f64> {
    let scale = crate::linalg::norm1(laplacian.matrix()).max(1.0);
    let eigen = laplacian.matrix().clone().complex_eigenvalues();
    eigen
        .iter()
        .filter(|z| libm::hypot(z.re, z.im) > 1e-9 * scale)
        .map(|z| z.re)
        .filter(|&re| re > 0.0)
        .fold(None, |acc: Option<f64>, re| Some(acc.map_or(re, |a| a.min(re))))
        .map(|gap| 1.0 / gap)
}

/// A graph together with everything the planners derive from it.
#[derive(Debug, Clone)]
pub struct Network {
    graph: SocialGraph,
    laplacian: Laplacian,
    partition: ClusterPartition,
    centrality: CentralityVector,
}

impl Network {
    pub fn new(graph: SocialGraph) -> Result<Self> {
        let laplacian = graph.laplacian();
        let partition = detect_clusters(&graph)?;
        let centrality = centrality(&laplacian, &partition)?;
        Ok(Self { graph, laplacian, partition, centrality })
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn centrality(&self) -> &CentralityVector {
        &self.centrality
    }

    pub fn agents(&self) -> usize {
        self.graph.agents()
    }

    pub fn is_connected(&self) -> bool {
        self.partition.is_connected()
    }

    pub fn mixing_time(&self) -> Option<f64> {
        mixing_time(&self.laplacian)
    }
}
