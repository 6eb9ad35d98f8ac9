#![allow(dead_code)]

use adplan_core::SocialGraph;
use proptest::prelude::*;
use proptest::sample::Index;

/// Random weights in `[0, 1)` with everything below 0.3 dropped.
fn thresholded(n: usize, raw: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let w = raw[i * n + j];
            if i != j && w >= 0.3 {
                edges.push((i, j, w));
            }
        }
    }
    edges
}

/// Graph with a directed spanning tree rooted at agent 0 plus random extra links.
///
/// Sparse draws leave many agents with zero centrality, dense ones are
/// strongly connected, so both shapes show up.
pub fn connected_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = SocialGraph> {
    (min_n..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(0.0..1.0f64, n * n), prop::collection::vec(any::<Index>(), n), 0.0..1.0f64))
        .prop_map(|(n, raw, parents, density)| {
            let raw: Vec<f64> = raw.iter().map(|w| if *w < density { *w } else { 0.0 }).collect();
            let mut edges = thresholded(n, &raw);
            for (i, p) in parents.iter().enumerate().skip(1) {
                edges.push((i, p.index(i), 0.3 + 0.7 * raw[i * n + p.index(i)]));
            }
            SocialGraph::from_edges(n, edges).unwrap()
        })
}

/// Thresholded uniform weights without any structural guarantee.
pub fn any_graph(max_n: usize) -> impl Strategy<Value = SocialGraph> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(0.0..1.0f64, n * n), 0.3..1.0f64))
        .prop_map(|(n, raw, keep)| {
            // thin the draw so disconnected and unrooted graphs are common
            let raw: Vec<f64> = raw.iter().map(|w| if *w < keep * 0.6 { 0.0 } else { *w }).collect();
            SocialGraph::from_edges(n, thresholded(n, &raw)).unwrap()
        })
}

/// Graph together with opinions in `[0, 1]`.
pub fn with_opinions<S>(graphs: S) -> impl Strategy<Value = (SocialGraph, Vec<f64>)>
where
    S: Strategy<Value = SocialGraph>,
{
    graphs.prop_flat_map(|g| {
        let n = g.agents();
        (Just(g), prop::collection::vec(0.0..=1.0f64, n))
    })
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
