//! Test support: random graph generation and exhaustive permutation /
//! bootstrap oracles.
//!
//! Everything here recomputes quantities by definition (enumerating all
//! n! permutations or all n^n independent assignments) so the closed-form
//! moment code can be checked against something that shares none of its
//! algebra. Exposed for the crate's own unit, integration, and acceptance
//! tests; not part of the public API surface.
#![doc(hidden)]

use crate::graph::SimilarityGraph;
use crate::rng::Rng;

/// Random simple graphs with n in [n_min, n_max], mixing Erdos-Renyi
/// draws with structured shapes (stars, paths, triangles to complete
/// graphs, matchings, empty) so degenerate corners stay covered.
pub fn random_graphs(count: usize, n_min: usize, n_max: usize, seed: u64) -> Vec<SimilarityGraph> {
    let mut rng = Rng::new(seed);
    let mut graphs = Vec::with_capacity(count);
    for idx in 0..count {
        let n = n_min + rng.below((n_max - n_min + 1) as u64) as usize;
        let g = match idx % 5 {
            0 => star(n),
            1 => complete(n),
            2 => matching(n),
            3 => path(n),
            _ => {
                let p = 0.15 + 0.7 * rng.uniform();
                erdos_renyi(n, p, &mut rng)
            }
        };
        graphs.push(g);
    }
    graphs
}

pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> SimilarityGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.uniform() < p {
                edges.push((i, j));
            }
        }
    }
    SimilarityGraph::new(n, edges).unwrap()
}

pub fn star(n: usize) -> SimilarityGraph {
    SimilarityGraph::new(n, (1..n).map(|i| (0, i))).unwrap()
}

pub fn path(n: usize) -> SimilarityGraph {
    SimilarityGraph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

pub fn complete(n: usize) -> SimilarityGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    SimilarityGraph::new(n, edges).unwrap()
}

/// Disjoint edges (0,1), (2,3), ...; one node left unmatched for odd n.
pub fn matching(n: usize) -> SimilarityGraph {
    SimilarityGraph::new(n, (0..n / 2).map(|i| (2 * i, 2 * i + 1))).unwrap()
}

/// Call `f` with every permutation of 0..n (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(&items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// R_G(t) for observed times `time_of[node]` (0-based times 0..n-1):
/// the number of edges joining a node observed among the first t to a
/// node observed later.
pub fn crossing_count(graph: &SimilarityGraph, time_of: &[usize], t: usize) -> u64 {
    graph
        .edges()
        .iter()
        .filter(|&&(a, b)| (time_of[a] < t) != (time_of[b] < t))
        .count() as u64
}

/// Interval crossing count for group membership t1 < time <= t2, with
/// times counted 1-based (time index = 0-based position + 1).
pub fn interval_crossing_count(
    graph: &SimilarityGraph,
    time_of: &[usize],
    t1: usize,
    t2: usize,
) -> u64 {
    let inside = |node: usize| {
        let time = time_of[node] + 1;
        time > t1 && time <= t2
    };
    graph
        .edges()
        .iter()
        .filter(|&&(a, b)| inside(a) != inside(b))
        .count() as u64
}

/// Exact permutation-null moments of R_G(t) by full enumeration of n!
/// orderings: (mean, variance, third raw moment).
pub fn enumerate_single_moments(graph: &SimilarityGraph, t: usize) -> (f64, f64, f64) {
    let n = graph.n();
    let (mut s1, mut s2, mut s3, mut count) = (0.0, 0.0, 0.0, 0u64);
    for_each_permutation(n, |perm| {
        let r = crossing_count(graph, perm, t) as f64;
        s1 += r;
        s2 += r * r;
        s3 += r * r * r;
        count += 1;
    });
    let m = count as f64;
    let mean = s1 / m;
    (mean, s2 / m - mean * mean, s3 / m)
}

/// Exact E[R(s) R(t)] under the permutation null by full enumeration.
pub fn enumerate_cross_product(graph: &SimilarityGraph, s: usize, t: usize) -> f64 {
    let n = graph.n();
    let (mut sum, mut count) = (0.0, 0u64);
    for_each_permutation(n, |perm| {
        sum += crossing_count(graph, perm, s) as f64 * crossing_count(graph, perm, t) as f64;
        count += 1;
    });
    sum / count as f64
}

/// Exact permutation-null mean and variance of the interval count
/// R_G(t1, t2) by full enumeration.
pub fn enumerate_interval_moments(graph: &SimilarityGraph, t1: usize, t2: usize) -> (f64, f64) {
    let n = graph.n();
    let (mut s1, mut s2, mut count) = (0.0, 0.0, 0u64);
    for_each_permutation(n, |perm| {
        let r = interval_crossing_count(graph, perm, t1, t2) as f64;
        s1 += r;
        s2 += r * r;
        count += 1;
    });
    let m = count as f64;
    let mean = s1 / m;
    (mean, s2 / m - mean * mean)
}

/// Exact bootstrap-null mean and variance of R_G(t): every node's time is
/// drawn independently and uniformly from 1..n, so enumerate all n^n
/// assignments. Keep n tiny.
pub fn enumerate_bootstrap_moments(graph: &SimilarityGraph, t: usize) -> (f64, f64) {
    let n = graph.n();
    let total = (n as u64).pow(n as u32);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut assignment = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in assignment.iter_mut() {
            *slot = (c % n as u64) as usize;
            c /= n as u64;
        }
        let r = graph
            .edges()
            .iter()
            .filter(|&&(a, b)| (assignment[a] < t) != (assignment[b] < t))
            .count() as f64;
        s1 += r;
        s2 += r * r;
    }
    let m = total as f64;
    let mean = s1 / m;
    (mean, s2 / m - mean * mean)
}

/// Relative gap |a - b| / max(1, |b|).
pub fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
