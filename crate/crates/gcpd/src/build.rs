//! Similarity-graph construction: pairwise dissimilarities and the k-MST,
//! k-MDP, and k-NNG builders, plus hub diagnostics.
//!
//! All builders are deterministic: among equal-weight candidates the
//! lexicographically smallest (i, j) pair wins, ties in nearest-neighbor
//! distance break by index, and the matching solver visits edges in a
//! fixed order.

use crate::data::{DistanceMatrix, ObservationSequence, Payload};
use crate::error::BuildError;
use crate::graph::{GraphSummary, SimilarityGraph};
use crate::matching::min_weight_perfect_matching;
use rayon::prelude::*;

/// Dissimilarity measures between observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    L1,
    /// Count of differing adjacency entries between two network
    /// snapshots.
    NetworkEdgeCount,
    /// Differing-entry count normalized by the geometric mean of each
    /// snapshot's total activity.
    NetworkEdgeCountNormalized,
    /// Use the distance matrix supplied with the sequence.
    Precomputed,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::L1 => "l1",
            Metric::NetworkEdgeCount => "network-edge-count",
            Metric::NetworkEdgeCountNormalized => "network-edge-count-normalized",
            Metric::Precomputed => "precomputed",
        }
    }
}

/// Graph family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    Mst,
    Mdp,
    Nng,
}

impl GraphFamily {
    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Mst => "mst",
            GraphFamily::Mdp => "mdp",
            GraphFamily::Nng => "nng",
        }
    }
}

/// Matching solver choice for MDP construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingMode {
    /// Exact minimum-weight perfect matching (blossom).
    Exact,
    /// Greedy pairing by ascending (distance, i, j); approximate, for
    /// very large n.
    Greedy,
}

/// A graph construction request: family plus density level k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphSpec {
    pub family: GraphFamily,
    pub k: usize,
}

impl GraphSpec {
    pub fn new(family: GraphFamily, k: usize) -> Self {
        Self { family, k }
    }
}

/// Compute pairwise distances for a sequence under a metric.
///
/// Rows are computed in parallel; each entry has a fixed summation order
/// so the result is identical to sequential evaluation.
pub fn pairwise_distances(
    seq: &ObservationSequence,
    metric: Metric,
) -> Result<DistanceMatrix, BuildError> {
    let incompatible = |reason: &str| BuildError::IncompatibleMetric {
        metric: metric.name().to_string(),
        reason: reason.to_string(),
    };
    match (metric, seq.payload()) {
        (Metric::Precomputed, Payload::Distances(d)) => Ok(d.clone()),
        (Metric::Precomputed, _) => Err(incompatible("no distance matrix supplied")),
        (Metric::Euclidean | Metric::L1, Payload::Vectors(vs)) => {
            let n = vs.len();
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                return 0.0;
                            }
                            let (a, b) = (&vs[i], &vs[j]);
                            match metric {
                                Metric::Euclidean => a
                                    .iter()
                                    .zip(b)
                                    .map(|(x, y)| (x - y) * (x - y))
                                    .sum::<f64>()
                                    .sqrt(),
                                _ => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>(),
                            }
                        })
                        .collect()
                })
                .collect();
            DistanceMatrix::from_rows(&rows).map_err(BuildError::from)
        }
        (Metric::Euclidean | Metric::L1, _) => Err(incompatible("needs dense vector payload")),
        (
            Metric::NetworkEdgeCount | Metric::NetworkEdgeCountNormalized,
            Payload::Networks(nets),
        ) => {
            let n = nets.len();
            if metric == Metric::NetworkEdgeCountNormalized {
                for (index, net) in nets.iter().enumerate() {
                    if net.activity() == 0 {
                        return Err(BuildError::ZeroActivityDay { index });
                    }
                }
            }
            let activity: Vec<f64> = nets.iter().map(|s| s.activity() as f64).collect();
            let rows: Vec<Vec<f64>> = (0..n)
                .into_par_iter()
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                return 0.0;
                            }
                            let diff = nets[i]
                                .flat()
                                .iter()
                                .zip(nets[j].flat())
                                .filter(|(a, b)| a != b)
                                .count() as f64;
                            match metric {
                                Metric::NetworkEdgeCount => diff,
                                _ => diff / (activity[i] * activity[j]).sqrt(),
                            }
                        })
                        .collect()
                })
                .collect();
            DistanceMatrix::from_rows(&rows).map_err(BuildError::from)
        }
        (Metric::NetworkEdgeCount | Metric::NetworkEdgeCountNormalized, _) => {
            Err(incompatible("needs network payload"))
        }
    }
}

/// Build the graph requested by `spec`.
pub fn build_graph(
    dist: &DistanceMatrix,
    spec: GraphSpec,
    matching: MatchingMode,
) -> Result<SimilarityGraph, BuildError> {
    match spec.family {
        GraphFamily::Mst => build_mst(dist, spec.k),
        GraphFamily::Nng => build_nng(dist, spec.k),
        GraphFamily::Mdp => build_mdp(dist, spec.k, matching),
    }
}

/// Union of the 1st..kth orthogonal minimum spanning trees. The jth MST
/// is a minimum-total-distance spanning tree among edges unused by trees
/// 1..j-1; the result has exactly k (n - 1) edges.
pub fn build_mst(dist: &DistanceMatrix, k: usize) -> Result<SimilarityGraph, BuildError> {
    let n = dist.n();
    if k < 1 || k > n - 1 {
        return Err(BuildError::KTooLarge {
            k,
            reason: format!("need 1 <= k <= n - 1 = {}", n - 1),
        });
    }
    // Kruskal over edges sorted by (weight, i, j); the index order makes
    // equal-weight choices lexicographic.
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            order.push((i, j));
        }
    }
    order.sort_by(|&(a, b), &(c, d)| {
        dist.get(a, b)
            .partial_cmp(&dist.get(c, d))
            .unwrap()
            .then(a.cmp(&c))
            .then(b.cmp(&d))
    });

    let mut used = std::collections::HashSet::new();
    let mut all_edges = Vec::with_capacity(k * (n - 1));
    for level in 0..k {
        let mut dsu = Dsu::new(n);
        let mut taken = 0;
        for &(i, j) in &order {
            if used.contains(&(i, j)) {
                continue;
            }
            if dsu.union(i, j) {
                used.insert((i, j));
                all_edges.push((i, j));
                taken += 1;
                if taken == n - 1 {
                    break;
                }
            }
        }
        if taken != n - 1 {
            return Err(BuildError::KTooLarge {
                k,
                reason: format!("no orthogonal spanning tree at level {}", level + 1),
            });
        }
    }
    SimilarityGraph::new(n, all_edges)
}

/// Union of the jth-nearest-neighbor graphs for j = 1..k, with mutual
/// pairs collapsed to single undirected edges. Neighbor ranks break
/// distance ties by index.
pub fn build_nng(dist: &DistanceMatrix, k: usize) -> Result<SimilarityGraph, BuildError> {
    let n = dist.n();
    if k < 1 || k + 1 > n {
        return Err(BuildError::KTooLarge {
            k,
            reason: format!("need k <= n - 1 = {}", n - 1),
        });
    }
    let mut edges = Vec::with_capacity(k * n);
    let mut others: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        others.clear();
        others.extend((0..n).filter(|&j| j != i));
        others.sort_by(|&a, &b| {
            dist.get(i, a)
                .partial_cmp(&dist.get(i, b))
                .unwrap()
                .then(a.cmp(&b))
        });
        for &j in others.iter().take(k) {
            edges.push((i, j));
        }
    }
    SimilarityGraph::new(n, edges)
}

/// Union of k orthogonal minimum-distance pairings. Each level is an
/// exact minimum-weight perfect matching (or a greedy pairing) excluding
/// edges used by previous levels; odd n is handled by a pseudo point at
/// distance zero whose pair is discarded.
pub fn build_mdp(
    dist: &DistanceMatrix,
    k: usize,
    mode: MatchingMode,
) -> Result<SimilarityGraph, BuildError> {
    let n = dist.n();
    if k < 1 {
        return Err(BuildError::KTooLarge {
            k,
            reason: "k must be positive".into(),
        });
    }
    let odd = n % 2 != 0;
    let total = if odd { n + 1 } else { n };
    let mut used = std::collections::HashSet::new();
    let mut all_edges = Vec::new();
    for level in 0..k {
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(total * (total - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                if !used.contains(&(i, j)) {
                    edges.push((i, j, dist.get(i, j)));
                }
            }
        }
        if odd {
            // Pseudo point: distance 0 to everything, never masked.
            for i in 0..n {
                edges.push((i, n, 0.0));
            }
        }
        let pairs = match mode {
            MatchingMode::Exact => min_weight_perfect_matching(total, &edges),
            MatchingMode::Greedy => greedy_perfect_matching(total, &edges),
        };
        let Some(pairs) = pairs else {
            return Err(BuildError::KTooLarge {
                k,
                reason: format!("no orthogonal pairing at level {}", level + 1),
            });
        };
        for (i, j) in pairs {
            if j < n {
                used.insert((i, j));
                all_edges.push((i, j));
            }
        }
    }
    SimilarityGraph::new(n, all_edges)
}

fn greedy_perfect_matching(n: usize, edges: &[(usize, usize, f64)]) -> Option<Vec<(usize, usize)>> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| {
        edges[a]
            .2
            .partial_cmp(&edges[b].2)
            .unwrap()
            .then(edges[a].0.cmp(&edges[b].0))
            .then(edges[a].1.cmp(&edges[b].1))
    });
    let mut mate = vec![usize::MAX; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for idx in order {
        let (i, j, _) = edges[idx];
        if mate[i] == usize::MAX && mate[j] == usize::MAX {
            mate[i] = j;
            mate[j] = i;
            pairs.push((i.min(j), i.max(j)));
        }
    }
    if pairs.len() * 2 == n {
        Some(pairs)
    } else {
        None
    }
}

/// Hub diagnostics for the Gaussian-approximation conditions.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditionDiagnostics {
    /// Estimated edge-count exponent log|G| / log n.
    pub alpha_hat: f64,
    pub max_degree: u64,
    /// max degree / n^(0.75 (alpha_hat /\ 1)).
    pub hub_ratio: f64,
    /// Sum |A_e||B_e| / n^(1.5 (alpha_hat /\ 1)).
    pub neighborhood_ratio: f64,
    /// True when either ratio reaches 1; advisory only.
    pub gaussian_approx_risky: bool,
}

/// Evaluate the graph-condition diagnostics; never blocks computation.
pub fn condition_diagnostics(summary: &GraphSummary) -> ConditionDiagnostics {
    let n = summary.n_nodes as f64;
    if summary.n_edges == 0 {
        return ConditionDiagnostics {
            alpha_hat: 0.0,
            max_degree: 0,
            hub_ratio: 0.0,
            neighborhood_ratio: 0.0,
            gaussian_approx_risky: false,
        };
    }
    let alpha_hat = (summary.n_edges as f64).ln() / n.ln();
    let a = alpha_hat.min(1.0);
    let max_degree = summary.max_degree();
    let hub_ratio = max_degree as f64 / n.powf(0.75 * a);
    let neighborhood_ratio = summary.sum_ae_be as f64 / n.powf(1.5 * a);
    ConditionDiagnostics {
        alpha_hat,
        max_degree,
        hub_ratio,
        neighborhood_ratio,
        gaussian_approx_risky: hub_ratio >= 1.0 || neighborhood_ratio >= 1.0,
    }
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::AdjacencySnapshot;
    use crate::graph::summarize_graph;
    use crate::rng::Rng;
    use crate::testutil;

    fn line_points(xs: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
    }

    #[test]
    fn euclidean_triangle() {
        let seq =
            ObservationSequence::from_vectors(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = pairwise_distances(&seq, Metric::Euclidean).unwrap();
        assert!((d.get(0, 1) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn network_metrics() {
        // 3-node snapshots with adjacency vectors (1,1,0) and (1,0,1) per
        // upper triangle; differing entries = 2 pairs, doubled in the
        // full-matrix vector form. Scale-invariant downstream, and the
        // normalized variant is identical in both conventions.
        let a = AdjacencySnapshot::from_rows(
            0,
            &[
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let b = AdjacencySnapshot::from_rows(
            1,
            &[
                vec![0.0, 1.0, 0.0],
                vec![1.0, 0.0, 1.0],
                vec![0.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let seq = ObservationSequence::from_networks(vec![a, b]).unwrap();
        let raw = pairwise_distances(&seq, Metric::NetworkEdgeCount).unwrap();
        // Upper-triangle diffs: (0,2) and (1,2) -> 2; full matrix doubles.
        assert!((raw.get(0, 1) - 4.0).abs() < 1e-12);
        let norm = pairwise_distances(&seq, Metric::NetworkEdgeCountNormalized).unwrap();
        // 4 / sqrt(4 * 4) = 1, matching 2 / sqrt(2 * 2) in triangle form.
        assert!((norm.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_activity_day_reported() {
        let a = AdjacencySnapshot::from_rows(0, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let z = AdjacencySnapshot::from_rows(1, &[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let seq = ObservationSequence::from_networks(vec![a, z]).unwrap();
        let err = pairwise_distances(&seq, Metric::NetworkEdgeCountNormalized).unwrap_err();
        assert_eq!(err, BuildError::ZeroActivityDay { index: 1 });
    }

    #[test]
    fn mst_on_line() {
        let d = line_points(&[0.0, 1.0, 3.0, 6.0]);
        let g = build_mst(&d, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        // k = 2 exhausts the remaining orthogonal tree: K4.
        let g2 = build_mst(&d, 2).unwrap();
        assert_eq!(g2.n_edges(), 6);
    }

    #[test]
    fn mst_two_points() {
        let d = line_points(&[0.0, 1.0]);
        let g = build_mst(&d, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert!(build_mst(&d, 2).is_err());
    }

    /// All spanning trees by edge-subset enumeration.
    fn brute_min_spanning_weight(d: &DistanceMatrix) -> f64 {
        let n = d.n();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        let m = pairs.len();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << m) {
            if (mask.count_ones() as usize) != n - 1 {
                continue;
            }
            let mut dsu = Dsu::new(n);
            let mut weight = 0.0;
            let mut ok = true;
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                if mask & (1 << idx) != 0 {
                    if !dsu.union(i, j) {
                        ok = false;
                        break;
                    }
                    weight += d.get(i, j);
                }
            }
            if ok {
                best = best.min(weight);
            }
        }
        best
    }

    #[test]
    fn mst_weight_matches_brute_force() {
        let mut rng = Rng::new(0x517E);
        for _ in 0..60 {
            let n = 3 + rng.below(5) as usize; // 3..=7
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
            let d = DistanceMatrix::from_fn(n, |i, j| {
                ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
            })
            .unwrap();
            let g = build_mst(&d, 1).unwrap();
            let weight: f64 = g.edges().iter().map(|&(i, j)| d.get(i, j)).sum();
            let brute = brute_min_spanning_weight(&d);
            assert!((weight - brute).abs() < 1e-9, "{weight} vs {brute}");
        }
    }

    #[test]
    fn nng_on_line() {
        let d = line_points(&[0.0, 1.0, 3.0, 6.0]);
        let g = build_nng(&d, 1).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn nng_two_points_and_star() {
        let d = line_points(&[0.0, 1.0]);
        assert_eq!(build_nng(&d, 1).unwrap().edges(), &[(0, 1)]);

        // Hub at origin, satellites far apart: everyone's nearest is 0.
        let n = 6;
        let d = DistanceMatrix::from_fn(n, |i, j| {
            if i == 0 || j == 0 {
                1.0
            } else {
                10.0 + (i + j) as f64
            }
        })
        .unwrap();
        let g = build_nng(&d, 1).unwrap();
        assert_eq!(g.n_edges(), n - 1);
        let s = summarize_graph(&g);
        assert_eq!(s.max_degree(), (n - 1) as u64);
    }

    #[test]
    fn mdp_on_line() {
        let d = line_points(&[0.0, 1.0, 3.0, 6.0]);
        let g = build_mdp(&d, 1, MatchingMode::Exact).unwrap();
        // Pairing (0,1), (2,3) costs 4; alternatives cost 8 and 8.
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn mdp_odd_n_discards_pseudo_pair() {
        let d = line_points(&[0.0, 1.0, 10.0]);
        let g = build_mdp(&d, 1, MatchingMode::Exact).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn mdp_two_points() {
        let d = line_points(&[0.0, 5.0]);
        let g = build_mdp(&d, 1, MatchingMode::Exact).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    /// Brute-force minimum perfect-matching weight by recursive pairing.
    fn brute_min_matching_weight(d: &DistanceMatrix) -> f64 {
        fn recurse(d: &DistanceMatrix, free: &mut Vec<usize>, acc: f64, best: &mut f64) {
            if free.is_empty() {
                *best = best.min(acc);
                return;
            }
            let first = free[0];
            for idx in 1..free.len() {
                let partner = free[idx];
                let mut rest: Vec<usize> = free
                    .iter()
                    .copied()
                    .filter(|&v| v != first && v != partner)
                    .collect();
                recurse(d, &mut rest, acc + d.get(first, partner), best);
            }
        }
        let mut free: Vec<usize> = (0..d.n()).collect();
        let mut best = f64::INFINITY;
        recurse(d, &mut free, 0.0, &mut best);
        best
    }

    #[test]
    fn mdp_weight_matches_brute_force() {
        let mut rng = Rng::new(0x3D9);
        for _ in 0..60 {
            let half = 1 + rng.below(5) as usize;
            let n = 2 * half; // 2..=10
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
            let d = DistanceMatrix::from_fn(n, |i, j| {
                ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
            })
            .unwrap();
            let g = build_mdp(&d, 1, MatchingMode::Exact).unwrap();
            let weight: f64 = g.edges().iter().map(|&(i, j)| d.get(i, j)).sum();
            let brute = brute_min_matching_weight(&d);
            assert!((weight - brute).abs() < 1e-9, "{weight} vs {brute}");
        }
    }

    #[test]
    fn orthogonal_levels_are_disjoint() {
        let mut rng = Rng::new(0x0127);
        let n = 12;
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
        let d = DistanceMatrix::from_fn(n, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        })
        .unwrap();
        for spec in [
            GraphSpec::new(GraphFamily::Mst, 3),
            GraphSpec::new(GraphFamily::Mdp, 3),
        ] {
            let g1 = build_graph(&d, GraphSpec { k: 1, ..spec }, MatchingMode::Exact).unwrap();
            let g2 = build_graph(&d, GraphSpec { k: 2, ..spec }, MatchingMode::Exact).unwrap();
            let g3 = build_graph(&d, spec, MatchingMode::Exact).unwrap();
            let s1: std::collections::HashSet<_> = g1.edges().iter().collect();
            let s2: std::collections::HashSet<_> = g2.edges().iter().collect();
            let s3: std::collections::HashSet<_> = g3.edges().iter().collect();
            assert!(s1.is_subset(&s2) && s2.is_subset(&s3), "{spec:?} nesting");
            // Level sizes: MST adds n-1 per level, MDP n/2.
            let per_level = match spec.family {
                GraphFamily::Mst => n - 1,
                GraphFamily::Mdp => n / 2,
                GraphFamily::Nng => unreachable!(),
            };
            assert_eq!(g3.n_edges(), 3 * per_level);
        }
    }

    #[test]
    fn knng_union_size_bounds() {
        let mut rng = Rng::new(0xF1F5);
        let n = 15;
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.uniform(), rng.uniform())).collect();
        let d = DistanceMatrix::from_fn(n, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        })
        .unwrap();
        for k in 1..4 {
            let g = build_nng(&d, k).unwrap();
            assert!(g.n_edges() <= k * n);
            assert!(g.n_edges() >= k * n / 2);
            let s = summarize_graph(&g);
            assert!(s.degrees.iter().all(|&deg| deg >= k as u64));
        }
    }

    #[test]
    fn diagnostics_matching_vs_star() {
        let matching = summarize_graph(&testutil::matching(1000));
        let d = condition_diagnostics(&matching);
        assert_eq!(d.max_degree, 1);
        assert!(!d.gaussian_approx_risky, "{d:?}");

        let star = summarize_graph(&testutil::star(100));
        let d = condition_diagnostics(&star);
        assert_eq!(d.max_degree, 99);
        assert!(d.hub_ratio >= 1.0);
        assert!(d.gaussian_approx_risky);

        let empty = summarize_graph(&SimilarityGraph::new(10, []).unwrap());
        let d = condition_diagnostics(&empty);
        assert_eq!(d.hub_ratio, 0.0);
        assert_eq!(d.neighborhood_ratio, 0.0);
        assert!(!d.gaussian_approx_risky);
    }

    #[test]
    fn greedy_matching_is_pairing() {
        let d = line_points(&[0.0, 1.0, 3.0, 6.0, 7.0, 20.0]);
        let g = build_mdp(&d, 1, MatchingMode::Greedy).unwrap();
        assert_eq!(g.n_edges(), 3);
        let s = summarize_graph(&g);
        assert!(s.degrees.iter().all(|&deg| deg == 1));
    }
}
