//! Similarity graphs and the graph functionals that drive every moment
//! formula.
//!
//! All test statistics depend on the data only through an undirected
//! simple graph on the observation indices. [`GraphSummary`] collects the
//! handful of counts (edge count, degree power sums, edge-degree products,
//! shared-neighbor totals, neighborhood sizes) that fully determine the
//! permutation-null moments.

use crate::error::BuildError;

/// An undirected simple graph on observation indices 0..n.
///
/// Edges are stored with the smaller endpoint first and deduplicated at
/// construction; self-loops are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl SimilarityGraph {
    /// Build from an edge list. Endpoint order and edge order are
    /// irrelevant; duplicates collapse to a single edge.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, BuildError> {
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(BuildError::KTooLarge {
                    k: 0,
                    reason: format!("self-loop at node {a}"),
                });
            }
            if a >= n || b >= n {
                return Err(BuildError::KTooLarge {
                    k: 0,
                    reason: format!("edge ({a}, {b}) outside node range 0..{n}"),
                });
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        Ok(Self { n, edges: normalized })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted ascending, each with smaller endpoint first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor lists per node.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

/// Graph functionals sufficient for all permutation-null moments.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSummary {
    /// Node count n.
    pub n_nodes: usize,
    /// |G|, the edge count.
    pub n_edges: u64,
    /// Node degrees |G_i|.
    pub degrees: Vec<u64>,
    /// Sum of squared degrees.
    pub sum_deg_sq: u64,
    /// Sum of |G_i| (|G_i| - 1), the ordered count of distinct edge pairs
    /// sharing a node.
    pub sum_deg_fall2: u64,
    /// Sum of |G_i| (|G_i| - 1)(|G_i| - 2).
    pub sum_deg_fall3: u64,
    /// Sum over edges (i, j) of (|G_i| - 1)(|G_j| - 1).
    pub edge_deg_prod: u64,
    /// Sum over edges (i, j) of the number of common neighbors of i and j;
    /// equals three times the triangle count in a simple graph.
    pub shared_neighbor_sum: u64,
    /// Sum over edges e of |A_e| |B_e|, where A_e is the set of edges
    /// touching either endpoint of e and B_e the set of edges touching any
    /// node of A_e's edges.
    pub sum_ae_be: u64,
}

impl GraphSummary {
    /// Max degree, 0 for an empty graph.
    pub fn max_degree(&self) -> u64 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }
}

/// Compute every summary field exactly by direct counting.
pub fn summarize_graph(graph: &SimilarityGraph) -> GraphSummary {
    let n = graph.n();
    let adj = graph.adjacency();
    let deg: Vec<u64> = adj.iter().map(|a| a.len() as u64).collect();

    let mut sum_deg_sq = 0u64;
    let mut sum_deg_fall2 = 0u64;
    let mut sum_deg_fall3 = 0u64;
    for &d in &deg {
        sum_deg_sq += d * d;
        sum_deg_fall2 += d * d.saturating_sub(1);
        sum_deg_fall3 += d * d.saturating_sub(1) * d.saturating_sub(2);
    }

    let mut edge_deg_prod = 0u64;
    let mut shared_neighbor_sum = 0u64;
    for &(a, b) in graph.edges() {
        edge_deg_prod += (deg[a] - 1) * (deg[b] - 1);
        shared_neighbor_sum += sorted_intersection_size(&adj[a], &adj[b]);
    }

    let sum_ae_be = sum_ae_be(graph, &adj);

    GraphSummary {
        n_nodes: n,
        n_edges: graph.n_edges() as u64,
        degrees: deg,
        sum_deg_sq,
        sum_deg_fall2,
        sum_deg_fall3,
        edge_deg_prod,
        shared_neighbor_sum,
        sum_ae_be,
    }
}

fn sorted_intersection_size(a: &[usize], b: &[usize]) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Sum over edges e of |A_e| |B_e|.
///
/// |A_e| is cheap (deg(i) + deg(j) - 1 in a simple graph). |B_e| is the
/// number of edges within distance one of A_e, counted per edge with a
/// stamp array so the overall cost is the sum of 2-neighborhood sizes.
fn sum_ae_be(graph: &SimilarityGraph, adj: &[Vec<usize>]) -> u64 {
    let edges = graph.edges();
    if edges.is_empty() {
        return 0;
    }
    // Map each edge to an id for stamping.
    let mut edge_id = std::collections::HashMap::with_capacity(edges.len());
    for (id, &e) in edges.iter().enumerate() {
        edge_id.insert(e, id);
    }
    let id_of = |a: usize, b: usize| edge_id[&(a.min(b), a.max(b))];

    let mut stamp = vec![u32::MAX; edges.len()];
    let mut total = 0u64;
    for (current, &(i, j)) in edges.iter().enumerate() {
        let a_e = (adj[i].len() + adj[j].len() - 1) as u64;

        // Nodes touched by A_e's edges: i, j, and all their neighbors.
        // B_e is every edge incident to one of those nodes.
        let marker = current as u32;
        let mut b_e = 0u64;
        let visit_node = |node: usize, stamp: &mut Vec<u32>, b_e: &mut u64| {
            for &nb in &adj[node] {
                let id = id_of(node, nb);
                if stamp[id] != marker {
                    stamp[id] = marker;
                    *b_e += 1;
                }
            }
        };
        visit_node(i, &mut stamp, &mut b_e);
        visit_node(j, &mut stamp, &mut b_e);
        for &nb in adj[i].iter().chain(adj[j].iter()) {
            visit_node(nb, &mut stamp, &mut b_e);
        }
        total += a_e * b_e;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SimilarityGraph {
        // 1-2-3 in the 1-based convention.
        SimilarityGraph::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> SimilarityGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        SimilarityGraph::new(n, edges).unwrap()
    }

    /// Brute-force triangle count for cross-checking shared_neighbor_sum.
    fn count_triangles(g: &SimilarityGraph) -> u64 {
        let adj = g.adjacency();
        let n = g.n();
        let mut count = 0u64;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if adj[a].contains(&b) && adj[b].contains(&c) && adj[a].contains(&c) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn path_summary_hand_counts() {
        let s = summarize_graph(&path3());
        assert_eq!(s.n_edges, 2);
        assert_eq!(s.sum_deg_sq, 6);
        assert_eq!(s.sum_deg_fall2, 2);
        assert_eq!(s.shared_neighbor_sum, 0);
    }

    #[test]
    fn complete_graph_summary() {
        let s = summarize_graph(&complete(4));
        assert_eq!(s.n_edges, 6);
        assert_eq!(s.sum_deg_sq, 36);
        assert_eq!(s.shared_neighbor_sum, 12); // 3 * 4 triangles
    }

    #[test]
    fn empty_graph_summary_is_zero() {
        let g = SimilarityGraph::new(5, []).unwrap();
        let s = summarize_graph(&g);
        assert_eq!(s.n_edges, 0);
        assert_eq!(s.sum_deg_sq, 0);
        assert_eq!(s.sum_deg_fall2, 0);
        assert_eq!(s.sum_deg_fall3, 0);
        assert_eq!(s.edge_deg_prod, 0);
        assert_eq!(s.shared_neighbor_sum, 0);
        assert_eq!(s.sum_ae_be, 0);
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let rng_graphs = crate::testutil::random_graphs(40, 3, 12, 0xA11CE);
        for g in rng_graphs {
            let s = summarize_graph(&g);
            let deg_sum: u64 = s.degrees.iter().sum();
            assert_eq!(deg_sum, 2 * s.n_edges);
        }
    }

    #[test]
    fn shared_neighbor_sum_is_three_times_triangles() {
        for g in crate::testutil::random_graphs(60, 3, 12, 0xBEEF) {
            let s = summarize_graph(&g);
            assert_eq!(s.shared_neighbor_sum, 3 * count_triangles(&g));
        }
    }

    #[test]
    fn summary_invariant_under_reordering_and_swaps() {
        let g1 = SimilarityGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let g2 = SimilarityGraph::new(5, [(4, 0), (3, 2), (4, 3), (2, 1), (1, 0)]).unwrap();
        assert_eq!(summarize_graph(&g1), summarize_graph(&g2));
    }

    #[test]
    fn ae_be_on_disjoint_edges() {
        // Perfect matching: A_e = {e}, B_e = {e} for every edge.
        let g = SimilarityGraph::new(6, [(0, 1), (2, 3), (4, 5)]).unwrap();
        let s = summarize_graph(&g);
        assert_eq!(s.sum_ae_be, 3);
    }

    #[test]
    fn ae_be_on_path4() {
        // Path 1-2-3-4: middle edge has A_e = all 3 edges, B_e = all 3;
        // end edges have |A_e| = 2 and B_e = all 3.
        let g = SimilarityGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = summarize_graph(&g);
        assert_eq!(s.sum_ae_be, 2 * 3 + 3 * 3 + 2 * 3);
    }
}
