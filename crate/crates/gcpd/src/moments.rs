//! Exact permutation-null moments of the edge-crossing count.
//!
//! Every formula here reduces to placement probabilities for 2..6 node
//! indices times graph counting constants. Probabilities are evaluated as
//! ordered products of factor ratios: each numerator factor is paired
//! with one denominator factor so no intermediate grows beyond O(n^2),
//! and a zero numerator factor short-circuits the product to exactly 0,
//! which resolves the 0/0 cases at small n.

use crate::error::MomentError;
use crate::graph::GraphSummary;

/// Mean and variance of R_G under a permutation-style null.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn is_degenerate(&self) -> bool {
        self.variance <= 0.0
    }
}

/// The four placement probabilities of Lemmas 1 and 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementProbs {
    /// P(one given edge crosses).
    pub p1: f64,
    /// P(two node-disjoint edges both cross).
    pub p2: f64,
    /// P(three star-configured edges all cross).
    pub p3: f64,
    /// P(three pairwise node-disjoint edges all cross).
    pub p4: f64,
}

#[inline]
fn ratio_product(factors: &[(f64, f64)]) -> f64 {
    for &(num, _) in factors {
        if num == 0.0 {
            return 0.0;
        }
    }
    factors.iter().map(|&(num, den)| num / den).product()
}

fn check_t(n: usize, t: usize) -> Result<(), MomentError> {
    if n < 2 || t < 1 || t > n - 1 {
        return Err(MomentError::TOutOfRange {
            t,
            n,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

/// Placement probabilities without the [1, n-1] range check; used by the
/// interval path where group sizes 0 and n are legitimate degenerate
/// candidates.
fn probs_unchecked(n: usize, t: usize) -> PlacementProbs {
    // All four probabilities are symmetric in t <-> n - t; evaluating at
    // the smaller side makes that symmetry exact in floating point.
    let t = t.min(n - t);
    let nf = n as f64;
    let tf = t as f64;
    let p1 = ratio_product(&[(2.0 * tf, nf), (nf - tf, nf - 1.0)]);
    let p2 = ratio_product(&[
        (2.0 * tf, nf),
        (2.0 * (tf - 1.0), nf - 1.0),
        (nf - tf, nf - 2.0),
        (nf - tf - 1.0, nf - 3.0),
    ]);
    let p3 = ratio_product(&[
        (tf, nf),
        (nf - tf, nf - 1.0),
        (nf - tf - 1.0, nf - 2.0),
        (nf - tf - 2.0, nf - 3.0),
    ]) + ratio_product(&[
        (tf, nf),
        (nf - tf, nf - 1.0),
        (tf - 1.0, nf - 2.0),
        (tf - 2.0, nf - 3.0),
    ]);
    let p4 = ratio_product(&[
        (2.0 * tf, nf),
        (2.0 * (tf - 1.0), nf - 1.0),
        (2.0 * (tf - 2.0), nf - 2.0),
        (nf - tf, nf - 3.0),
        (nf - tf - 1.0, nf - 4.0),
        (nf - tf - 2.0, nf - 5.0),
    ]);
    PlacementProbs { p1, p2, p3, p4 }
}

/// Placement probabilities at split point t of n.
pub fn placement_probs(n: usize, t: usize) -> Result<PlacementProbs, MomentError> {
    check_t(n, t)?;
    Ok(probs_unchecked(n, t))
}

/// Clamp tiny negative variances (floating-point noise near degenerate
/// graphs) to zero; larger negatives indicate an inconsistent summary.
fn clamp_variance(var: f64, term_scale: f64) -> Result<f64, MomentError> {
    let tol = 1e-9 * term_scale.max(1.0);
    if var < -tol {
        return Err(MomentError::NegativeVariance { value: var });
    }
    // Snap |var| <= tol to exactly zero so degenerate structures (complete
    // graphs and the like) are recognized instead of leaving O(1e-16)
    // residue that would blow up standardization.
    Ok(if var <= tol { 0.0 } else { var })
}

fn moments_at(s: &GraphSummary, t: usize) -> Result<Moments, MomentError> {
    let p = probs_unchecked(s.n_nodes, t);
    let g = s.n_edges as f64;
    let deg_sq = s.sum_deg_sq as f64;
    let mean = p.p1 * g;
    let t1 = p.p2 * g;
    let t2 = (0.5 * p.p1 - p.p2) * deg_sq;
    let t3 = (p.p2 - p.p1 * p.p1) * g * g;
    let variance = clamp_variance(t1 + t2 + t3, t1.abs() + t2.abs() + t3.abs())?;
    Ok(Moments { mean, variance })
}

/// Lemma-1 mean and variance of R_G(t) under the permutation null.
pub fn single_moments(s: &GraphSummary, t: usize) -> Result<Moments, MomentError> {
    check_t(s.n_nodes, t)?;
    moments_at(s, t)
}

/// Lemma-2 mean and variance of the interval count R_G(t1, t2); equal to
/// the single-split moments at group size t2 - t1.
pub fn interval_moments(s: &GraphSummary, t1: usize, t2: usize) -> Result<Moments, MomentError> {
    let n = s.n_nodes;
    if t1 >= t2 || t2 > n {
        return Err(MomentError::BadInterval { t1, t2, n });
    }
    moments_at(s, t2 - t1)
}

/// Third raw moment E[R_G^3(t)] from the eight three-edge configuration
/// counts, all of which reduce to the scalar fields of [`GraphSummary`].
pub fn third_moment(s: &GraphSummary, t: usize) -> Result<f64, MomentError> {
    check_t(s.n_nodes, t)?;
    Ok(third_moment_at(s, t))
}

fn third_moment_at(s: &GraphSummary, t: usize) -> f64 {
    let p = probs_unchecked(s.n_nodes, t);
    let g = s.n_edges as f64;
    let d2 = s.sum_deg_fall2 as f64;
    let d3 = s.sum_deg_fall3 as f64;
    let ep = s.edge_deg_prod as f64;
    let ts = s.shared_neighbor_sum as f64;

    // sum_i deg_i (deg_i - 1)(|G| - deg_i) and
    // sum_i deg_i (deg_i - 1)(3|G| - 2 deg_i - 2), via
    // sum_i deg_i^2 (deg_i - 1) = d3 + 2 d2.
    let chain_excess = (g - 2.0) * d2 - d3;
    let last = (3.0 * g - 6.0) * d2 - 2.0 * d3;

    p.p1 * g
        + 1.5 * p.p1 * d2
        + 3.0 * p.p2 * (g * (g - 1.0) + 0.5 * chain_excess)
        - 3.0 * p.p2 * (d2 + ep)
        + p.p3 * d3
        + p.p4 * (g * (g - 1.0) * (g - 2.0) + 6.0 * ep)
        - 2.0 * p.p4 * ts
        - p.p4 * last
}

/// Skewness gamma = E[Z^3] of the sign-inverted standardized count
/// Z = -(R - E R)/sqrt(V R). Errors when the variance is zero.
pub fn skewness(s: &GraphSummary, t: usize) -> Result<f64, MomentError> {
    let m = single_moments(s, t)?;
    if m.variance <= 0.0 {
        return Err(MomentError::DegenerateVariance);
    }
    let e3 = third_moment_at(s, t);
    // E[(-(R - mu))^3] = mu^3 + 3 mu V - E[R^3].
    Ok((m.mean.powi(3) + 3.0 * m.mean * m.variance - e3) / m.variance.powf(1.5))
}

/// Interval skewness depends on the pair only through the group size
/// t2 - t1.
pub fn interval_skewness(s: &GraphSummary, t1: usize, t2: usize) -> Result<f64, MomentError> {
    let n = s.n_nodes;
    if t1 >= t2 || t2 > n {
        return Err(MomentError::BadInterval { t1, t2, n });
    }
    skewness(s, t2 - t1)
}

/// Correlation of Z_G(t1) and Z_G(t2) under the permutation null,
/// assembled from the two-split placement probabilities q1, q2, q3.
pub fn cross_covariance(s: &GraphSummary, t1: usize, t2: usize) -> Result<f64, MomentError> {
    let n = s.n_nodes;
    check_t(n, t1)?;
    check_t(n, t2)?;
    if t1 == t2 {
        return Ok(1.0);
    }
    let (lo, hi) = (t1.min(t2), t1.max(t2));
    let m_lo = moments_at(s, lo)?;
    let m_hi = moments_at(s, hi)?;
    if m_lo.variance <= 0.0 || m_hi.variance <= 0.0 {
        return Err(MomentError::DegenerateVariance);
    }

    let nf = n as f64;
    let sf = lo as f64;
    let tf = hi as f64;
    let q1 = ratio_product(&[(2.0 * sf, nf), (nf - tf, nf - 1.0)]);
    let q2 = ratio_product(&[
        (sf, nf),
        (nf - tf, nf - 1.0),
        (nf + 2.0 * tf - 2.0 * sf - 2.0, nf - 2.0),
    ]);
    let q3 = ratio_product(&[
        (2.0 * sf, nf),
        (nf - tf, nf - 1.0),
        (2.0 * (sf - 1.0), nf - 2.0),
        (nf - sf - 1.0, nf - 3.0),
    ]) + ratio_product(&[
        (2.0 * sf, nf),
        (nf - tf, nf - 1.0),
        (2.0 * (tf - sf), nf - 2.0),
        (nf - sf - 2.0, nf - 3.0),
    ]);

    let g = s.n_edges as f64;
    let deg_sq = s.sum_deg_sq as f64;
    let product_mean = (q1 - 2.0 * q2 + q3) * g + (q2 - q3) * deg_sq + q3 * g * g;
    let cov = product_mean - m_lo.mean * m_hi.mean;
    Ok(cov / (m_lo.variance * m_hi.variance).sqrt())
}

/// Bootstrap-null moments (every time drawn independently and uniformly):
/// the retained-permutation correction drops and no |G|^2 term appears.
pub fn bootstrap_moments(s: &GraphSummary, t: usize) -> Result<Moments, MomentError> {
    let n = s.n_nodes;
    check_t(n, t)?;
    let nf = n as f64;
    let tf = t as f64;
    let p1b = ratio_product(&[(2.0 * tf, nf), (nf - tf, nf)]);
    let p2b = p1b * p1b;
    let g = s.n_edges as f64;
    let deg_sq = s.sum_deg_sq as f64;
    let mean = p1b * g;
    let t1 = p2b * g;
    let t2 = (0.5 * p1b - p2b) * deg_sq;
    let variance = clamp_variance(t1 + t2, t1.abs() + t2.abs())?;
    Ok(Moments { mean, variance })
}

/// Degree-square excess Sum |G_i|^2 - 4 |G|^2 / n, the graph quantity the
/// limiting covariance depends on (zero exactly when all degrees are
/// equal, e.g. for a perfect matching).
pub fn deg_sq_excess(s: &GraphSummary) -> f64 {
    let g = s.n_edges as f64;
    s.sum_deg_sq as f64 - 4.0 * g * g / s.n_nodes as f64
}

/// Covariance function rho*(u, v) of the limiting Gaussian process of
/// Z_G([nu]), parameterized by the edge count and the degree-square
/// excess of [`deg_sq_excess`].
///
/// For u < v:
///   rho*(u, v) = (4 u^2 (1-v)^2 |G| + u (1-v)(1-2u)(1-2v) X) /
///                (sigma*(u) sigma*(v)),
///   sigma*(w)^2 = 4 w^2 (1-w)^2 |G| + w (1-w)(1-2w)^2 X,
/// with X the degree-square excess. Its left derivative in u at u = v
/// equals the local decay rate h*(v), and the finite-n correlation of
/// [`cross_covariance`] converges to it.
pub fn limit_covariance(
    u: f64,
    v: f64,
    n_edges: f64,
    deg_sq_excess: f64,
) -> Result<f64, MomentError> {
    let domain = |what: &str| MomentError::DomainError {
        what: what.to_string(),
    };
    if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
        return Err(domain("u, v must lie strictly inside (0, 1)"));
    }
    if n_edges <= 0.0 {
        return Err(domain("edge count must be positive"));
    }
    if u == v {
        return Ok(1.0);
    }
    let sigma_sq = |w: f64| {
        4.0 * w * w * (1.0 - w) * (1.0 - w) * n_edges
            + w * (1.0 - w) * (1.0 - 2.0 * w) * (1.0 - 2.0 * w) * deg_sq_excess
    };
    let (lo, hi) = (u.min(v), u.max(v));
    let s_lo = sigma_sq(lo);
    let s_hi = sigma_sq(hi);
    if s_lo <= 0.0 || s_hi <= 0.0 {
        return Err(domain("degenerate limiting variance"));
    }
    let num = 4.0 * lo * lo * (1.0 - hi) * (1.0 - hi) * n_edges
        + lo * (1.0 - hi) * (1.0 - 2.0 * u) * (1.0 - 2.0 * v) * deg_sq_excess;
    Ok(num / (s_lo * s_hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{summarize_graph, SimilarityGraph};
    use crate::testutil;

    fn summary_of(edges: &[(usize, usize)], n: usize) -> GraphSummary {
        summarize_graph(&SimilarityGraph::new(n, edges.iter().copied()).unwrap())
    }

    #[test]
    fn placement_probs_small_cases() {
        let p = placement_probs(4, 2).unwrap();
        assert!((p.p1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.p2 - 2.0 / 3.0).abs() < 1e-15);

        // Four distinct indices are impossible at n = 3.
        let p = placement_probs(3, 1).unwrap();
        assert_eq!(p.p2, 0.0);
        assert_eq!(p.p4, 0.0);

        let p = placement_probs(1000, 500).unwrap();
        assert!((p.p1 - 500_000.0 / 999_000.0).abs() < 1e-15);
    }

    #[test]
    fn placement_probs_rejects_bad_t() {
        assert!(placement_probs(5, 0).is_err());
        assert!(placement_probs(5, 5).is_err());
    }

    #[test]
    fn path3_moments_exact() {
        let s = summary_of(&[(0, 1), (1, 2)], 3);
        let m = single_moments(&s, 1).unwrap();
        assert!((m.mean - 4.0 / 3.0).abs() < 1e-14);
        assert!((m.variance - 2.0 / 9.0).abs() < 1e-14);
        let e3 = third_moment(&s, 1).unwrap();
        assert!((e3 - 10.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn complete_graph_is_degenerate() {
        let s = summary_of(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4);
        let m = single_moments(&s, 2).unwrap();
        assert_eq!(m.variance, 0.0);
        assert!((m.mean - 4.0).abs() < 1e-12);
        // R is constant t(n-t) = 4, so E[R^3] = 64.
        let e3 = third_moment(&s, 2).unwrap();
        assert!((e3 - 64.0).abs() < 1e-10);
        assert_eq!(skewness(&s, 2), Err(MomentError::DegenerateVariance));
    }

    #[test]
    fn empty_graph_moments_are_zero() {
        let s = summary_of(&[], 5);
        let m = single_moments(&s, 2).unwrap();
        assert_eq!((m.mean, m.variance), (0.0, 0.0));
        assert_eq!(third_moment(&s, 2).unwrap(), 0.0);
    }

    #[test]
    fn interval_reduces_to_single() {
        let s = summary_of(&[(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)], 4);
        for t in 1..4 {
            let a = interval_moments(&s, 0, t).unwrap();
            let b = single_moments(&s, t).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn path4_interval_mean() {
        let s = summary_of(&[(0, 1), (1, 2), (2, 3)], 4);
        let m = interval_moments(&s, 1, 3).unwrap();
        assert!((m.mean - 2.0).abs() < 1e-14);
        // Oracle over all 24 permutations.
        let g = SimilarityGraph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let (mean, var) = testutil::enumerate_interval_moments(&g, 1, 3);
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance - var).abs() < 1e-12);
    }

    #[test]
    fn path3_skewness_matches_enumeration() {
        let s = summary_of(&[(0, 1), (1, 2)], 3);
        let gamma = skewness(&s, 1).unwrap();
        // Z takes value 1/sqrt(2) w.p. 2/3 and -sqrt(2) w.p. 1/3.
        let expected = -1.0 / 2.0f64.sqrt();
        assert!((gamma - expected).abs() < 1e-13, "gamma {gamma}");
    }

    #[test]
    fn moments_match_enumeration_on_small_graphs() {
        for g in testutil::random_graphs(25, 3, 6, 0x5EED) {
            let s = summarize_graph(&g);
            let n = g.n();
            for t in 1..n {
                let (mean, var, e3) = testutil::enumerate_single_moments(&g, t);
                let m = single_moments(&s, t).unwrap();
                assert!(testutil::rel_gap(m.mean, mean) < 1e-12);
                assert!(testutil::rel_gap(m.variance, var) < 1e-12);
                let f3 = third_moment(&s, t).unwrap();
                assert!(testutil::rel_gap(f3, e3) < 1e-12, "t={t} {f3} vs {e3}");
            }
        }
    }

    #[test]
    fn cross_covariance_matches_enumeration() {
        let g = SimilarityGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let s = summarize_graph(&g);
        let product = testutil::enumerate_cross_product(&g, 1, 2);
        let m1 = single_moments(&s, 1).unwrap();
        let m2 = single_moments(&s, 2).unwrap();
        let expected = (product - m1.mean * m2.mean) / (m1.variance * m2.variance).sqrt();
        let got = cross_covariance(&s, 1, 2).unwrap();
        assert!((got - expected).abs() < 1e-13);
        assert_eq!(cross_covariance(&s, 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn cross_covariance_is_a_correlation() {
        for g in testutil::random_graphs(30, 4, 8, 0xC0FFEE) {
            let s = summarize_graph(&g);
            let n = g.n();
            for t1 in 1..n {
                for t2 in t1..n {
                    match cross_covariance(&s, t1, t2) {
                        Ok(c) => assert!(c.abs() <= 1.0 + 1e-12, "corr {c}"),
                        Err(MomentError::DegenerateVariance) => {}
                        Err(e) => panic!("unexpected {e:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn bootstrap_moments_match_enumeration() {
        let k4 = testutil::complete(4);
        let s = summarize_graph(&k4);
        let m = bootstrap_moments(&s, 2).unwrap();
        assert!((m.mean - 3.0).abs() < 1e-14);
        assert!((m.variance - 1.5).abs() < 1e-14);
        let (mean, var) = testutil::enumerate_bootstrap_moments(&k4, 2);
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance - var).abs() < 1e-12);

        let p3 = testutil::path(3);
        let sp = summarize_graph(&p3);
        let (mean, var) = testutil::enumerate_bootstrap_moments(&p3, 1);
        let m = bootstrap_moments(&sp, 1).unwrap();
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance - var).abs() < 1e-12);

        let empty = summary_of(&[], 4);
        let m = bootstrap_moments(&empty, 2).unwrap();
        assert_eq!((m.mean, m.variance), (0.0, 0.0));
    }

    #[test]
    fn reflection_symmetry_is_exact() {
        for g in testutil::random_graphs(20, 4, 9, 0xFACADE) {
            let s = summarize_graph(&g);
            let n = g.n();
            for t in 1..n {
                let a = single_moments(&s, t).unwrap();
                let b = single_moments(&s, n - t).unwrap();
                assert_eq!(a.mean.to_bits(), b.mean.to_bits());
                assert_eq!(a.variance.to_bits(), b.variance.to_bits());
                match (skewness(&s, t), skewness(&s, n - t)) {
                    (Ok(x), Ok(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                    (Err(_), Err(_)) => {}
                    other => panic!("asymmetric degeneracy {other:?}"),
                }
            }
        }
    }

    #[test]
    fn variance_nonnegative_on_many_random_inputs() {
        // 10^5 random (graph, t) evaluations across sizes.
        let graphs = testutil::random_graphs(6000, 3, 38, 0xD1CE);
        let mut checked = 0usize;
        'outer: for g in &graphs {
            let s = summarize_graph(g);
            for t in 1..g.n() {
                let m = single_moments(&s, t).unwrap();
                assert!(m.variance >= 0.0);
                checked += 1;
                if checked >= 100_000 {
                    break 'outer;
                }
            }
        }
        assert!(checked >= 100_000, "only {checked} triples checked");
    }

    #[test]
    fn mdp_third_moment_readings() {
        // The matching-structure simplification of E[R^3] holds when its
        // size symbol is read as the edge count, not the node count.
        let g = testutil::matching(8);
        let s = summarize_graph(&g);
        for t in 1..8 {
            let (_, _, e3) = testutil::enumerate_single_moments(&g, t);
            let general = third_moment(&s, t).unwrap();
            assert!(testutil::rel_gap(general, e3) < 1e-12);

            let p = placement_probs(8, t).unwrap();
            let m = s.n_edges as f64; // 4 edges
            let simplified_edges = p.p1 * m + 3.0 * p.p2 * m * (m - 1.0) + p.p4 * m * (m - 1.0) * (m - 2.0);
            assert!(
                testutil::rel_gap(simplified_edges, e3) < 1e-12,
                "edge-count reading should match: {simplified_edges} vs {e3}"
            );

            let nn = s.n_nodes as f64; // 8 nodes; this reading overcounts
            let simplified_nodes = p.p1 * nn + 3.0 * p.p2 * nn * (nn - 1.0) + p.p4 * nn * (nn - 1.0) * (nn - 2.0);
            assert!(testutil::rel_gap(simplified_nodes, e3) > 1e-3);
        }
    }

    #[test]
    fn limit_covariance_basics() {
        assert_eq!(limit_covariance(0.3, 0.3, 500.0, 0.0).unwrap(), 1.0);
        // At u = 0.5 the excess term vanishes, so rho is excess-free.
        let a = limit_covariance(0.3, 0.5, 500.0, 0.0).unwrap();
        let b = limit_covariance(0.3, 0.5, 500.0, 250.0).unwrap();
        let sigma_ratio: f64 = {
            // Only sigma(0.3) changes with the excess.
            let s0: f64 = 4.0 * 0.09 * 0.49 * 500.0;
            let s1: f64 = s0 + 0.3 * 0.7 * 0.16 * 250.0;
            (s0 / s1).sqrt()
        };
        assert!((b / a - sigma_ratio).abs() < 1e-12);
        assert!(limit_covariance(0.0, 0.5, 500.0, 0.0).is_err());
    }

    #[test]
    fn finite_n_correlation_converges_to_limit() {
        // Perfect matching on n = 10^4: excess is exactly zero and the
        // limit correlation is u(1-v) / (v(1-u)).
        let n = 10_000;
        let s = summarize_graph(&testutil::matching(n));
        let x = deg_sq_excess(&s);
        assert_eq!(x, 0.0);
        for (u, v) in [(0.3, 0.5), (0.2, 0.8), (0.45, 0.55)] {
            let finite = cross_covariance(&s, (n as f64 * u) as usize, (n as f64 * v) as usize)
                .unwrap();
            let limit = limit_covariance(u, v, s.n_edges as f64, x).unwrap();
            assert!(
                (finite - limit).abs() < 0.01,
                "u={u} v={v}: finite {finite} vs limit {limit}"
            );
            let closed = u * (1.0 - v) / (v * (1.0 - u));
            assert!((limit - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_covariance_derivative_matches_decay_rate() {
        // One-sided difference with Richardson extrapolation at u -> v-.
        let h = 1e-5;
        for &(g, x, r0, r1) in &[
            // matching structure on n = 1000: r1 - 4 r0 = 0
            (500.0, 0.0, 0.5, 2.0),
            // star-like structure on n = 1000
            (999.0, 999.0 * 999.0 + 999.0 - 4.0 * 999.0 * 999.0 / 1000.0, 0.999, 1000.0),
        ] {
            for k in 1..=9 {
                let v = k as f64 / 10.0;
                let d = |step: f64| {
                    (1.0 - limit_covariance(v - step, v, g, x).unwrap()) / step
                };
                let deriv = 2.0 * d(h) - d(2.0 * h);
                let hstar = 1.0 / (2.0 * v * (1.0 - v))
                    + 2.0 / (4.0 * v * (1.0 - v) + (1.0 - 2.0 * v).powi(2) * (r1 - 4.0 * r0));
                assert!(
                    testutil::rel_gap(deriv, hstar) < 1e-4,
                    "v={v}: fd {deriv} vs closed {hstar}"
                );
            }
        }
    }
}
