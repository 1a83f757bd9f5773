//! Change-point estimation, confidence regions, and binary segmentation.
//!
//! Confidence regions follow the partition-duality construction: a split
//! k stays in the region when the sub-sequences it induces pass the
//! homogeneity test at level 1 - sqrt(1 - alpha). Sub-sequence graphs are
//! rebuilt from the restricted distance matrix; edge-induced subgraphs of
//! the full graph would not be valid MST/MDP/NNG structures.

use crate::build::{build_graph, GraphSpec, MatchingMode};
use crate::data::DistanceMatrix;
use crate::error::InferenceError;
use crate::graph::summarize_graph;
use crate::pvalue::{pvalue_single_skew, ApproxConfig};
use crate::resample::{permutation_pvalue, ResamplePlan};
use crate::scan::{single_scan, Argmax, ScanKind, ScanProfile, TimeOrder};
use rayon::prelude::*;

/// Location estimate extracted from a scan profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangePointEstimate {
    pub location: Argmax,
    pub max_z: f64,
}

/// The argmax of Z over candidates; ties already break to the smallest
/// candidate inside the scan.
pub fn estimate_changepoint(profile: &ScanProfile) -> ChangePointEstimate {
    ChangePointEstimate {
        location: profile.argmax,
        max_z: profile.max_z,
    }
}

/// How sub-sequence homogeneity p-values are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubtestMethod {
    /// Skew-corrected analytic tail probability at the observed maximum.
    SkewAnalytic,
    /// Monte Carlo permutation p-value (add-one), seeded per segment.
    Permutation { replicates: usize },
}

/// Configuration shared by region construction and segmentation.
#[derive(Debug, Clone, Copy)]
pub struct SubtestConfig {
    pub graph_spec: GraphSpec,
    pub matching: MatchingMode,
    /// Window trim fraction per side (default 0.05).
    pub trim_fraction: f64,
    /// Sub-sequences shorter than this never reject (default 20).
    pub min_test_len: usize,
    pub method: SubtestMethod,
    pub approx: ApproxConfig,
    pub seed: u64,
}

impl SubtestConfig {
    pub fn new(graph_spec: GraphSpec) -> Self {
        Self {
            graph_spec,
            matching: MatchingMode::Exact,
            trim_fraction: 0.05,
            min_test_len: 20,
            method: SubtestMethod::SkewAnalytic,
            approx: ApproxConfig::default(),
            seed: 0,
        }
    }
}

/// Homogeneity p-value for observations lo..hi (0-based, half-open) of
/// the full distance matrix. Returns 1.0 (never rejects) when the
/// segment is too short to test or its scan is degenerate.
pub fn segment_pvalue(dist: &DistanceMatrix, lo: usize, hi: usize, cfg: &SubtestConfig) -> f64 {
    segment_scan_pvalue(dist, lo, hi, cfg, None)
}

fn segment_scan_pvalue(
    dist: &DistanceMatrix,
    lo: usize,
    hi: usize,
    cfg: &SubtestConfig,
    window_floor: Option<usize>,
) -> f64 {
    match segment_scan(dist, lo, hi, cfg, window_floor) {
        Some((_, p)) => p,
        None => 1.0,
    }
}

/// Scan a segment and return (local profile, p-value of its maximum), or
/// None when untestable.
fn segment_scan(
    dist: &DistanceMatrix,
    lo: usize,
    hi: usize,
    cfg: &SubtestConfig,
    window_floor: Option<usize>,
) -> Option<(ScanProfile, f64)> {
    let len = hi - lo;
    if len < cfg.min_test_len.max(4) {
        return None;
    }
    let trim = ((cfg.trim_fraction * len as f64).ceil() as usize).max(1);
    let wlo = window_floor.map_or(trim, |f| trim.max(f));
    if 2 * wlo >= len {
        return None;
    }
    let whi = len - wlo;
    let sub = dist.restrict(lo, hi);
    let graph = build_graph(&sub, cfg.graph_spec, cfg.matching).ok()?;
    let summary = summarize_graph(&graph);
    let profile = single_scan(&graph, &summary, &TimeOrder::identity(len), wlo, whi).ok()?;
    if profile.max_z <= 0.0 {
        return Some((profile, 1.0));
    }
    let p = match cfg.method {
        SubtestMethod::SkewAnalytic => {
            match pvalue_single_skew(profile.max_z, &summary, wlo, whi, &cfg.approx) {
                Ok(out) => out.p_skew.unwrap_or(out.p_gaussian),
                Err(_) => 1.0,
            }
        }
        SubtestMethod::Permutation { replicates } => {
            // Key the replicate stream by the segment so recursion levels
            // stay independent but reproducible.
            let seed = cfg.seed ^ (lo as u64).wrapping_mul(0x9E3779B97F4A7C15) ^ (hi as u64);
            let plan = ResamplePlan::permutation(replicates, seed);
            match permutation_pvalue(
                &graph,
                &summary,
                profile.max_z,
                &plan,
                ScanKind::Single,
                (wlo, whi),
            ) {
                Ok(null) => null.p_add_one,
                Err(_) => 1.0,
            }
        }
    };
    Some((profile, p))
}

/// Region flavor: the two-sided partition region D or its conservative
/// one-sided modification C.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    D,
    C,
}

/// Per-split record of sub-sequence p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    /// Split size k: the left sub-sequence holds the first k points.
    pub k: usize,
    pub p_left: f64,
    pub p_right: f64,
}

/// A confidence region for the change-point location.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceRegion {
    pub alpha: f64,
    pub kind: RegionKind,
    /// Estimated change-point of the full sequence (split size).
    pub tau_hat: usize,
    /// Member split sizes, ascending.
    pub members: Vec<usize>,
    /// True when the members form a contiguous range.
    pub is_interval: bool,
    pub per_split: Vec<SplitRecord>,
}

/// Build the level-(1 - alpha) confidence region of the requested kind.
pub fn confidence_region(
    dist: &DistanceMatrix,
    alpha: f64,
    kind: RegionKind,
    cfg: &SubtestConfig,
) -> Result<ConfidenceRegion, InferenceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InferenceError::BadAlpha { alpha });
    }
    let n = dist.n();

    // Full-sequence scan for tau-hat.
    let graph = build_graph(dist, cfg.graph_spec, cfg.matching)?;
    let summary = summarize_graph(&graph);
    let trim = ((cfg.trim_fraction * n as f64).ceil() as usize).max(1);
    let profile = single_scan(&graph, &summary, &TimeOrder::identity(n), trim, n - trim)
        .map_err(|_| InferenceError::AllDegenerate)?;
    let Argmax::Single(tau_hat) = profile.argmax else {
        unreachable!("single scan yields single argmax)")
    };

    // Sub-sequence p-values per split, in parallel.
    let per_split: Vec<SplitRecord> = (1..n)
        .into_par_iter()
        .map(|k| SplitRecord {
            k,
            p_left: segment_pvalue(dist, 0, k, cfg),
            p_right: segment_pvalue(dist, k, n, cfg),
        })
        .collect();

    let threshold = 1.0 - (1.0 - alpha).sqrt();
    let mut members: Vec<usize> = Vec::new();
    for rec in &per_split {
        let keep = match kind {
            RegionKind::D => rec.p_left >= threshold && rec.p_right >= threshold,
            RegionKind::C => {
                if rec.k < tau_hat {
                    rec.p_right >= threshold
                } else if rec.k > tau_hat {
                    rec.p_left >= threshold
                } else {
                    true
                }
            }
        };
        if keep {
            members.push(rec.k);
        }
    }
    if kind == RegionKind::C && !members.contains(&tau_hat) {
        members.push(tau_hat);
        members.sort_unstable();
    }
    let is_interval = members
        .windows(2)
        .all(|w| w[1] == w[0] + 1);
    Ok(ConfidenceRegion {
        alpha,
        kind,
        tau_hat,
        members,
        is_interval,
        per_split,
    })
}

/// Recursive binary segmentation; returns the detected change-points as
/// global split sizes (ascending).
pub fn binary_segmentation(
    dist: &DistanceMatrix,
    alpha: f64,
    min_seg: usize,
    cfg: &SubtestConfig,
) -> Result<Vec<usize>, InferenceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(InferenceError::BadAlpha { alpha });
    }
    let min_seg = min_seg.max(2);
    let mut found = Vec::new();
    let mut stack = vec![(0usize, dist.n())];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo < 2 * min_seg {
            continue;
        }
        // The window floor keeps every detected point at least min_seg
        // away from the segment ends, so consecutive detections are
        // min_seg apart.
        let Some((profile, p)) = segment_scan(dist, lo, hi, cfg, Some(min_seg)) else {
            continue;
        };
        if p < alpha {
            let Argmax::Single(local_tau) = profile.argmax else {
                unreachable!()
            };
            let global = lo + local_tau;
            found.push(global);
            stack.push((lo, global));
            stack.push((global, hi));
        }
    }
    found.sort_unstable();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::GraphFamily;
    use crate::rng::Rng;

    fn gaussian_shift_distances(
        n: usize,
        shifts: &[(usize, f64)],
        d: usize,
        seed: u64,
    ) -> DistanceMatrix {
        let mut rng = Rng::new(seed);
        let mut points = Vec::with_capacity(n);
        for i in 0..n {
            let mut offset = 0.0;
            for &(at, delta) in shifts {
                if i >= at {
                    offset += delta / (d as f64).sqrt();
                }
            }
            points.push((0..d).map(|_| rng.normal() + offset).collect::<Vec<f64>>());
        }
        DistanceMatrix::from_fn(n, |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .unwrap()
    }

    fn mst_cfg() -> SubtestConfig {
        SubtestConfig::new(GraphSpec::new(GraphFamily::Mst, 1))
    }

    #[test]
    fn estimate_picks_profile_argmax() {
        let d = gaussian_shift_distances(60, &[(30, 3.0)], 2, 5);
        let g = build_graph(&d, GraphSpec::new(GraphFamily::Mst, 1), MatchingMode::Exact)
            .unwrap();
        let s = summarize_graph(&g);
        let profile = single_scan(&g, &s, &TimeOrder::identity(60), 3, 57).unwrap();
        let est = estimate_changepoint(&profile);
        assert_eq!(est.location, profile.argmax);
        let Argmax::Single(tau) = est.location else {
            panic!()
        };
        assert!((tau as i64 - 30).abs() <= 6, "tau {tau}");
    }

    #[test]
    fn untestable_splits_never_reject() {
        // min_test_len larger than the whole sequence: every split keeps
        // p = 1 so both regions contain every k.
        let d = gaussian_shift_distances(40, &[(20, 2.0)], 2, 9);
        let mut cfg = mst_cfg();
        cfg.min_test_len = 100;
        for kind in [RegionKind::D, RegionKind::C] {
            let region = confidence_region(&d, 0.05, kind, &cfg).unwrap();
            assert_eq!(region.members, (1..40).collect::<Vec<_>>());
            assert!(region.is_interval);
        }
    }

    #[test]
    fn c_contains_d_and_tau_hat() {
        for seed in [1u64, 2, 3] {
            let d = gaussian_shift_distances(120, &[(60, 1.5)], 3, seed);
            let cfg = mst_cfg();
            let rd = confidence_region(&d, 0.1, RegionKind::D, &cfg).unwrap();
            let rc = confidence_region(&d, 0.1, RegionKind::C, &cfg).unwrap();
            assert_eq!(rd.tau_hat, rc.tau_hat);
            assert!(rc.members.contains(&rc.tau_hat));
            for k in &rd.members {
                assert!(rc.members.contains(k), "seed {seed}: D member {k} not in C");
            }
        }
    }

    #[test]
    fn region_shrinks_as_alpha_grows() {
        let d = gaussian_shift_distances(100, &[(50, 1.2)], 3, 17);
        let cfg = mst_cfg();
        let alphas = [0.2, 0.1, 0.05, 0.01];
        let mut prev: Option<Vec<usize>> = None;
        for &alpha in &alphas {
            let region = confidence_region(&d, alpha, RegionKind::C, &cfg).unwrap();
            if let Some(prev) = &prev {
                // Larger alpha earlier in the list: its region must be a
                // subset of the current (smaller alpha) one.
                for k in prev {
                    assert!(
                        region.members.contains(k),
                        "alpha {alpha}: lost member {k}"
                    );
                }
            }
            prev = Some(region.members);
        }
    }

    #[test]
    fn segmentation_recovers_two_strong_shifts() {
        let d = gaussian_shift_distances(300, &[(100, 4.0), (200, -4.0)], 4, 23);
        let mut cfg = mst_cfg();
        cfg.graph_spec = GraphSpec::new(GraphFamily::Mst, 3);
        let points = binary_segmentation(&d, 0.01, 25, &cfg).unwrap();
        assert!(
            points.len() == 2,
            "expected two change-points, got {points:?}"
        );
        assert!((points[0] as i64 - 100).abs() <= 20, "{points:?}");
        assert!((points[1] as i64 - 200).abs() <= 20, "{points:?}");
        for w in points.windows(2) {
            assert!(w[1] - w[0] >= 25);
        }
    }

    #[test]
    fn segmentation_usually_quiet_on_homogeneous_data() {
        let mut empty = 0;
        for seed in 0..10u64 {
            let d = gaussian_shift_distances(150, &[], 3, 100 + seed);
            let points = binary_segmentation(&d, 0.05, 20, &mst_cfg()).unwrap();
            if points.is_empty() {
                empty += 1;
            }
        }
        assert!(empty >= 8, "only {empty}/10 runs were quiet");
    }

    #[test]
    fn bad_alpha_rejected() {
        let d = gaussian_shift_distances(30, &[], 2, 3);
        assert!(matches!(
            confidence_region(&d, 0.0, RegionKind::D, &mst_cfg()),
            Err(InferenceError::BadAlpha { .. })
        ));
        assert!(matches!(
            binary_segmentation(&d, 1.0, 10, &mst_cfg()),
            Err(InferenceError::BadAlpha { .. })
        ));
    }
}
