//! Scan profiles: raw crossing counts and standardized values over
//! candidate change-points or changed intervals.
//!
//! The single-split profile is computed with a difference array in
//! O(|G| + n); the interval profile sweeps the right endpoint per left
//! endpoint, updating the crossing count incrementally by node degree
//! minus twice the neighbors already inside the interval.

use crate::error::ScanError;
use crate::graph::{GraphSummary, SimilarityGraph};
use crate::moments::{interval_moments, single_moments};

/// Observed times of each node: `times[i]` is the 0-based position at
/// which node i is observed. A bijection onto 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeOrder {
    times: Vec<usize>,
}

impl TimeOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            times: (0..n).collect(),
        }
    }

    /// Validate that `times` is a permutation of 0..n.
    pub fn new(times: Vec<usize>) -> Result<Self, ScanError> {
        let n = times.len();
        let mut seen = vec![false; n];
        for &t in &times {
            if t >= n || seen[t] {
                return Err(ScanError::BadWindow { lo: t, hi: t, n });
            }
            seen[t] = true;
        }
        Ok(Self { times })
    }

    /// Build from a permutation given as "position -> node" (the node
    /// observed first, second, ...), inverting into node -> time.
    pub fn from_sequence(order: &[usize]) -> Self {
        let mut times = vec![0usize; order.len()];
        for (time, &node) in order.iter().enumerate() {
            times[node] = time;
        }
        Self { times }
    }

    pub fn n(&self) -> usize {
        self.times.len()
    }

    #[inline]
    pub fn time_of(&self, node: usize) -> usize {
        self.times[node]
    }
}

/// Scan kind selector shared by resampling and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Single,
    Interval,
}

/// Candidate location of the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Argmax {
    /// Split point t: first group is everything observed at times <= t
    /// (1-based group size).
    Single(usize),
    /// Interval (t1, t2]: group is everything observed at 1-based times
    /// in t1+1..=t2.
    Interval(usize, usize),
}

/// A standardized scan profile over all candidates.
#[derive(Debug, Clone)]
pub struct ScanProfile {
    pub kind: ScanKind,
    /// Candidate identifiers aligned with `r` and `z`. For intervals the
    /// dense per-pair storage may be dropped (see `interval_profile`), in
    /// which case only the max is retained.
    pub candidates: Vec<Argmax>,
    pub r: Vec<u64>,
    pub z: Vec<f64>,
    /// Candidates excluded from the max because their null variance is
    /// zero (1-based t or (t1, t2) labels).
    pub degenerate: Vec<Argmax>,
    pub max_z: f64,
    pub argmax: Argmax,
}

/// Raw crossing counts R(t) for t in [lo, hi] (inclusive), where t is the
/// size of the "past" group. O(|G| + n) via a difference array.
pub fn crossing_profile(
    graph: &SimilarityGraph,
    order: &TimeOrder,
    lo: usize,
    hi: usize,
) -> Result<Vec<u64>, ScanError> {
    let n = graph.n();
    if order.n() != n || lo < 1 || lo > hi || hi > n - 1 {
        return Err(ScanError::BadWindow { lo, hi, n });
    }
    // Edge with sorted observed times (a, b) crosses split t iff
    // a < t <= b in 0-based times, i.e. t in [a+1, b].
    let mut diff = vec![0i64; n + 2];
    for &(i, j) in graph.edges() {
        let (a, b) = {
            let (ti, tj) = (order.time_of(i), order.time_of(j));
            (ti.min(tj), ti.max(tj))
        };
        diff[a + 1] += 1;
        diff[b + 1] -= 1;
    }
    let mut out = Vec::with_capacity(hi - lo + 1);
    let mut running = 0i64;
    for t in 1..=hi {
        running += diff[t];
        if t >= lo {
            out.push(running as u64);
        }
    }
    Ok(out)
}

/// Standardize a single-split R profile into Z values, tracking the max.
pub fn z_profile(
    r: &[u64],
    summary: &GraphSummary,
    lo: usize,
) -> Result<ScanProfile, ScanError> {
    let n = summary.n_nodes;
    let hi = lo + r.len() - 1;
    if lo < 1 || hi > n - 1 {
        return Err(ScanError::BadWindow { lo, hi, n });
    }
    let mut candidates = Vec::with_capacity(r.len());
    let mut z = Vec::with_capacity(r.len());
    let mut degenerate = Vec::new();
    let mut max_z = f64::NEG_INFINITY;
    let mut argmax = None;
    for (offset, &count) in r.iter().enumerate() {
        let t = lo + offset;
        candidates.push(Argmax::Single(t));
        let m = single_moments(summary, t).map_err(|_| ScanError::BadWindow { lo, hi, n })?;
        if m.variance <= 0.0 {
            degenerate.push(Argmax::Single(t));
            z.push(f64::NAN);
            continue;
        }
        let value = -((count as f64 - m.mean) / m.variance.sqrt());
        z.push(value);
        if value > max_z {
            max_z = value;
            argmax = Some(Argmax::Single(t));
        }
    }
    let argmax = argmax.ok_or(ScanError::AllDegenerate)?;
    Ok(ScanProfile {
        kind: ScanKind::Single,
        candidates,
        r: r.to_vec(),
        z,
        degenerate,
        max_z,
        argmax,
    })
}

/// Single-change-point scan over t in [lo, hi].
pub fn single_scan(
    graph: &SimilarityGraph,
    summary: &GraphSummary,
    order: &TimeOrder,
    lo: usize,
    hi: usize,
) -> Result<ScanProfile, ScanError> {
    let r = crossing_profile(graph, order, lo, hi)?;
    z_profile(&r, summary, lo)
}

/// Maximum standardized value only; avoids profile allocation inside
/// resampling loops. Returns None if every candidate is degenerate.
///
/// `means_sds` carries (mean, sd) per t in [lo, hi]; entries with sd = 0
/// are skipped.
pub fn max_z_with(
    graph: &SimilarityGraph,
    order: &TimeOrder,
    lo: usize,
    means_sds: &[(f64, f64)],
) -> Option<f64> {
    let n = graph.n();
    let hi = lo + means_sds.len() - 1;
    debug_assert!(lo >= 1 && hi <= n - 1);
    let mut diff = vec![0i64; n + 1];
    for &(i, j) in graph.edges() {
        let (ti, tj) = (order.time_of(i), order.time_of(j));
        let (a, b) = (ti.min(tj), ti.max(tj));
        diff[a + 1] += 1;
        diff[b + 1] -= 1; // b + 1 <= n always, since b <= n - 1
    }
    let mut running = 0i64;
    let mut best: Option<f64> = None;
    for t in 1..=hi {
        running += diff[t];
        if t >= lo {
            let (mean, sd) = means_sds[t - lo];
            if sd > 0.0 {
                let z = -((running as f64 - mean) / sd);
                best = Some(best.map_or(z, |b: f64| b.max(z)));
            }
        }
    }
    best
}

/// Memory budget for dense interval storage, in candidate pairs.
const INTERVAL_DENSE_BUDGET: usize = 4_000_000;

/// Changed-interval scan over pairs (t1, t2) with l0 <= t2 - t1 <= l1.
///
/// t1 ranges from 0 (a leading interval reduces to the single-split
/// partition) through n-1-l0; t2 = t1 + m with m in [l0, l1]. Stores the
/// dense per-pair profile only when it fits the budget, otherwise keeps
/// just the running max.
pub fn interval_scan(
    graph: &SimilarityGraph,
    summary: &GraphSummary,
    order: &TimeOrder,
    l0: usize,
    l1: usize,
) -> Result<ScanProfile, ScanError> {
    let n = graph.n();
    if order.n() != n || l0 < 1 || l0 > l1 || l1 > n - 1 {
        return Err(ScanError::BadWindow { lo: l0, hi: l1, n });
    }

    // node_at[time] inverts the order; neighbor times per node are
    // precomputed once.
    let mut node_at = vec![0usize; n];
    for node in 0..n {
        node_at[order.time_of(node)] = node;
    }
    let adj = graph.adjacency();
    let neighbor_times: Vec<Vec<usize>> = (0..n)
        .map(|node| adj[node].iter().map(|&nb| order.time_of(nb)).collect())
        .collect();

    // Moments depend on the pair only through m = t2 - t1.
    let mut sd_by_m = vec![0.0f64; l1 + 1];
    let mut mean_by_m = vec![0.0f64; l1 + 1];
    for m in l0..=l1 {
        let mm = interval_moments(summary, 0, m).map_err(|_| ScanError::BadWindow {
            lo: l0,
            hi: l1,
            n,
        })?;
        mean_by_m[m] = mm.mean;
        sd_by_m[m] = mm.variance.sqrt();
    }

    let pair_count: usize = (0..=(n - 1).saturating_sub(l0))
        .map(|t1| (t1 + l0..=(t1 + l1).min(n)).count())
        .sum();
    let dense = pair_count <= INTERVAL_DENSE_BUDGET;

    let mut candidates = Vec::new();
    let mut r_out = Vec::new();
    let mut z_out = Vec::new();
    let mut degenerate_ms: Vec<usize> = (l0..=l1).filter(|&m| sd_by_m[m] == 0.0).collect();
    degenerate_ms.dedup();

    let mut max_z = f64::NEG_INFINITY;
    let mut argmax = None;

    for t1 in 0..=(n - 1).saturating_sub(l0) {
        let mut r = 0i64;
        let hi2 = (t1 + l1).min(n);
        for t2 in (t1 + 1)..=hi2 {
            // Node observed at 1-based time t2 enters the interval.
            let node = node_at[t2 - 1];
            let mut inside_neighbors = 0i64;
            for &nt in &neighbor_times[node] {
                // A neighbor is already inside iff its 1-based time lies
                // in (t1, t2): exactly the times this sweep has added.
                if nt + 1 > t1 && nt + 1 < t2 {
                    inside_neighbors += 1;
                }
            }
            r += neighbor_times[node].len() as i64 - 2 * inside_neighbors;

            let m = t2 - t1;
            if m < l0 {
                continue;
            }
            let sd = sd_by_m[m];
            if sd == 0.0 {
                if dense {
                    candidates.push(Argmax::Interval(t1, t2));
                    r_out.push(r as u64);
                    z_out.push(f64::NAN);
                }
                continue;
            }
            let z = -((r as f64 - mean_by_m[m]) / sd);
            if dense {
                candidates.push(Argmax::Interval(t1, t2));
                r_out.push(r as u64);
                z_out.push(z);
            }
            if z > max_z {
                max_z = z;
                argmax = Some(Argmax::Interval(t1, t2));
            }
        }
    }

    let argmax = argmax.ok_or(ScanError::AllDegenerate)?;
    Ok(ScanProfile {
        kind: ScanKind::Interval,
        candidates,
        r: r_out,
        z: z_out,
        degenerate: degenerate_ms
            .into_iter()
            .map(|m| Argmax::Interval(0, m))
            .collect(),
        max_z,
        argmax,
    })
}
