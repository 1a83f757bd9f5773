//! Analytic tail probabilities for the scan maxima.
//!
//! The family-wise error of max Z over a window is approximated by the
//! boundary-crossing form: a sum over candidate split sizes of the local
//! decay rate h weighted by the overshoot correction nu, with prefactor
//! phi(b)/b and per-candidate scaling b0^2 = b^2/n. Both probabilities
//! are evaluated as the pre-limit discrete sums over integer candidates
//! rather than by quadrature, which is also how the reference critical
//! values were produced. The skewness-corrected variants multiply each
//! term by the exponential-tilt factor S built from theta_b.

use crate::error::{MomentError, PvalueError};
use crate::graph::GraphSummary;
use crate::moments::skewness;
use crate::scan::ScanKind;
use statrs::function::erf;

/// Standard normal density.
#[inline]
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Evaluation mode for the overshoot correction nu.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuMode {
    /// Truncated series; slow but definitional.
    Series,
    /// Closed-form rational approximation; default.
    ClosedForm,
}

/// Configuration for the analytic approximations.
#[derive(Debug, Clone, Copy)]
pub struct ApproxConfig {
    pub nu_mode: NuMode,
    pub series_terms: usize,
    /// Boundary-tangent extrapolation of the skew-corrected integrand
    /// where the tilt is undefined.
    pub extrapolation: bool,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self {
            nu_mode: NuMode::ClosedForm,
            series_terms: 10_000,
            extrapolation: true,
        }
    }
}

/// Overshoot correction nu(x).
pub fn nu(x: f64, cfg: &ApproxConfig) -> Result<f64, PvalueError> {
    if x <= 0.0 {
        return Err(PvalueError::DomainError {
            what: format!("nu requires x > 0, got {x}"),
        });
    }
    Ok(match cfg.nu_mode {
        NuMode::ClosedForm => nu_closed_form(x),
        NuMode::Series => nu_series(x, cfg.series_terms),
    })
}

fn nu_closed_form(x: f64) -> f64 {
    let half = 0.5 * x;
    (2.0 / x) * (std_normal_cdf(half) - 0.5) / (half * std_normal_cdf(half) + phi(half))
}

fn nu_series(x: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    for m in 1..=terms {
        let mf = m as f64;
        let term = std_normal_cdf(-0.5 * x * mf.sqrt()) / mf;
        sum += term;
        if term < 1e-18 && m > 16 {
            break;
        }
    }
    2.0 * x.powi(-2) * (-2.0 * sum).exp()
}

/// Limiting local decay rate h*(x) with r0 = |G|/n, r1 = sum deg^2 / |G|.
pub fn h_limit(x: f64, r0: f64, r1: f64) -> Result<f64, PvalueError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(PvalueError::DomainError {
            what: format!("h* requires 0 < x < 1, got {x}"),
        });
    }
    let excess = r1 - 4.0 * r0;
    if excess < -1e-9 * (r1.abs() + 4.0 * r0.abs()).max(1.0) {
        return Err(PvalueError::DomainError {
            what: format!("r1 - 4 r0 must be non-negative, got {excess}"),
        });
    }
    let excess = excess.max(0.0);
    let x1 = x * (1.0 - x);
    Ok(1.0 / (2.0 * x1) + 2.0 / (4.0 * x1 + (1.0 - 2.0 * x).powi(2) * excess))
}

/// Finite-n local decay rate h_G(n, x): the in-window slope of the
/// correlation of Z at adjacent split sizes, scaled to match h* as
/// n grows.
pub fn h_finite(n: usize, x: f64, n_edges: f64, sum_deg_sq: f64) -> Result<f64, PvalueError> {
    let nf = n as f64;
    if !(x >= 1.0 / nf && x <= 1.0 - 1.0 / nf) {
        return Err(PvalueError::DomainError {
            what: format!("h_G requires 1/n <= x <= 1 - 1/n, got {x}"),
        });
    }
    let g = n_edges;
    let s = sum_deg_sq;
    let c = (1.0 - 2.0 * x) * (1.0 - 2.0 * x);
    let h1 = 4.0 * nf * (nf - 1.0) * (-2.0 * nf * x * x + 2.0 * nf * x - 1.0);
    let h2 = nf * (nf * (nf + 1.0) * c - 2.0 * (nf - 1.0));
    let h3 = 4.0 * nf * (nf * c - 1.0);
    let h4 = 4.0 * nf * (nf - 1.0) * (nf * x - 1.0) * (nf - nf * x - 1.0);
    let h5 = nf * (nf - 1.0) * (nf * nf * c - nf + 2.0);
    let h6 = 4.0 * nf * (nf * nf * c - 2.0 * nf * (1.0 - 3.0 * x + 3.0 * x * x) + 1.0);
    let num = (nf - 1.0) * (h1 * g + h2 * s - h3 * g * g);
    let den = 2.0 * x * (1.0 - x) * (h4 * g + h5 * s - h6 * g * g);
    if den == 0.0 {
        return Err(PvalueError::DomainError {
            what: "degenerate variance in h_G".to_string(),
        });
    }
    Ok(num / den)
}

fn check_window(n: usize, lo: usize, hi: usize) -> Result<(), PvalueError> {
    if lo < 1 || lo > hi || hi > n - 1 {
        return Err(PvalueError::DomainError {
            what: format!("bad window [{lo}, {hi}] for n = {n}"),
        });
    }
    Ok(())
}

/// Per-candidate Gaussian term: b0^2 h nu(sqrt(2 b0^2 h)). Candidates
/// with zero null variance contribute nothing (they are excluded from
/// the scan max as well).
fn gaussian_term(
    b0_sq: f64,
    summary: &GraphSummary,
    t: usize,
    cfg: &ApproxConfig,
) -> Result<f64, PvalueError> {
    let n = summary.n_nodes;
    let degenerate = crate::moments::single_moments(summary, t)
        .map(|m| m.variance <= 0.0)
        .unwrap_or(true);
    if degenerate {
        return Ok(0.0);
    }
    let h = match h_finite(n, t as f64 / n as f64, summary.n_edges as f64, summary.sum_deg_sq as f64) {
        Ok(h) => h,
        Err(PvalueError::DomainError { .. }) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    if !h.is_finite() || h <= 0.0 {
        return Ok(0.0);
    }
    let arg = (2.0 * b0_sq * h).sqrt();
    Ok(b0_sq * h * nu(arg, cfg)?)
}

/// Tail probability of max Z over t in [n0, n1] under Gaussianity.
pub fn pvalue_single_gaussian(
    b: f64,
    summary: &GraphSummary,
    n0: usize,
    n1: usize,
    cfg: &ApproxConfig,
) -> Result<f64, PvalueError> {
    let n = summary.n_nodes;
    check_window(n, n0, n1)?;
    if b <= 0.0 {
        return Err(PvalueError::DomainError {
            what: format!("threshold b must be positive, got {b}"),
        });
    }
    let b0_sq = b * b / n as f64;
    let mut sum = 0.0;
    for t in n0..=n1 {
        sum += gaussian_term(b0_sq, summary, t, cfg)?;
    }
    Ok((phi(b) / b * sum).clamp(0.0, 1.0))
}

/// Tail probability of max Z over intervals with l0 <= t2 - t1 <= l1
/// under Gaussianity: one term per interval length m, with n - m pairs
/// per length.
pub fn pvalue_interval_gaussian(
    b: f64,
    summary: &GraphSummary,
    l0: usize,
    l1: usize,
    cfg: &ApproxConfig,
) -> Result<f64, PvalueError> {
    let n = summary.n_nodes;
    check_window(n, l0, l1)?;
    if b <= 0.0 {
        return Err(PvalueError::DomainError {
            what: format!("threshold b must be positive, got {b}"),
        });
    }
    let b0_sq = b * b / n as f64;
    let mut sum = 0.0;
    for m in l0..=l1 {
        let term = gaussian_term(b0_sq, summary, m, cfg)?;
        sum += (n - m) as f64 * term * term;
    }
    Ok((phi(b) / b * sum).clamp(0.0, 1.0))
}

/// Exponential-tilt factor for the skewness correction at threshold b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SkewFactor {
    /// theta_b and the marginal correction factor S.
    Valid { theta: f64, s: f64 },
    /// 1 + 2 gamma b is not positive; the tilt is undefined here and the
    /// integrand must be extrapolated.
    Invalid,
}

/// Compute (theta_b, S) from the threshold and the skewness gamma.
pub fn skew_factor(b: f64, gamma: f64) -> SkewFactor {
    if gamma.abs() < 1e-8 {
        return SkewFactor::Valid { theta: b, s: 1.0 };
    }
    let radicand = 1.0 + 2.0 * gamma * b;
    if radicand <= 0.0 {
        return SkewFactor::Invalid;
    }
    let theta = (-1.0 + radicand.sqrt()) / gamma;
    // 1 + gamma * theta = sqrt(1 + 2 gamma b) > 0 identically.
    let s = (0.5 * (b - theta).powi(2) + gamma * theta.powi(3) / 6.0).exp()
        / (1.0 + gamma * theta).sqrt();
    SkewFactor::Valid { theta, s }
}

/// Analytic p-value with its diagnostic fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PValueBreakdown {
    pub p_gaussian: f64,
    /// Skew-corrected probability; None when the caller asked only for
    /// the Gaussian value.
    pub p_skew: Option<f64>,
    /// Contiguous candidate range (inclusive, in t or in interval length
    /// m) where the tilt is defined.
    pub valid_region: Option<(usize, usize)>,
    /// True when boundary-tangent extrapolation was applied.
    pub extrapolated: bool,
    /// True when no candidate had a defined tilt and the skew-corrected
    /// value fell back to the Gaussian one.
    pub skew_fell_back: bool,
}

/// Pick the contiguous run of valid candidates used as the extrapolation
/// anchor: the longest run, ties broken toward the window center.
fn central_valid_run(valid: &[bool]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let center = valid.len() as f64 / 2.0;
    let mut i = 0;
    while i < valid.len() {
        if valid[i] {
            let start = i;
            while i < valid.len() && valid[i] {
                i += 1;
            }
            let run = (start, i - 1);
            best = Some(match best {
                None => run,
                Some(prev) => {
                    let len = |r: (usize, usize)| r.1 - r.0 + 1;
                    let dist = |r: (usize, usize)| ((r.0 + r.1) as f64 / 2.0 - center).abs();
                    if len(run) > len(prev) || (len(run) == len(prev) && dist(run) < dist(prev)) {
                        run
                    } else {
                        prev
                    }
                }
            });
        } else {
            i += 1;
        }
    }
    best
}

/// Extend `values` outside the valid run by the tangent through the two
/// outermost valid points on each side, clipped at zero.
fn extrapolate_tails(values: &mut [f64], run: (usize, usize)) {
    let (a, b) = run;
    if a > 0 {
        let slope = if b > a { values[a] - values[a + 1] } else { 0.0 };
        for t in (0..a).rev() {
            values[t] = (values[a] + slope * (a - t) as f64).max(0.0);
        }
    }
    if b + 1 < values.len() {
        let slope = if b > a { values[b] - values[b - 1] } else { 0.0 };
        for t in (b + 1)..values.len() {
            values[t] = (values[b] + slope * (t - b) as f64).max(0.0);
        }
    }
}

fn skew_weighted_terms(
    b: f64,
    summary: &GraphSummary,
    lo: usize,
    hi: usize,
    cfg: &ApproxConfig,
    square: bool,
) -> Result<(Vec<f64>, Option<(usize, usize)>, bool, bool), PvalueError> {
    let n = summary.n_nodes;
    let b0_sq = b * b / n as f64;
    let count = hi - lo + 1;
    let mut values = vec![0.0; count];
    let mut valid = vec![false; count];
    for (idx, t) in (lo..=hi).enumerate() {
        let base = gaussian_term(b0_sq, summary, t, cfg)?;
        let base = if square { base * base } else { base };
        match skewness(summary, t) {
            Ok(gamma) => match skew_factor(b, gamma) {
                SkewFactor::Valid { s: factor, .. } => {
                    values[idx] = factor * base;
                    valid[idx] = true;
                }
                SkewFactor::Invalid => {}
            },
            Err(MomentError::DegenerateVariance) => {
                // Zero-variance candidates contribute nothing; keep them
                // out of both the sum and the extrapolation anchors.
                values[idx] = 0.0;
                valid[idx] = true;
            }
            Err(e) => {
                return Err(PvalueError::DomainError {
                    what: format!("skewness failed at t = {t}: {e}"),
                })
            }
        }
    }

    match central_valid_run(&valid) {
        None => Ok((values, None, false, true)),
        Some(run) => {
            let needs_extrapolation = run.0 > 0 || run.1 + 1 < count;
            if needs_extrapolation {
                if cfg.extrapolation {
                    extrapolate_tails(&mut values, run);
                } else {
                    for (idx, ok) in valid.iter().enumerate() {
                        if !ok {
                            values[idx] = 0.0;
                        }
                    }
                }
            }
            Ok((
                values,
                Some((lo + run.0, lo + run.1)),
                needs_extrapolation && cfg.extrapolation,
                false,
            ))
        }
    }
}

/// Skewness-corrected tail probability for the single change-point scan.
pub fn pvalue_single_skew(
    b: f64,
    summary: &GraphSummary,
    n0: usize,
    n1: usize,
    cfg: &ApproxConfig,
) -> Result<PValueBreakdown, PvalueError> {
    let n = summary.n_nodes;
    check_window(n, n0, n1)?;
    if b <= 0.0 {
        return Err(PvalueError::DomainError {
            what: format!("threshold b must be positive, got {b}"),
        });
    }
    let p_gaussian = pvalue_single_gaussian(b, summary, n0, n1, cfg)?;
    let (values, valid_region, extrapolated, fell_back) =
        skew_weighted_terms(b, summary, n0, n1, cfg, false)?;
    let p_skew = if fell_back {
        p_gaussian
    } else {
        (phi(b) / b * values.iter().sum::<f64>()).clamp(0.0, 1.0)
    };
    Ok(PValueBreakdown {
        p_gaussian,
        p_skew: Some(p_skew),
        valid_region,
        extrapolated,
        skew_fell_back: fell_back,
    })
}

/// Skewness-corrected tail probability for the changed-interval scan.
pub fn pvalue_interval_skew(
    b: f64,
    summary: &GraphSummary,
    l0: usize,
    l1: usize,
    cfg: &ApproxConfig,
) -> Result<PValueBreakdown, PvalueError> {
    let n = summary.n_nodes;
    check_window(n, l0, l1)?;
    if b <= 0.0 {
        return Err(PvalueError::DomainError {
            what: format!("threshold b must be positive, got {b}"),
        });
    }
    let p_gaussian = pvalue_interval_gaussian(b, summary, l0, l1, cfg)?;
    let (values, valid_region, extrapolated, fell_back) =
        skew_weighted_terms(b, summary, l0, l1, cfg, true)?;
    let p_skew = if fell_back {
        p_gaussian
    } else {
        let sum: f64 = values
            .iter()
            .enumerate()
            .map(|(idx, v)| (n - (l0 + idx)) as f64 * v)
            .sum();
        (phi(b) / b * sum).clamp(0.0, 1.0)
    };
    Ok(PValueBreakdown {
        p_gaussian,
        p_skew: Some(p_skew),
        valid_region,
        extrapolated,
        skew_fell_back: fell_back,
    })
}

/// P-value method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticMethod {
    Gaussian,
    SkewCorrected,
}

fn analytic_pvalue(
    b: f64,
    method: AnalyticMethod,
    kind: ScanKind,
    summary: &GraphSummary,
    window: (usize, usize),
    cfg: &ApproxConfig,
) -> Result<f64, PvalueError> {
    let (lo, hi) = window;
    match (method, kind) {
        (AnalyticMethod::Gaussian, ScanKind::Single) => {
            pvalue_single_gaussian(b, summary, lo, hi, cfg)
        }
        (AnalyticMethod::Gaussian, ScanKind::Interval) => {
            pvalue_interval_gaussian(b, summary, lo, hi, cfg)
        }
        (AnalyticMethod::SkewCorrected, ScanKind::Single) => {
            Ok(pvalue_single_skew(b, summary, lo, hi, cfg)?.p_skew.unwrap())
        }
        (AnalyticMethod::SkewCorrected, ScanKind::Interval) => Ok(pvalue_interval_skew(
            b, summary, lo, hi, cfg,
        )?
        .p_skew
        .unwrap()),
    }
}

/// Invert the analytic p-value map: the threshold b whose tail
/// probability equals alpha, by bisection on [0.5, 12].
pub fn critical_value(
    alpha: f64,
    method: AnalyticMethod,
    kind: ScanKind,
    summary: &GraphSummary,
    window: (usize, usize),
    cfg: &ApproxConfig,
) -> Result<f64, PvalueError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(PvalueError::DomainError {
            what: format!("alpha must lie in (0, 1), got {alpha}"),
        });
    }
    let (mut lo, mut hi) = (0.5f64, 12.0f64);
    let p_lo = analytic_pvalue(lo, method, kind, summary, window, cfg)?;
    let p_hi = analytic_pvalue(hi, method, kind, summary, window, cfg)?;
    if p_lo < alpha || p_hi > alpha {
        return Err(PvalueError::NoRoot {
            lo,
            hi,
            p_lo,
            p_hi,
            alpha,
        });
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let p = analytic_pvalue(mid, method, kind, summary, window, cfg)?;
        if (p - alpha).abs() <= 1e-6 && hi - lo <= 1e-4 {
            return Ok(mid);
        }
        if p > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::summarize_graph;
    use crate::testutil;

    fn mdp_summary(n: usize) -> GraphSummary {
        summarize_graph(&testutil::matching(n))
    }

    #[test]
    fn nu_limits_and_known_value() {
        let cfg = ApproxConfig::default();
        assert!((nu(1e-6, &cfg).unwrap() - 1.0).abs() < 1e-3);
        // Independent evaluation of the closed form at x = 1.
        let x: f64 = 1.0;
        let by_hand = (2.0 / x) * (std_normal_cdf(0.5) - 0.5)
            / (0.5 * std_normal_cdf(0.5) + phi(0.5));
        let got = nu(1.0, &cfg).unwrap();
        assert!((got - by_hand).abs() < 1e-15);
        assert!((got - 0.5488).abs() < 5e-4, "nu(1) = {got}");
        assert!(nu(0.0, &cfg).is_err());
    }

    #[test]
    fn nu_series_agrees_with_closed_form() {
        // The rational approximation sits about 1.5-2% below the exact
        // series around x in [0.4, 1.3]; the measured worst absolute gap
        // on this grid is 0.0123 at x = 0.75.
        let closed = ApproxConfig::default();
        let series = ApproxConfig {
            nu_mode: NuMode::Series,
            ..Default::default()
        };
        let mut x = 0.2;
        while x <= 3.0 + 1e-9 {
            let a = nu(x, &closed).unwrap();
            let b = nu(x, &series).unwrap();
            assert!((a - b).abs() < 0.0125, "x = {x}: closed {a}, series {b}");
            assert!(b >= a, "series should dominate the approximation");
            x += 0.05;
        }
        // Small-x benchmark: nu(x) ~ exp(-rho x), rho ~ 0.5826.
        let b = nu(0.4, &series).unwrap();
        assert!((b - (-0.5826 * 0.4f64).exp()).abs() < 5e-4, "series {b}");
    }

    #[test]
    fn h_limit_bracket_and_special_cases() {
        // x = 0.5 kills the graph-dependent term: 2 + 2 = 4.
        assert!((h_limit(0.5, 0.5, 3.0).unwrap() - 4.0).abs() < 1e-12);
        // r1 = 4 r0: upper bound 1/(x(1-x)).
        let h = h_limit(0.3, 0.5, 2.0).unwrap();
        assert!((h - 1.0 / (0.3 * 0.7)).abs() < 1e-12);
        // Huge excess: lower bound 1/(2x(1-x)).
        let h = h_limit(0.3, 0.5, 1e12).unwrap();
        assert!((h - 1.0 / (2.0 * 0.3 * 0.7)).abs() < 1e-6);
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let h = h_limit(x, 1.0, 9.0).unwrap();
            let lo = 1.0 / (2.0 * x * (1.0 - x));
            let hi = 1.0 / (x * (1.0 - x));
            assert!(h >= lo - 1e-12 && h <= hi + 1e-12);
        }
    }

    #[test]
    fn h_finite_converges_to_h_limit() {
        // The finite-n correction is c(x)/n with c depending on x and the
        // graph; measured constants: matching peaks at 4.6 for
        // x in [0.1, 0.9] (9.5 at x = 0.05), star peaks at 1.8 away from
        // its degenerate center (its variance is exactly zero at
        // x = 1/2, where no finite h exists).
        let n = 1_000_000usize;
        let g = n as f64 / 2.0;
        let s = n as f64;
        for x in [0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9] {
            let hf = h_finite(n, x, g, s).unwrap();
            let hl = h_limit(x, g / n as f64, s / g).unwrap();
            let gap = (hf - hl).abs() / hl;
            assert!(gap <= 5.0 / n as f64, "x = {x}: gap {gap:.3e}");
        }
        let g = (n - 1) as f64;
        let s = ((n - 1) * (n - 1) + (n - 1)) as f64;
        for x in [0.05, 0.1, 0.2, 0.8, 0.9, 0.95] {
            let hf = h_finite(n, x, g, s).unwrap();
            let hl = h_limit(x, g / n as f64, s / g).unwrap();
            let gap = (hf - hl).abs() / hl;
            assert!(gap <= 5.0 / n as f64, "star x = {x}: gap {gap:.3e}");
        }
    }

    #[test]
    fn h_finite_reflection_at_half() {
        let s = mdp_summary(1000);
        let h1 = h_finite(1000, 0.5, s.n_edges as f64, s.sum_deg_sq as f64).unwrap();
        let h2 = h_finite(1000, 0.5, s.n_edges as f64, s.sum_deg_sq as f64).unwrap();
        assert_eq!(h1, h2);
        // And symmetry x <-> 1 - x away from the center.
        let a = h_finite(1000, 0.2, s.n_edges as f64, s.sum_deg_sq as f64).unwrap();
        let b = h_finite(1000, 0.8, s.n_edges as f64, s.sum_deg_sq as f64).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn large_b_vanishes() {
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        let p = pvalue_single_gaussian(20.0, &s, 100, 900, &cfg).unwrap();
        assert!(p < 1e-60, "p = {p}");
    }

    #[test]
    fn interval_p_monotone_in_b() {
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        let mut prev = f64::INFINITY;
        let mut b = 2.0;
        while b <= 6.0 {
            let p = pvalue_interval_gaussian(b, &s, 100, 900, &cfg).unwrap();
            assert!(p <= prev + 1e-12, "p not nonincreasing at b = {b}");
            prev = p;
            b += 0.25;
        }
    }

    #[test]
    fn skew_factor_cases() {
        assert_eq!(
            skew_factor(3.0, 0.0),
            SkewFactor::Valid { theta: 3.0, s: 1.0 }
        );
        // Right skew: theta < b and S > 1.
        match skew_factor(3.0, 0.2) {
            SkewFactor::Valid { theta, s } => {
                assert!(theta < 3.0);
                assert!(s > 1.0);
            }
            SkewFactor::Invalid => panic!("should be valid"),
        }
        // Radicand negative.
        let gamma = -1.0 / 6.0 - 1e-3;
        assert_eq!(skew_factor(3.0, gamma), SkewFactor::Invalid);
    }

    #[test]
    fn zero_skew_reduces_to_gaussian() {
        // A matching's gamma is tiny but nonzero; instead verify on the
        // formula level: S = 1 forced by gamma = 0 makes the sums equal.
        let s = mdp_summary(200);
        let cfg = ApproxConfig::default();
        let b = 2.5;
        let pg = pvalue_single_gaussian(b, &s, 20, 180, &cfg).unwrap();
        // gamma = 0 means every term weighted by exactly 1.
        let forced: f64 = {
            let b0_sq = b * b / 200.0;
            let mut sum = 0.0;
            for t in 20..=180 {
                let h = h_finite(200, t as f64 / 200.0, s.n_edges as f64, s.sum_deg_sq as f64)
                    .unwrap();
                sum += b0_sq * h * nu((2.0 * b0_sq * h).sqrt(), &cfg).unwrap();
            }
            (phi(b) / b * sum).clamp(0.0, 1.0)
        };
        assert!((pg - forced).abs() < 1e-15);
    }

    #[test]
    fn table_single_scan_critical_values() {
        // Deterministic matching structure on n = 1000: |G| = 500,
        // sum of squared degrees = 1000.
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        let cases: &[(usize, f64, AnalyticMethod, f64)] = &[
            (200, 0.05, AnalyticMethod::Gaussian, 2.82),
            (200, 0.05, AnalyticMethod::SkewCorrected, 2.84),
            (200, 0.01, AnalyticMethod::Gaussian, 3.38),
            (200, 0.01, AnalyticMethod::SkewCorrected, 3.43),
            (100, 0.05, AnalyticMethod::Gaussian, 2.98),
            (100, 0.05, AnalyticMethod::SkewCorrected, 3.07),
            (100, 0.01, AnalyticMethod::Gaussian, 3.52),
            (100, 0.01, AnalyticMethod::SkewCorrected, 3.66),
            (50, 0.05, AnalyticMethod::Gaussian, 3.08),
            (50, 0.05, AnalyticMethod::SkewCorrected, 3.27),
            (50, 0.01, AnalyticMethod::Gaussian, 3.60),
            (50, 0.01, AnalyticMethod::SkewCorrected, 3.90),
            (25, 0.05, AnalyticMethod::Gaussian, 3.14),
            (25, 0.05, AnalyticMethod::SkewCorrected, 3.48),
            (25, 0.01, AnalyticMethod::Gaussian, 3.65),
            (25, 0.01, AnalyticMethod::SkewCorrected, 4.21),
        ];
        for &(n0, alpha, method, expected) in cases {
            let b = critical_value(
                alpha,
                method,
                ScanKind::Single,
                &s,
                (n0, 1000 - n0),
                &cfg,
            )
            .unwrap();
            let tol = if (n0, alpha) == (25, 0.01) { 0.02 } else { 0.01 };
            assert!(
                (b - expected).abs() <= tol + 5e-3,
                "n0 = {n0}, alpha = {alpha}, {method:?}: got {b:.4}, expected {expected}"
            );
        }
    }

    #[test]
    fn table_interval_scan_critical_values() {
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        let cases: &[(usize, f64, AnalyticMethod, f64, f64)] = &[
            (100, 0.05, AnalyticMethod::Gaussian, 4.08, 0.01),
            (100, 0.05, AnalyticMethod::SkewCorrected, 4.38, 0.02),
            (100, 0.01, AnalyticMethod::Gaussian, 4.51, 0.01),
            (100, 0.01, AnalyticMethod::SkewCorrected, 4.90, 0.02),
            (50, 0.05, AnalyticMethod::SkewCorrected, 4.97, 0.03),
        ];
        for &(l0, alpha, method, expected, tol) in cases {
            let b = critical_value(
                alpha,
                method,
                ScanKind::Interval,
                &s,
                (l0, 1000 - l0),
                &cfg,
            )
            .unwrap();
            assert!(
                (b - expected).abs() <= tol + 5e-3,
                "l0 = {l0}, alpha = {alpha}, {method:?}: got {b:.4}, expected {expected}"
            );
        }
    }

    #[test]
    fn critical_value_round_trips() {
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        let b = critical_value(
            0.05,
            AnalyticMethod::Gaussian,
            ScanKind::Single,
            &s,
            (100, 900),
            &cfg,
        )
        .unwrap();
        let p = pvalue_single_gaussian(b, &s, 100, 900, &cfg).unwrap();
        assert!((p - 0.05).abs() <= 1e-6, "round trip p = {p}");
    }

    #[test]
    fn extrapolation_on_left_skewed_graph() {
        // A star graph is strongly left-skewed away from the center, so
        // 1 + 2 gamma b goes negative near the edges.
        let s = summarize_graph(&testutil::star(1000));
        let cfg = ApproxConfig::default();
        let out = pvalue_single_skew(3.0, &s, 50, 950, &cfg).unwrap();
        assert!(out.extrapolated, "star should need extrapolation: {out:?}");
        let (lo, hi) = out.valid_region.unwrap();
        assert!(lo > 50 && hi < 950);
        let p = out.p_skew.unwrap();
        assert!((0.0..=1.0).contains(&p));
        // Without extrapolation the tail terms drop and p shrinks.
        let no_ext = ApproxConfig {
            extrapolation: false,
            ..Default::default()
        };
        let out2 = pvalue_single_skew(3.0, &s, 50, 950, &no_ext).unwrap();
        assert!(out2.p_skew.unwrap() <= p + 1e-15);
    }

    #[test]
    fn no_root_detected() {
        let s = mdp_summary(1000);
        let cfg = ApproxConfig::default();
        // p(0.5) for a tiny window is far below 0.9999... no; use an
        // alpha larger than p(0.5).
        let p_half = pvalue_single_gaussian(0.5, &s, 490, 510, &cfg).unwrap();
        if p_half < 0.999 {
            let err = critical_value(
                (p_half + 1.0) / 2.0 + (1.0 - p_half) / 4.0,
                AnalyticMethod::Gaussian,
                ScanKind::Single,
                &s,
                (490, 510),
                &cfg,
            );
            assert!(matches!(err, Err(PvalueError::NoRoot { .. })));
        }
    }
}
