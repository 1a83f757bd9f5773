//! Structured result reporting: a versioned JSON report plus a plain
//! delimited profile file for plotting.

use crate::build::ConditionDiagnostics;
use crate::graph::GraphSummary;
use crate::scan::{Argmax, ScanKind, ScanProfile};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to re-run the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub format: String,
    pub graph: String,
    pub k: usize,
    pub metric: String,
    pub matching: String,
    pub scan: String,
    pub window: (usize, usize),
    pub alpha: f64,
    pub seed: u64,
    pub permutations: Option<usize>,
    pub block_size: Option<usize>,
}

/// Scalar view of the graph functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFacts {
    pub n_nodes: usize,
    pub n_edges: u64,
    pub sum_deg_sq: u64,
    pub max_degree: u64,
    pub triangles: u64,
}

impl From<&GraphSummary> for GraphFacts {
    fn from(s: &GraphSummary) -> Self {
        Self {
            n_nodes: s.n_nodes,
            n_edges: s.n_edges,
            sum_deg_sq: s.sum_deg_sq,
            max_degree: s.max_degree(),
            triangles: s.shared_neighbor_sum / 3,
        }
    }
}

/// Estimated location in 1-based reporting convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ReportedLocation {
    #[serde(rename = "single")]
    Single { tau: usize },
    #[serde(rename = "interval")]
    Interval { t1: usize, t2: usize },
}

impl From<Argmax> for ReportedLocation {
    fn from(a: Argmax) -> Self {
        match a {
            // Split sizes and interval bounds are already 1-based counts.
            Argmax::Single(t) => ReportedLocation::Single { tau: t },
            Argmax::Interval(t1, t2) => ReportedLocation::Interval { t1, t2 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationReport {
    pub replicates: usize,
    pub exceedances: usize,
    pub raw_fraction: f64,
    pub p_add_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPermutationReport {
    pub block_size: usize,
    pub moment_replicates: usize,
    pub replicates: usize,
    pub exceedances: usize,
    pub raw_fraction: f64,
    pub p_add_one: f64,
    /// Observed max of the block-standardized statistic (differs from
    /// the plain-permutation max_z).
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDiagnostics {
    pub hub: ConditionDiagnostics,
    pub skew_extrapolated: bool,
    pub skew_valid_region: Option<(usize, usize)>,
    pub skew_fell_back: bool,
    /// Candidates excluded from the max for zero variance (1-based).
    pub degenerate_candidates: Vec<ReportedLocation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: usize,
    pub r: u64,
    /// None when the candidate's null variance is zero.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRegionReport {
    pub alpha: f64,
    pub kind: String,
    pub tau_hat: usize,
    pub members: Vec<usize>,
    pub is_interval: bool,
}

/// The full analysis result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub graph: GraphFacts,
    pub max_z: f64,
    pub estimate: ReportedLocation,
    pub p_gaussian: Option<f64>,
    pub p_skew: Option<f64>,
    pub p_permutation: Option<PermutationReport>,
    pub p_block_permutation: Option<BlockPermutationReport>,
    pub confidence_region: Option<ConfidenceRegionReport>,
    pub diagnostics: ReportDiagnostics,
    /// Single-scan Z profile (t, R, Z); omitted for interval scans that
    /// exceed the dense storage budget.
    pub profile: Vec<ProfilePoint>,
}

/// Extract the reportable profile triples from a single scan.
pub fn profile_points(profile: &ScanProfile, lo: usize) -> Vec<ProfilePoint> {
    match profile.kind {
        ScanKind::Single => profile
            .candidates
            .iter()
            .enumerate()
            .map(|(idx, cand)| {
                let Argmax::Single(t) = cand else {
                    unreachable!()
                };
                ProfilePoint {
                    t: *t,
                    r: profile.r[idx],
                    z: profile.z.get(idx).copied().filter(|z| z.is_finite()),
                }
            })
            .collect(),
        ScanKind::Interval => {
            // Per-length max summary keyed by interval length.
            let _ = lo;
            Vec::new()
        }
    }
}

/// Serialize the report as stable, human-readable JSON.
pub fn render_report(report: &TestReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serialization");
    out.push('\n');
    out
}

pub fn write_report(path: &Path, report: &TestReport) -> std::io::Result<()> {
    std::fs::write(path, render_report(report))
}

pub fn read_report(path: &Path) -> std::io::Result<TestReport> {
    let bytes = std::fs::read(path)?;
    serde_json::from_slice(&bytes)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

/// Tab-separated t, R, Z rows with commented critical-value lines, one
/// row per scan candidate.
pub fn write_plot_data(
    path: &Path,
    points: &[ProfilePoint],
    critical_values: &[(f64, f64)],
) -> std::io::Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for &(alpha, b) in critical_values {
        writeln!(file, "# critical_value\talpha={alpha}\tb={b}")?;
    }
    writeln!(file, "# t\tR\tZ")?;
    for p in points {
        match p.z {
            Some(z) => writeln!(file, "{}\t{}\t{}", p.t, p.r, z)?,
            None => writeln!(file, "{}\t{}\tNA", p.t, p.r)?,
        }
    }
    file.flush()
}
