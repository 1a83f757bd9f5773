//! Data loading and the end-to-end analysis pipelines.

use crate::{CiArgs, FormatArg, InputArgs, ScanArgs, ScanIntervalArgs, SegmentArgs};
use anyhow::{bail, Context, Result};
use gcpd::build::{build_graph, condition_diagnostics, pairwise_distances, Metric};
use gcpd::data::{DistanceMatrix, ObservationSequence, Payload};
use gcpd::graph::{summarize_graph, GraphSummary, SimilarityGraph};
use gcpd::inference::{
    binary_segmentation, confidence_region, SubtestConfig, SubtestMethod,
};
use gcpd::pvalue::{
    critical_value, pvalue_interval_skew, pvalue_single_skew, AnalyticMethod, ApproxConfig,
};
use gcpd::report::{
    profile_points, render_report, write_plot_data, write_report, BlockPermutationReport,
    ConfidenceRegionReport, ConfigEcho, PermutationReport, ReportDiagnostics, TestReport,
    SCHEMA_VERSION,
};
use gcpd::resample::{block_permutation_pvalue, permutation_pvalue, ResamplePlan};
use gcpd::scan::{interval_scan, single_scan, ScanKind, ScanProfile, TimeOrder};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// What the input resolved to.
pub enum Loaded {
    /// A distance matrix (computed or supplied); graphs are built from it.
    Distances(DistanceMatrix),
    /// A ready-made similarity graph; no distances available.
    Graph(SimilarityGraph),
}

fn sniff_format(path: &Path) -> Result<FormatArg> {
    if path.is_dir() {
        return Ok(FormatArg::NetworkDir);
    }
    let bytes = std::fs::read(path)?;
    let head: String = String::from_utf8_lossy(&bytes[..bytes.len().min(64)]).into_owned();
    let first = head.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let mut fields = first.split_whitespace();
    if fields.next() == Some("n") && fields.next().map_or(false, |f| f.parse::<usize>().is_ok())
    {
        Ok(FormatArg::Graph)
    } else {
        Ok(FormatArg::Observations)
    }
}

/// Load the input and reduce it to distances (or a direct graph).
pub fn load(args: &InputArgs) -> Result<(Loaded, String)> {
    let path = &args.input;
    let format = match args.format {
        FormatArg::Auto => sniff_format(path)?,
        other => other,
    };
    let metric = args.metric.metric();
    let loaded = match format {
        FormatArg::Auto => unreachable!(),
        FormatArg::Observations => {
            let seq = gcpd::ingest::parse_observations(&std::fs::read(path)?)
                .with_context(|| format!("parsing observations from {}", path.display()))?;
            let metric = match metric {
                Metric::Precomputed => bail!("precomputed metric needs --format distance"),
                m => m,
            };
            (
                Loaded::Distances(pairwise_distances(&seq, metric)?),
                "observations".to_string(),
            )
        }
        FormatArg::Distance => {
            let d = gcpd::ingest::parse_distance_matrix(&std::fs::read(path)?)
                .with_context(|| format!("parsing distance matrix from {}", path.display()))?;
            (Loaded::Distances(d), "distance".to_string())
        }
        FormatArg::Graph => {
            let g = gcpd::ingest::parse_graph_file(&std::fs::read(path)?)
                .with_context(|| format!("parsing graph from {}", path.display()))?;
            (Loaded::Graph(g), "graph".to_string())
        }
        FormatArg::NetworkDir => {
            let seq = gcpd::ingest::load_network_dir(path)
                .with_context(|| format!("loading network directory {}", path.display()))?;
            let metric = match metric {
                Metric::Euclidean | Metric::L1 => {
                    // Network payloads use the edge-count dissimilarities;
                    // accept the default silently only when it is the
                    // generic default.
                    Metric::NetworkEdgeCount
                }
                m => m,
            };
            (
                Loaded::Distances(pairwise_distances(&seq, metric)?),
                "network-dir".to_string(),
            )
        }
    };
    Ok(loaded)
}

/// Observation sequences enter in time order.
fn graph_for(args: &InputArgs, loaded: &Loaded) -> Result<SimilarityGraph> {
    match loaded {
        Loaded::Graph(g) => Ok(g.clone()),
        Loaded::Distances(d) => {
            Ok(build_graph(d, args.graph_spec(), args.matching.mode())?)
        }
    }
}

fn default_window(n: usize) -> (usize, usize) {
    let lo = ((0.05 * n as f64).ceil() as usize).clamp(1, n / 2);
    (lo, n - lo)
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn degenerate_exit(out: Option<&PathBuf>, reason: &str) -> Result<ExitCode> {
    let body = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "degenerate": true,
        "reason": reason,
    });
    write_out(out, &format!("{}\n", serde_json::to_string_pretty(&body)?))?;
    eprintln!("degenerate statistic: {reason}");
    Ok(ExitCode::from(2))
}

struct ScanOutcome {
    profile: ScanProfile,
    summary: GraphSummary,
    graph: SimilarityGraph,
}

fn scan_common(
    args: &InputArgs,
    loaded: &Loaded,
    kind: ScanKind,
    window: (usize, usize),
) -> Result<std::result::Result<ScanOutcome, String>> {
    let graph = graph_for(args, loaded)?;
    let summary = summarize_graph(&graph);
    let n = graph.n();
    let order = TimeOrder::identity(n);
    let profile = match kind {
        ScanKind::Single => single_scan(&graph, &summary, &order, window.0, window.1),
        ScanKind::Interval => interval_scan(&graph, &summary, &order, window.0, window.1),
    };
    match profile {
        Ok(profile) => Ok(Ok(ScanOutcome {
            profile,
            summary,
            graph,
        })),
        Err(gcpd::error::ScanError::AllDegenerate) => {
            Ok(Err("every scan candidate has zero variance".to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run_scan(args: ScanArgs) -> Result<ExitCode> {
    let started = std::time::Instant::now();
    let (loaded, format_name) = load(&args.input)?;
    let n = match &loaded {
        Loaded::Distances(d) => d.n(),
        Loaded::Graph(g) => g.n(),
    };
    let (dlo, dhi) = default_window(n);
    let window = (args.n0.unwrap_or(dlo), args.n1.unwrap_or_else(|| {
        n - args.n0.unwrap_or(dlo)
    }));
    if window.0 < 1 || window.0 > window.1 || window.1 > n - 1 {
        bail!("scan window [{}, {}] invalid for n = {n}", window.0, window.1);
    }

    let outcome = match scan_common(&args.input, &loaded, ScanKind::Single, window)? {
        Ok(o) => o,
        Err(reason) => return degenerate_exit(args.out.as_ref(), &reason),
    };
    let profile = &outcome.profile;
    let summary = &outcome.summary;
    let cfg = ApproxConfig::default();

    let skew = pvalue_single_skew(profile.max_z.max(1e-9), summary, window.0, window.1, &cfg)?;

    let p_permutation = if args.perms > 0 {
        let plan = ResamplePlan::permutation(args.perms, args.seed);
        let null = permutation_pvalue(
            &outcome.graph,
            summary,
            profile.max_z,
            &plan,
            ScanKind::Single,
            window,
        )?;
        Some(PermutationReport {
            replicates: null.replicates,
            exceedances: null.exceedances,
            raw_fraction: null.raw_fraction,
            p_add_one: null.p_add_one,
        })
    } else {
        None
    };

    let p_block = if args.block_size > 0 {
        let plan = ResamplePlan::block(args.perms.max(1000), args.seed, args.block_size);
        let null = block_permutation_pvalue(
            &outcome.graph,
            &TimeOrder::identity(n),
            &plan,
            ScanKind::Single,
            window,
        )?;
        Some(BlockPermutationReport {
            block_size: args.block_size,
            moment_replicates: plan.moment_replicates,
            replicates: null.replicates,
            exceedances: null.exceedances,
            raw_fraction: null.raw_fraction,
            p_add_one: null.p_add_one,
            observed: null.observed,
        })
    } else {
        None
    };

    let report = TestReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            input: args.input.input.display().to_string(),
            format: format_name,
            graph: args.input.graph.family().name().to_string(),
            k: args.input.k,
            metric: args.input.metric.metric().name().to_string(),
            matching: match args.input.matching.mode() {
                gcpd::build::MatchingMode::Exact => "exact".to_string(),
                gcpd::build::MatchingMode::Greedy => "greedy".to_string(),
            },
            scan: "single".to_string(),
            window,
            alpha: args.alpha,
            seed: args.seed,
            permutations: (args.perms > 0).then_some(args.perms),
            block_size: (args.block_size > 0).then_some(args.block_size),
        },
        graph: summary.into(),
        max_z: profile.max_z,
        estimate: profile.argmax.into(),
        p_gaussian: Some(skew.p_gaussian),
        p_skew: skew.p_skew,
        p_permutation,
        p_block_permutation: p_block,
        confidence_region: None,
        diagnostics: ReportDiagnostics {
            hub: condition_diagnostics(summary),
            skew_extrapolated: skew.extrapolated,
            skew_valid_region: skew.valid_region,
            skew_fell_back: skew.skew_fell_back,
            degenerate_candidates: profile
                .degenerate
                .iter()
                .map(|&a| a.into())
                .collect(),
        },
        profile: profile_points(profile, window.0),
    };

    if let Some(plot) = &args.plot_out {
        let mut criticals = Vec::new();
        for alpha in [0.05, 0.01] {
            if let Ok(b) = critical_value(
                alpha,
                AnalyticMethod::SkewCorrected,
                ScanKind::Single,
                summary,
                window,
                &cfg,
            ) {
                criticals.push((alpha, b));
            }
        }
        write_plot_data(plot, &report.profile, &criticals)?;
    }

    emit_report(args.out.as_ref(), &report)?;
    eprintln!(
        "scan: n = {n}, max Z = {:.4} at {:?} ({} ms)",
        profile.max_z,
        profile.argmax,
        started.elapsed().as_millis()
    );
    Ok(ExitCode::SUCCESS)
}

fn emit_report(out: Option<&PathBuf>, report: &TestReport) -> Result<()> {
    match out {
        Some(path) => write_report(path, report)?,
        None => print!("{}", render_report(report)),
    }
    Ok(())
}

pub fn run_scan_interval(args: ScanIntervalArgs) -> Result<ExitCode> {
    let started = std::time::Instant::now();
    let (loaded, format_name) = load(&args.input)?;
    let n = match &loaded {
        Loaded::Distances(d) => d.n(),
        Loaded::Graph(g) => g.n(),
    };
    let (dlo, _) = default_window(n);
    let l0 = args.l0.unwrap_or(dlo);
    let l1 = args.l1.unwrap_or(n - l0);
    if l0 < 1 || l0 > l1 || l1 > n - 1 {
        bail!("interval window [{l0}, {l1}] invalid for n = {n}");
    }

    let outcome = match scan_common(&args.input, &loaded, ScanKind::Interval, (l0, l1))? {
        Ok(o) => o,
        Err(reason) => return degenerate_exit(args.out.as_ref(), &reason),
    };
    let profile = &outcome.profile;
    let summary = &outcome.summary;
    let cfg = ApproxConfig::default();
    let skew = pvalue_interval_skew(profile.max_z.max(1e-9), summary, l0, l1, &cfg)?;

    let p_permutation = if args.perms > 0 {
        let plan = ResamplePlan::permutation(args.perms, args.seed);
        let null = permutation_pvalue(
            &outcome.graph,
            summary,
            profile.max_z,
            &plan,
            ScanKind::Interval,
            (l0, l1),
        )?;
        Some(PermutationReport {
            replicates: null.replicates,
            exceedances: null.exceedances,
            raw_fraction: null.raw_fraction,
            p_add_one: null.p_add_one,
        })
    } else {
        None
    };

    let p_block = if args.block_size > 0 {
        let plan = ResamplePlan::block(args.perms.max(1000), args.seed, args.block_size);
        let null = block_permutation_pvalue(
            &outcome.graph,
            &TimeOrder::identity(n),
            &plan,
            ScanKind::Interval,
            (l0, l1),
        )?;
        Some(BlockPermutationReport {
            block_size: args.block_size,
            moment_replicates: plan.moment_replicates,
            replicates: null.replicates,
            exceedances: null.exceedances,
            raw_fraction: null.raw_fraction,
            p_add_one: null.p_add_one,
            observed: null.observed,
        })
    } else {
        None
    };

    let report = TestReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            input: args.input.input.display().to_string(),
            format: format_name,
            graph: args.input.graph.family().name().to_string(),
            k: args.input.k,
            metric: args.input.metric.metric().name().to_string(),
            matching: match args.input.matching.mode() {
                gcpd::build::MatchingMode::Exact => "exact".to_string(),
                gcpd::build::MatchingMode::Greedy => "greedy".to_string(),
            },
            scan: "interval".to_string(),
            window: (l0, l1),
            alpha: args.alpha,
            seed: args.seed,
            permutations: (args.perms > 0).then_some(args.perms),
            block_size: (args.block_size > 0).then_some(args.block_size),
        },
        graph: summary.into(),
        max_z: profile.max_z,
        estimate: profile.argmax.into(),
        p_gaussian: Some(skew.p_gaussian),
        p_skew: skew.p_skew,
        p_permutation,
        p_block_permutation: p_block,
        confidence_region: None,
        diagnostics: ReportDiagnostics {
            hub: condition_diagnostics(summary),
            skew_extrapolated: skew.extrapolated,
            skew_valid_region: skew.valid_region,
            skew_fell_back: skew.skew_fell_back,
            degenerate_candidates: profile.degenerate.iter().map(|&a| a.into()).collect(),
        },
        profile: Vec::new(),
    };
    emit_report(args.out.as_ref(), &report)?;
    eprintln!(
        "scan-interval: n = {n}, max Z = {:.4} at {:?} ({} ms)",
        profile.max_z,
        profile.argmax,
        started.elapsed().as_millis()
    );
    Ok(ExitCode::SUCCESS)
}

fn subtest_config(
    input: &InputArgs,
    p_method: &str,
    perms: usize,
    min_test_len: usize,
    seed: u64,
) -> Result<SubtestConfig> {
    let mut cfg = SubtestConfig::new(input.graph_spec());
    cfg.matching = input.matching.mode();
    cfg.min_test_len = min_test_len;
    cfg.seed = seed;
    cfg.method = match p_method {
        "analytic" | "skew-analytic" => SubtestMethod::SkewAnalytic,
        "permutation" => SubtestMethod::Permutation { replicates: perms },
        other => bail!("unknown p-method {other:?}; use analytic or permutation"),
    };
    Ok(cfg)
}

pub fn run_ci(args: CiArgs) -> Result<ExitCode> {
    let (loaded, _) = load(&args.input)?;
    let Loaded::Distances(dist) = loaded else {
        bail!("confidence regions need distances; graph-only input cannot be re-tested");
    };
    let kind = crate::parse_region(&args.region)?;
    let cfg = subtest_config(
        &args.input,
        &args.p_method,
        args.perms,
        args.min_test_len,
        args.seed,
    )?;
    let region = confidence_region(&dist, args.alpha, kind, &cfg)?;
    let report = ConfidenceRegionReport {
        alpha: region.alpha,
        kind: match region.kind {
            gcpd::inference::RegionKind::C => "C".to_string(),
            gcpd::inference::RegionKind::D => "D".to_string(),
        },
        tau_hat: region.tau_hat,
        members: region.members.clone(),
        is_interval: region.is_interval,
    };
    let body = serde_json::to_string_pretty(&report)?;
    write_out(args.out.as_ref(), &format!("{body}\n"))?;
    eprintln!(
        "ci: tau_hat = {}, {} members, interval = {}",
        region.tau_hat,
        region.members.len(),
        region.is_interval
    );
    Ok(ExitCode::SUCCESS)
}

pub fn run_segment(args: SegmentArgs) -> Result<ExitCode> {
    let (loaded, _) = load(&args.input)?;
    let Loaded::Distances(dist) = loaded else {
        bail!("segmentation needs distances; graph-only input cannot be re-tested");
    };
    let cfg = subtest_config(&args.input, &args.p_method, args.perms, 4, args.seed)?;
    let points = binary_segmentation(&dist, args.alpha, args.min_seg, &cfg)?;
    let body = serde_json::json!({
        "alpha": args.alpha,
        "min_seg": args.min_seg,
        "change_points": points,
    });
    write_out(
        args.out.as_ref(),
        &format!("{}\n", serde_json::to_string_pretty(&body)?),
    )?;
    eprintln!("segment: {} change-point(s) found", points.len());
    Ok(ExitCode::SUCCESS)
}
