//! Power simulation under synthetic shift models: sequences with a mean
//! (and optionally variance) shift at a known location, scanned with a
//! list of graph specs, tallying rejections and localization hits.

use anyhow::{bail, Result};
use clap::Args;
use gcpd::build::{build_graph, GraphFamily, GraphSpec, MatchingMode};
use gcpd::data::DistanceMatrix;
use gcpd::graph::summarize_graph;
use gcpd::pvalue::{pvalue_single_skew, ApproxConfig};
use gcpd::rng::Rng;
use gcpd::scan::{single_scan, Argmax, TimeOrder};
use rayon::prelude::*;
use serde::Serialize;
use std::process::ExitCode;

#[derive(Args)]
pub struct SimulateArgs {
    /// Shift model: normal-mean, normal-mean-var, or lognormal.
    #[arg(long, default_value = "normal-mean")]
    pub model: String,
    /// Observation dimension.
    #[arg(short, long, default_value_t = 10)]
    pub d: usize,
    /// Euclidean norm of the mean shift.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Sequence length.
    #[arg(short, long, default_value_t = 200)]
    pub n: usize,
    /// True change-point (first segment length).
    #[arg(long, default_value_t = 100)]
    pub tau: usize,
    /// Number of simulated sequences.
    #[arg(short, long, default_value_t = 100)]
    pub runs: usize,
    /// Comma-separated graph specs, e.g. `1-mst,3-mst,1-mdp`.
    #[arg(long, default_value = "1-mst,3-mst")]
    pub graphs: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Localization tolerance |tau_hat - tau|.
    #[arg(long, default_value_t = 20)]
    pub within: usize,
    /// Smallest split size; defaults to the d-dependent convention
    /// (d + 10 for d <= 20, else 50).
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optional JSON output path.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Model {
    NormalMean,
    NormalMeanVar,
    LogNormal,
}

fn parse_model(raw: &str) -> Result<Model> {
    Ok(match raw {
        "normal-mean" => Model::NormalMean,
        "normal-mean-var" => Model::NormalMeanVar,
        "lognormal" => Model::LogNormal,
        other => bail!("unknown model {other:?}"),
    })
}

fn parse_graphs(raw: &str) -> Result<Vec<GraphSpec>> {
    let mut specs = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (k_str, family_str) = piece
            .split_once('-')
            .ok_or_else(|| anyhow::anyhow!("graph spec {piece:?}; expected like 3-mst"))?;
        let k: usize = k_str.parse()?;
        let family = match family_str {
            "mst" => GraphFamily::Mst,
            "mdp" => GraphFamily::Mdp,
            "nng" => GraphFamily::Nng,
            other => bail!("unknown graph family {other:?}"),
        };
        specs.push(GraphSpec::new(family, k));
    }
    if specs.is_empty() {
        bail!("no graph specs given");
    }
    Ok(specs)
}

/// One simulated sequence as a distance matrix (Euclidean).
fn simulate_distances(
    model: Model,
    n: usize,
    tau: usize,
    d: usize,
    delta: f64,
    seed: u64,
    run: u64,
) -> DistanceMatrix {
    let mut rng = Rng::for_replicate(seed, 0xS1M % 1, run);
    let shift = delta / (d as f64).sqrt();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let shifted = i >= tau;
        let mut v = Vec::with_capacity(d);
        for coord in 0..d {
            let mut x = rng.normal();
            if shifted {
                if model == Model::NormalMeanVar && coord == 0 {
                    x *= (d as f64).powf(1.0 / 6.0); // sd = d^(1/3) variance
                }
                x += shift;
            }
            if model == Model::LogNormal {
                x = x.exp();
            }
            v.push(x);
        }
        points.push(v);
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

#[derive(Debug, Serialize)]
pub struct PowerRow {
    pub graph: String,
    pub rejections: usize,
    pub localized: usize,
    pub runs: usize,
}

#[derive(Debug, Serialize)]
pub struct PowerTable {
    pub model: String,
    pub d: usize,
    pub delta: f64,
    pub n: usize,
    pub tau: usize,
    pub alpha: f64,
    pub within: usize,
    pub window: (usize, usize),
    pub seed: u64,
    pub rows: Vec<PowerRow>,
}

pub fn power_table(args: &SimulateArgs) -> Result<PowerTable> {
    let model = parse_model(&args.model)?;
    let specs = parse_graphs(&args.graphs)?;
    if args.tau == 0 || args.tau >= args.n {
        bail!("tau must satisfy 0 < tau < n");
    }
    let n0 = args.n0.unwrap_or(if args.d <= 20 {
        (args.d + 10).min(args.n / 4)
    } else {
        50
    });
    let window = (n0, args.n - n0);
    let cfg = ApproxConfig::default();

    // Per-run work: one dataset, one scan per graph spec. Parallel over
    // runs; counters are summed exactly so the schedule cannot matter.
    let tallies: Vec<(usize, usize)> = (0..args.runs as u64)
        .into_par_iter()
        .map(|run| {
            let dist = simulate_distances(
                model, args.n, args.tau, args.d, args.delta, args.seed, run,
            );
            let mut local = Vec::with_capacity(specs.len());
            for &spec in &specs {
                let result = (|| {
                    let graph = build_graph(&dist, spec, MatchingMode::Exact).ok()?;
                    let summary = summarize_graph(&graph);
                    let profile = single_scan(
                        &graph,
                        &summary,
                        &TimeOrder::identity(args.n),
                        window.0,
                        window.1,
                    )
                    .ok()?;
                    if profile.max_z <= 0.0 {
                        return Some((0usize, 0usize));
                    }
                    let p = pvalue_single_skew(profile.max_z, &summary, window.0, window.1, &cfg)
                        .ok()?
                        .p_skew
                        .unwrap_or(1.0);
                    let rejected = p < args.alpha;
                    let Argmax::Single(tau_hat) = profile.argmax else {
                        return Some((0, 0));
                    };
                    let localized = rejected
                        && (tau_hat as i64 - args.tau as i64).unsigned_abs() as usize
                            <= args.within;
                    Some((rejected as usize, localized as usize))
                })();
                local.push(result.unwrap_or((0, 0)));
            }
            local
        })
        .reduce(
            || vec![(0usize, 0usize); specs.len()],
            |mut acc, local| {
                for (a, l) in acc.iter_mut().zip(local) {
                    a.0 += l.0;
                    a.1 += l.1;
                }
                acc
            },
        );

    Ok(PowerTable {
        model: args.model.clone(),
        d: args.d,
        delta: args.delta,
        n: args.n,
        tau: args.tau,
        alpha: args.alpha,
        within: args.within,
        window,
        seed: args.seed,
        rows: specs
            .iter()
            .zip(tallies)
            .map(|(spec, (rej, loc))| PowerRow {
                graph: format!("{}-{}", spec.k, spec.family.name()),
                rejections: rej,
                localized: loc,
                runs: args.runs,
            })
            .collect(),
    })
}

pub fn run(args: SimulateArgs) -> Result<ExitCode> {
    let table = power_table(&args)?;
    println!(
        "model={} d={} delta={} n={} tau={} alpha={} window=[{}, {}]",
        table.model,
        table.d,
        table.delta,
        table.n,
        table.tau,
        table.alpha,
        table.window.0,
        table.window.1
    );
    println!("graph\trejections\tlocalized\truns");
    for row in &table.rows {
        println!(
            "{}\t{}\t{}\t{}",
            row.graph, row.rejections, row.localized, row.runs
        );
    }
    if let Some(path) = &args.out {
        std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&table)?))?;
    }
    Ok(ExitCode::SUCCESS)
}
