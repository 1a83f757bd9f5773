//! Error types shared across the crate.

use thiserror::Error;

/// Errors from validating raw dissimilarity input.
#[derive(Debug, Error, PartialEq)]
pub enum DistanceError {
    #[error("distance matrix must be square, got {rows} rows with a row of length {cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("distance matrix entry ({i}, {j}) is negative: {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("distance matrix diagonal entry {i} is {value}, expected 0 (tolerance 1e-9)")]
    NonZeroDiagonal { i: usize, value: f64 },
    #[error("distance matrix asymmetry at ({i}, {j}) is {gap}, beyond tolerance 1e-9")]
    AsymmetryTooLarge { i: usize, j: usize, gap: f64 },
    #[error("need at least 2 observations, got {n}")]
    TooFewObservations { n: usize },
    #[error("distance matrix entry ({i}, {j}) is not finite")]
    NonFiniteEntry { i: usize, j: usize },
}

/// Errors from constructing an observation sequence.
#[derive(Debug, Error, PartialEq)]
pub enum SequenceError {
    #[error("need at least 2 observations, got {n}")]
    TooFewObservations { n: usize },
    #[error("observation {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("observation {index} contains a non-finite value")]
    NonFiniteValue { index: usize },
    #[error("network snapshot {index}: {reason}")]
    BadNetwork { index: usize, reason: String },
}

/// Errors from graph construction.
#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("k = {k} is too large: {reason}")]
    KTooLarge { k: usize, reason: String },
    #[error("metric {metric} is incompatible with this payload: {reason}")]
    IncompatibleMetric { metric: String, reason: String },
    #[error("normalized network metric undefined: observation {index} has zero total activity")]
    ZeroActivityDay { index: usize },
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

/// Errors from moment and covariance evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum MomentError {
    #[error("t = {t} outside the valid range [1, {max}] for n = {n}")]
    TOutOfRange { t: usize, n: usize, max: usize },
    #[error("bad interval ({t1}, {t2}] for n = {n}")]
    BadInterval { t1: usize, t2: usize, n: usize },
    #[error("variance is zero; statistic degenerate")]
    DegenerateVariance,
    #[error("variance {value} is negative beyond tolerance; inconsistent summary")]
    NegativeVariance { value: f64 },
    #[error("argument outside domain: {what}")]
    DomainError { what: String },
}

/// Errors from scan-profile computation.
#[derive(Debug, Error, PartialEq)]
pub enum ScanError {
    #[error("bad scan window [{lo}, {hi}] for n = {n}")]
    BadWindow { lo: usize, hi: usize, n: usize },
    #[error("every candidate has zero variance; scan degenerate")]
    AllDegenerate,
}

/// Errors from analytic p-value machinery.
#[derive(Debug, Error, PartialEq)]
pub enum PvalueError {
    #[error("argument outside domain: {what}")]
    DomainError { what: String },
    #[error("no root in bracket: p({lo}) = {p_lo}, p({hi}) = {p_hi}, target {alpha}")]
    NoRoot {
        lo: f64,
        hi: f64,
        p_lo: f64,
        p_hi: f64,
        alpha: f64,
    },
}

/// Errors from resampling.
#[derive(Debug, Error, PartialEq)]
pub enum ResampleError {
    #[error("block-permutation variance is zero at every candidate t")]
    DegenerateAllT,
    #[error("plan/scheme mismatch: {what}")]
    BadPlan { what: String },
}

/// Errors from inference procedures.
#[derive(Debug, Error, PartialEq)]
pub enum InferenceError {
    #[error("alpha must lie strictly between 0 and 1, got {alpha}")]
    BadAlpha { alpha: f64 },
    #[error("scan degenerate: every candidate has zero variance")]
    AllDegenerate,
    #[error("graph construction failed: {0}")]
    Build(#[from] BuildError),
}

/// Errors from file ingestion.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("parse error at line {line}, column {column}: {what}")]
    ParseError {
        line: usize,
        column: usize,
        what: String,
    },
    #[error("dimension mismatch{}: {what}", source_name.as_ref().map(|s| format!(" in {s}")).unwrap_or_default())]
    DimensionMismatch {
        source_name: Option<String>,
        what: String,
    },
    #[error("unknown input format: {what}")]
    UnknownFormat { what: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}
