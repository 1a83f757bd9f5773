//! Graph-based nonparametric change-point detection.
//!
//! Detects distributional change-points in sequences of arbitrary
//! observations through similarity graphs: a graph on the observations is
//! built from pairwise dissimilarities (k-MST, minimum distance pairing,
//! k-NNG, or supplied directly), and the count of edges crossing each
//! candidate split is standardized and scanned. Tail probabilities of the
//! scan maxima come from exact permutation-null moments combined with
//! analytic boundary-crossing approximations (optionally skewness
//! corrected), from Monte Carlo permutation, or from block permutation
//! for locally dependent sequences.

pub mod data;
pub mod build;
pub mod error;
pub mod graph;
pub mod inference;
pub mod ingest;
pub mod moments;
pub mod matching;
pub mod pvalue;
pub mod report;
pub mod resample;
pub mod rng;
pub mod scan;

pub mod testutil;

pub use data::{AdjacencySnapshot, DistanceMatrix, ObservationSequence, Payload};
pub use graph::{summarize_graph, GraphSummary, SimilarityGraph};
