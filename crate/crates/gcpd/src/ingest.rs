//! Parsers for the supported input formats.
//!
//! All parsers consume raw bytes, never panic on malformed input, and
//! report 1-based line/column positions. Formats:
//!
//! * observations: delimited numeric matrix, one row per time point,
//!   optional single header line, `#` comments;
//! * distance matrix: n x n numeric matrix, validated for symmetry;
//! * graph: first line `n <N>`, then one `i j` edge per line (1-based);
//! * adjacency snapshot: square 0/1 matrix (one network time point).

use crate::data::{AdjacencySnapshot, DistanceMatrix, ObservationSequence};
use crate::error::IngestError;
use crate::graph::SimilarityGraph;
use std::path::Path;

fn parse_err(line: usize, column: usize, what: impl Into<String>) -> IngestError {
    IngestError::ParseError {
        line,
        column,
        what: what.into(),
    }
}

/// Split into trimmed content lines, dropping blank lines and `#`
/// comments; yields (1-based line number, content).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let without_comment = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = without_comment.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((idx + 1, trimmed))
        }
    })
}

fn split_fields(line: &str) -> Vec<(usize, &str)> {
    // Comma-separated when a comma is present, otherwise whitespace.
    let mut fields = Vec::new();
    if line.contains(',') {
        let mut offset = 0;
        for piece in line.split(',') {
            let trimmed = piece.trim();
            if !trimmed.is_empty() {
                let col = offset + piece.len() - piece.trim_start().len();
                fields.push((col + 1, trimmed));
            }
            offset += piece.len() + 1;
        }
    } else {
        let mut rest = line;
        let mut offset = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let end = tail
                .find(|c: char| c.is_whitespace())
                .unwrap_or(tail.len());
            fields.push((offset + start + 1, &tail[..end]));
            offset += start + end;
            rest = &tail[end..];
        }
    }
    fields
}

fn decode(bytes: &[u8]) -> Result<&str, IngestError> {
    std::str::from_utf8(bytes).map_err(|e| {
        parse_err(
            1,
            e.valid_up_to() + 1,
            "input is not valid UTF-8",
        )
    })
}

/// Parse a numeric matrix; a single leading non-numeric line is treated
/// as a header and skipped.
pub fn parse_numeric_matrix(bytes: &[u8]) -> Result<Vec<Vec<f64>>, IngestError> {
    let text = decode(bytes)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    let mut first_content = true;
    for (line_no, line) in content_lines(text) {
        let fields = split_fields(line);
        let mut row = Vec::with_capacity(fields.len());
        let mut failed: Option<(usize, &str)> = None;
        for &(col, field) in &fields {
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    failed = Some((col, field));
                    break;
                }
            }
        }
        if let Some((col, field)) = failed {
            if first_content {
                // Header line; skip it.
                first_content = false;
                continue;
            }
            return Err(parse_err(
                line_no,
                col,
                format!("expected a finite number, found {field:?}"),
            ));
        }
        first_content = false;
        if row.is_empty() {
            continue;
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(IngestError::DimensionMismatch {
                    source_name: None,
                    what: format!(
                        "line {line_no} has {} fields, expected {w}",
                        row.len()
                    ),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, 1, "no numeric rows found"));
    }
    Ok(rows)
}

/// Observations file: rows are time points, columns dimensions.
pub fn parse_observations(bytes: &[u8]) -> Result<ObservationSequence, IngestError> {
    let rows = parse_numeric_matrix(bytes)?;
    ObservationSequence::from_vectors(rows).map_err(IngestError::from)
}

/// Distance file: an n x n dissimilarity matrix.
pub fn parse_distance_matrix(bytes: &[u8]) -> Result<DistanceMatrix, IngestError> {
    let rows = parse_numeric_matrix(bytes)?;
    DistanceMatrix::from_rows(&rows).map_err(IngestError::from)
}

/// Graph file: `n <N>` header then 1-based `i j` edge lines.
pub fn parse_graph_file(bytes: &[u8]) -> Result<SimilarityGraph, IngestError> {
    let text = decode(bytes)?;
    let mut lines = content_lines(text);
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, 1, "empty graph file"))?;
    let fields = split_fields(header);
    if fields.len() != 2 || fields[0].1 != "n" {
        return Err(parse_err(
            header_no,
            fields.first().map_or(1, |f| f.0),
            "graph header must be `n <count>`",
        ));
    }
    let n: usize = fields[1]
        .1
        .parse()
        .map_err(|_| parse_err(header_no, fields[1].0, "bad node count"))?;
    if n < 2 {
        return Err(parse_err(header_no, fields[1].0, "need at least 2 nodes"));
    }
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let fields = split_fields(line);
        if fields.len() != 2 {
            return Err(parse_err(
                line_no,
                1,
                format!("expected `i j`, found {} fields", fields.len()),
            ));
        }
        let mut pair = [0usize; 2];
        for (slot, &(col, field)) in pair.iter_mut().zip(&fields) {
            let v: usize = field
                .parse()
                .map_err(|_| parse_err(line_no, col, "bad node index"))?;
            if v < 1 || v > n {
                return Err(parse_err(
                    line_no,
                    col,
                    format!("node index {v} outside 1..={n}"),
                ));
            }
            *slot = v - 1;
        }
        if pair[0] == pair[1] {
            return Err(parse_err(line_no, 1, "self-loop"));
        }
        edges.push((pair[0], pair[1]));
    }
    SimilarityGraph::new(n, edges).map_err(|e| IngestError::DimensionMismatch {
        source_name: None,
        what: e.to_string(),
    })
}

/// One adjacency snapshot (0/1 square matrix); `index` is the snapshot's
/// position for error reporting.
pub fn parse_adjacency_matrix(
    bytes: &[u8],
    index: usize,
) -> Result<AdjacencySnapshot, IngestError> {
    let rows = parse_numeric_matrix(bytes)?;
    if rows.len() != rows[0].len() {
        return Err(IngestError::DimensionMismatch {
            source_name: None,
            what: format!("adjacency matrix is {}x{}", rows.len(), rows[0].len()),
        });
    }
    AdjacencySnapshot::from_rows(index, &rows).map_err(IngestError::from)
}

/// Load a directory of adjacency snapshots in lexicographic filename
/// order; dimension errors name the offending file.
pub fn load_network_dir(dir: &Path) -> Result<ObservationSequence, IngestError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(IngestError::UnknownFormat {
            what: format!("no files in network directory {}", dir.display()),
        });
    }
    let mut snapshots = Vec::with_capacity(paths.len());
    let mut m: Option<usize> = None;
    for (index, path) in paths.iter().enumerate() {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let bytes = std::fs::read(path)?;
        let snap = parse_adjacency_matrix(&bytes, index).map_err(|e| match e {
            IngestError::DimensionMismatch { what, .. } => IngestError::DimensionMismatch {
                source_name: Some(name.clone()),
                what,
            },
            IngestError::Sequence(inner) => IngestError::DimensionMismatch {
                source_name: Some(name.clone()),
                what: inner.to_string(),
            },
            other => other,
        })?;
        match m {
            None => m = Some(snap.m()),
            Some(m) if m != snap.m() => {
                return Err(IngestError::DimensionMismatch {
                    source_name: Some(name),
                    what: format!("has {} nodes, expected {m}", snap.m()),
                })
            }
            _ => {}
        }
        snapshots.push(snap);
    }
    ObservationSequence::from_networks(snapshots).map_err(IngestError::from)
}
