//! Observation sequences and validated distance matrices.
//!
//! A [`DistanceMatrix`] is the sole bridge from raw data to similarity
//! graphs: every graph builder consumes pairwise dissimilarities, never
//! the original observations.

use crate::error::{DistanceError, SequenceError};

/// Symmetry / diagonal tolerance for validating raw distance input.
pub const DISTANCE_TOLERANCE: f64 = 1e-9;

/// A validated symmetric dissimilarity matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    // Row-major n*n storage; kept fully materialized so sub-sequences can
    // be restricted cheaply during confidence-region construction.
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Validate a raw square matrix.
    ///
    /// Entries must be finite and non-negative, the diagonal zero, and the
    /// matrix symmetric up to [`DISTANCE_TOLERANCE`]; small asymmetries are
    /// repaired by averaging the two triangles.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DistanceError> {
        let n = rows.len();
        if n < 2 {
            return Err(DistanceError::TooFewObservations { n });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(DistanceError::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DistanceError::NonFiniteEntry { i, j });
                }
                if v < 0.0 {
                    return Err(DistanceError::NegativeEntry { i, j, value: v });
                }
            }
        }
        for i in 0..n {
            if rows[i][i].abs() > DISTANCE_TOLERANCE {
                return Err(DistanceError::NonZeroDiagonal {
                    i,
                    value: rows[i][i],
                });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (rows[i][j] - rows[j][i]).abs();
                if gap > DISTANCE_TOLERANCE {
                    return Err(DistanceError::AsymmetryTooLarge { i, j, gap });
                }
            }
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (rows[i][j] + rows[j][i]);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self { n, entries })
    }

    /// Build from a symmetric closure over index pairs; `dist(i, j)` is
    /// called once per unordered pair with i < j and must be finite and
    /// non-negative (checked).
    pub fn from_fn(
        n: usize,
        mut dist: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, DistanceError> {
        if n < 2 {
            return Err(DistanceError::TooFewObservations { n });
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = dist(i, j);
                if !v.is_finite() {
                    return Err(DistanceError::NonFiniteEntry { i, j });
                }
                if v < 0.0 {
                    return Err(DistanceError::NegativeEntry { i, j, value: v });
                }
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Restrict to a contiguous index range `lo..hi` (0-based, half-open).
    /// Used when re-testing sub-sequences.
    pub fn restrict(&self, lo: usize, hi: usize) -> Self {
        assert!(lo < hi && hi <= self.n && hi - lo >= 2);
        let m = hi - lo;
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                entries[i * m + j] = self.get(lo + i, lo + j);
            }
        }
        Self { n: m, entries }
    }
}

/// A symmetric 0/1 adjacency snapshot (one time point of a network
/// sequence); zero diagonal enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencySnapshot {
    m: usize,
    bits: Vec<u8>,
}

impl AdjacencySnapshot {
    pub fn from_rows(index: usize, rows: &[Vec<f64>]) -> Result<Self, SequenceError> {
        let m = rows.len();
        let bad = |reason: String| SequenceError::BadNetwork { index, reason };
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(bad(format!("row {} has length {}, expected {m}", i + 1, row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 && v != 1.0 {
                    return Err(bad(format!("entry ({}, {}) is {v}, expected 0 or 1", i + 1, j + 1)));
                }
                if i == j && v != 0.0 {
                    return Err(bad(format!("diagonal entry {} is nonzero", i + 1)));
                }
            }
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if rows[i][j] != rows[j][i] {
                    return Err(bad(format!("asymmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let bits = rows
            .iter()
            .flat_map(|r| r.iter().map(|&v| v as u8))
            .collect();
        Ok(Self { m, bits })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Flattened m*m 0/1 vector (the "vectorized adjacency" view used by
    /// network dissimilarities).
    pub fn flat(&self) -> &[u8] {
        &self.bits
    }

    /// Total entry count, i.e. twice the edge count.
    pub fn activity(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }
}

/// Payload variants an observation sequence can carry.
#[derive(Debug, Clone)]
pub enum Payload {
    /// Dense numeric vectors, one per time point, common dimension d >= 1.
    Vectors(Vec<Vec<f64>>),
    /// A precomputed dissimilarity matrix.
    Distances(DistanceMatrix),
    /// One adjacency snapshot per time point, common node count.
    Networks(Vec<AdjacencySnapshot>),
}

/// A time-ordered sequence of n observations.
#[derive(Debug, Clone)]
pub struct ObservationSequence {
    n: usize,
    payload: Payload,
}

impl ObservationSequence {
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self, SequenceError> {
        let n = vectors.len();
        if n < 2 {
            return Err(SequenceError::TooFewObservations { n });
        }
        let d = vectors[0].len();
        if d == 0 {
            return Err(SequenceError::DimensionMismatch {
                index: 0,
                got: 0,
                expected: 1,
            });
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(SequenceError::DimensionMismatch {
                    index,
                    got: v.len(),
                    expected: d,
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(SequenceError::NonFiniteValue { index });
            }
        }
        Ok(Self {
            n,
            payload: Payload::Vectors(vectors),
        })
    }

    pub fn from_distances(dist: DistanceMatrix) -> Self {
        Self {
            n: dist.n(),
            payload: Payload::Distances(dist),
        }
    }

    pub fn from_networks(nets: Vec<AdjacencySnapshot>) -> Result<Self, SequenceError> {
        let n = nets.len();
        if n < 2 {
            return Err(SequenceError::TooFewObservations { n });
        }
        let m = nets[0].m();
        for (index, net) in nets.iter().enumerate() {
            if net.m() != m {
                return Err(SequenceError::BadNetwork {
                    index,
                    reason: format!("has {} nodes, expected {m}", net.m()),
                });
            }
        }
        Ok(Self {
            n,
            payload: Payload::Networks(nets),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    /// Dimension of dense vector payloads, if applicable.
    pub fn dim(&self) -> Option<usize> {
        match &self.payload {
            Payload::Vectors(v) => Some(v[0].len()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_valid_matrix_accepted() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn asymmetry_rejected() {
        let err = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, DistanceError::AsymmetryTooLarge { .. }));
    }

    #[test]
    fn negative_entry_rejected() {
        let err = DistanceMatrix::from_rows(&[vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, DistanceError::NegativeEntry { .. }));
    }

    #[test]
    fn tiny_asymmetry_symmetrized() {
        let eps = 5e-10;
        let d = DistanceMatrix::from_rows(&[vec![0.0, 1.0 + eps], vec![1.0, 0.0]]).unwrap();
        assert_eq!(d.get(0, 1), d.get(1, 0));
        assert!((d.get(0, 1) - (1.0 + eps / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn non_square_rejected() {
        let err = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, DistanceError::NonSquare { .. }));
    }

    #[test]
    fn restrict_keeps_block() {
        let d = DistanceMatrix::from_fn(4, |i, j| (i + j) as f64).unwrap();
        let r = d.restrict(1, 4);
        assert_eq!(r.n(), 3);
        assert_eq!(r.get(0, 1), d.get(1, 2));
        assert_eq!(r.get(0, 2), d.get(1, 3));
    }

    #[test]
    fn ragged_vectors_rejected() {
        let err =
            ObservationSequence::from_vectors(vec![vec![0.0, 1.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, SequenceError::DimensionMismatch { .. }));
    }

    #[test]
    fn network_snapshot_validation() {
        let ok = AdjacencySnapshot::from_rows(0, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(ok.activity(), 2);
        let asym = AdjacencySnapshot::from_rows(0, &[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(asym.is_err());
        let diag = AdjacencySnapshot::from_rows(0, &[vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert!(diag.is_err());
    }
}
