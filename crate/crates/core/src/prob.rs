//! Probability vectors and batches over the K subgroups.

use crate::error::{Error, Result};

/// How far a row's sum may stray from 1 and still count as on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A point on the probability simplex: nonnegative entries summing to 1
/// within [`SIMPLEX_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, SIMPLEX_TOL)
    }

    /// Validates against a caller-chosen simplex tolerance (the CLI accepts
    /// looser CSV input than the library produces).
    pub fn with_tolerance(values: Vec<f64>, tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty probability vector".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "probability entry {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {sum}, not 1 within {tol}"
            )));
        }
        Ok(Self { values })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the largest entry; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax_first(&self.values)
    }

    /// Largest entry.
    pub fn max_value(&self) -> f64 {
        self.values[self.argmax()]
    }
}

/// First-index argmax over a slice.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A batch of N probability vectors sharing one K.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbBatch {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl ProbBatch {
    /// Builds a batch from rows, validating each row against the simplex.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows_with_tolerance(rows, SIMPLEX_TOL)
    }

    pub fn from_rows_with_tolerance(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty probability batch".into()));
        }
        let k = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            ProbVector::with_tolerance(row.clone(), tol)
                .map_err(|e| Error::InvalidArgument(format!("row {i}: {e}")))?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            n: rows.len(),
            k,
            data,
        })
    }

    pub fn from_vectors(rows: Vec<ProbVector>) -> Result<Self> {
        let as_rows: Vec<Vec<f64>> = rows.into_iter().map(|p| p.values).collect();
        Self::from_rows(&as_rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k)
    }
}
