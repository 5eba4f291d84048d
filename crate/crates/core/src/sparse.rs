//! Sparse vectors over a fixed dimension.

use crate::error::{Error, Result};

/// Index/value pairs over dimension `dim`, strictly ascending by index,
/// with no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Entries must be strictly ascending by index, inside `dim`, and
    /// finite. Exact zeros are dropped, so vectors stored with explicit
    /// zero entries are indistinguishable from vectors that never had
    /// them.
    pub fn new(dim: usize, entries: Vec<(u32, f64)>) -> Result<SparseVector> {
        let mut prev: Option<u32> = None;
        for &(index, value) in &entries {
            if (index as usize) >= dim {
                return Err(Error::InvalidVector(format!(
                    "index {index} out of range for dimension {dim}"
                )));
            }
            if let Some(p) = prev {
                if index <= p {
                    return Err(Error::InvalidVector(format!(
                        "indices not strictly ascending at {index}"
                    )));
                }
            }
            if !value.is_finite() {
                return Err(Error::InvalidVector(format!(
                    "non-finite value at index {index}"
                )));
            }
            prev = Some(index);
        }
        let entries = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        Ok(SparseVector { dim, entries })
    }

    pub fn from_dense(values: &[f64]) -> Result<SparseVector> {
        if values.len() > u32::MAX as usize + 1 {
            return Err(Error::InvalidVector(format!(
                "dense vector of length {} exceeds the index range",
                values.len()
            )));
        }
        let entries = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u32, v))
            .collect();
        SparseVector::new(values.len(), entries)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Plain sequential sum of the stored values, in index order.
    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    /// First entry with a negative value, if any.
    pub fn first_negative(&self) -> Option<(u32, f64)> {
        self.entries.iter().copied().find(|&(_, v)| v < 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<SparseVector> {
        let entries = self.entries.iter().map(|&(i, v)| (i, factor * v)).collect();
        SparseVector::new(self.dim, entries)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }
}
