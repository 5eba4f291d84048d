//! Sparse binary feature vectors built from one-hot blocks.
//!
//! Inner products of encoded sketches count position-wise agreements, so
//! a linear learner over these features sees the estimated kernel.

use crate::error::{Error, Result};

/// A sparse binary vector: `length` columns with ones at the sorted
/// positions in `ones`, exactly one per block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedFeatures {
    length: u64,
    ones: Vec<u64>,
}

impl EncodedFeatures {
    pub fn new(length: u64, ones: Vec<u64>) -> Result<EncodedFeatures> {
        let mut prev: Option<u64> = None;
        for &p in &ones {
            if p >= length {
                return Err(Error::InvalidFeatures(format!(
                    "position {p} out of range for length {length}"
                )));
            }
            if let Some(q) = prev {
                if p <= q {
                    return Err(Error::InvalidFeatures(format!(
                        "positions not strictly ascending at {p}"
                    )));
                }
            }
            prev = Some(p);
        }
        Ok(EncodedFeatures { length, ones })
    }

    /// Construction path for encoders that emit positions in block order.
    pub(crate) fn from_sorted(length: u64, ones: Vec<u64>) -> EncodedFeatures {
        debug_assert!(ones.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(ones.last().is_none_or(|&p| p < length));
        EncodedFeatures { length, ones }
    }

    #[inline]
    pub fn length(&self) -> u64 {
        self.length
    }

    #[inline]
    pub fn ones(&self) -> &[u64] {
        &self.ones
    }

    /// Binary inner product: the number of shared one-positions.
    pub fn dot(&self, other: &EncodedFeatures) -> u64 {
        let (mut i, mut j) = (0, 0);
        let mut count = 0;
        while i < self.ones.len() && j < other.ones.len() {
            match self.ones[i].cmp(&other.ones[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }
}
