//! Sign alpha-stable random projections.
//!
//! Projects a vector through k columns of i.i.d. `S(alpha, 1)` entries
//! generated on the fly from keyed streams, and keeps only the signs of
//! the projected values. The stream for matrix entry (j, i) is keyed by
//! (seed, j, i), so every vector sketched under one configuration sees
//! the same projection matrix: the collision laws depend on that.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::EncodedFeatures;
use crate::keyed_rand::{domain, word, RandKey};
use crate::sparse::SparseVector;
use crate::stable::{sample_stable, Alpha};

/// Parameters of one sketch family. Two sketches are comparable only if
/// their configurations are identical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchConfig {
    alpha: Alpha,
    k: usize,
    seed: u64,
    dim: usize,
}

impl SketchConfig {
    pub fn new(alpha: Alpha, k: usize, seed: u64, dim: usize) -> Result<SketchConfig> {
        if k == 0 {
            return Err(Error::InvalidK);
        }
        Ok(SketchConfig {
            alpha,
            k,
            seed,
            dim,
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 64-bit digest of (alpha, k, seed, dim).
    pub fn fingerprint(&self) -> u64 {
        word(
            RandKey::new(self.seed)
                .with(domain::FINGERPRINT_SIGN)
                .with(self.alpha.value().to_bits())
                .with(self.k as u64)
                .with(self.dim as u64),
        )
    }
}

/// k sign bits, packed 64 per word, plus the fingerprint of the
/// generating configuration. Unused high bits of the last word are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSketch {
    words: Vec<u64>,
    k: usize,
    fingerprint: u64,
}

impl SignSketch {
    #[inline]
    pub fn len(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    #[inline]
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Bit j: true iff the j-th projected value was strictly positive.
    #[inline]
    pub fn bit(&self, j: usize) -> bool {
        assert!(j < self.k, "bit index {j} out of range for k = {}", self.k);
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    /// Packed words, low bit first. The positive path for agreement
    /// counting; the encoded form exists for export.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn agreements_with(&self, other: &SignSketch) -> usize {
        let hamming: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        self.k - hamming as usize
    }
}

/// Sign sketch of `v`: bit j is the sign of sum_i v_i s_ij with
/// s_ij ~ S(alpha, 1) drawn from the stream (seed, j, i).
///
/// Cost is O(k nnz). Within each projection the nonzero coordinates are
/// accumulated in ascending index order; across projections the work
/// splits freely, so the result is identical for any worker count.
pub fn project_sign(v: &SparseVector, cfg: &SketchConfig) -> Result<SignSketch> {
    if v.dim() != cfg.dim {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim,
            vector: v.dim(),
        });
    }
    if v.is_empty() {
        // every projection of the zero vector is 0, which would encode
        // as the same degenerate sketch for all such inputs
        return Err(Error::EmptyVector);
    }
    let base = RandKey::new(cfg.seed).with(domain::SIGN);
    let alpha = cfg.alpha;
    let k = cfg.k;
    let entries = v.entries();
    let words: Vec<u64> = (0..k.div_ceil(64))
        .into_par_iter()
        .map(|wi| {
            let mut bits = 0u64;
            let hi = (64 * (wi + 1)).min(k);
            for j in 64 * wi..hi {
                let column = base.with(j as u64);
                let mut x = 0.0;
                for &(i, value) in entries {
                    x += value * sample_stable(alpha, column.with(i as u64));
                }
                if x > 0.0 {
                    bits |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect();
    Ok(SignSketch {
        words,
        k,
        fingerprint: cfg.fingerprint(),
    })
}

/// Expand each sign bit into a two-column one-hot block: position 2j for
/// a set bit, 2j + 1 otherwise. Length 2k, exactly k ones.
pub fn encode_sign(sketch: &SignSketch) -> EncodedFeatures {
    let k = sketch.len();
    let ones = (0..k)
        .map(|j| 2 * j as u64 + if sketch.bit(j) { 0 } else { 1 })
        .collect();
    EncodedFeatures::from_sorted(2 * k as u64, ones)
}
