//! 0-bit consistent weighted sampling for nonnegative vectors.
//!
//! Each of the k samples selects one coordinate i* of the input; the
//! probability that two vectors select the same coordinate in a shared
//! sample equals their min-max kernel. Full CWS also emits an unbounded
//! companion value t*, which the 0-bit variant discards.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::EncodedFeatures;
use crate::keyed_rand::{domain, gamma2, mix64, uniform, word, RandKey};
use crate::sparse::SparseVector;

/// Default bucket count for feature expansion.
pub const DEFAULT_BUCKETS: usize = 256;

const R_SLOT: u64 = 0;
const C_SLOT: u64 = 1;
const BETA_SLOT: u64 = 2;

/// k selected coordinate indices plus the digest of (seed, k, dim).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwsSketch {
    ids: Vec<u32>,
    fingerprint: u64,
}

impl CwsSketch {
    #[inline]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    #[inline]
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub(crate) fn agreements_with(&self, other: &CwsSketch) -> usize {
        self.ids
            .iter()
            .zip(&other.ids)
            .filter(|(a, b)| a == b)
            .count()
    }
}

fn cws_fingerprint(seed: u64, k: usize, dim: usize) -> u64 {
    word(
        RandKey::new(seed)
            .with(domain::FINGERPRINT_CWS)
            .with(k as u64)
            .with(dim as u64),
    )
}

fn check_input(v: &SparseVector) -> Result<()> {
    if let Some((index, value)) = v.first_negative() {
        return Err(Error::NegativeEntry { index, value });
    }
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(())
}

/// One CWS draw for sample j. For every nonzero coordinate i with weight
/// S_i, the streams (seed, j, i) provide r_i, c_i ~ Gamma(2,1) and
/// beta_i ~ U(0,1); then
///
///   t_i = floor(ln S_i / r_i + beta_i)
///   y_i = exp(r_i (t_i - beta_i))
///   a_i = c_i / (y_i exp(r_i))
///
/// and the winner is i* = argmin a_i with companion t* = t_{i*}. The
/// argmin is taken on ln a_i, a monotone image of the same quantity.
fn select(v: &SparseVector, base: RandKey, j: usize) -> (u32, i64) {
    let sample = base.with(j as u64);
    let mut best_ln_a = f64::INFINITY;
    let mut best_id = 0u32;
    let mut best_t = 0.0f64;
    let mut first = true;
    for &(i, weight) in v.entries() {
        let key = sample.with(i as u64);
        let r = gamma2(key.with(R_SLOT));
        let c = gamma2(key.with(C_SLOT));
        let beta = uniform(key.with(BETA_SLOT));
        let t = (weight.ln() / r + beta).floor();
        let ln_a = c.ln() - r * (t - beta + 1.0);
        if first || ln_a < best_ln_a {
            first = false;
            best_ln_a = ln_a;
            best_id = i;
            best_t = t;
        }
    }
    (best_id, best_t as i64)
}

/// The full (i*, t*) pair for sample j of `v` under `seed`.
pub fn cws_sample(v: &SparseVector, seed: u64, j: usize) -> Result<(u32, i64)> {
    check_input(v)?;
    Ok(select(v, RandKey::new(seed).with(domain::CWS), j))
}

/// 0-bit CWS sketch: the coordinate ids of samples 0..k, t* discarded.
pub fn cws_sketch(v: &SparseVector, k: usize, seed: u64) -> Result<CwsSketch> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    check_input(v)?;
    let base = RandKey::new(seed).with(domain::CWS);
    let ids: Vec<u32> = (0..k)
        .into_par_iter()
        .map(|j| select(v, base, j).0)
        .collect();
    Ok(CwsSketch {
        ids,
        fingerprint: cws_fingerprint(seed, k, v.dim()),
    })
}

/// Expand each selected id into a one-hot block of `buckets` columns,
/// placing the one at mix64(id) mod buckets. Length k * buckets.
pub fn encode_cws(sketch: &CwsSketch, buckets: usize) -> Result<EncodedFeatures> {
    if buckets < 2 {
        return Err(Error::InvalidBuckets(buckets));
    }
    let b = buckets as u64;
    let ones = sketch
        .ids
        .iter()
        .enumerate()
        .map(|(j, &id)| j as u64 * b + mix64(id as u64) % b)
        .collect();
    Ok(EncodedFeatures::from_sorted(sketch.len() as u64 * b, ones))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::minmax_kernel;

    fn sv(values: &[f64]) -> SparseVector {
        SparseVector::from_dense(values).unwrap()
    }

    fn random_nonneg(dim: usize, keep: f64, seed: u64) -> SparseVector {
        let key = RandKey::new(seed).with(2000);
        let values: Vec<f64> = (0..dim)
            .map(|i| {
                let k = key.with(i as u64);
                if uniform(k.with(0)) < keep {
                    0.25 + uniform(k.with(1))
                } else {
                    0.0
                }
            })
            .collect();
        sv(&values)
    }

    #[test]
    fn single_candidate_always_wins() {
        let v = sv(&[0.0, 5.0, 0.0]);
        for j in 0..50 {
            assert_eq!(cws_sample(&v, 3, j).unwrap().0, 1);
        }
        let s = cws_sketch(&v, 64, 3).unwrap();
        assert!(s.ids().iter().all(|&id| id == 1));
    }

    #[test]
    fn disjoint_supports_never_collide() {
        let u = sv(&[1.0, 2.0, 0.0, 0.0]);
        let v = sv(&[0.0, 0.0, 3.0, 0.5]);
        let su = cws_sketch(&u, 256, 7).unwrap();
        let sv_ = cws_sketch(&v, 256, 7).unwrap();
        assert_eq!(su.agreements_with(&sv_), 0);
    }

    #[test]
    fn value_determinism() {
        let u = sv(&[1.0, 1.0]);
        let v = sv(&[1.0, 1.0]);
        assert_eq!(
            cws_sketch(&u, 128, 11).unwrap(),
            cws_sketch(&v, 128, 11).unwrap()
        );
        for j in 0..20 {
            assert_eq!(
                cws_sample(&u, 11, j).unwrap(),
                cws_sample(&v, 11, j).unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = sv(&[1.0, 2.0]);
        assert!(matches!(cws_sketch(&v, 0, 1), Err(Error::InvalidK)));
        let neg = sv(&[1.0, -2.0]);
        assert!(matches!(
            cws_sketch(&neg, 8, 1),
            Err(Error::NegativeEntry { index: 1, .. })
        ));
        let zero = sv(&[0.0, 0.0]);
        assert!(matches!(cws_sketch(&zero, 8, 1), Err(Error::EmptyVector)));
        assert!(matches!(cws_sample(&zero, 1, 0), Err(Error::EmptyVector)));
    }

    #[test]
    fn selected_ids_are_support_members() {
        let v = random_nonneg(40, 0.3, 13);
        let s = cws_sketch(&v, 512, 5).unwrap();
        let support: Vec<u32> = v.entries().iter().map(|&(i, _)| i).collect();
        assert!(s.ids().iter().all(|id| support.contains(id)));
    }

    #[test]
    fn marginal_probability_is_weight_fraction() {
        let v = sv(&[1.0, 2.0, 3.0, 4.0, 10.0]);
        let total = 20.0;
        let n = 100_000usize;
        let s = cws_sketch(&v, n, 17).unwrap();
        let mut counts = [0usize; 5];
        for &id in s.ids() {
            counts[id as usize] += 1;
        }
        for (i, &count) in counts.iter().enumerate() {
            let p = v.to_dense()[i] / total;
            let tol = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
            let observed = count as f64 / n as f64;
            assert!(
                (observed - p).abs() <= tol,
                "coordinate {i}: observed {observed}, expected {p} (tol {tol})"
            );
        }
    }

    #[test]
    fn collision_rate_tracks_minmax_kernel() {
        let k = 100_000usize;
        for seed in 0..3u64 {
            let u = random_nonneg(24, 0.5, 100 + seed);
            let v = random_nonneg(24, 0.5, 200 + seed);
            let expected = minmax_kernel(&u, &v).unwrap();
            let su = cws_sketch(&u, k, 31).unwrap();
            let sw = cws_sketch(&v, k, 31).unwrap();
            let observed = su.agreements_with(&sw) as f64 / k as f64;
            let tol = 4.0 * (expected * (1.0 - expected) / k as f64).sqrt() + 0.01;
            assert!(
                (observed - expected).abs() <= tol,
                "seed {seed}: observed {observed}, kernel {expected} (tol {tol})"
            );
        }
    }

    #[test]
    fn thread_count_does_not_change_ids() {
        let v = random_nonneg(30, 0.4, 19);
        let mut sketches = Vec::new();
        for threads in [1usize, 2, 4] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            sketches.push(pool.install(|| cws_sketch(&v, 1024, 23).unwrap()));
        }
        assert_eq!(sketches[0], sketches[1]);
        assert_eq!(sketches[0], sketches[2]);
    }

    #[test]
    fn encode_shape_and_identity() {
        let v = random_nonneg(16, 0.6, 29);
        let s = cws_sketch(&v, 64, 3).unwrap();
        let enc = encode_cws(&s, 256).unwrap();
        assert_eq!(enc.length(), 64 * 256);
        assert_eq!(enc.ones().len(), 64, "exactly one one per block");
        assert_eq!(enc.dot(&enc), 64, "identical sketches hit every block");
        assert!(matches!(encode_cws(&s, 1), Err(Error::InvalidBuckets(1))));
    }

    #[test]
    fn bucket_collisions_are_rare_for_disjoint_ids() {
        // simulate pairs with disjoint supports: nonzero inner products
        // can come only from bucket-hash collisions, at most k/B of the
        // pairs in expectation
        let k = 16usize;
        let buckets = 4096usize;
        let trials = 1000usize;
        let mut nonzero = 0usize;
        for t in 0..trials as u64 {
            let mut left = vec![0.0; 64];
            let mut right = vec![0.0; 64];
            let key = RandKey::new(9000).with(t);
            for i in 0..32 {
                left[i] = 0.5 + uniform(key.with(i as u64));
                right[32 + i] = 0.5 + uniform(key.with(32 + i as u64));
            }
            let a = cws_sketch(&sv(&left), k, t).unwrap();
            let b = cws_sketch(&sv(&right), k, t).unwrap();
            let dot = encode_cws(&a, buckets)
                .unwrap()
                .dot(&encode_cws(&b, buckets).unwrap());
            if dot > 0 {
                nonzero += 1;
            }
        }
        // expectation <= trials * k / buckets = 3.9; allow ~4 sigma
        assert!(nonzero <= 12, "nonzero dot products: {nonzero}");
    }
}
