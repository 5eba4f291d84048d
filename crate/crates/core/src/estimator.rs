//! Collision-fraction estimation between sketches and estimated kernel
//! matrices.

use std::io::Write;

use rayon::prelude::*;

use crate::cws::CwsSketch;
use crate::error::{Error, Result};
use crate::sign::SignSketch;

/// Anything with k comparable positions and a configuration digest.
pub trait Sketch: Sync {
    /// Number of independent samples (k).
    fn sample_count(&self) -> usize;

    fn fingerprint(&self) -> u64;

    /// Positions where the two sketches agree. Callers have already
    /// checked that the fingerprints match.
    fn agreements(&self, other: &Self) -> usize;
}

impl Sketch for SignSketch {
    fn sample_count(&self) -> usize {
        self.len()
    }

    fn fingerprint(&self) -> u64 {
        self.fingerprint()
    }

    fn agreements(&self, other: &Self) -> usize {
        self.agreements_with(other)
    }
}

impl Sketch for CwsSketch {
    fn sample_count(&self) -> usize {
        self.len()
    }

    fn fingerprint(&self) -> u64 {
        self.fingerprint()
    }

    fn agreements(&self, other: &Self) -> usize {
        self.agreements_with(other)
    }
}

/// Integer number of agreeing positions. Equals the inner product of the
/// encoded feature vectors exactly.
pub fn agreement_count<S: Sketch>(a: &S, b: &S) -> Result<usize> {
    if a.fingerprint() != b.fingerprint() {
        return Err(Error::FingerprintMismatch);
    }
    Ok(a.agreements(b))
}

/// Fraction of positions where the sketches agree; the unbiased
/// estimator of the collision probability.
pub fn collision_fraction<S: Sketch>(a: &S, b: &S) -> Result<f64> {
    Ok(agreement_count(a, b)? as f64 / a.sample_count() as f64)
}

/// Symmetric matrix of pairwise collision fractions with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    kind: String,
    data: Vec<f64>,
}

impl KernelMatrix {
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Comma-separated rows, one line per row, shortest round-trip
    /// float formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.write_all(b",")?;
                }
                write!(out, "{:?}", self.get(i, j))?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// All pairwise collision fractions of `sketches`, which must share one
/// configuration. Entries are inner products of unit-rescaled encodings,
/// so the matrix is positive semidefinite up to round-off.
pub fn kernel_matrix<S: Sketch>(sketches: &[S]) -> Result<KernelMatrix> {
    let n = sketches.len();
    if let Some(first) = sketches.first() {
        if sketches
            .iter()
            .any(|s| s.fingerprint() != first.fingerprint())
        {
            return Err(Error::FingerprintMismatch);
        }
    }
    let mut data = vec![0.0; n * n];
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            sketches[i].agreements(&sketches[j]) as f64 / sketches[i].sample_count() as f64
        })
        .collect();
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        data[i * n + j] = v;
        data[j * n + i] = v;
    }
    for i in 0..n {
        data[i * n + i] = 1.0;
    }
    Ok(KernelMatrix {
        n,
        kind: "collision-fraction".to_string(),
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{collision_law, AlphaCase};
    use crate::keyed_rand::{uniform, RandKey};
    use crate::sign::{encode_sign, project_sign, SketchConfig};
    use crate::sparse::SparseVector;
    use crate::stable::Alpha;

    fn cfg(alpha: f64, k: usize, seed: u64, dim: usize) -> SketchConfig {
        SketchConfig::new(Alpha::new(alpha).unwrap(), k, seed, dim).unwrap()
    }

    fn random_dense(dim: usize, seed: u64) -> SparseVector {
        let key = RandKey::new(seed).with(3000);
        let values: Vec<f64> = (0..dim)
            .map(|i| 2.0 * uniform(key.with(i as u64)) - 1.0)
            .collect();
        SparseVector::from_dense(&values).unwrap()
    }

    #[test]
    fn self_collision_is_one() {
        let v = random_dense(10, 1);
        let s = project_sign(&v, &cfg(1.5, 333, 5, 10)).unwrap();
        assert_eq!(collision_fraction(&s, &s).unwrap(), 1.0);
    }

    #[test]
    fn negated_vector_collides_nowhere_at_alpha_two() {
        let v = random_dense(8, 2);
        let c = cfg(2.0, 4096, 7, 8);
        let s = project_sign(&v, &c).unwrap();
        let n = project_sign(&v.scaled(-1.0).unwrap(), &c).unwrap();
        assert_eq!(collision_fraction(&s, &n).unwrap(), 0.0);
    }

    #[test]
    fn config_mismatch_is_refused() {
        let v = random_dense(8, 3);
        let a = project_sign(&v, &cfg(2.0, 64, 1, 8)).unwrap();
        let b = project_sign(&v, &cfg(2.0, 64, 2, 8)).unwrap();
        assert!(matches!(
            collision_fraction(&a, &b),
            Err(Error::FingerprintMismatch)
        ));
    }

    #[test]
    fn collision_fraction_matches_law_at_alpha_two() {
        let k = 100_000;
        let u = random_dense(8, 4);
        let v = random_dense(8, 5);
        let c = cfg(2.0, k, 11, 8);
        let p = collision_law(AlphaCase::Two, &u, &v).unwrap().value;
        let observed = collision_fraction(
            &project_sign(&u, &c).unwrap(),
            &project_sign(&v, &c).unwrap(),
        )
        .unwrap();
        let tol = 4.0 * (p * (1.0 - p) / k as f64).sqrt();
        assert!(
            (observed - p).abs() <= tol,
            "observed {observed}, law {p} (tol {tol})"
        );
    }

    #[test]
    fn agreement_equals_encoded_dot() {
        let c = cfg(1.0, 129, 13, 12);
        for seed in 0..20 {
            let u = random_dense(12, 100 + seed);
            let v = random_dense(12, 200 + seed);
            let su = project_sign(&u, &c).unwrap();
            let sv = project_sign(&v, &c).unwrap();
            let count = agreement_count(&su, &sv).unwrap() as u64;
            assert_eq!(count, encode_sign(&su).dot(&encode_sign(&sv)));
        }
    }

    #[test]
    fn matrix_trivial_cases() {
        let v = random_dense(6, 6);
        let c = cfg(2.0, 64, 17, 6);
        let s = project_sign(&v, &c).unwrap();
        let m = kernel_matrix(std::slice::from_ref(&s)).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 1.0);

        let m = kernel_matrix(&[s.clone(), s.clone(), s]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), 1.0);
            }
        }

        let empty: Vec<SignSketch> = Vec::new();
        assert_eq!(kernel_matrix(&empty).unwrap().n(), 0);
    }

    #[test]
    fn matrix_refuses_mixed_configs() {
        let v = random_dense(6, 7);
        let a = project_sign(&v, &cfg(2.0, 64, 17, 6)).unwrap();
        let b = project_sign(&v, &cfg(2.0, 64, 18, 6)).unwrap();
        assert!(matches!(
            kernel_matrix(&[a, b]),
            Err(Error::FingerprintMismatch)
        ));
    }

    #[test]
    fn matrix_tracks_collision_laws() {
        let k = 100_000;
        let c = cfg(2.0, k, 19, 8);
        let vectors: Vec<SparseVector> = (0..5).map(|s| random_dense(8, 50 + s)).collect();
        let sketches: Vec<SignSketch> = vectors
            .iter()
            .map(|v| project_sign(v, &c).unwrap())
            .collect();
        let m = kernel_matrix(&sketches).unwrap();
        assert_eq!(m.kind(), "collision-fraction");
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.get(i, j), m.get(j, i), "symmetry at ({i},{j})");
            }
            assert_eq!(m.get(i, i), 1.0, "unit diagonal at {i}");
        }
        for i in 0..5 {
            for j in i + 1..5 {
                let p = collision_law(AlphaCase::Two, &vectors[i], &vectors[j])
                    .unwrap()
                    .value;
                let tol = 4.0 * (p * (1.0 - p) / k as f64).sqrt();
                assert!(
                    (m.get(i, j) - p).abs() <= tol,
                    "entry ({i},{j}): {} vs law {p}",
                    m.get(i, j)
                );
            }
        }
    }

    /// Cyclic Jacobi sweeps; good enough for the desk-scale matrices in
    /// these tests.
    #[allow(clippy::needless_range_loop)]
    fn min_eigenvalue(matrix: &KernelMatrix) -> f64 {
        let n = matrix.n();
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| matrix.get(i, j)).collect())
            .collect();
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..n {
                for q in p + 1..n {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-18 {
                        continue;
                    }
                    let theta = 0.5 * (2.0 * a[p][q]).atan2(a[q][q] - a[p][p]);
                    let (s, c) = theta.sin_cos();
                    for r in 0..n {
                        let (arp, arq) = (a[r][p], a[r][q]);
                        a[r][p] = c * arp - s * arq;
                        a[r][q] = s * arp + c * arq;
                    }
                    for r in 0..n {
                        let (apr, aqr) = (a[p][r], a[q][r]);
                        a[p][r] = c * apr - s * aqr;
                        a[q][r] = s * apr + c * aqr;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn matrix_is_positive_semidefinite() {
        let c = cfg(1.25, 256, 23, 10);
        let sketches: Vec<SignSketch> = (0..6)
            .map(|s| project_sign(&random_dense(10, 70 + s), &c).unwrap())
            .collect();
        let m = kernel_matrix(&sketches).unwrap();
        let lambda = min_eigenvalue(&m);
        assert!(lambda >= -1e-8, "smallest eigenvalue {lambda}");
    }

    #[test]
    fn csv_output() {
        let v = random_dense(6, 8);
        let c = cfg(2.0, 64, 29, 6);
        let s = project_sign(&v, &c).unwrap();
        let mut buf = Vec::new();
        kernel_matrix(&[s]).unwrap().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "1.0\n");
    }
}
