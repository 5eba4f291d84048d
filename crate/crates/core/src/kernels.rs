//! Exact similarity oracles and the closed-form collision laws the
//! sketches are verified against.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use crate::stable::ZERO_PLUS_SURROGATE;

/// How far an l1 sum may sit from 1 before the chi-squared kernel
/// refuses the input.
pub const L1_TOL: f64 = 1e-9;

/// Walk the union of two sorted entry lists, yielding (index, u_i, v_i)
/// for every index where either side is nonzero.
struct UnionIter<'a> {
    a: &'a [(u32, f64)],
    b: &'a [(u32, f64)],
    i: usize,
    j: usize,
}

impl Iterator for UnionIter<'_> {
    type Item = (u32, f64, f64);

    fn next(&mut self) -> Option<(u32, f64, f64)> {
        match (self.a.get(self.i), self.b.get(self.j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) => {
                if ia < ib {
                    self.i += 1;
                    Some((ia, va, 0.0))
                } else if ib < ia {
                    self.j += 1;
                    Some((ib, 0.0, vb))
                } else {
                    self.i += 1;
                    self.j += 1;
                    Some((ia, va, vb))
                }
            }
            (Some(&(ia, va)), None) => {
                self.i += 1;
                Some((ia, va, 0.0))
            }
            (None, Some(&(ib, vb))) => {
                self.j += 1;
                Some((ib, 0.0, vb))
            }
            (None, None) => None,
        }
    }
}

fn check_dims(u: &SparseVector, v: &SparseVector) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            vector: v.dim(),
        });
    }
    Ok(())
}

fn check_nonnegative(v: &SparseVector) -> Result<()> {
    if let Some((index, value)) = v.first_negative() {
        return Err(Error::NegativeEntry { index, value });
    }
    Ok(())
}

fn union_iter<'a>(u: &'a SparseVector, v: &'a SparseVector) -> UnionIter<'a> {
    UnionIter {
        a: u.entries(),
        b: v.entries(),
        i: 0,
        j: 0,
    }
}

/// Correlation coefficient: sum(u_i v_i) / (|u|_2 |v|_2), clamped to
/// [-1, 1] against round-off.
pub fn rho2(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    check_dims(u, v)?;
    let nu: f64 = u.entries().iter().map(|&(_, x)| x * x).sum();
    let nv: f64 = v.entries().iter().map(|&(_, x)| x * x).sum();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let dot: f64 = union_iter(u, v).map(|(_, a, b)| a * b).sum();
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

fn check_l1_normalized(v: &SparseVector) -> Result<()> {
    let sum = v.sum();
    if (sum - 1.0).abs() > L1_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Chi-squared kernel sum(2 u_i v_i / (u_i + v_i)) for nonnegative,
/// l1-normalized inputs. Terms with u_i + v_i = 0 are skipped.
pub fn chi2_kernel(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    check_dims(u, v)?;
    check_nonnegative(u)?;
    check_nonnegative(v)?;
    check_l1_normalized(u)?;
    check_l1_normalized(v)?;
    let mut acc = 0.0;
    for (_, a, b) in union_iter(u, v) {
        if a + b > 0.0 {
            acc += 2.0 * a * b / (a + b);
        }
    }
    Ok(acc)
}

/// Resemblance: |support(u) and support(v)| / |support(u) or support(v)|
/// for nonnegative inputs.
pub fn resemblance(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    check_dims(u, v)?;
    check_nonnegative(u)?;
    check_nonnegative(v)?;
    let mut inter = 0usize;
    let mut uni = 0usize;
    for (_, a, b) in union_iter(u, v) {
        uni += 1;
        if a > 0.0 && b > 0.0 {
            inter += 1;
        }
    }
    if uni == 0 {
        return Err(Error::EmptyVector);
    }
    Ok(inter as f64 / uni as f64)
}

/// Min-max kernel sum(min(u_i, v_i)) / sum(max(u_i, v_i)) for
/// nonnegative inputs.
pub fn minmax_kernel(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    check_dims(u, v)?;
    check_nonnegative(u)?;
    check_nonnegative(v)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (_, a, b) in union_iter(u, v) {
        num += a.min(b);
        den += a.max(b);
    }
    if den == 0.0 {
        return Err(Error::EmptyVector);
    }
    Ok(num / den)
}

/// Min-max kernel after l1-normalizing each argument.
pub fn normalized_minmax(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    check_dims(u, v)?;
    check_nonnegative(u)?;
    check_nonnegative(v)?;
    let su = u.sum();
    let sv = v.sum();
    if su <= 0.0 || sv <= 0.0 {
        return Err(Error::EmptyVector);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (_, a, b) in union_iter(u, v) {
        let a = a / su;
        let b = b / sv;
        num += a.min(b);
        den += a.max(b);
    }
    Ok(num / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Rho2,
    Chi2,
    Resemblance,
    MinMax,
    NormalizedMinMax,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Rho2 => "rho2",
            KernelKind::Chi2 => "chi2",
            KernelKind::Resemblance => "resemblance",
            KernelKind::MinMax => "minmax",
            KernelKind::NormalizedMinMax => "normalized_minmax",
        }
    }
}

/// A kernel value tagged with the similarity it measures.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue {
    pub value: f64,
    pub kind: KernelKind,
}

pub fn evaluate(kind: KernelKind, u: &SparseVector, v: &SparseVector) -> Result<KernelValue> {
    let value = match kind {
        KernelKind::Rho2 => rho2(u, v)?,
        KernelKind::Chi2 => chi2_kernel(u, v)?,
        KernelKind::Resemblance => resemblance(u, v)?,
        KernelKind::MinMax => minmax_kernel(u, v)?,
        KernelKind::NormalizedMinMax => normalized_minmax(u, v)?,
    };
    Ok(KernelValue { value, kind })
}

/// The three stability indices with known closed-form collision laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaCase {
    Two,
    One,
    ZeroPlus,
}

impl AlphaCase {
    /// Map a numeric index onto its closed-form case. Only 2, 1, and the
    /// 0+ surrogate qualify; every other index has no known law.
    pub fn for_alpha(alpha: f64) -> Result<AlphaCase> {
        if alpha == 2.0 {
            Ok(AlphaCase::Two)
        } else if alpha == 1.0 {
            Ok(AlphaCase::One)
        } else if alpha == ZERO_PLUS_SURROGATE {
            Ok(AlphaCase::ZeroPlus)
        } else {
            Err(Error::NoClosedForm(alpha))
        }
    }

    pub fn alpha(self) -> f64 {
        match self {
            AlphaCase::Two => 2.0,
            AlphaCase::One => 1.0,
            AlphaCase::ZeroPlus => ZERO_PLUS_SURROGATE,
        }
    }
}

/// A closed-form collision probability. `approximate` marks the alpha=1
/// law, which is stated as an approximation rather than an identity.
#[derive(Clone, Copy, Debug)]
pub struct LawPrediction {
    pub value: f64,
    pub approximate: bool,
}

/// Theoretical probability that one sign-projection bit of `u` and `v`
/// agrees: 1 - acos(rho2)/pi at alpha=2, 1 - acos(chi2)/pi (approximate)
/// at alpha=1, and 1/2 + R/2 in the 0+ limit.
pub fn collision_law(case: AlphaCase, u: &SparseVector, v: &SparseVector) -> Result<LawPrediction> {
    match case {
        AlphaCase::Two => {
            let r = rho2(u, v)?;
            Ok(LawPrediction {
                value: 1.0 - r.acos() / PI,
                approximate: false,
            })
        }
        AlphaCase::One => {
            let r = chi2_kernel(u, v)?.clamp(0.0, 1.0);
            Ok(LawPrediction {
                value: 1.0 - r.acos() / PI,
                approximate: true,
            })
        }
        AlphaCase::ZeroPlus => {
            let r = resemblance(u, v)?;
            Ok(LawPrediction {
                value: 0.5 + 0.5 * r,
                approximate: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(values: &[f64]) -> SparseVector {
        SparseVector::from_dense(values).unwrap()
    }

    #[test]
    fn rho2_values() {
        let u = sv(&[1.0, 2.0, -3.0]);
        assert!((rho2(&u, &u).unwrap() - 1.0).abs() < 1e-15);
        let neg = u.scaled(-1.0).unwrap();
        assert!((rho2(&u, &neg).unwrap() + 1.0).abs() < 1e-15);
        let a = sv(&[1.0, 0.0]);
        let b = sv(&[1.0, 1.0]);
        assert!((rho2(&a, &b).unwrap() - 1.0 / 2f64.sqrt()).abs() <= 1e-12);
        assert!(matches!(rho2(&sv(&[0.0, 0.0]), &b), Err(Error::ZeroNorm)));
    }

    #[test]
    fn chi2_values() {
        let u = sv(&[0.5, 0.5, 0.0]);
        let v = sv(&[0.5, 0.0, 0.5]);
        assert!((chi2_kernel(&u, &v).unwrap() - 0.5).abs() <= 1e-12);
        assert!((chi2_kernel(&u, &u).unwrap() - 1.0).abs() <= 1e-12);
        let w = sv(&[0.0, 0.5, 0.5]);
        let d = sv(&[1.0, 0.0, 0.0]);
        assert_eq!(chi2_kernel(&w, &d).unwrap(), 0.0);
        // unnormalized and negative inputs are refused
        assert!(matches!(
            chi2_kernel(&sv(&[0.5, 0.6, 0.0]), &u),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            chi2_kernel(&sv(&[1.5, -0.5, 0.0]), &u),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn resemblance_values() {
        let u = sv(&[1.0, 0.0, 3.0, 0.0]);
        let v = sv(&[2.0, 0.0, 0.0, 4.0]);
        assert!((resemblance(&u, &v).unwrap() - 1.0 / 3.0).abs() <= 1e-12);
        assert_eq!(resemblance(&u, &u).unwrap(), 1.0);
        let dense_a = sv(&[1.0, 2.0, 3.0]);
        let dense_b = sv(&[4.0, 5.0, 6.0]);
        assert_eq!(resemblance(&dense_a, &dense_b).unwrap(), 1.0);
        assert!(matches!(
            resemblance(&sv(&[0.0, 0.0]), &sv(&[0.0, 0.0])),
            Err(Error::EmptyVector)
        ));
    }

    #[test]
    fn minmax_values() {
        let u = sv(&[1.0, 2.0, 0.0]);
        let v = sv(&[2.0, 1.0, 1.0]);
        assert!((minmax_kernel(&u, &v).unwrap() - 0.4).abs() <= 1e-12);
        assert_eq!(minmax_kernel(&u, &u).unwrap(), 1.0);
        let a = sv(&[1.0, 0.0, 0.0]);
        let b = sv(&[0.0, 1.0, 1.0]);
        assert_eq!(minmax_kernel(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            minmax_kernel(&sv(&[1.0]), &sv(&[-1.0])),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn normalized_minmax_values() {
        let u = sv(&[1.0, 1.0]);
        let v = sv(&[3.0, 1.0]);
        assert!((normalized_minmax(&u, &v).unwrap() - 0.6).abs() <= 1e-12);
        // already-normalized inputs match the plain kernel
        let a = sv(&[0.25, 0.75]);
        let b = sv(&[0.5, 0.5]);
        assert!(
            (normalized_minmax(&a, &b).unwrap() - minmax_kernel(&a, &b).unwrap()).abs() <= 1e-12
        );
        // scaling one argument changes nothing
        let scaled = u.scaled(7.5).unwrap();
        assert!((normalized_minmax(&u, &scaled).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kernels_are_symmetric() {
        let u = sv(&[0.3, 0.0, 1.2, 0.5]);
        let v = sv(&[0.0, 0.8, 0.4, 0.5]);
        assert_eq!(
            minmax_kernel(&u, &v).unwrap(),
            minmax_kernel(&v, &u).unwrap()
        );
        assert_eq!(resemblance(&u, &v).unwrap(), resemblance(&v, &u).unwrap());
        assert_eq!(rho2(&u, &v).unwrap(), rho2(&v, &u).unwrap());
        assert_eq!(
            normalized_minmax(&u, &v).unwrap(),
            normalized_minmax(&v, &u).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch_is_refused() {
        let u = sv(&[1.0, 2.0]);
        let v = sv(&[1.0, 2.0, 3.0]);
        assert!(matches!(rho2(&u, &v), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn collision_law_values() {
        let u = sv(&[1.0, 0.0]);
        assert_eq!(collision_law(AlphaCase::Two, &u, &u).unwrap().value, 1.0);
        let v = sv(&[1.0, 1.0]);
        let p = collision_law(AlphaCase::Two, &u, &v).unwrap();
        assert!((p.value - 0.75).abs() <= 1e-12);
        assert!(!p.approximate);

        let a = sv(&[1.0, 0.0, 3.0, 0.0]);
        let b = sv(&[2.0, 0.0, 0.0, 4.0]);
        let p = collision_law(AlphaCase::ZeroPlus, &a, &b).unwrap();
        assert!((p.value - 2.0 / 3.0).abs() <= 1e-12);

        let n1 = sv(&[0.5, 0.5, 0.0]);
        let n2 = sv(&[0.5, 0.0, 0.5]);
        let p = collision_law(AlphaCase::One, &n1, &n2).unwrap();
        assert!(p.approximate);
        assert!((p.value - (1.0 - 0.5f64.acos() / PI)).abs() <= 1e-12);
    }

    #[test]
    fn collision_law_is_monotone_in_rho2() {
        // pairs with increasing correlation produce increasing collision
        // probability
        let base = sv(&[1.0, 0.0]);
        let mut last = 0.0;
        for step in 0..=10 {
            let t = step as f64 / 10.0;
            let v = sv(&[t, 1.0 - t]);
            let p = collision_law(AlphaCase::Two, &base, &v).unwrap().value;
            if step > 0 {
                assert!(p > last, "law not increasing at step {step}");
            }
            last = p;
        }
    }

    #[test]
    fn unknown_alpha_has_no_law() {
        assert!(matches!(
            AlphaCase::for_alpha(1.5),
            Err(Error::NoClosedForm(_))
        ));
        assert_eq!(AlphaCase::for_alpha(2.0).unwrap(), AlphaCase::Two);
        assert_eq!(AlphaCase::for_alpha(1.0).unwrap(), AlphaCase::One);
        assert_eq!(
            AlphaCase::for_alpha(ZERO_PLUS_SURROGATE).unwrap(),
            AlphaCase::ZeroPlus
        );
    }

    #[test]
    fn evaluate_tags_kind() {
        let u = sv(&[1.0, 2.0]);
        let kv = evaluate(KernelKind::MinMax, &u, &u).unwrap();
        assert_eq!(kv.kind, KernelKind::MinMax);
        assert_eq!(kv.kind.name(), "minmax");
        assert_eq!(kv.value, 1.0);
    }
}
