//! The `verify` subcommand: draw random vector pairs, sketch them, and
//! compare empirical collision fractions against the closed-form laws.
//!
//! Tolerances are four binomial standard deviations plus a method
//! allowance: 0.015 for the approximate alpha=1 law and 0.01 each for
//! the alpha -> 0+ surrogate and for 0-bit CWS's discarded companion
//! value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use serde::Serialize;

use stablesketch_core::keyed_rand::{domain, uniform, RandKey};
use stablesketch_core::stable::derive_seed;
use stablesketch_core::{
    collision_fraction, collision_law, cws_sketch, l1_normalize, project_sign, Alpha, AlphaCase,
    SketchConfig, SparseVector,
};

use crate::VerifyArgs;

#[derive(Serialize)]
pub struct VerifyReport {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub repeats: usize,
    pub passed: bool,
    pub cases: Vec<VerifyCase>,
}

#[derive(Serialize)]
pub struct VerifyCase {
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_requested: Option<String>,
    pub repeat: usize,
    pub pair: usize,
    pub theoretical: f64,
    pub empirical: f64,
    pub k: usize,
    pub tolerance: f64,
    pub approximate_law: bool,
    pub pass: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CaseKind {
    Sign(AlphaCase),
    Cws,
}

impl CaseKind {
    fn tag(self) -> u64 {
        match self {
            CaseKind::Sign(AlphaCase::Two) => 0,
            CaseKind::Sign(AlphaCase::One) => 1,
            CaseKind::Sign(AlphaCase::ZeroPlus) => 2,
            CaseKind::Cws => 3,
        }
    }

    fn allowance(self) -> f64 {
        match self {
            CaseKind::Sign(AlphaCase::Two) => 0.0,
            CaseKind::Sign(AlphaCase::One) => 0.015,
            CaseKind::Sign(AlphaCase::ZeroPlus) => 0.01,
            CaseKind::Cws => 0.01,
        }
    }
}

fn dense_signed(dim: usize, key: RandKey) -> Vec<f64> {
    (0..dim)
        .map(|i| 2.0 * uniform(key.with(i as u64)) - 1.0)
        .collect()
}

fn dense_nonneg(dim: usize, key: RandKey) -> Vec<f64> {
    (0..dim)
        .map(|i| 0.05 + uniform(key.with(i as u64)))
        .collect()
}

fn mix(u: &[f64], w: &[f64], cu: f64, cw: f64) -> Vec<f64> {
    u.iter().zip(w).map(|(a, b)| cu * a + cw * b).collect()
}

/// Sparse nonnegative histogram-style pair: support overlap grows with
/// `q`, a shared coordinate carries the same weight on both sides within
/// 5%.
fn sparse_nonneg_pair(dim: usize, q: f64, key: RandKey) -> (Vec<f64>, Vec<f64>) {
    let p_both = 0.18 * q;
    let p_only = 0.10 * (1.0 - q) + 0.02;
    let mut u = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    for i in 0..dim {
        let k = key.with(i as u64);
        let class = uniform(k.with(0));
        let shared = class < p_both;
        let in_u = class < p_both + p_only;
        let in_v = shared || (p_both + p_only..p_both + 2.0 * p_only).contains(&class);
        if in_u {
            u[i] = 0.5 + uniform(k.with(1));
        }
        if in_v {
            v[i] = if shared {
                u[i] * (1.0 + 0.05 * (2.0 * uniform(k.with(2)) - 1.0))
            } else {
                0.5 + uniform(k.with(2))
            };
        }
    }
    if u.iter().all(|&x| x == 0.0) {
        u[0] = 1.0;
    }
    if v.iter().all(|&x| x == 0.0) {
        v[1 % dim] = 1.0;
    }
    (u, v)
}

/// One random pair for a case kind. The pair families match the regimes
/// the laws cover: general dense data for alpha=2, l1-normalized data
/// within the chi-squared approximation's accurate range for alpha=1,
/// sparse nonnegative data for 0+ and CWS.
fn generate_pair(
    kind: CaseKind,
    trial: usize,
    trials: usize,
    key: RandKey,
) -> Result<(SparseVector, SparseVector), String> {
    let fraction = (trial as f64 + 0.5) / trials as f64;
    let build = |values: &[f64]| SparseVector::from_dense(values).map_err(|e| e.to_string());
    match kind {
        CaseKind::Sign(AlphaCase::Two) => {
            let dim = 32;
            let a = dense_signed(dim, key.with(0));
            let w = dense_signed(dim, key.with(1));
            let theta = std::f64::consts::PI * fraction;
            let b = mix(&a, &w, theta.cos(), theta.sin());
            Ok((build(&a)?, build(&b)?))
        }
        CaseKind::Sign(AlphaCase::One) => {
            // sparse pairs sweep chi2 up to ~0.7; the last 30% are
            // near-duplicate dense pairs above 0.99
            let sparse_share = trials - trials / 3;
            let pair = if trial < sparse_share {
                let q = 0.55 * (trial as f64 + 0.5) / sparse_share as f64;
                sparse_nonneg_pair(96, q, key)
            } else {
                let a = dense_nonneg(96, key.with(0));
                let w = dense_nonneg(96, key.with(1));
                let lambda =
                    0.8 + 0.2 * (trial - sparse_share) as f64 / (trials - sparse_share) as f64;
                let b = mix(&a, &w, lambda, 1.0 - lambda);
                (a, b)
            };
            let u = l1_normalize(&build(&pair.0)?).map_err(|e| e.to_string())?;
            let v = l1_normalize(&build(&pair.1)?).map_err(|e| e.to_string())?;
            Ok((u, v))
        }
        CaseKind::Sign(AlphaCase::ZeroPlus) | CaseKind::Cws => {
            let (u, v) = sparse_nonneg_pair(96, fraction, key);
            Ok((build(&u)?, build(&v)?))
        }
    }
}

fn run_case(
    kind: CaseKind,
    requested: Option<&str>,
    args: &VerifyArgs,
    repeat: usize,
    cases: &mut Vec<VerifyCase>,
) -> Result<(), String> {
    let base = RandKey::new(args.seed)
        .with(domain::VERIFY)
        .with(repeat as u64)
        .with(kind.tag());
    for trial in 0..args.trials {
        let key = base.with(trial as u64);
        let (u, v) = generate_pair(kind, trial, args.trials, key)?;
        let sketch_seed = derive_seed(key.with(u64::MAX));
        let (method, alpha, theoretical, approximate, empirical) = match kind {
            CaseKind::Sign(case) => {
                let law = collision_law(case, &u, &v).map_err(|e| e.to_string())?;
                let alpha = Alpha::new(case.alpha()).expect("cases carry valid alphas");
                let cfg = SketchConfig::new(alpha, args.k, sketch_seed, u.dim())
                    .map_err(|e| e.to_string())?;
                let su = project_sign(&u, &cfg).map_err(|e| e.to_string())?;
                let sv = project_sign(&v, &cfg).map_err(|e| e.to_string())?;
                let empirical = collision_fraction(&su, &sv).map_err(|e| e.to_string())?;
                (
                    "sign",
                    Some(case.alpha()),
                    law.value,
                    law.approximate,
                    empirical,
                )
            }
            CaseKind::Cws => {
                let theoretical =
                    stablesketch_core::minmax_kernel(&u, &v).map_err(|e| e.to_string())?;
                let su = cws_sketch(&u, args.k, sketch_seed).map_err(|e| e.to_string())?;
                let sv = cws_sketch(&v, args.k, sketch_seed).map_err(|e| e.to_string())?;
                let empirical = collision_fraction(&su, &sv).map_err(|e| e.to_string())?;
                ("cws", None, theoretical, false, empirical)
            }
        };
        let sigma = (theoretical * (1.0 - theoretical) / args.k as f64).sqrt();
        let tolerance = 4.0 * sigma + kind.allowance();
        let pass = (empirical - theoretical).abs() <= tolerance;
        cases.push(VerifyCase {
            method,
            alpha,
            alpha_requested: requested.map(str::to_owned),
            repeat,
            pair: trial,
            theoretical,
            empirical,
            k: args.k,
            tolerance,
            approximate_law: approximate,
            pass,
        });
    }
    Ok(())
}

pub fn run(args: VerifyArgs) -> Result<ExitCode, String> {
    if args.k < 1000 {
        return Err(format!("--k must be at least 1000, got {}", args.k));
    }
    if args.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    if args.repeats == 0 {
        return Err("--repeats must be at least 1".into());
    }

    let mut kinds: Vec<(CaseKind, Option<String>)> = Vec::new();
    for token in &args.alphas {
        let flag = crate::parse_alpha(token)?;
        let case = AlphaCase::for_alpha(flag.value).map_err(|e| e.to_string())?;
        kinds.push((CaseKind::Sign(case), Some(token.clone())));
    }
    kinds.push((CaseKind::Cws, None));

    let mut cases = Vec::new();
    for repeat in 0..args.repeats {
        for (kind, requested) in &kinds {
            run_case(*kind, requested.as_deref(), &args, repeat, &mut cases)?;
        }
    }

    let mut failures = 0usize;
    for case in &cases {
        let label = match case.alpha {
            Some(alpha) => format!(
                "sign alpha={}{}",
                alpha,
                case.alpha_requested
                    .as_deref()
                    .filter(|r| *r == "0+")
                    .map(|_| " (requested 0+)")
                    .unwrap_or("")
            ),
            None => "cws".to_string(),
        };
        println!(
            "{label} repeat={} pair={}: theoretical {:.6} empirical {:.6} tolerance {:.6} {}",
            case.repeat,
            case.pair,
            case.theoretical,
            case.empirical,
            case.tolerance,
            if case.pass { "PASS" } else { "FAIL" }
        );
        if !case.pass {
            failures += 1;
        }
    }

    let report = VerifyReport {
        k: args.k,
        trials: args.trials,
        seed: args.seed,
        repeats: args.repeats,
        passed: failures == 0,
        cases,
    };
    if let Some(path) = &args.report {
        let out = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut out = BufWriter::new(out);
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| e.to_string())?;
        out.write_all(b"\n").map_err(|e| e.to_string())?;
        out.flush().map_err(|e| e.to_string())?;
    }

    println!(
        "verify: {} cases, {} passed, {} failed (k={}, trials={}, seed={}, repeats={})",
        report.cases.len(),
        report.cases.len() - failures,
        failures,
        args.k,
        args.trials,
        args.seed,
        args.repeats
    );
    if failures > 0 {
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
