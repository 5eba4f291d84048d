//! The `bench` subcommand: time sign sketching on synthetic sparse
//! vectors and report throughput. No correctness claims.

use std::process::ExitCode;
use std::time::Instant;

use stablesketch_core::keyed_rand::{domain, uniform, word, RandKey};
use stablesketch_core::{project_sign, Alpha, SketchConfig, SparseVector};

use crate::BenchArgs;

fn random_vector(dim: usize, nnz: usize, key: RandKey) -> SparseVector {
    let mut indices = std::collections::BTreeSet::new();
    let mut attempt = 0u64;
    while indices.len() < nnz {
        indices.insert((word(key.with(attempt)) % dim as u64) as u32);
        attempt += 1;
    }
    let entries = indices
        .into_iter()
        .enumerate()
        .map(|(slot, index)| (index, 0.5 + uniform(key.with(u64::MAX - slot as u64))))
        .collect();
    SparseVector::new(dim, entries).expect("generated entries are valid")
}

pub fn run(args: BenchArgs) -> Result<ExitCode, String> {
    if args.vectors == 0 {
        return Err("--vectors must be at least 1".into());
    }
    if args.dim == 0 {
        return Err("--dim must be at least 1".into());
    }
    if args.nnz == 0 || args.nnz > args.dim {
        return Err(format!(
            "--nnz must be in 1..={}, got {}",
            args.dim, args.nnz
        ));
    }
    let alpha = Alpha::new(args.alpha.value).map_err(|e| e.to_string())?;
    let cfg = SketchConfig::new(alpha, args.k, args.seed, args.dim).map_err(|e| e.to_string())?;

    let base = RandKey::new(args.seed).with(domain::BENCH);
    let vectors: Vec<SparseVector> = (0..args.vectors)
        .map(|i| random_vector(args.dim, args.nnz, base.with(i as u64)))
        .collect();

    let start = Instant::now();
    let mut bits = 0usize;
    for v in &vectors {
        let sketch = project_sign(v, &cfg).map_err(|e| e.to_string())?;
        bits += sketch
            .words()
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>();
    }
    let elapsed = start.elapsed();

    let projections = args.vectors as f64 * args.k as f64;
    let rate = projections / elapsed.as_secs_f64();
    println!(
        "sketched {} vectors (D={}, nnz={}, alpha={}, k={}): {:.3} s elapsed, {:.0} projections/sec ({} set bits)",
        args.vectors,
        args.dim,
        args.nnz,
        args.alpha,
        args.k,
        elapsed.as_secs_f64(),
        rate,
        bits
    );
    Ok(ExitCode::SUCCESS)
}
