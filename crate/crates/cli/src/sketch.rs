//! The `sketch` and `kernel` subcommands: load a dataset, sketch every
//! example, and either export encoded features or write the pairwise
//! collision-fraction matrix.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use rayon::prelude::*;

use stablesketch_core::{
    cws_sketch, encode_cws, encode_sign, kernel_matrix, l1_normalize, parse_dataset, project_sign,
    write_features, Alpha, CwsSketch, EncodedFeatures, LabeledDataset, SignSketch, SketchConfig,
    DEFAULT_BUCKETS,
};

use crate::{AlphaFlag, KernelArgs, Method, SketchArgs};

fn load(input: &Path, dim: Option<usize>) -> Result<LabeledDataset, String> {
    let file = File::open(input).map_err(|e| format!("{}: {e}", input.display()))?;
    parse_dataset(BufReader::new(file), dim).map_err(|e| e.to_string())
}

fn with_line(line: usize, e: impl std::fmt::Display) -> String {
    format!("line {line}: {e}")
}

/// Per-method parameter validation shared by sketch and kernel.
struct Plan {
    method: Method,
    alpha: Option<AlphaFlag>,
    buckets: usize,
    k: usize,
    seed: u64,
    normalize: bool,
}

impl Plan {
    fn new(
        method: Method,
        alpha: Option<AlphaFlag>,
        buckets: Option<usize>,
        k: usize,
        seed: u64,
        normalize: bool,
    ) -> Result<Plan, String> {
        match method {
            Method::Sign => {
                if alpha.is_none() {
                    return Err("--alpha is required for --method sign".into());
                }
                if buckets.is_some() {
                    return Err("--buckets applies only to --method cws".into());
                }
            }
            Method::Cws => {
                if alpha.is_some() {
                    return Err("--alpha applies only to --method sign".into());
                }
            }
        }
        Ok(Plan {
            method,
            alpha,
            buckets: buckets.unwrap_or(DEFAULT_BUCKETS),
            k,
            seed,
            normalize,
        })
    }

    fn summary(&self, dim: usize, examples: usize) -> String {
        match self.method {
            Method::Sign => format!(
                "method=sign alpha={} k={} seed={} D={dim} examples={examples}",
                self.alpha.expect("validated"),
                self.k,
                self.seed
            ),
            Method::Cws => format!(
                "method=cws k={} buckets={} seed={} D={dim} examples={examples}",
                self.k, self.buckets, self.seed
            ),
        }
    }

    fn vectors(
        &self,
        dataset: &LabeledDataset,
    ) -> Result<Vec<stablesketch_core::SparseVector>, String> {
        dataset
            .examples
            .iter()
            .map(|ex| {
                if self.normalize {
                    l1_normalize(&ex.vector).map_err(|e| with_line(ex.line, e))
                } else {
                    Ok(ex.vector.clone())
                }
            })
            .collect()
    }

    fn sign_config(&self, dim: usize) -> Result<SketchConfig, String> {
        let alpha = Alpha::new(self.alpha.expect("validated").value).map_err(|e| e.to_string())?;
        SketchConfig::new(alpha, self.k, self.seed, dim).map_err(|e| e.to_string())
    }
}

fn sign_sketches(plan: &Plan, dataset: &LabeledDataset) -> Result<Vec<SignSketch>, String> {
    let cfg = plan.sign_config(dataset.dim)?;
    let vectors = plan.vectors(dataset)?;
    vectors
        .par_iter()
        .zip(&dataset.examples)
        .map(|(v, ex)| project_sign(v, &cfg).map_err(|e| with_line(ex.line, e)))
        .collect()
}

fn cws_sketches(plan: &Plan, dataset: &LabeledDataset) -> Result<Vec<CwsSketch>, String> {
    let vectors = plan.vectors(dataset)?;
    vectors
        .par_iter()
        .zip(&dataset.examples)
        .map(|(v, ex)| cws_sketch(v, plan.k, plan.seed).map_err(|e| with_line(ex.line, e)))
        .collect()
}

fn encode_all(
    plan: &Plan,
    dataset: &LabeledDataset,
) -> Result<Vec<(i64, EncodedFeatures)>, String> {
    let labels = dataset.examples.iter().map(|ex| ex.label);
    match plan.method {
        Method::Sign => {
            let sketches = sign_sketches(plan, dataset)?;
            Ok(labels.zip(sketches.iter().map(encode_sign)).collect())
        }
        Method::Cws => {
            let sketches = cws_sketches(plan, dataset)?;
            let encoded: Result<Vec<_>, _> = sketches
                .iter()
                .map(|s| encode_cws(s, plan.buckets))
                .collect();
            Ok(labels.zip(encoded.map_err(|e| e.to_string())?).collect())
        }
    }
}

pub fn run_sketch(args: SketchArgs) -> Result<ExitCode, String> {
    let plan = Plan::new(
        args.method,
        args.alpha,
        args.buckets,
        args.k,
        args.seed,
        args.normalize,
    )?;
    let dataset = load(&args.input, args.dim)?;
    let features = encode_all(&plan, &dataset)?;
    let out = File::create(&args.output).map_err(|e| format!("{}: {e}", args.output.display()))?;
    let mut out = BufWriter::new(out);
    write_features(&features, &mut out).map_err(|e| e.to_string())?;
    out.flush().map_err(|e| e.to_string())?;
    println!(
        "{} -> {}",
        plan.summary(dataset.dim, dataset.examples.len()),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn run_kernel(args: KernelArgs) -> Result<ExitCode, String> {
    let plan = Plan::new(
        args.method,
        args.alpha,
        None,
        args.k,
        args.seed,
        args.normalize,
    )?;
    let dataset = load(&args.input, args.dim)?;
    let matrix = match plan.method {
        Method::Sign => kernel_matrix(&sign_sketches(&plan, &dataset)?),
        Method::Cws => kernel_matrix(&cws_sketches(&plan, &dataset)?),
    }
    .map_err(|e| e.to_string())?;
    let out = File::create(&args.output).map_err(|e| format!("{}: {e}", args.output.display()))?;
    let mut out = BufWriter::new(out);
    matrix.write_csv(&mut out).map_err(|e| e.to_string())?;
    out.flush().map_err(|e| e.to_string())?;
    println!(
        "{} -> {} ({} x {} {})",
        plan.summary(dataset.dim, dataset.examples.len()),
        args.output.display(),
        matrix.n(),
        matrix.n(),
        matrix.kind()
    );
    Ok(ExitCode::SUCCESS)
}
