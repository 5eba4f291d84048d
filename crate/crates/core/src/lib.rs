//! Similarity sketching for large-scale linear learning.
//!
//! Two sketch families over sparse vectors:
//!
//! - **Sign alpha-stable random projections**: project through i.i.d.
//!   `S(alpha, 1)` entries and keep the k signs. At alpha = 2 the
//!   probability that two vectors agree on a bit is `1 - acos(rho2)/pi`;
//!   at alpha = 1 (l1-normalized nonnegative data) approximately
//!   `1 - acos(chi2)/pi`; in the 0+ limit `1/2 + R/2` with `R` the
//!   resemblance of the supports. Works for general signed data.
//! - **0-bit consistent weighted sampling**: for nonnegative data, k
//!   coordinate selections whose collision probability is the min-max
//!   kernel.
//!
//! Both expand into sparse binary features whose inner products count
//! sketch agreements, so linear learners see the estimated kernel.
//! Exact kernel oracles and the closed-form collision laws live in
//! [`kernels`] for verification. All randomness is keyed and
//! counter-style ([`keyed_rand`]): deterministic per seed, independent
//! of evaluation order and worker count.

pub mod cws;
pub mod dataset;
mod error;
pub mod estimator;
pub mod features;
pub mod kernels;
pub mod keyed_rand;
pub mod sign;
pub mod sparse;
pub mod stable;

pub use cws::{cws_sample, cws_sketch, encode_cws, CwsSketch, DEFAULT_BUCKETS};
pub use dataset::{l1_normalize, parse_dataset, write_features, Example, LabeledDataset};
pub use error::{Error, Result};
pub use estimator::{agreement_count, collision_fraction, kernel_matrix, KernelMatrix, Sketch};
pub use features::EncodedFeatures;
pub use kernels::{
    chi2_kernel, collision_law, minmax_kernel, normalized_minmax, resemblance, rho2, AlphaCase,
    KernelKind, KernelValue, LawPrediction,
};
pub use sign::{encode_sign, project_sign, SignSketch, SketchConfig};
pub use sparse::SparseVector;
pub use stable::{empirical_cf, sample_stable, Alpha, StableLaw, ZERO_PLUS_SURROGATE};
