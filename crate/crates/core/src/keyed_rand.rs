//! Keyed, counter-style randomness.
//!
//! Every variate is a pure function of a seed and an ordered tuple of
//! stream labels. There is no shared generator state, so sketching a
//! sparse vector touches only the streams of its nonzero coordinates,
//! and evaluating streams in any order (or concurrently) reproduces the
//! same values bit for bit. The mixer is not cryptographic.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const LABEL_MUL: u64 = 0x2545_f491_4f6c_dd1d;
const OUTPUT_TAG: u64 = 0x6a09_e667_f3bc_c909;
const UNIFORM_SCALE: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53

/// SplitMix64 finalizer (Stafford mix 13). Fixed constants keep keyed
/// streams and CWS bucket hashes identical across platforms and runs.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream-label registry. Top-level consumers take a label from here so
/// that independent subsystems sharing one seed never share variates.
pub mod domain {
    pub const STABLE_CF: u64 = 1;
    pub const SIGN: u64 = 2;
    pub const CWS: u64 = 3;
    pub const FINGERPRINT_SIGN: u64 = 4;
    pub const FINGERPRINT_CWS: u64 = 5;
    pub const VERIFY: u64 = 6;
    pub const BENCH: u64 = 7;
}

/// A seed plus an ordered tuple of absorbed stream labels.
///
/// `RandKey::new(seed).with(a).with(b)` names the stream `(seed, a, b)`.
/// Keys are tiny and `Copy`; deriving a child key never perturbs the
/// parent, so one parent key can fan out to any number of sub-streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandKey {
    state: u64,
}

impl RandKey {
    #[inline]
    pub fn new(seed: u64) -> Self {
        RandKey {
            state: mix64(seed.wrapping_add(GOLDEN)),
        }
    }

    /// Absorb one more stream label.
    #[inline]
    pub fn with(self, label: u64) -> Self {
        // The premix is injective in the label, so the labels 0 and 1
        // (and every other pair) land on distinct states.
        RandKey {
            state: mix64(self.state ^ label.wrapping_mul(LABEL_MUL).wrapping_add(GOLDEN)),
        }
    }
}

/// The raw 64-bit word behind `uniform`. Useful for deriving child seeds
/// and other integer-valued plumbing.
#[inline]
pub fn word(key: RandKey) -> u64 {
    mix64(key.state ^ OUTPUT_TAG)
}

/// Uniform variate on [0, 1): the 53 high bits of the keyed word over 2^53.
#[inline]
pub fn uniform(key: RandKey) -> f64 {
    (word(key) >> 11) as f64 * UNIFORM_SCALE
}

#[inline]
fn exponential_from_uniform(u: f64) -> f64 {
    // -ln(1 - u); ln_1p keeps precision near u = 0.
    -(-u).ln_1p()
}

/// Standard exponential variate, -ln(1 - U).
#[inline]
pub fn exponential(key: RandKey) -> f64 {
    exponential_from_uniform(uniform(key))
}

/// Gamma(2,1) variate: the sum of two independent standard exponentials
/// drawn from sub-streams 0 and 1 of `key`.
#[inline]
pub fn gamma2(key: RandKey) -> f64 {
    exponential(key.with(0)) + exponential(key.with(1))
}
