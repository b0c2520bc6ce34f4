//! Float helpers that behave identically with and without `std`, plus the
//! seeding scheme shared by every randomized routine.
//!
//! All transcendental functions go through `libm` so results do not depend on
//! the platform's libm or on whether the `std` feature is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Relative closeness used for masses and marginals.
#[inline]
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= tol * scale
}

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, carry: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of an iterator.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for `(seed, index)`.
///
/// This is the `hash(seed, restart_index)` used for restarts and Monte Carlo
/// runs: two rounds of SplitMix64 over the pair.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

/// Named random streams. Each purpose gets its own ChaCha stream id so adding
/// draws for one purpose never shifts another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    VertexCount(usize),
    BirthTime(usize),
    Edges,
    HeuristicStart,
    CouplingStart,
    GraphRealization,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::VertexCount(b) => (1 << 32) | b as u64,
            Stream::BirthTime(b) => (2 << 32) | b as u64,
            Stream::Edges => 3 << 32,
            Stream::HeuristicStart => 4 << 32,
            Stream::CouplingStart => 5 << 32,
            Stream::GraphRealization => 6 << 32,
        }
    }
}

/// ChaCha8 generator for `seed` positioned on the given stream.
pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}

/// Nearest-ish `f64` to a rational: exact division when both parts fit in
/// 53 bits, otherwise both parts are reduced to their top 62 bits first.
pub fn ratio_to_f64(r: &num_rational::Ratio<i128>) -> f64 {
    let (n, d) = (*r.numer(), *r.denom());
    if n.unsigned_abs() < (1u128 << 53) && d.unsigned_abs() < (1u128 << 53) {
        return n as f64 / d as f64;
    }
    let shift = |x: i128| {
        let bits = 128 - x.unsigned_abs().leading_zeros() as i32;
        let s = (bits - 62).max(0);
        ((x >> s) as f64, s)
    };
    let (nf, ns) = shift(n);
    let (df, ds) = shift(d);
    nf / df * libm::exp2((ns - ds) as f64)
}
