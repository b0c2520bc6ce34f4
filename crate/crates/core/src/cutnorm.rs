//! Cut norm of step graphons.
//!
//! For a step graphon the supremum over measurable rectangles reduces to
//! unions of blocks: the bilinear form `∫∫ F g⊗h` over `[0,1]`-valued `g, h`
//! attains its maximum at 0/1 vectors on the blocks. With
//! `A_ij = w_i w_j V_ij`,
//!
//! ```text
//! ‖F‖_□ = max_{x ∈ {0,1}^k} max( Σ_j (xᵀA)_j⁺ , Σ_j (xᵀA)_j⁻ ),
//! ```
//!
//! the optimal `y` for a fixed `x` being the positive (resp. negative)
//! coordinates of `xᵀA`. The exact routine walks `x` in Gray-code order so
//! each step adds or removes one row of `A`: `O(2^k · k)` arithmetic.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graphon::StepGraphon;
use crate::math::{self, CompensatedSum, Stream};
use crate::par;
use crate::spectral;

/// Default block limit for exact enumeration.
pub const K_EXACT: usize = 24;

/// Above this many blocks the exact kernel uses compensated accumulation.
const COMPENSATE_ABOVE: usize = 16;

/// Gray-code chunks have a fixed size so the work split, and therefore every
/// floating-point operation, is independent of the thread count.
const CHUNK_BITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// The value is the cut norm.
    Exact,
    /// The value is attained by the witnesses, so it is a lower bound.
    LowerWitness,
    /// The value is a proven upper bound.
    CertifiedUpper,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Exact => "EXACT",
            BoundKind::LowerWitness => "LOWER_WITNESS",
            BoundKind::CertifiedUpper => "CERTIFIED_UPPER",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutNormResult {
    pub value: f64,
    pub witness_x: Vec<bool>,
    pub witness_y: Vec<bool>,
    pub kind: BoundKind,
    pub certificate_note: String,
}

/// Scalars the Gray-code kernel can run on.
pub trait CutScalar:
    Clone + PartialOrd + Zero + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Send + Sync
{
    /// Adds `x` into `(sum, carry)`; floats may use the carry for
    /// compensation, exact types ignore it.
    fn accumulate(sum: &mut Self, carry: &mut Self, x: &Self, compensated: bool);
    fn resolve(sum: &Self, carry: &Self) -> Self;
}

impl CutScalar for f64 {
    #[inline]
    fn accumulate(sum: &mut f64, carry: &mut f64, x: &f64, compensated: bool) {
        if compensated {
            let t = *sum + *x;
            if sum.abs() >= x.abs() {
                *carry += (*sum - t) + *x;
            } else {
                *carry += (*x - t) + *sum;
            }
            *sum = t;
        } else {
            *sum += *x;
        }
    }

    #[inline]
    fn resolve(sum: &f64, carry: &f64) -> f64 {
        *sum + *carry
    }
}

impl CutScalar for Ratio<i128> {
    #[inline]
    fn accumulate(sum: &mut Self, _carry: &mut Self, x: &Self, _compensated: bool) {
        *sum = *sum + *x;
    }

    #[inline]
    fn resolve(sum: &Self, _carry: &Self) -> Self {
        *sum
    }
}

impl CutScalar for i128 {
    #[inline]
    fn accumulate(sum: &mut i128, _carry: &mut i128, x: &i128, _compensated: bool) {
        *sum += *x;
    }

    #[inline]
    fn resolve(sum: &i128, _carry: &i128) -> i128 {
        *sum
    }
}

/// Result of the generic kernel on a raw matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixCut<T> {
    pub value: T,
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    /// `true` when `xᵀAy` is negative at the optimum.
    pub negative: bool,
}

#[derive(Clone)]
struct Best<T> {
    value: T,
    gray_index: u64,
    negative: bool,
}

impl<T: CutScalar> Best<T> {
    fn better_than(&self, other: &Self) -> bool {
        self.value > other.value
            || (self.value == other.value
                && (self.gray_index, self.negative) < (other.gray_index, other.negative))
    }
}

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn scan_chunk<T: CutScalar>(a: &[T], k: usize, start: u64, end: u64, compensated: bool) -> Best<T> {
    let mut sum = vec![T::zero(); k];
    let mut carry = vec![T::zero(); k];
    let x0 = gray(start);
    for i in 0..k {
        if x0 >> i & 1 == 1 {
            for j in 0..k {
                T::accumulate(&mut sum[j], &mut carry[j], &a[i * k + j], compensated);
            }
        }
    }
    let mut best = Best { value: T::zero(), gray_index: start, negative: false };
    let mut first = true;
    let mut g = start;
    loop {
        let mut pos = T::zero();
        let mut neg = T::zero();
        for j in 0..k {
            let s = T::resolve(&sum[j], &carry[j]);
            if s > T::zero() {
                pos = pos + s;
            } else if s < T::zero() {
                neg = neg - s;
            }
        }
        for (value, negative) in [(pos, false), (neg, true)] {
            let cand = Best { value, gray_index: g, negative };
            if first || cand.better_than(&best) {
                best = cand;
                first = false;
            }
        }
        g += 1;
        if g >= end {
            break;
        }
        let bit = g.trailing_zeros() as usize;
        let adding = gray(g) >> bit & 1 == 1;
        let row = &a[bit * k..(bit + 1) * k];
        for j in 0..k {
            let delta = if adding { row[j].clone() } else { -row[j].clone() };
            T::accumulate(&mut sum[j], &mut carry[j], &delta, compensated);
        }
    }
    best
}

/// Exact maximization of `|xᵀAy|` over `x, y ∈ {0,1}^k` for a row-major
/// `k x k` matrix. The value returned is the kernel's accumulated value;
/// [`cut_norm_exact`] re-evaluates it from the witnesses.
pub fn cut_matrix_exact<T: CutScalar>(a: &[T], k: usize) -> MatrixCut<T> {
    assert_eq!(a.len(), k * k);
    if k == 0 {
        return MatrixCut { value: T::zero(), x: Vec::new(), y: Vec::new(), negative: false };
    }
    let total: u64 = 1 << k;
    let compensated = k > COMPENSATE_ABOVE;
    let chunk: u64 = 1 << CHUNK_BITS.min(k);
    let chunks = (total / chunk) as usize;
    let partial = par::map_indices(chunks, |c| {
        let start = c as u64 * chunk;
        scan_chunk(a, k, start, start + chunk, compensated)
    });
    let mut best = partial[0].clone();
    for cand in &partial[1..] {
        if cand.better_than(&best) {
            best = cand.clone();
        }
    }
    let xbits = gray(best.gray_index);
    let x: Vec<bool> = (0..k).map(|i| xbits >> i & 1 == 1).collect();
    let mut sum = vec![T::zero(); k];
    let mut carry = vec![T::zero(); k];
    for i in (0..k).filter(|&i| x[i]) {
        for j in 0..k {
            T::accumulate(&mut sum[j], &mut carry[j], &a[i * k + j], compensated);
        }
    }
    let y = (0..k)
        .map(|j| {
            let s = T::resolve(&sum[j], &carry[j]);
            if best.negative {
                s < T::zero()
            } else {
                s > T::zero()
            }
        })
        .collect();
    MatrixCut { value: best.value, x, y, negative: best.negative }
}

/// `|Σ_{i,j} x_i y_j w_i w_j V_ij|` with compensated summation in a fixed
/// order.
pub fn bilinear(f: &StepGraphon, x: &[bool], y: &[bool]) -> f64 {
    let k = f.block_count();
    let w = f.weights();
    let mut acc = CompensatedSum::new();
    for i in (0..k).filter(|&i| x[i]) {
        for j in (0..k).filter(|&j| y[j]) {
            acc.add(w[i] * w[j] * f.value(i, j));
        }
    }
    acc.value().abs()
}

/// Exact cut norm with the default block limit.
pub fn cut_norm_exact(f: &StepGraphon) -> Result<CutNormResult> {
    cut_norm_exact_with_limit(f, K_EXACT)
}

/// Exact cut norm, refusing graphons with more than `limit` blocks.
pub fn cut_norm_exact_with_limit(f: &StepGraphon, limit: usize) -> Result<CutNormResult> {
    let k = f.block_count();
    if k > limit || k >= 63 {
        return Err(Error::TooManyBlocks { blocks: k, limit });
    }
    let a = f.mass_matrix();
    let cut = cut_matrix_exact(&a, k);
    let value = bilinear(f, &cut.x, &cut.y);
    Ok(CutNormResult {
        value,
        witness_x: cut.x,
        witness_y: cut.y,
        kind: BoundKind::Exact,
        certificate_note: format!("Gray-code enumeration over {} block subsets", 1u64 << k),
    })
}

/// Exact cut norm in rational arithmetic for a matrix of block integrals.
pub fn cut_norm_rational(a: &[Ratio<i128>], k: usize) -> Ratio<i128> {
    cut_matrix_exact(a, k).value
}

fn alternate(a: &[f64], k: usize, mut x: Vec<bool>, sign: f64) -> (Vec<bool>, Vec<bool>) {
    let mut y = vec![false; k];
    for _ in 0..1000 {
        for j in 0..k {
            let s = math::sum_compensated((0..k).filter(|&i| x[i]).map(|i| a[i * k + j]));
            y[j] = sign * s > 0.0;
        }
        let next: Vec<bool> = (0..k)
            .map(|i| {
                let s = math::sum_compensated((0..k).filter(|&j| y[j]).map(|j| a[i * k + j]));
                sign * s > 0.0
            })
            .collect();
        if next == x {
            break;
        }
        x = next;
    }
    (x, y)
}

/// Alternating maximization over the two indicator vectors, from
/// `restarts` seeded starts (the first start is the all-ones vector).
/// Returns a lower bound attained by the witnesses. Coordinates with zero
/// marginal gain are set to 0.
pub fn cut_norm_heuristic(f: &StepGraphon, restarts: usize, seed: u64) -> Result<CutNormResult> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1"));
    }
    let k = f.block_count();
    let a = f.mass_matrix();
    let runs = par::map_indices(restarts, |r| {
        let start: Vec<bool> = if r == 0 {
            vec![true; k]
        } else {
            let mut rng = math::rng(math::derive_seed(seed, r as u64), Stream::HeuristicStart);
            (0..k).map(|_| rng.random::<bool>()).collect()
        };
        let mut best: Option<(f64, Vec<bool>, Vec<bool>)> = None;
        for sign in [1.0, -1.0] {
            let (x, y) = alternate(&a, k, start.clone(), sign);
            let v = bilinear(f, &x, &y);
            if best.as_ref().map_or(true, |b| v > b.0) {
                best = Some((v, x, y));
            }
        }
        best.expect("two signs evaluated")
    });
    let mut best = &runs[0];
    for run in &runs[1..] {
        if run.0 > best.0 {
            best = run;
        }
    }
    Ok(CutNormResult {
        value: best.0,
        witness_x: best.1.clone(),
        witness_y: best.2.clone(),
        kind: BoundKind::LowerWitness,
        certificate_note: format!("alternating maximization, {restarts} restarts, seed {seed}"),
    })
}

/// Cut norm of a non-negative graphon, which equals its `L¹` norm.
pub fn cut_norm_nonneg(f: &StepGraphon) -> Result<f64> {
    let k = f.block_count();
    for i in 0..k {
        for j in 0..k {
            if f.value(i, j) < 0.0 {
                return Err(Error::NegativeValue { i, j });
            }
        }
    }
    Ok(f.l1_norm())
}

fn validate_adjacency(adjacency: &[u8], n: usize) -> Result<()> {
    if adjacency.len() != n * n {
        return Err(Error::NotSymmetric);
    }
    for i in 0..n {
        if adjacency[i * n + i] != 0 {
            return Err(Error::NotSymmetric);
        }
        for j in 0..n {
            let a = adjacency[i * n + j];
            if a > 1 || a != adjacency[j * n + i] {
                return Err(Error::NotSymmetric);
            }
        }
    }
    Ok(())
}

/// Expander-mixing upper bound on `‖W_G − p‖_□` for the uniform-block
/// graphon of a graph on `n` vertices: `λ / n`, where `λ` is the spectral
/// radius of `A − pJ`.
///
/// For block sets `S, T`, `|1_Sᵀ(A − pJ)1_T| ≤ λ √(|S||T|) ≤ λ n`, and each
/// block pair has mass `1/n²`.
pub fn mixing_certificate(adjacency: &[u8], n: usize, p: f64) -> Result<f64> {
    validate_adjacency(adjacency, n)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadDensity(p));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let m: Vec<f64> = adjacency.iter().map(|&a| a as f64 - p).collect();
    Ok(spectral::symmetric_spectral_radius(&m, n) / n as f64)
}

/// [`mixing_certificate`] packaged as a certified upper bound.
pub fn mixing_certificate_result(adjacency: &[u8], n: usize, p: f64) -> Result<CutNormResult> {
    let value = mixing_certificate(adjacency, n, p)?;
    Ok(CutNormResult {
        value,
        witness_x: Vec::new(),
        witness_y: Vec::new(),
        kind: BoundKind::CertifiedUpper,
        certificate_note: format!("spectral radius of A - {p}J over {n} vertices"),
    })
}

/// Converts a rational cut value to `f64` for reporting.
pub fn ratio_value(r: &Ratio<i128>) -> f64 {
    math::ratio_to_f64(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::Mass;

    /// All `(T, U)` block-subset pairs; test oracle independent of the
    /// Gray-code walk.
    fn naive(a: &[f64], k: usize) -> f64 {
        let mut best = 0.0f64;
        for t in 0u32..(1 << k) {
            for u in 0u32..(1 << k) {
                let mut s = 0.0;
                for i in (0..k).filter(|i| t >> i & 1 == 1) {
                    for j in (0..k).filter(|j| u >> j & 1 == 1) {
                        s += a[i * k + j];
                    }
                }
                best = best.max(s.abs());
            }
        }
        best
    }

    fn g(weights: &[f64], rows: &[&[f64]]) -> StepGraphon {
        StepGraphon::new(weights.to_vec(), rows.iter().map(|r| r.to_vec()).collect(), Mass::Infinite)
            .unwrap()
    }

    #[test]
    fn constant_block() {
        let f = g(&[3.0], &[&[-0.5]]);
        assert_eq!(cut_norm_exact(&f).unwrap().value, 4.5);
    }

    #[test]
    fn checkerboard_quarter() {
        // Frozen from the 16-pair enumeration in `naive`.
        let f = g(&[0.5, 0.5], &[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert_eq!(naive(&f.mass_matrix(), 2), 0.25);
        let r = cut_norm_exact(&f).unwrap();
        assert_eq!(r.value, 0.25);
        assert_eq!(r.kind, BoundKind::Exact);
        assert_eq!(bilinear(&f, &r.witness_x, &r.witness_y), r.value);
    }

    #[test]
    fn matches_naive_on_small_integer_instances() {
        let mut state = 99u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as i64
        };
        for k in 1..=5 {
            for _ in 0..20 {
                let weights: Vec<f64> = (0..k).map(|_| (next() % 3 + 1) as f64).collect();
                let mut vals = vec![0.0; k * k];
                for i in 0..k {
                    for j in i..k {
                        let v = (next() % 9 - 4) as f64;
                        vals[i * k + j] = v;
                        vals[j * k + i] = v;
                    }
                }
                let f = StepGraphon::from_flat(weights, vals, Mass::Infinite).unwrap();
                assert_eq!(cut_norm_exact(&f).unwrap().value, naive(&f.mass_matrix(), k));
            }
        }
    }

    #[test]
    fn too_many_blocks() {
        let f = StepGraphon::from_flat(vec![1.0; 5], vec![0.0; 25], Mass::Infinite).unwrap();
        assert_eq!(
            cut_norm_exact_with_limit(&f, 4),
            Err(Error::TooManyBlocks { blocks: 5, limit: 4 })
        );
    }

    #[test]
    fn zero_graphon_everything_zero() {
        let z = StepGraphon::zero(Mass::Infinite);
        assert_eq!(cut_norm_exact(&z).unwrap().value, 0.0);
        assert_eq!(cut_norm_heuristic(&z, 3, 1).unwrap().value, 0.0);
        let zk = StepGraphon::from_flat(vec![1.0; 3], vec![0.0; 9], Mass::Infinite).unwrap();
        assert_eq!(cut_norm_exact(&zk).unwrap().value, 0.0);
        assert_eq!(cut_norm_heuristic(&zk, 2, 1).unwrap().value, 0.0);
    }

    #[test]
    fn heuristic_rank_one_is_exact_after_one_restart() {
        let u = [1.0, -2.0, 0.5, 3.0, -1.5];
        for c in [1.0, -0.7] {
            let vals: Vec<f64> = (0..25).map(|idx| c * u[idx / 5] * u[idx % 5]).collect();
            let f = StepGraphon::from_flat(vec![0.2; 5], vals, Mass::Infinite).unwrap();
            let h = cut_norm_heuristic(&f, 1, 0).unwrap();
            let e = cut_norm_exact(&f).unwrap();
            assert!((h.value - e.value).abs() < 1e-15, "{} vs {}", h.value, e.value);
        }
    }

    #[test]
    fn nonneg_rejects_negative() {
        let f = g(&[1.0, 1.0], &[&[0.0, -1.0], &[-1.0, 0.0]]);
        assert_eq!(cut_norm_nonneg(&f), Err(Error::NegativeValue { i: 0, j: 1 }));
        assert_eq!(cut_norm_nonneg(&g(&[1.0], &[&[1.0]])).unwrap(), 1.0);
    }

    fn complete(n: usize) -> Vec<u8> {
        (0..n * n).map(|idx| (idx / n != idx % n) as u8).collect()
    }

    #[test]
    fn certificate_complete_graph_dominates_exact() {
        for n in 2..=8 {
            let cert = mixing_certificate(&complete(n), n, 1.0).unwrap();
            // W_{K_n} − 1 is −1 on the diagonal blocks: exact cut norm 1/n.
            let vals: Vec<f64> = (0..n * n).map(|idx| if idx / n == idx % n { -1.0 } else { 0.0 }).collect();
            let f = StepGraphon::from_flat(vec![1.0 / n as f64; n], vals, Mass::Finite(1.0)).unwrap();
            let exact = cut_norm_exact(&f).unwrap().value;
            assert!((exact - 1.0 / n as f64).abs() < 1e-15);
            assert!(cert >= exact);
        }
    }

    #[test]
    fn certificate_empty_graph_is_zero() {
        assert_eq!(mixing_certificate(&[0; 16], 4, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn certificate_rejects_bad_input() {
        assert_eq!(mixing_certificate(&[0, 1, 0, 0], 2, 0.5), Err(Error::NotSymmetric));
        assert_eq!(mixing_certificate(&[1, 0, 0, 0], 2, 0.5), Err(Error::NotSymmetric));
        assert_eq!(mixing_certificate(&[0, 1, 1, 0], 2, 1.5), Err(Error::BadDensity(1.5)));
    }

    #[test]
    fn rational_kernel_agrees_with_float_on_integers() {
        let a: Vec<i128> = vec![3, -2, 5, -2, 0, 1, 5, 1, -4];
        let ar: Vec<Ratio<i128>> = a.iter().map(|&v| Ratio::from_integer(v)).collect();
        let af: Vec<f64> = a.iter().map(|&v| v as f64).collect();
        let r = cut_norm_rational(&ar, 3);
        assert_eq!(ratio_value(&r), cut_matrix_exact(&af, 3).value);
        assert_eq!(ratio_value(&r), naive(&af, 3));
    }
}
