//! Stretching, normalization, entropy and the integrability / regularity
//! diagnostics for finite families of step graphons.

use alloc::vec;
use alloc::vec::Vec;

use crate::cutnorm;
use crate::error::{Error, Result};
use crate::graphon::{StepGraphon, MASS_TOL};
use crate::math::{self, CompensatedSum};

/// Subset enumeration limit for the `L¹` tail search.
pub const TAIL_EXACT_L1: usize = 20;
/// Subset enumeration limit for the cut-norm tail search on signed graphons
/// (each subset costs an exact cut norm).
pub const TAIL_EXACT_CUT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Exact,
    Upper,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Exact => "EXACT",
            ValueKind::Upper => "UPPER",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub kind: ValueKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailNorm {
    L1,
    Cut,
}

/// `W^{(u)}`: the measure is multiplied by `u^{1/2}`, values unchanged.
pub fn stretch(w: &StepGraphon, u: f64) -> Result<StepGraphon> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::NonpositiveU(u));
    }
    if u == 1.0 {
        return Ok(w.clone());
    }
    let s = math::sqrt(u);
    let weights = w.weights().iter().map(|x| x * s).collect();
    Ok(StepGraphon::from_parts(weights, w.values().to_vec(), w.ambient_mass().scaled(s)))
}

/// `W^s`: the stretch with unit `L¹` norm, or the zero graphon.
///
/// A graphon whose norm is already within `1e-12` of 1 is returned
/// unchanged, which makes the operation idempotent.
pub fn normalize(w: &StepGraphon) -> StepGraphon {
    let l1 = w.l1_norm();
    if l1 == 0.0 {
        return StepGraphon::zero(w.ambient_mass());
    }
    if (l1 - 1.0).abs() <= MASS_TOL {
        return w.clone();
    }
    stretch(w, 1.0 / l1).expect("positive finite norm")
}

fn binary_entropy(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * math::ln(p) - (1.0 - p) * math::ln(1.0 - p)
    }
}

/// `Σ w_i w_j h(V_ij)` with the binary entropy `h` in nats.
pub fn entropy(w: &StepGraphon) -> Result<f64> {
    let k = w.block_count();
    let mut acc = CompensatedSum::new();
    for i in 0..k {
        for j in 0..k {
            let v = w.value(i, j);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ValueOutOfRange { i, j, value: v });
            }
            acc.add(w.weights()[i] * w.weights()[j] * binary_entropy(v));
        }
    }
    Ok(acc.value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UiProfile {
    pub sup_l1: f64,
    pub sup_tail: f64,
}

/// `∫∫_{|W| > b} |W|`.
pub fn tail_integral(w: &StepGraphon, b: f64) -> f64 {
    let k = w.block_count();
    let mut acc = CompensatedSum::new();
    for i in 0..k {
        for j in 0..k {
            let v = w.value(i, j).abs();
            if v > b {
                acc.add(w.weights()[i] * w.weights()[j] * v);
            }
        }
    }
    acc.value()
}

/// Largest `L¹` norm and largest tail integral above level `b` in a family.
pub fn ui_profile(family: &[StepGraphon], b: f64) -> Result<UiProfile> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument("level B must be positive"));
    }
    let mut out = UiProfile { sup_l1: 0.0, sup_tail: 0.0 };
    for w in family {
        out.sup_l1 = out.sup_l1.max(w.l1_norm());
        out.sup_tail = out.sup_tail.max(tail_integral(w, b));
    }
    Ok(out)
}

fn within_budget(mass: f64, budget: f64) -> bool {
    mass <= budget || math::close_rel(mass, budget, MASS_TOL)
}

fn mask(bits: u64, k: usize) -> Vec<bool> {
    (0..k).map(|i| bits >> i & 1 == 1).collect()
}

/// Feasible block set maximizing `Σ_{i,j∈U} w_i w_j |V_ij|`, by Gray-code
/// walk over all subsets.
fn best_l1_subset(w: &StepGraphon, budget: f64) -> Vec<bool> {
    let k = w.block_count();
    let a: Vec<f64> = w.mass_matrix().into_iter().map(f64::abs).collect();
    let weights = w.weights();
    let mut s = vec![0.0; k];
    let (mut inside, mut mass) = (0.0f64, 0.0f64);
    let (mut best, mut best_bits) = (0.0f64, 0u64);
    let mut x = 0u64;
    for g in 1u64..(1 << k) {
        let i = g.trailing_zeros() as usize;
        x ^= 1 << i;
        if x >> i & 1 == 1 {
            inside += 2.0 * s[i] + a[i * k + i];
            mass += weights[i];
            for j in 0..k {
                s[j] += a[i * k + j];
            }
        } else {
            for j in 0..k {
                s[j] -= a[i * k + j];
            }
            inside -= 2.0 * s[i] + a[i * k + i];
            mass -= weights[i];
        }
        if within_budget(mass, budget) && inside > best {
            best = inside;
            best_bits = x;
        }
    }
    mask(best_bits, k)
}

/// Blocks taken greedily by decreasing `w_i Σ_j w_j |V_ij|` while the mass
/// budget allows.
fn greedy_subset(w: &StepGraphon, budget: f64) -> Vec<bool> {
    let k = w.block_count();
    let weights = w.weights();
    let score: Vec<f64> = (0..k)
        .map(|i| weights[i] * math::sum_compensated((0..k).map(|j| weights[j] * w.value(i, j).abs())))
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    let mut keep = vec![false; k];
    let mut mass = 0.0;
    for i in order {
        if within_budget(mass + weights[i], budget) {
            keep[i] = true;
            mass += weights[i];
        }
    }
    keep
}

fn residual(w: &StepGraphon, keep: &[bool]) -> StepGraphon {
    let k = w.block_count();
    let mut vals = w.values().to_vec();
    for i in 0..k {
        for j in 0..k {
            if keep[i] && keep[j] {
                vals[i * k + j] = 0.0;
            }
        }
    }
    StepGraphon::from_parts(w.weights().to_vec(), vals, w.ambient_mass())
}

fn cut_or_l1(f: &StepGraphon) -> Bounded {
    if f.is_nonnegative() {
        return Bounded { value: f.l1_norm(), kind: ValueKind::Exact };
    }
    match cutnorm::cut_norm_exact(f) {
        Ok(r) => Bounded { value: r.value, kind: ValueKind::Exact },
        Err(_) => Bounded { value: f.l1_norm(), kind: ValueKind::Upper },
    }
}

/// `min ‖W − W·1_{U×U}‖` over unions `U` of blocks with `μ(U) ≤ m`.
///
/// Exact over block unions up to [`TAIL_EXACT_L1`] blocks for the `L¹` norm
/// (and for the cut norm of non-negative graphons, where the two agree); up
/// to [`TAIL_EXACT_CUT`] blocks for the cut norm of signed graphons. Larger
/// inputs use a greedy choice of `U` and are flagged `Upper`.
pub fn regular_tail_mass(w: &StepGraphon, m: f64, norm: TailNorm) -> Result<Bounded> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument("mass budget M must be positive"));
    }
    let k = w.block_count();
    let l1_route = norm == TailNorm::L1 || w.is_nonnegative();
    if l1_route {
        let (keep, kind) = if k <= TAIL_EXACT_L1 {
            (best_l1_subset(w, m), ValueKind::Exact)
        } else {
            (greedy_subset(w, m), ValueKind::Upper)
        };
        return Ok(Bounded { value: residual(w, &keep).l1_norm(), kind });
    }
    if k <= TAIL_EXACT_CUT {
        let weights = w.weights();
        let mut best = f64::INFINITY;
        for bits in 0u64..(1 << k) {
            let keep = mask(bits, k);
            let mass = math::sum_compensated((0..k).filter(|&i| keep[i]).map(|i| weights[i]));
            if within_budget(mass, m) {
                best = best.min(cut_or_l1(&residual(w, &keep)).value);
            }
        }
        return Ok(Bounded { value: best, kind: ValueKind::Exact });
    }
    let mut candidates = vec![greedy_subset(w, m)];
    if k <= TAIL_EXACT_L1 {
        candidates.push(best_l1_subset(w, m));
    }
    let value = candidates
        .iter()
        .map(|keep| cut_or_l1(&residual(w, keep)).value)
        .fold(f64::INFINITY, f64::min);
    Ok(Bounded { value, kind: ValueKind::Upper })
}

/// Cut norm of `W·1_{|W| > b}`, the error of truncating at level `b`.
pub fn bounded_approx_error(w: &StepGraphon, b: f64) -> Result<Bounded> {
    if !(b > 0.0) {
        return Err(Error::InvalidArgument("level B must be positive"));
    }
    let excess = w.map_values(|v| if v.abs() > b { v } else { 0.0 });
    if excess.is_zero() {
        return Ok(Bounded { value: 0.0, kind: ValueKind::Exact });
    }
    Ok(cut_or_l1(&excess))
}
