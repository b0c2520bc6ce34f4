//! Step graphons: a finite partition of the support into blocks with positive
//! masses and a symmetric value matrix, implicitly extended by zero to an
//! ambient space of the stated mass.
//!
//! Only block masses matter for every computation in this crate (norms, cut
//! norm, couplings, sampling), so atoms and atomless blocks are not
//! distinguished. The ambient space can always be taken to be `R_+` with
//! Lebesgue measure; the graphon vanishes outside the listed blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::coupling::Coupling;
use crate::error::{Axis, Error, Result};
use crate::math::{self, close_rel, CompensatedSum};

/// Relative tolerance for masses and coupling marginals.
pub const MASS_TOL: f64 = 1e-12;

/// Total mass of a measure space: finite or infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mass {
    Finite(f64),
    Infinite,
}

impl Mass {
    pub fn is_infinite(self) -> bool {
        matches!(self, Mass::Infinite)
    }

    /// `None` for an infinite mass.
    pub fn finite(self) -> Option<f64> {
        match self {
            Mass::Finite(m) => Some(m),
            Mass::Infinite => None,
        }
    }

    fn plus(self, extra: f64) -> Mass {
        match self {
            Mass::Finite(m) => Mass::Finite(m + extra),
            Mass::Infinite => Mass::Infinite,
        }
    }

    pub(crate) fn scaled(self, factor: f64) -> Mass {
        match self {
            Mass::Finite(m) => Mass::Finite(m * factor),
            Mass::Infinite => Mass::Infinite,
        }
    }
}

/// A symmetric step function on a σ-finite measure space.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon {
    weights: Vec<f64>,
    /// Row-major `k x k`.
    values: Vec<f64>,
    ambient: Mass,
}

impl StepGraphon {
    /// Validates and builds a step graphon from nested rows.
    pub fn new(weights: Vec<f64>, values: Vec<Vec<f64>>, ambient: Mass) -> Result<Self> {
        let k = weights.len();
        if values.len() != k {
            return Err(Error::ShapeMismatch {
                blocks: k,
                rows: values.len(),
                cols: values.first().map_or(0, Vec::len),
            });
        }
        if let Some(row) = values.iter().find(|row| row.len() != k) {
            return Err(Error::ShapeMismatch { blocks: k, rows: k, cols: row.len() });
        }
        let flat = values.into_iter().flatten().collect();
        Self::from_flat(weights, flat, ambient)
    }

    /// Validates and builds a step graphon from a row-major value matrix.
    pub fn from_flat(weights: Vec<f64>, values: Vec<f64>, ambient: Mass) -> Result<Self> {
        let k = weights.len();
        if values.len() != k * k {
            let rows = if k == 0 { values.len() } else { values.len() / k };
            return Err(Error::ShapeMismatch { blocks: k, rows, cols: k });
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::NonpositiveWeight { index, weight });
            }
        }
        for i in 0..k {
            for j in 0..k {
                let v = values[i * k + j];
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue { i, j });
                }
                if j > i && v != values[j * k + i] {
                    return Err(Error::AsymmetricValues { i, j });
                }
            }
        }
        let support = math::sum_compensated(weights.iter().copied());
        if let Mass::Finite(ambient) = ambient {
            if !ambient.is_finite() || (ambient < support && !close_rel(ambient, support, MASS_TOL)) {
                return Err(Error::AmbientTooSmall { ambient, support });
            }
        }
        Ok(Self { weights, values, ambient })
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(weights: Vec<f64>, values: Vec<f64>, ambient: Mass) -> Self {
        debug_assert_eq!(values.len(), weights.len() * weights.len());
        Self { weights, values, ambient }
    }

    /// The zero graphon on a space of the given mass (no blocks).
    pub fn zero(ambient: Mass) -> Self {
        Self { weights: Vec::new(), values: Vec::new(), ambient }
    }

    /// A constant `c` on a single block of mass `mass` inside `R_+`.
    pub fn constant(c: f64, mass: f64) -> Result<Self> {
        Self::from_flat(vec![mass], vec![c], Mass::Infinite)
    }

    pub fn block_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row-major value matrix.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.weights.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.weights.len();
        &self.values[i * k..(i + 1) * k]
    }

    pub fn ambient_mass(&self) -> Mass {
        self.ambient
    }

    /// Total mass of the listed blocks.
    pub fn support_mass(&self) -> f64 {
        math::sum_compensated(self.weights.iter().copied())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `max |W|` over the support (0 for the empty graphon).
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// The matrix `A_ij = w_i w_j V_ij` of block-pair integrals.
    pub fn mass_matrix(&self) -> Vec<f64> {
        let k = self.block_count();
        let mut a = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                a.push(self.weights[i] * self.weights[j] * self.values[i * k + j]);
            }
        }
        a
    }

    fn weighted_sum(&self, f: impl Fn(f64) -> f64) -> f64 {
        let k = self.block_count();
        let mut acc = CompensatedSum::new();
        for i in 0..k {
            for j in 0..k {
                acc.add(self.weights[i] * self.weights[j] * f(self.values[i * k + j]));
            }
        }
        acc.value()
    }

    /// `∫∫ W`.
    pub fn integral(&self) -> f64 {
        self.weighted_sum(|v| v)
    }

    /// `∫∫ |W|`.
    pub fn l1_norm(&self) -> f64 {
        self.weighted_sum(f64::abs)
    }

    /// `(∫∫ |W|^p)^{1/p}` for finite `p >= 1`.
    ///
    /// Computed as `m · (∫∫ (|W|/m)^p)^{1/p}` with `m = sup |W|`, so a graphon
    /// with a single nonzero level `c` on total mass 1 gives exactly `|c|`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidP(p));
        }
        let m = self.sup_norm();
        if m == 0.0 {
            return Ok(0.0);
        }
        if p == 1.0 {
            return Ok(self.l1_norm());
        }
        let inner = self.weighted_sum(|v| math::powf(v.abs() / m, p));
        Ok(m * math::powf(inner, 1.0 / p))
    }

    /// `∫∫ |W|^p` for finite `p >= 1`.
    pub fn lp_norm_pow(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidP(p));
        }
        if p == 1.0 {
            return Ok(self.l1_norm());
        }
        Ok(self.weighted_sum(|v| math::powf(v.abs(), p)))
    }

    /// Per-block degrees `D_i = Σ_j w_j V_ij`.
    pub fn degree_vector(&self) -> Vec<f64> {
        let k = self.block_count();
        (0..k)
            .map(|i| math::sum_compensated((0..k).map(|j| self.weights[j] * self.value(i, j))))
            .collect()
    }

    /// Extends by zero onto a space with `extra` more mass.
    ///
    /// A finite positive `extra` appends one zero block of that mass; an
    /// infinite one only raises the ambient mass.
    pub fn trivial_extension(&self, extra: Mass) -> Self {
        match extra {
            Mass::Infinite => Self { ambient: Mass::Infinite, ..self.clone() },
            Mass::Finite(e) if e <= 0.0 => self.clone(),
            Mass::Finite(e) => {
                let k = self.block_count();
                let mut weights = self.weights.clone();
                weights.push(e);
                let mut values = Vec::with_capacity((k + 1) * (k + 1));
                for i in 0..k {
                    values.extend_from_slice(self.row(i));
                    values.push(0.0);
                }
                values.resize((k + 1) * (k + 1), 0.0);
                Self { weights, values, ambient: self.ambient.plus(e) }
            }
        }
    }

    /// `c · W` on the same space.
    pub fn scale_values(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// Same weights and ambient mass, values replaced entrywise by `f(V_ij)`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = f(*v);
        }
        out
    }

    /// `W · 1_{U×U}` for the set of blocks flagged in `keep`.
    pub fn restrict_to(&self, keep: &[bool]) -> Self {
        let k = self.block_count();
        let mut out = self.clone();
        for i in 0..k {
            for j in 0..k {
                if !(keep[i] && keep[j]) {
                    out.values[i * k + j] = 0.0;
                }
            }
        }
        out
    }

    /// Splits block `b` into two blocks of masses `α·w_b` and `(1−α)·w_b`
    /// carrying identical rows (a measure-preserving pull-back).
    pub fn split_block(&self, b: usize, alpha: f64) -> Result<Self> {
        let k = self.block_count();
        if b >= k || !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument("split_block needs a valid block and 0 < alpha < 1"));
        }
        let idx: Vec<usize> = (0..=k).map(|i| if i <= b { i } else { i - 1 }).collect();
        let mut weights = Vec::with_capacity(k + 1);
        for (pos, &i) in idx.iter().enumerate() {
            let w = self.weights[i];
            weights.push(match pos {
                p if p == b => alpha * w,
                p if p == b + 1 => w - alpha * w,
                _ => w,
            });
        }
        let mut values = Vec::with_capacity((k + 1) * (k + 1));
        for &i in &idx {
            for &j in &idx {
                values.push(self.value(i, j));
            }
        }
        Self::from_flat(weights, values, self.ambient)
    }

    /// Averages over groups of blocks: `groups[i]` is the group of block `i`.
    /// Empty groups are dropped.
    pub fn block_average(&self, groups: &[usize]) -> Self {
        let k = self.block_count();
        debug_assert_eq!(groups.len(), k);
        let g = groups.iter().copied().max().map_or(0, |m| m + 1);
        let mut gw = vec![CompensatedSum::new(); g];
        let mut gm = vec![CompensatedSum::new(); g * g];
        for i in 0..k {
            gw[groups[i]].add(self.weights[i]);
            for j in 0..k {
                gm[groups[i] * g + groups[j]]
                    .add(self.weights[i] * self.weights[j] * self.value(i, j));
            }
        }
        let live: Vec<usize> = (0..g).filter(|&a| gw[a].value() > 0.0).collect();
        let weights: Vec<f64> = live.iter().map(|&a| gw[a].value()).collect();
        let mut values = Vec::with_capacity(live.len() * live.len());
        for (ai, &a) in live.iter().enumerate() {
            for (bi, &b) in live.iter().enumerate() {
                values.push(gm[a * g + b].value() / (weights[ai] * weights[bi]));
            }
        }
        // Exact symmetry: floating division of equal numerators by the same
        // product is symmetric already, but copy to be safe against FMA.
        let n = live.len();
        for i in 0..n {
            for j in 0..i {
                values[i * n + j] = values[j * n + i];
            }
        }
        Self::from_parts(weights, values, self.ambient)
    }

    /// Difference `W1^{π1} − W2^{π2}` realized on the cells of a coupling.
    ///
    /// Rows of `coupling` beyond `W1`'s blocks (and columns beyond `W2`'s)
    /// are trivial-extension zero blocks. Cells with positive mass become the
    /// blocks of the result, in row-major order.
    pub fn refine_difference(w1: &Self, w2: &Self, coupling: &Coupling) -> Result<Self> {
        let (k1, k2) = (w1.block_count(), w2.block_count());
        let (rows, cols) = (coupling.rows(), coupling.cols());
        if rows < k1 || cols < k2 {
            return Err(Error::InvalidArgument("coupling smaller than the graphons it couples"));
        }
        for (i, &w) in w1.weights.iter().enumerate() {
            let found = coupling.row_sum(i);
            if !close_rel(found, w, MASS_TOL) {
                return Err(Error::MarginalMismatch { axis: Axis::Row, index: i, expected: w, found });
            }
        }
        for (j, &w) in w2.weights.iter().enumerate() {
            let found = coupling.col_sum(j);
            if !close_rel(found, w, MASS_TOL) {
                return Err(Error::MarginalMismatch {
                    axis: Axis::Column,
                    index: j,
                    expected: w,
                    found,
                });
            }
        }
        let cells: Vec<(usize, usize, f64)> = coupling.support().collect();
        let v1 = |i: usize, i2: usize| if i < k1 && i2 < k1 { w1.value(i, i2) } else { 0.0 };
        let v2 = |j: usize, j2: usize| if j < k2 && j2 < k2 { w2.value(j, j2) } else { 0.0 };
        let n = cells.len();
        let mut values = Vec::with_capacity(n * n);
        for &(i, j, _) in &cells {
            for &(i2, j2, _) in &cells {
                values.push(v1(i, i2) - v2(j, j2));
            }
        }
        let weights: Vec<f64> = cells.iter().map(|c| c.2).collect();
        let total = math::sum_compensated(weights.iter().copied());
        let ambient = if w1.ambient.is_infinite() || w2.ambient.is_infinite() {
            Mass::Infinite
        } else {
            Mass::Finite(total)
        };
        Ok(Self::from_parts(weights, values, ambient))
    }
}
