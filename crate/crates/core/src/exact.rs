//! Step graphons with rational weights and values.
//!
//! Weights are stored as integer numerators over one common denominator and
//! values likewise, so integrals, `L^p` norms with integer `p` and the cut
//! norm reduce to integer sums. Used wherever a quantity has to be checked
//! for exact equality.

use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Signed;

use crate::cutnorm::{self, K_EXACT};
use crate::error::{Error, Result};
use crate::graphon::{Mass, StepGraphon};
use crate::math::ratio_to_f64;

pub type Q = Ratio<i128>;

const OVERFLOW: Error = Error::InvalidArgument("exact arithmetic overflow");

#[derive(Clone, Debug, PartialEq)]
pub struct ExactStepGraphon {
    weight_num: Vec<i64>,
    weight_den: i64,
    /// Row-major `k x k`.
    value_num: Vec<i64>,
    value_den: i64,
    /// `None` is an infinite ambient space.
    ambient: Option<Q>,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> Result<i128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).map(i128::abs).ok_or(OVERFLOW)
}

fn to_i64(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| OVERFLOW)
}

/// Numerators of `xs` over their least common denominator.
fn common_denominator(xs: &[Q]) -> Result<(Vec<i64>, i64)> {
    let mut den = 1i128;
    for x in xs {
        den = lcm(den, *x.denom())?;
    }
    let nums = xs
        .iter()
        .map(|x| x.numer().checked_mul(den / x.denom()).ok_or(OVERFLOW).and_then(to_i64))
        .collect::<Result<Vec<_>>>()?;
    Ok((nums, to_i64(den)?))
}

impl ExactStepGraphon {
    /// Weights `weight_num[i] / weight_den`, values `value_num[ij] / value_den`.
    pub fn from_integers(
        weight_num: Vec<i64>,
        weight_den: i64,
        value_num: Vec<i64>,
        value_den: i64,
        ambient: Option<Q>,
    ) -> Result<Self> {
        let k = weight_num.len();
        if value_num.len() != k * k {
            return Err(Error::ShapeMismatch { blocks: k, rows: value_num.len() / k.max(1), cols: k });
        }
        if weight_den <= 0 || value_den <= 0 {
            return Err(Error::InvalidArgument("denominators must be positive"));
        }
        for (index, &w) in weight_num.iter().enumerate() {
            if w <= 0 {
                return Err(Error::NonpositiveWeight { index, weight: w as f64 / weight_den as f64 });
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if value_num[i * k + j] != value_num[j * k + i] {
                    return Err(Error::AsymmetricValues { i, j });
                }
            }
        }
        let g = Self { weight_num, weight_den, value_num, value_den, ambient };
        let support = g.support_mass()?;
        if let Some(a) = ambient {
            if a < support {
                return Err(Error::AmbientTooSmall { ambient: ratio_to_f64(&a), support: ratio_to_f64(&support) });
            }
        }
        Ok(g)
    }

    /// Builds from rational weights and a row-major rational value matrix.
    pub fn from_ratios(weights: &[Q], values: &[Q], ambient: Option<Q>) -> Result<Self> {
        let (wn, wd) = common_denominator(weights)?;
        let (vn, vd) = common_denominator(values)?;
        Self::from_integers(wn, wd, vn, vd, ambient)
    }

    /// Block-diagonal sum: the parts are placed on disjoint blocks.
    pub fn direct_sum(parts: &[&Self], ambient: Option<Q>) -> Result<Self> {
        let mut wd = 1i128;
        let mut vd = 1i128;
        for p in parts {
            wd = lcm(wd, p.weight_den as i128)?;
            vd = lcm(vd, p.value_den as i128)?;
        }
        let k: usize = parts.iter().map(|p| p.block_count()).sum();
        let mut weight_num = Vec::with_capacity(k);
        let mut value_num = alloc::vec![0i64; k * k];
        let mut offset = 0;
        for p in parts {
            let (fw, fv) = (wd / p.weight_den as i128, vd / p.value_den as i128);
            let kp = p.block_count();
            for i in 0..kp {
                weight_num.push(to_i64((p.weight_num[i] as i128).checked_mul(fw).ok_or(OVERFLOW)?)?);
                for j in 0..kp {
                    let v = (p.value_num[i * kp + j] as i128).checked_mul(fv).ok_or(OVERFLOW)?;
                    value_num[(offset + i) * k + offset + j] = to_i64(v)?;
                }
            }
            offset += kp;
        }
        Self::from_integers(weight_num, to_i64(wd)?, value_num, to_i64(vd)?, ambient)
    }

    /// Multiplies every weight by `weight_factor` and every value by
    /// `value_factor`. A finite ambient mass scales with the weights.
    pub fn rescale(&self, weight_factor: Q, value_factor: Q) -> Result<Self> {
        if !weight_factor.is_positive() {
            return Err(Error::InvalidArgument("weight factor must be positive"));
        }
        let weights: Vec<Q> = (0..self.block_count()).map(|i| self.weight(i) * weight_factor).collect();
        let values: Vec<Q> = self.value_num.iter().map(|&v| Q::new(v as i128, self.value_den as i128) * value_factor).collect();
        Self::from_ratios(&weights, &values, self.ambient.map(|a| a * weight_factor))
    }

    pub fn block_count(&self) -> usize {
        self.weight_num.len()
    }

    pub fn weight(&self, i: usize) -> Q {
        Q::new(self.weight_num[i] as i128, self.weight_den as i128)
    }

    pub fn value(&self, i: usize, j: usize) -> Q {
        Q::new(self.value_num[i * self.block_count() + j] as i128, self.value_den as i128)
    }

    /// Integer numerators of the values, over [`Self::value_den`].
    pub fn value_numerators(&self) -> &[i64] {
        &self.value_num
    }

    pub fn value_den(&self) -> i64 {
        self.value_den
    }

    pub fn ambient(&self) -> Option<Q> {
        self.ambient
    }

    pub fn support_mass(&self) -> Result<Q> {
        let mut s = 0i128;
        for &w in &self.weight_num {
            s = s.checked_add(w as i128).ok_or(OVERFLOW)?;
        }
        Ok(Q::new(s, self.weight_den as i128))
    }

    /// `Σ_ij wn_i wn_j f(vn_ij)` over `wd² · scale` with checked arithmetic.
    fn weighted(&self, f: impl Fn(i64) -> Option<i128>, scale: i128) -> Result<Q> {
        let k = self.block_count();
        let mut total = 0i128;
        for i in 0..k {
            let mut row = 0i128;
            for j in 0..k {
                let v = f(self.value_num[i * k + j]).ok_or(OVERFLOW)?;
                if v != 0 {
                    let t = (self.weight_num[j] as i128).checked_mul(v).ok_or(OVERFLOW)?;
                    row = row.checked_add(t).ok_or(OVERFLOW)?;
                }
            }
            let t = (self.weight_num[i] as i128).checked_mul(row).ok_or(OVERFLOW)?;
            total = total.checked_add(t).ok_or(OVERFLOW)?;
        }
        let wd = self.weight_den as i128;
        let den = wd.checked_mul(wd).and_then(|d| d.checked_mul(scale)).ok_or(OVERFLOW)?;
        Ok(Q::new(total, den))
    }

    pub fn integral(&self) -> Result<Q> {
        self.weighted(|v| Some(v as i128), self.value_den as i128)
    }

    pub fn l1_norm(&self) -> Result<Q> {
        self.lp_norm_pow(1)
    }

    /// `Σ w_i w_j |V_ij|^p` for an integer `p ≥ 1`.
    pub fn lp_norm_pow(&self, p: u32) -> Result<Q> {
        if p == 0 {
            return Err(Error::InvalidP(0.0));
        }
        let scale = (self.value_den as i128).checked_pow(p).ok_or(OVERFLOW)?;
        self.weighted(|v| (v as i128).abs().checked_pow(p), scale)
    }

    /// `Σ_{|V_ij| > b} w_i w_j |V_ij|`.
    pub fn tail_integral(&self, b: Q) -> Result<Q> {
        let vd = self.value_den as i128;
        self.weighted(|v| Some(if Q::new((v as i128).abs(), vd) > b { (v as i128).abs() } else { 0 }), vd)
    }

    pub fn sup_abs_value(&self) -> Q {
        let m = self.value_num.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        Q::new(m as i128, self.value_den as i128)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.value_num.iter().all(|&v| v >= 0)
    }

    /// Exact cut norm for at most [`K_EXACT`] blocks.
    pub fn cut_norm(&self) -> Result<Q> {
        self.cut_norm_with_limit(K_EXACT)
    }

    pub fn cut_norm_with_limit(&self, limit: usize) -> Result<Q> {
        let k = self.block_count();
        if k > limit || k >= 63 {
            return Err(Error::TooManyBlocks { blocks: k, limit });
        }
        let mut a = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let wij = (self.weight_num[i] as i128) * (self.weight_num[j] as i128);
                a.push(wij.checked_mul(self.value_num[i * k + j] as i128).ok_or(OVERFLOW)?);
            }
        }
        // Sums of up to k^2 entries must stay representable.
        a.iter().try_fold(0i128, |s, x| s.checked_add(x.abs())).ok_or(OVERFLOW)?;
        let v = cutnorm::cut_matrix_exact(&a, k).value;
        let wd = self.weight_den as i128;
        let den = wd.checked_mul(wd).and_then(|d| d.checked_mul(self.value_den as i128)).ok_or(OVERFLOW)?;
        Ok(Q::new(v, den))
    }

    /// Nearest floating-point step graphon.
    pub fn to_step_graphon(&self) -> StepGraphon {
        let wd = self.weight_den as f64;
        let vd = self.value_den as f64;
        let weights = self
            .weight_num
            .iter()
            .map(|&w| if self.weight_den < (1 << 53) && w.unsigned_abs() < (1 << 53) { w as f64 / wd } else { ratio_to_f64(&Q::new(w as i128, self.weight_den as i128)) })
            .collect();
        let values = self.value_num.iter().map(|&v| v as f64 / vd).collect();
        let ambient = match self.ambient {
            None => Mass::Infinite,
            Some(a) => Mass::Finite(ratio_to_f64(&a)),
        };
        StepGraphon::from_parts(weights, values, ambient)
    }
}
