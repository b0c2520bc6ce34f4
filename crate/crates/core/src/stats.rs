//! Two-sample tests used by the sampler's distributional checks.

use alloc::vec::Vec;

use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sample Kolmogorov–Smirnov test with the asymptotic Kolmogorov
/// distribution (conservative for discrete data).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestResult {
    if a.is_empty() || b.is_empty() {
        return TestResult { statistic: 0.0, p_value: 1.0 };
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let sq = math::sqrt(ne);
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    TestResult { statistic: d, p_value: kolmogorov_q(lambda) }
}

/// `Q_KS(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2j²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = math::exp(-2.0 * jf * jf * lambda * lambda);
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Chi-square test of homogeneity for two samples of non-negative integers.
/// Adjacent values are pooled until every expected cell count is at least 5.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (TestResult, usize) {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return (TestResult { statistic: 0.0, p_value: 1.0 }, 0);
    }
    let max = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    let mut ca = alloc::vec![0u64; max + 1];
    let mut cb = alloc::vec![0u64; max + 1];
    for &x in a {
        ca[x as usize] += 1;
    }
    for &x in b {
        cb[x as usize] += 1;
    }
    let total = na + nb;
    let ok = |oa: u64, ob: u64| {
        let t = (oa + ob) as f64;
        t * na.min(nb) / total >= 5.0
    };
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let (mut oa, mut ob) = (0u64, 0u64);
    for v in 0..=max {
        oa += ca[v];
        ob += cb[v];
        if ok(oa, ob) {
            bins.push((oa, ob));
            oa = 0;
            ob = 0;
        }
    }
    if oa + ob > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += oa;
                last.1 += ob;
            }
            None => bins.push((oa, ob)),
        }
    }
    if bins.len() < 2 {
        return (TestResult { statistic: 0.0, p_value: 1.0 }, 0);
    }
    let mut stat = 0.0;
    for &(oa, ob) in &bins {
        let t = (oa + ob) as f64;
        let (ea, eb) = (t * na / total, t * nb / total);
        let (da, db) = (oa as f64 - ea, ob as f64 - eb);
        stat += da * da / ea + db * db / eb;
    }
    let df = bins.len() - 1;
    (TestResult { statistic: stat, p_value: gamma_q(df as f64 / 2.0, stat / 2.0) }, df)
}

/// Regularized upper incomplete gamma function `Q(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..1000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * math::exp(-x + a * math::ln(x) - math::ln_gamma(a))
}

fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    math::exp(-x + a * math::ln(x) - math::ln_gamma(a)) * h
}

/// Median of a sample (mean of the two middle values for even sizes).
pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
