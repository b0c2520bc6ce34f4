//! Worked examples: constructors for the sequences and counterexamples of the
//! theory, each with machine-checkable claims.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::Rng;

use crate::coupling::Coupling;
use crate::cutnorm::{self, K_EXACT};
use crate::error::{Error, Result};
use crate::exact::{ExactStepGraphon, Q};
use crate::graphon::{Mass, StepGraphon};
use crate::math::{self, derive_seed, Stream};
use crate::metrics::{self, Metric, Mode, Options};
use crate::ops;
use crate::spectral;

/// Depth caps per constructor.
pub const QUASIRANDOM_MAX: usize = 3;
pub const EA1_MAX: usize = 2;
pub const EA3_MAX: usize = 3;
pub const RADEMACHER_MAX: usize = 12;
pub const ENOTUI_MAX: usize = 3;
/// Largest `n` that `verify enotui` realizes; `n = 3` needs a dense
/// eigenvalue problem of a few thousand vertices.
pub const ENOTUI_VERIFY_MAX: usize = 2;

const PRIME_SEARCH_LIMIT: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "==",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    fn holds_exact(self, v: &Q, b: &Q) -> bool {
        match self {
            Relation::Eq => v == b,
            Relation::Le => v <= b,
            Relation::Lt => v < b,
            Relation::Ge => v >= b,
            Relation::Gt => v > b,
        }
    }

    fn holds_float(self, v: f64, b: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (v - b).abs() <= tol * b.abs().max(1.0),
            Relation::Le => v <= b + tol,
            Relation::Lt => v < b,
            Relation::Ge => v >= b - tol,
            Relation::Gt => v > b,
        }
    }
}

/// How a claim's value was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CertificateKind {
    /// Rational arithmetic.
    Exact,
    /// Exact cut-norm enumeration.
    Enumeration,
    /// Eigenvalue mixing certificate (a rigorous upper bound).
    Spectral,
    /// Floating point, compared with the given tolerance.
    Float(f64),
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Exact => "EXACT",
            CertificateKind::Enumeration => "ENUMERATION",
            CertificateKind::Spectral => "SPECTRAL",
            CertificateKind::Float(_) => "FLOAT",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub label: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub kind: CertificateKind,
    pub holds: bool,
    /// `value relation bound` in rational form, for exact claims.
    pub exact: Option<String>,
}

impl Claim {
    pub fn exact(label: impl Into<String>, value: Q, relation: Relation, bound: Q, kind: CertificateKind) -> Self {
        Claim {
            label: label.into(),
            value: math::ratio_to_f64(&value),
            bound: math::ratio_to_f64(&bound),
            relation,
            kind,
            holds: relation.holds_exact(&value, &bound),
            exact: Some(format!("{value} {} {bound}", relation.as_str())),
        }
    }

    pub fn float(label: impl Into<String>, value: f64, relation: Relation, bound: f64, kind: CertificateKind) -> Self {
        let tol = match kind {
            CertificateKind::Float(t) => t,
            _ => 0.0,
        };
        Claim {
            label: label.into(),
            value,
            bound,
            relation,
            kind,
            holds: value.is_finite() && relation.holds_float(value, bound, tol),
            exact: None,
        }
    }

    fn flag(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        let mut c = Claim::float(label, v, Relation::Eq, 1.0, CertificateKind::Exact);
        c.exact = Some(String::from(if ok { "true" } else { "false" }));
        c
    }
}

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

fn pow2(e: i32) -> Q {
    if e >= 0 {
        Q::from_integer(1i128 << e)
    } else {
        Q::new(1, 1i128 << -e)
    }
}

fn check_depth(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument("example index below its minimum"));
    }
    if n > max {
        return Err(Error::NTooLarge { n, max });
    }
    Ok(())
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Quadratic residues of the nonzero classes mod `q`: `res[j]` for `0 < j < q`.
fn residues(q: usize) -> Vec<bool> {
    let mut res = vec![false; q];
    for x in 1..q {
        res[x * x % q] = true;
    }
    res[0] = false;
    res
}

/// Adjacency matrix of the Paley graph on `Z_q`, row-major.
pub fn paley_adjacency(q: u64) -> Result<Vec<u8>> {
    if !(is_prime(q) && q % 4 == 1) {
        return Err(Error::InvalidArgument("Paley graphs need a prime q = 1 mod 4"));
    }
    let q = q as usize;
    let res = residues(q);
    let mut a = vec![0u8; q * q];
    for i in 0..q {
        for j in 0..q {
            a[i * q + j] = res[(j + q - i) % q] as u8;
        }
    }
    Ok(a)
}

/// The `2q × 2q` matrix `[[A, J−A], [J−A, A]]` over a Paley adjacency `A`.
pub fn doubled_paley(q: u64) -> Result<Vec<u8>> {
    let a = paley_adjacency(q)?;
    let q = q as usize;
    let n = 2 * q;
    let mut m = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            let x = a[(i % q) * q + j % q];
            m[i * n + j] = if (i < q) == (j < q) { x } else { 1 - x };
        }
    }
    Ok(m)
}

/// Certified bound on `‖U − 1/2‖_□` for the doubled Paley graphon on
/// `2q` equal steps.
///
/// `M − J/2` has spectrum `{0} ∪ spec(2A − J)` and `2A − J` is circulant, so
/// the spectral radius comes from one cosine transform of its first row.
pub fn paley_certificate(q: u64) -> Result<f64> {
    if !(is_prime(q) && q % 4 == 1) {
        return Err(Error::InvalidArgument("Paley graphs need a prime q = 1 mod 4"));
    }
    let qs = q as usize;
    let res = residues(qs);
    let row: Vec<f64> = (0..qs).map(|j| if j == 0 { -1.0 } else if res[j] { 1.0 } else { -1.0 }).collect();
    Ok(spectral::symmetric_circulant_spectral_radius(&row) / (2 * qs) as f64)
}

/// Smallest prime `q ≡ 1 (mod 4)`, `q ≥ 5`, whose certificate is below `bound`.
pub fn smallest_paley_prime(bound: f64) -> Result<u64> {
    let mut q = 5;
    while q <= PRIME_SEARCH_LIMIT {
        // (1 + √q) / 2q is the exact spectral value; certify only plausible q.
        if is_prime(q) && (1.0 + math::sqrt(q as f64)) / (2.0 * q as f64) < bound && paley_certificate(q)? < bound {
            return Ok(q);
        }
        q += 4;
    }
    Err(Error::InvalidArgument("no Paley prime below the search limit"))
}

/// Prime used for `U_n`: certificate below `4^{-n}`.
pub fn quasirandom_prime(n: usize) -> Result<u64> {
    smallest_paley_prime(math::powf(4.0, -(n as f64)))
}

/// Prime used for `V_n = 2U − 1`: `‖V_n‖_□ ≤ 2·cert < 2^{-n}`.
pub fn signed_prime(n: usize) -> Result<u64> {
    smallest_paley_prime(math::powf(2.0, -(n as f64) - 1.0))
}

/// The `{0,1}`-valued doubled Paley graphon on `[0,1]` for a given prime.
pub fn doubled_paley_graphon(q: u64) -> Result<ExactStepGraphon> {
    let m = doubled_paley(q)?;
    let n = 2 * q as usize;
    ExactStepGraphon::from_integers(vec![1; n], n as i64, m.iter().map(|&x| x as i64).collect(), 1, Some(Q::one()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Quasirandom {
    pub q: u64,
    pub graphon: ExactStepGraphon,
    /// Certified upper bound on `‖U − 1/2‖_□`.
    pub certificate: f64,
}

/// `U_n`: `{0,1}`-valued, equal steps, integral exactly `1/2`, and
/// `‖U_n − 1/2‖_□ < 4^{-n}`.
pub fn quasirandom_half(n: usize) -> Result<Quasirandom> {
    check_depth(n, 1, QUASIRANDOM_MAX)?;
    let q = quasirandom_prime(n)?;
    Ok(Quasirandom { q, graphon: doubled_paley_graphon(q)?, certificate: paley_certificate(q)? })
}

/// `V_n = 2U − 1` on `[0,1]` with the prime from [`signed_prime`].
pub fn signed_quasirandom(n: usize) -> Result<(ExactStepGraphon, f64)> {
    check_depth(n, 1, EA3_MAX)?;
    let q = signed_prime(n)?;
    let m = doubled_paley(q)?;
    let k = 2 * q as usize;
    let v = ExactStepGraphon::from_integers(vec![1; k], k as i64, m.iter().map(|&x| 2 * x as i64 - 1).collect(), 1, None)?;
    Ok((v, 2.0 * paley_certificate(q)?))
}

/// `W_n` of the non-converging Cauchy sequence: `W_0 = 1` and each nonzero
/// square of `W_n` carries a scaled copy of `2^{n+1} U_{n+1}`. Values lie in
/// `{0, 2^n}` and `∫W_n = 1`.
pub fn ea1_sequence(n: usize) -> Result<ExactStepGraphon> {
    check_depth(n, 0, EA1_MAX)?;
    let mut k = 1usize;
    let mut values = vec![1i64];
    for step in 1..=n {
        let q = quasirandom_prime(step)?;
        let u = doubled_paley(q)?;
        let m = 2 * q as usize;
        let kk = k * m;
        let mut next = vec![0i64; kk * kk];
        for i in 0..k {
            for j in 0..k {
                let w = values[i * k + j];
                if w == 0 {
                    continue;
                }
                for a in 0..m {
                    let row = (i * m + a) * kk + j * m;
                    for b in 0..m {
                        next[row + b] = 2 * w * u[a * m + b] as i64;
                    }
                }
            }
        }
        k = kk;
        values = next;
    }
    ExactStepGraphon::from_integers(vec![1; k], k as i64, values, 1, Some(Q::one()))
}

/// `W_N = Σ_{n ≤ N} V_n` with `V_n` placed on its own unit interval; the
/// ambient space is the half-line.
pub fn ea3_sequence(n: usize) -> Result<ExactStepGraphon> {
    check_depth(n, 1, EA3_MAX)?;
    let parts = (1..=n).map(|i| signed_quasirandom(i).map(|x| x.0)).collect::<Result<Vec<_>>>()?;
    ExactStepGraphon::direct_sum(&parts.iter().collect::<Vec<_>>(), None)
}

/// `2^{-2n}` times `V_n` stretched by `2^{2n}`: steps scaled by `2^n`,
/// values `±2^{-2n}`.
pub fn ea3p_block(n: usize) -> Result<ExactStepGraphon> {
    let (v, _) = signed_quasirandom(n)?;
    v.rescale(pow2(n as i32), pow2(-2 * n as i32))
}

/// Partial sums of the rescaled blocks from [`ea3p_block`], placed on
/// disjoint intervals of the half-line.
pub fn ea3p_sequence(n: usize) -> Result<ExactStepGraphon> {
    check_depth(n, 1, EA3_MAX)?;
    let parts = (1..=n).map(ea3p_block).collect::<Result<Vec<_>>>()?;
    ExactStepGraphon::direct_sum(&parts.iter().collect::<Vec<_>>(), None)
}

/// Unit atoms carrying `1` and `−1`.
pub fn edp_pair() -> (StepGraphon, StepGraphon) {
    let a = StepGraphon::new(vec![1.0], vec![vec![1.0]], Mass::Finite(1.0)).expect("valid atom");
    let b = StepGraphon::new(vec![1.0], vec![vec![-1.0]], Mass::Finite(1.0)).expect("valid atom");
    (a, b)
}

/// `n^{-2}` on `[0, n]²` inside the half-line.
pub fn epconv_graphon(n: usize) -> Result<ExactStepGraphon> {
    check_depth(n, 1, usize::MAX)?;
    let n = n as i64;
    let sq = n.checked_mul(n).ok_or(Error::NTooLarge { n: n as usize, max: 3_037_000_499 })?;
    ExactStepGraphon::from_integers(vec![n], 1, vec![1], sq, None)
}

/// Same graphon as [`epconv_graphon`], used as a uniformly integrable
/// sequence without convergent subsequences.
pub fn ef_graphon(n: usize) -> Result<ExactStepGraphon> {
    epconv_graphon(n)
}

/// `h_n(x)` on `0 < x < 1/2 < y < 1` (and symmetrically), with `h_n` the
/// sign of `sin(2^n π x)`. The half `[0, 1/2]` is cut into `2^n` equal steps
/// followed by one step for `(1/2, 1]`.
pub fn rademacher_graphon(n: usize) -> Result<ExactStepGraphon> {
    check_depth(n, 1, RADEMACHER_MAX)?;
    let half = 1usize << n;
    let k = half + 1;
    let mut weights = vec![1i64; half];
    weights.push(half as i64);
    let mut values = vec![0i64; k * k];
    for b in 0..half {
        let s = if (b / 2) % 2 == 0 { 1 } else { -1 };
        values[b * k + half] = s;
        values[half * k + b] = s;
    }
    ExactStepGraphon::from_integers(weights, 2 * half as i64, values, 1, Some(Q::one()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enotui {
    pub n: usize,
    /// Vertices of the realized `G(N, 1/n)`.
    pub vertices: usize,
    pub edges: u64,
    /// `n·V_n`: values in `{0, n}` on `N` equal steps of `[0,1]`.
    pub graphon: ExactStepGraphon,
    /// Certified bound on `‖V_n − 1/n‖_□` from the realized matrix.
    pub certificate: f64,
    pub attempts: usize,
}

fn realize_gnp(n: usize, p: f64, seed: u64) -> (Vec<u8>, u64) {
    let mut rng = math::rng(seed, Stream::GraphRealization);
    let mut a = vec![0u8; n * n];
    let mut edges = 0;
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                a[i * n + j] = 1;
                a[j * n + i] = 1;
                edges += 1;
            }
        }
    }
    (a, edges)
}

/// `n·V_n` with `V_n` the adjacency graphon of one realization of
/// `G(N, 1/n)` whose certificate `‖V_n − 1/n‖_□ < 4^{-n}` holds.
///
/// `N` starts from the spectral scale `(2·√(p(1−p))·4^n)²` and grows by a
/// quarter until a realization certifies. Deterministic in `seed`.
pub fn enotui_family(n: usize, seed: u64) -> Result<Enotui> {
    check_depth(n, 1, ENOTUI_MAX)?;
    let p = 1.0 / n as f64;
    let target = math::powf(4.0, -(n as f64));
    let scale = 2.0 * math::sqrt(p * (1.0 - p)) / target;
    let mut size = ((1.15 * scale * scale) as usize).max(5);
    for attempt in 0..32 {
        let (a, edges) = realize_gnp(size, p, derive_seed(seed, attempt as u64));
        let cert = cutnorm::mixing_certificate(&a, size, p)?;
        if cert < target {
            let values = a.iter().map(|&x| x as i64 * n as i64).collect();
            let graphon = ExactStepGraphon::from_integers(vec![1; size], size as i64, values, 1, Some(Q::one()))?;
            return Ok(Enotui { n, vertices: size, edges, graphon, certificate: cert, attempts: attempt + 1 });
        }
        size += size / 4 + 1;
    }
    Err(Error::InvalidArgument("no certified realization found"))
}

/// `n^{-1}` times `V_n` stretched by `n`: `‖W_n‖₁ = 1`, `|W_n| ≤ 1/n`.
pub fn eurt_family(n: usize) -> Result<StepGraphon> {
    let (v, _) = signed_quasirandom(n)?;
    Ok(ops::stretch(&v.to_step_graphon(), n as f64)?.scale_values(1.0 / n as f64))
}

/// `V_n` stretched by `n`: bounded, `‖·‖₁ = n`, cut norm below `n 2^{-n}`.
pub fn enotui2_family(n: usize) -> Result<StepGraphon> {
    let (v, _) = signed_quasirandom(n)?;
    ops::stretch(&v.to_step_graphon(), n as f64)
}

/// A constructed example, exact when its steps and values are rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Built {
    Exact(ExactStepGraphon),
    Float(StepGraphon),
}

impl Built {
    pub fn to_step_graphon(&self) -> StepGraphon {
        match self {
            Built::Exact(e) => e.to_step_graphon(),
            Built::Float(f) => f.clone(),
        }
    }
}

/// Names accepted by [`build`].
pub const EXAMPLE_NAMES: &[&str] =
    &["toy", "quasirandom", "ea1", "ea3", "ea3p", "edp", "epconv", "ef", "eweakbad", "enotui", "enotui2", "eurt"];

/// Names accepted by [`verify`].
pub const VERIFY_NAMES: &[&str] =
    &["toy", "quasirandom", "ea1", "ea3", "ea3p", "edp", "epconv", "ef", "eweakbad", "eurt", "enotui", "enotui2"];

/// Builds the named example at index `n`. For `edp`, `n = 1` and `n = 2`
/// select the two atoms.
pub fn build(name: &str, n: usize, seed: u64) -> Result<Built> {
    Ok(match name {
        "toy" => Built::Exact(doubled_paley_graphon(5)?),
        "quasirandom" => Built::Exact(quasirandom_half(n)?.graphon),
        "ea1" => Built::Exact(ea1_sequence(n)?),
        "ea3" => Built::Exact(ea3_sequence(n)?),
        "ea3p" => Built::Exact(ea3p_sequence(n)?),
        "edp" => {
            let (a, b) = edp_pair();
            match n {
                1 => Built::Float(a),
                2 => Built::Float(b),
                _ => return Err(Error::InvalidArgument("edp has members 1 and 2")),
            }
        }
        "epconv" => Built::Exact(epconv_graphon(n)?),
        "ef" => Built::Exact(ef_graphon(n)?),
        "eweakbad" => Built::Exact(rademacher_graphon(n)?),
        "enotui" => Built::Exact(enotui_family(n, seed)?.graphon),
        "enotui2" => Built::Float(enotui2_family(n)?),
        "eurt" => Built::Float(eurt_family(n)?),
        _ => return Err(Error::InvalidArgument("unknown example")),
    })
}

/// Runs the claim records of the named example.
pub fn verify(name: &str, seed: u64) -> Result<Vec<Claim>> {
    match name {
        "toy" => verify_toy(),
        "quasirandom" => verify_quasirandom(),
        "ea1" => verify_ea1(),
        "ea3" => verify_ea3(),
        "ea3p" => verify_ea3p(),
        "edp" => verify_edp(),
        "epconv" => verify_epconv(),
        "ef" => verify_ef(),
        "eweakbad" => verify_eweakbad(),
        "eurt" => verify_eurt(),
        "enotui" => verify_enotui(seed),
        "enotui2" => verify_enotui2(),
        _ => Err(Error::InvalidArgument("unknown example")),
    }
}

/// `U − c` as an exact graphon with the same steps.
fn shifted(u: &ExactStepGraphon, c: Q) -> Result<ExactStepGraphon> {
    let k = u.block_count();
    let weights: Vec<Q> = (0..k).map(|i| u.weight(i)).collect();
    let mut values = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            values.push(u.value(i, j) - c);
        }
    }
    ExactStepGraphon::from_ratios(&weights, &values, u.ambient())
}

fn value_set_claim(label: String, g: &ExactStepGraphon, allowed: &[Q]) -> Claim {
    let den = g.value_den() as i128;
    let ok = g.value_numerators().iter().all(|&v| allowed.contains(&q(v as i128, den)));
    Claim::flag(label, ok)
}

fn verify_toy() -> Result<Vec<Claim>> {
    let u = doubled_paley_graphon(5)?;
    let cert = paley_certificate(5)?;
    let exact = shifted(&u, q(1, 2))?.cut_norm()?;
    // Doubling a step of the Cauchy sequence: W_0 − 2U = −2(U − 1/2).
    let step = exact * Q::from_integer(2);
    Ok(vec![
        Claim::exact("integral(U_q5) == 1/2", u.integral()?, Relation::Eq, q(1, 2), CertificateKind::Exact),
        Claim::float(
            "cut(U_q5 - 1/2) <= spectral certificate",
            math::ratio_to_f64(&exact),
            Relation::Le,
            cert,
            CertificateKind::Enumeration,
        ),
        Claim::float("cut(W_0 - W_1) <= 2 certificate, q = 5", math::ratio_to_f64(&step), Relation::Le, 2.0 * cert, CertificateKind::Enumeration),
    ])
}

fn verify_quasirandom() -> Result<Vec<Claim>> {
    let mut claims = verify_toy()?;
    for n in 1..=QUASIRANDOM_MAX {
        let u = quasirandom_half(n)?;
        let g = &u.graphon;
        claims.push(Claim::exact(format!("integral(U_{n}) == 1/2, q = {}", u.q), g.integral()?, Relation::Eq, q(1, 2), CertificateKind::Exact));
        claims.push(value_set_claim(format!("U_{n} is 0/1-valued"), g, &[Q::zero(), Q::one()]));
        claims.push(Claim::float(
            format!("cut(U_{n} - 1/2) < 4^-{n}"),
            u.certificate,
            Relation::Lt,
            math::powf(4.0, -(n as f64)),
            CertificateKind::Spectral,
        ));
    }
    Ok(claims)
}

fn verify_ea1() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let w0 = ea1_sequence(0)?;
    claims.push(Claim::flag("W_0 is the constant 1 on [0,1]", w0.block_count() == 1 && w0.value(0, 0) == Q::one()));
    for n in 0..=EA1_MAX {
        let w = if n == 0 { w0.clone() } else { ea1_sequence(n)? };
        claims.push(Claim::exact(format!("integral(W_{n}) == 1"), w.integral()?, Relation::Eq, Q::one(), CertificateKind::Exact));
        claims.push(value_set_claim(format!("W_{n} takes values in {{0, 2^{n}}}"), &w, &[Q::zero(), pow2(n as i32)]));
        if n >= 1 {
            let bound = 2.0 * paley_certificate(quasirandom_prime(n)?)?;
            claims.push(Claim::float(
                format!("cut(W_{} - W_{n}) < 2^-{}", n - 1, n - 1),
                bound,
                Relation::Lt,
                math::powf(2.0, -((n - 1) as f64)),
                CertificateKind::Spectral,
            ));
        }
    }
    claims.extend(verify_toy()?);
    Ok(claims)
}

fn verify_ea3() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    for n in 1..=EA3_MAX {
        let w = ea3_sequence(n)?;
        let (v, cut_bound) = signed_quasirandom(n)?;
        claims.push(Claim::exact(format!("l1(W_{n}) == {n}"), w.l1_norm()?, Relation::Eq, Q::from_integer(n as i128), CertificateKind::Exact));
        claims.push(Claim::exact(format!("integral(V_{n}) == 0"), v.integral()?, Relation::Eq, Q::zero(), CertificateKind::Exact));
        claims.push(value_set_claim(format!("V_{n} is +-1-valued"), &v, &[Q::one(), -Q::one()]));
        claims.push(Claim::float(
            format!("cut(W_{n} - W_{}) = cut(V_{n}) < 2^-{n}", n - 1),
            cut_bound,
            Relation::Lt,
            math::powf(2.0, -(n as f64)),
            CertificateKind::Spectral,
        ));
    }
    Ok(claims)
}

fn verify_ea3p() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    for n in 1..=EA3_MAX {
        let block = ea3p_block(n)?;
        for p in 1..=3u32 {
            let expected = pow2(2 * (1 - p as i32) * n as i32);
            claims.push(Claim::exact(
                format!("integral |V~_{n}|^{p} == 2^(2(1-{p}){n})"),
                block.lp_norm_pow(p)?,
                Relation::Eq,
                expected,
                CertificateKind::Exact,
            ));
        }
        let f = block.to_step_graphon();
        let p = 1.5;
        claims.push(Claim::float(
            format!("integral |V~_{n}|^1.5 == 2^(-{n})"),
            f.lp_norm_pow(p)?,
            Relation::Eq,
            math::powf(2.0, 2.0 * (1.0 - p) * n as f64),
            CertificateKind::Float(1e-12),
        ));
        let (_, cut_bound) = signed_quasirandom(n)?;
        claims.push(Claim::float(format!("cut(V~_{n}) = cut(V_{n}) < 2^-{n}"), cut_bound, Relation::Lt, math::powf(2.0, -(n as f64)), CertificateKind::Spectral));
    }
    let w = ea3p_sequence(EA3_MAX)?;
    let mut total = Q::zero();
    for n in 1..=EA3_MAX {
        total += pow2(2 * (1 - 2) * n as i32);
    }
    claims.push(Claim::exact(format!("integral |W_{EA3_MAX}|^2 == sum of block profiles"), w.lp_norm_pow(2)?, Relation::Eq, total, CertificateKind::Exact));
    claims.push(Claim::exact(format!("l1(W_{EA3_MAX}) == {EA3_MAX}"), w.l1_norm()?, Relation::Eq, Q::from_integer(EA3_MAX as i128), CertificateKind::Exact));
    Ok(claims)
}

fn verify_edp() -> Result<Vec<Claim>> {
    let (a, b) = edp_pair();
    let mut claims = Vec::new();
    let id = Coupling::new(vec![1.0], vec![1.0], vec![1.0])?;
    for p in [1.0, 1.5, 2.0, 3.0] {
        let (v, _) = metrics::coupling_objective(&a, &b, &id, Metric::Lp(p), K_EXACT)?;
        claims.push(Claim::float(format!("identity coupling, p = {p}: value == 2"), v, Relation::Eq, 2.0, CertificateKind::Float(0.0)));
    }
    let eq = metrics::equalize_masses(&a, &b);
    let swap = Coupling::from_assignment(&[1, 0], eq.w1.weights(), eq.w2.weights())?;
    for p in [1.5, 2.0, 3.0] {
        let (v, _) = metrics::coupling_objective(&eq.w1, &eq.w2, &swap, Metric::Lp(p), K_EXACT)?;
        claims.push(Claim::float(
            format!("extended, transposition, p = {p}: value == 2^(1/{p})"),
            v,
            Relation::Eq,
            math::powf(2.0, 1.0 / p),
            CertificateKind::Float(1e-12),
        ));
    }
    let opts = Options::with_mode(Mode::Both, 0);
    let d1 = metrics::delta_1(&a, &b, &opts)?;
    claims.push(Claim::float("delta_1 optimizer on the extension <= 2", d1.value, Relation::Le, 2.0, CertificateKind::Float(1e-12)));
    claims.push(Claim::flag("delta_p rejects the signed pair", metrics::delta_p(&a, &b, 2.0, &opts) == Err(Error::NegativeGraphon)));
    Ok(claims)
}

fn verify_epconv() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let zero = StepGraphon::zero(Mass::Infinite);
    for n in 1..=10usize {
        let w = epconv_graphon(n)?;
        claims.push(Claim::exact(format!("cut(W_{n}) == 1"), w.cut_norm()?, Relation::Eq, Q::one(), CertificateKind::Enumeration));
        let f = w.to_step_graphon();
        claims.push(Claim::float(
            format!("l2(W_{n}) == {n}^-1"),
            f.lp_norm(2.0)?,
            Relation::Eq,
            1.0 / n as f64,
            CertificateKind::Float(1e-12),
        ));
        let d = metrics::cut_distance(&f, &zero, &Options::default())?;
        claims.push(Claim::float(format!("dcut(W_{n}, 0) == 1"), d.value, Relation::Eq, 1.0, CertificateKind::Float(1e-12)));
    }
    Ok(claims)
}

fn verify_ef() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let mut family = Vec::new();
    for n in 1..=10usize {
        let w = ef_graphon(n)?;
        claims.push(Claim::exact(format!("l1(W_{n}) == 1"), w.l1_norm()?, Relation::Eq, Q::one(), CertificateKind::Exact));
        claims.push(Claim::exact(format!("sup|W_{n}| == 1/{}", n * n), w.sup_abs_value(), Relation::Eq, q(1, (n * n) as i128), CertificateKind::Exact));
        family.push(w.to_step_graphon());
    }
    let prof = ops::ui_profile(&family, 1.0)?;
    claims.push(Claim::float("sup over family of l1 <= 1", prof.sup_l1, Relation::Le, 1.0, CertificateKind::Float(1e-12)));
    claims.push(Claim::float("sup over family of tail integral above 1 == 0", prof.sup_tail, Relation::Eq, 0.0, CertificateKind::Float(0.0)));
    Ok(claims)
}

fn verify_eweakbad() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let w2 = rademacher_graphon(2)?.cut_norm()?;
    for n in 1..=4usize {
        let w = rademacher_graphon(n)?;
        let cut = w.cut_norm()?;
        claims.push(Claim::exact(format!("cut(W_{n}) >= 1/8"), cut, Relation::Ge, q(1, 8), CertificateKind::Enumeration));
        if n >= 2 {
            claims.push(Claim::exact(format!("integral(W_{n}) == 0"), w.integral()?, Relation::Eq, Q::zero(), CertificateKind::Exact));
            claims.push(Claim::exact(format!("cut(W_{n}) == cut(W_2)"), cut, Relation::Eq, w2, CertificateKind::Enumeration));
            // Averaging over the halves [0,1/2] and (1/2,1] leaves nothing.
            let k = w.block_count();
            let half = k - 1;
            let mut cross = Q::zero();
            for b in 0..half {
                cross += w.weight(b) * w.value(b, half);
            }
            claims.push(Claim::exact(format!("half-block average of W_{n} == 0"), cross, Relation::Eq, Q::zero(), CertificateKind::Exact));
        }
    }
    Ok(claims)
}

fn verify_eurt() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    for n in 1..=EA3_MAX {
        let w = eurt_family(n)?;
        let (_, v_bound) = signed_quasirandom(n)?;
        let nf = n as f64;
        claims.push(Claim::float(format!("l1(W_{n}) == 1"), w.l1_norm(), Relation::Eq, 1.0, CertificateKind::Float(1e-12)));
        // n^{-1} · (stretch by n) leaves the cut norm bound unchanged.
        let w_bound = v_bound * nf / nf;
        claims.push(Claim::float(format!("cut bound(W_{n}) == cut bound(V_{n})"), w_bound, Relation::Eq, v_bound, CertificateKind::Float(0.0)));
        claims.push(Claim::float(format!("cut(W_{n}) < 2^-{n}"), w_bound, Relation::Lt, math::powf(2.0, -nf), CertificateKind::Spectral));
        claims.push(Claim::float(format!("sup|W_{n}| <= 1/{n}"), w.sup_norm(), Relation::Le, 1.0 / nf, CertificateKind::Float(1e-15)));
        for m in [0.5, 1.0] {
            // Any window U of mass m holds at most sup·m² of the L¹ mass.
            let outside = w.l1_norm() - w.sup_norm() * m * m;
            claims.push(Claim::float(
                format!("L1 mass outside any mass-{m} window of W_{n} >= 1 - {m}^2/{n}"),
                outside,
                Relation::Ge,
                1.0 - m * m / nf,
                CertificateKind::Float(1e-12),
            ));
        }
    }
    Ok(claims)
}

fn verify_enotui(seed: u64) -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    let mut family = Vec::new();
    for n in 1..=ENOTUI_VERIFY_MAX {
        let e = enotui_family(n, seed)?;
        let nf = n as f64;
        claims.push(Claim::float(
            format!("cut(V_{n} - 1/{n}) < 4^-{n}, N = {}", e.vertices),
            e.certificate,
            Relation::Lt,
            math::powf(4.0, -nf),
            CertificateKind::Spectral,
        ));
        claims.push(Claim::float(format!("cut(n V_{n} - 1) < 2^-{n}"), nf * e.certificate, Relation::Lt, math::powf(2.0, -nf), CertificateKind::Spectral));
        let integral = e.graphon.integral()?;
        claims.push(Claim::float(
            format!("integral(n V_{n}) >= 1 - n cert"),
            math::ratio_to_f64(&integral),
            Relation::Ge,
            1.0 - nf * e.certificate,
            CertificateKind::Float(1e-12),
        ));
        for b in [q(1, 2), q(1, 1), q(3, 2)] {
            if b < Q::from_integer(n as i128) {
                claims.push(Claim::exact(
                    format!("tail(n V_{n}, {b}) == integral(n V_{n})"),
                    e.graphon.tail_integral(b)?,
                    Relation::Eq,
                    integral,
                    CertificateKind::Exact,
                ));
            }
        }
        family.push(e.graphon.to_step_graphon());
    }
    // The family is L¹-bounded while its tails above B stay near 1.
    let top = ENOTUI_VERIFY_MAX as f64;
    let sup_l1 = ops::ui_profile(&family, 1.0)?.sup_l1;
    claims.push(Claim::float("sup l1 over family <= 1 + 2^-1", sup_l1, Relation::Le, 1.5, CertificateKind::Float(1e-12)));
    for b in [0.5, 1.0, 1.5] {
        let prof = ops::ui_profile(&family, b)?;
        claims.push(Claim::float(
            format!("sup tail above {b} >= 1 - {top} 4^-{top}"),
            prof.sup_tail,
            Relation::Ge,
            1.0 - top * math::powf(4.0, -top),
            CertificateKind::Float(1e-12),
        ));
    }
    Ok(claims)
}

fn verify_enotui2() -> Result<Vec<Claim>> {
    let mut claims = Vec::new();
    for n in 1..=EA3_MAX {
        let w = enotui2_family(n)?;
        let (_, v_bound) = signed_quasirandom(n)?;
        let nf = n as f64;
        claims.push(Claim::float(format!("l1(W_{n}) == {n}"), w.l1_norm(), Relation::Eq, nf, CertificateKind::Float(1e-12)));
        claims.push(Claim::float(format!("cut(W_{n}) < {n} 2^-{n}"), nf * v_bound, Relation::Lt, nf * math::powf(2.0, -nf), CertificateKind::Spectral));
        claims.push(Claim::float(format!("sup|W_{n}| <= 1"), w.sup_norm(), Relation::Le, 1.0, CertificateKind::Float(0.0)));
    }
    Ok(claims)
}

/// Renders claims as an aligned text table.
pub fn claims_table(claims: &[Claim]) -> String {
    let mut out = String::new();
    for c in claims {
        let status = if c.holds { "PASS" } else { "FAIL" };
        let detail = c.exact.clone().unwrap_or_else(|| format!("{:.17e} {} {:.17e}", c.value, c.relation.as_str(), c.bound));
        out.push_str(&format!("{status}  {:<11}  {}  [{}]\n", c.kind.as_str(), c.label, detail));
    }
    out
}

pub fn all_hold(claims: &[Claim]) -> bool {
    claims.iter().all(|c| c.holds)
}

impl core::fmt::Display for Relation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_schedules() {
        let u: Vec<u64> = (1..=3).map(|n| quasirandom_prime(n).unwrap()).collect();
        assert_eq!(u, vec![13, 89, 1093]);
        let v: Vec<u64> = (1..=3).map(|n| signed_prime(n).unwrap()).collect();
        assert_eq!(v, vec![13, 29, 89]);
    }

    #[test]
    fn q17_also_certifies_first_level() {
        let c = paley_certificate(17).unwrap();
        assert!((c - (1.0 + 17f64.sqrt()) / 34.0).abs() < 1e-12);
        assert!(c < 0.25);
        assert!(paley_certificate(13).unwrap() < 0.25);
    }

    #[test]
    fn circulant_certificate_matches_dense() {
        for q in [5, 13, 29] {
            let m = doubled_paley(q).unwrap();
            let dense = cutnorm::mixing_certificate(&m, 2 * q as usize, 0.5).unwrap();
            let circ = paley_certificate(q).unwrap();
            assert!((dense - circ).abs() < 1e-9, "{q}: {dense} {circ}");
            let closed = (1.0 + (q as f64).sqrt()) / (2.0 * q as f64);
            assert!((circ - closed).abs() < 1e-9);
        }
    }

    #[test]
    fn paley_graph_is_regular_and_symmetric() {
        let a = paley_adjacency(13).unwrap();
        for i in 0..13 {
            assert_eq!(a[i * 13 + i], 0);
            assert_eq!(a[i * 13..(i + 1) * 13].iter().map(|&x| x as usize).sum::<usize>(), 6);
            for j in 0..13 {
                assert_eq!(a[i * 13 + j], a[j * 13 + i]);
            }
        }
        assert!(paley_adjacency(7).is_err());
    }

    #[test]
    fn depth_caps() {
        assert_eq!(ea1_sequence(3), Err(Error::NTooLarge { n: 3, max: 2 }));
        assert!(matches!(quasirandom_half(4), Err(Error::NTooLarge { .. })));
        assert!(matches!(rademacher_graphon(13), Err(Error::NTooLarge { .. })));
        assert!(rademacher_graphon(0).is_err());
    }

    #[test]
    fn rademacher_small_cases() {
        let w1 = rademacher_graphon(1).unwrap();
        assert_eq!(w1.integral().unwrap(), q(1, 2));
        let w2 = rademacher_graphon(2).unwrap();
        assert_eq!(w2.cut_norm().unwrap(), q(1, 4));
        assert_eq!(w2.integral().unwrap(), Q::zero());
    }

    #[test]
    fn ea1_first_step() {
        let w = ea1_sequence(1).unwrap();
        assert_eq!(w.block_count(), 26);
        assert_eq!(w.integral().unwrap(), Q::one());
    }

    #[test]
    fn small_verifications_hold() {
        for name in ["toy", "edp", "epconv", "ef", "eweakbad", "ea3", "ea3p", "eurt", "enotui2"] {
            let claims = verify(name, 0).unwrap();
            assert!(all_hold(&claims), "{name}\n{}", claims_table(&claims));
        }
    }

    #[test]
    fn enotui_first_member_is_complete_graph() {
        let e = enotui_family(1, 0).unwrap();
        assert_eq!(e.vertices, 5);
        assert_eq!(e.edges, 10);
        assert!((e.certificate - 0.2).abs() < 1e-9);
    }
}
