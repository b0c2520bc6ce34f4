//! Cut distance, `δ₁`, `δ_p` and their stretched versions between step
//! graphons, by optimizing over coupling matrices.
//!
//! Both graphons are first extended by a zero block so their supports have
//! the common mass `m₁ + m₂`. Any extra mass beyond what is needed ends up
//! coupled zero-to-zero, where both graphons vanish, so it contributes
//! nothing to any of the objectives: a cell `(pad, pad)` has difference 0
//! against every other cell.
//!
//! The infimum over couplings is not certified. Every value returned is the
//! objective at an explicit coupling, hence an upper bound, and comes with
//! the lower bound `|∫W₁ − ∫W₂|` (for the cut norm and `L¹`) or
//! `|‖W₁‖_p − ‖W₂‖_p|` (for `L^p`).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::coupling::Coupling;
use crate::cutnorm::{self, K_EXACT};
use crate::error::{Error, Result};
use crate::graphon::{Mass, StepGraphon, MASS_TOL};
use crate::math::{self, Stream};
use crate::ops;
use crate::par;
use crate::transport;

/// Most blocks (real blocks on both sides) allowed in permutation mode.
pub const PERMUTATION_MAX_BLOCKS: usize = 9;
pub const DEFAULT_RESTARTS: usize = 16;
const MAX_ITERATIONS: usize = 200;
const MIN_IMPROVEMENT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// All couplings induced by matching equal-weight blocks.
    Permutation,
    /// Alternating linearization and transportation LP from seeded starts.
    AlternatingLp,
    /// Permutation search (when applicable) feeding the alternating LP.
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Cut,
    L1,
    Lp(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    /// Upper bound meets the lower bound.
    Exact,
    /// Upper bound with a trivial lower bound of 0.
    Upper,
    /// Upper bound with a positive lower bound below it.
    Bracket,
}

impl EstimateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::Exact => "EXACT",
            EstimateKind::Upper => "UPPER",
            EstimateKind::Bracket => "BRACKET",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub lower: f64,
    /// Coupling of the mass-equalized graphons attaining `value`.
    pub coupling: Coupling,
    pub method: String,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub mode: Mode,
    pub seed: u64,
    pub restarts: usize,
    /// Allows `δ_p` on signed graphons; the result is labelled NONMETRIC.
    pub allow_signed: bool,
    /// Largest refined difference whose cut norm is computed exactly; above
    /// it the `L¹` norm is used as the upper bound.
    pub k_exact: usize,
    /// Extra starting couplings for the alternating LP, on the
    /// mass-equalized graphons.
    pub warm_starts: Vec<Coupling>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            mode: Mode::Both,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            allow_signed: false,
            k_exact: K_EXACT,
            warm_starts: Vec::new(),
        }
    }
}

impl Options {
    pub fn with_mode(mode: Mode, seed: u64) -> Self {
        Self { mode, seed, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equalized {
    pub w1: StepGraphon,
    pub w2: StepGraphon,
    pub common_mass: f64,
}

/// Extends `W₁` by a zero block of mass `m₂` and `W₂` by one of mass `m₁`.
/// Zero masses add no block.
pub fn equalize_masses(w1: &StepGraphon, w2: &StepGraphon) -> Equalized {
    let (m1, m2) = (w1.support_mass(), w2.support_mass());
    Equalized {
        w1: w1.trivial_extension(Mass::Finite(m2)),
        w2: w2.trivial_extension(Mass::Finite(m1)),
        common_mass: m1 + m2,
    }
}

/// `|∫W₁ − ∫W₂|`, a lower bound on the cut distance and on `δ₁`.
pub fn integral_lower_bound(w1: &StepGraphon, w2: &StepGraphon) -> f64 {
    (w1.integral() - w2.integral()).abs()
}

fn lower_bound(w1: &StepGraphon, w2: &StepGraphon, metric: Metric) -> Result<f64> {
    match metric {
        Metric::Cut | Metric::L1 => Ok(integral_lower_bound(w1, w2)),
        Metric::Lp(p) => Ok((w1.lp_norm(p)? - w2.lp_norm(p)?).abs()),
    }
}

/// Objective of `metric` at coupling `c` of `w1` and `w2` (rows beyond
/// `w1`'s blocks and columns beyond `w2`'s are zero blocks). The flag is
/// false when a cut norm was too large to enumerate and the `L¹` norm of the
/// difference was used instead.
pub fn coupling_objective(
    w1: &StepGraphon,
    w2: &StepGraphon,
    c: &Coupling,
    metric: Metric,
    k_exact: usize,
) -> Result<(f64, bool)> {
    let diff = StepGraphon::refine_difference(w1, w2, c)?;
    Ok(match metric {
        Metric::Cut => match cutnorm::cut_norm_exact_with_limit(&diff, k_exact) {
            Ok(r) => (r.value, true),
            Err(_) => (diff.l1_norm(), false),
        },
        Metric::L1 => (diff.l1_norm(), true),
        Metric::Lp(p) => (diff.lp_norm(p)?, true),
    })
}

fn uniform_weight(w1: &StepGraphon, w2: &StepGraphon) -> Option<f64> {
    let mut all = w1.weights().iter().chain(w2.weights());
    let Some(&w) = all.next() else { return Some(1.0) };
    all.all(|&x| math::close_rel(x, w, MASS_TOL)).then_some(w)
}

/// Partial matchings of `k1` row blocks into `k2` column blocks, in a fixed
/// order; `None` sends a row to the zero padding.
fn partial_matchings(k1: usize, k2: usize) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, k1: usize, k2: usize, used: &mut Vec<bool>, cur: &mut Vec<Option<usize>>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == k1 {
            out.push(cur.clone());
            return;
        }
        for j in 0..k2 {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, k1, k2, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
        cur.push(None);
        go(i + 1, k1, k2, used, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    go(0, k1, k2, &mut vec![false; k2], &mut Vec::new(), &mut out);
    out
}

/// The merged coupling of the equalized graphons induced by a partial
/// matching of equal-weight blocks.
fn matching_coupling(eq: &Equalized, k1: usize, k2: usize, w: f64, matching: &[Option<usize>]) -> Coupling {
    let (rows, cols) = (eq.w1.block_count(), eq.w2.block_count());
    let mut data = vec![0.0; rows * cols];
    let mut col_used = vec![false; k2];
    let mut matched = 0usize;
    for (i, m) in matching.iter().enumerate() {
        match *m {
            Some(j) => {
                data[i * cols + j] = w;
                col_used[j] = true;
                matched += 1;
            }
            None => data[i * cols + k2] += w,
        }
    }
    if rows > k1 {
        for j in (0..k2).filter(|&j| !col_used[j]) {
            data[k1 * cols + j] = w;
        }
        if cols > k2 {
            data[k1 * cols + k2] = matched as f64 * w;
        }
    }
    Coupling::from_parts(data, eq.w1.weights().to_vec(), eq.w2.weights().to_vec())
}

struct Found {
    value: f64,
    exact_eval: bool,
    coupling: Coupling,
}

fn pick_best(candidates: Vec<Found>) -> Option<Found> {
    let mut best: Option<Found> = None;
    for c in candidates {
        if best.as_ref().map_or(true, |b| c.value < b.value) {
            best = Some(c);
        }
    }
    best
}

fn permutation_search(eq: &Equalized, k1: usize, k2: usize, metric: Metric, k_exact: usize) -> Result<(Found, usize)> {
    if k1 + k2 > PERMUTATION_MAX_BLOCKS {
        return Err(Error::ModeUnsupported("permutation mode allows at most 9 blocks in total"));
    }
    let real1 = StepGraphon::from_parts(eq.w1.weights()[..k1].to_vec(), real_values(&eq.w1, k1), Mass::Infinite);
    let real2 = StepGraphon::from_parts(eq.w2.weights()[..k2].to_vec(), real_values(&eq.w2, k2), Mass::Infinite);
    let Some(w) = uniform_weight(&real1, &real2) else {
        return Err(Error::ModeUnsupported("permutation mode needs equal uniform block weights"));
    };
    let matchings = partial_matchings(k1, k2);
    let count = matchings.len();
    let results = par::map_indices(count, |idx| {
        let c = matching_coupling(eq, k1, k2, w, &matchings[idx]);
        coupling_objective(&eq.w1, &eq.w2, &c, metric, k_exact)
            .map(|(value, exact_eval)| Found { value, exact_eval, coupling: c })
    });
    let found = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((pick_best(found).expect("at least one matching"), count))
}

fn real_values(w: &StepGraphon, k: usize) -> Vec<f64> {
    let n = w.block_count();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        out.extend_from_slice(&w.values()[i * n..i * n + k]);
    }
    out
}

/// Differences `V₁(i,i') − V₂(j,j')` between all cells of the full grid.
struct Grid<'a> {
    w1: &'a StepGraphon,
    w2: &'a StepGraphon,
    m: usize,
    n: usize,
}

impl Grid<'_> {
    #[inline]
    fn diff(&self, a: usize, b: usize) -> f64 {
        let (i, j) = (a / self.n, a % self.n);
        let (i2, j2) = (b / self.n, b % self.n);
        self.w1.value(i, i2) - self.w2.value(j, j2)
    }

    fn cells(&self) -> usize {
        self.m * self.n
    }
}

fn random_vertex(eq: &Equalized, seed: u64, restart: usize) -> Coupling {
    let mut rng = math::rng(math::derive_seed(seed, restart as u64), Stream::CouplingStart);
    let (m, n) = (eq.w1.block_count(), eq.w2.block_count());
    let cost: Vec<f64> = (0..m * n).map(|_| rng.random::<f64>()).collect();
    lp_vertex(eq, &cost)
}

fn lp_vertex(eq: &Equalized, cost: &[f64]) -> Coupling {
    let flows = transport::solve(eq.w1.weights(), eq.w2.weights(), cost);
    Coupling::from_parts(flows, eq.w1.weights().to_vec(), eq.w2.weights().to_vec())
}

/// One alternating-LP descent for the cut norm from `start`.
fn descend_cut(eq: &Equalized, start: Coupling, k_exact: usize, seed: u64) -> Result<Found> {
    let grid = Grid { w1: &eq.w1, w2: &eq.w2, m: eq.w1.block_count(), n: eq.w2.block_count() };
    let mut c = start;
    let (mut value, mut exact_eval) = coupling_objective(&eq.w1, &eq.w2, &c, Metric::Cut, k_exact)?;
    for _ in 0..MAX_ITERATIONS {
        if value == 0.0 {
            break;
        }
        let cells: Vec<(usize, f64)> = c.support().map(|(i, j, mass)| (i * grid.n + j, mass)).collect();
        let diff = StepGraphon::refine_difference(&eq.w1, &eq.w2, &c)?;
        let witness = match cutnorm::cut_norm_exact_with_limit(&diff, k_exact) {
            Ok(r) => r,
            Err(_) => cutnorm::cut_norm_heuristic(&diff, 4, seed)?,
        };
        let (x, y) = (&witness.witness_x, &witness.witness_y);
        let mut signed = math::CompensatedSum::new();
        for (a, &(ca, ma)) in cells.iter().enumerate() {
            for (b, &(cb, mb)) in cells.iter().enumerate() {
                if x[a] && y[b] {
                    signed.add(ma * mb * grid.diff(ca, cb));
                }
            }
        }
        let s = if signed.value() >= 0.0 { 1.0 } else { -1.0 };
        // Gradient of s·xᵀ(C∘D∘C)y with each cell's indicator chosen to
        // maximize its own contribution.
        let grad: Vec<f64> = (0..grid.cells())
            .map(|a| {
                let (mut r, mut col) = (math::CompensatedSum::new(), math::CompensatedSum::new());
                for (b, &(cb, mb)) in cells.iter().enumerate() {
                    let d = mb * grid.diff(a, cb);
                    if y[b] {
                        r.add(d);
                    }
                    if x[b] {
                        col.add(d);
                    }
                }
                (s * r.value()).max(0.0) + (s * col.value()).max(0.0)
            })
            .collect();
        let target = lp_vertex(eq, &grad);
        let mut best: Option<(f64, bool, Coupling)> = None;
        for gamma in [1.0, 0.5, 0.25, 0.125] {
            let cand = c.mix(&target, gamma);
            let (v, e) = coupling_objective(&eq.w1, &eq.w2, &cand, Metric::Cut, k_exact)?;
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, e, cand));
            }
        }
        let (v, e, cand) = best.expect("four step sizes");
        if value - v < MIN_IMPROVEMENT {
            break;
        }
        value = v;
        exact_eval = e;
        c = cand;
    }
    Ok(Found { value, exact_eval, coupling: c })
}

/// `Σ_ab C_a C_b K_ab` with `K = |D|^p`.
fn kernel(grid: &Grid<'_>, p: f64) -> Vec<f64> {
    let n = grid.cells();
    let mut k = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            let d = grid.diff(a, b).abs();
            k[a * n + b] = if p == 1.0 { d } else { math::powf(d, p) };
        }
    }
    k
}

fn quad(k: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let n = u.len();
    math::sum_compensated((0..n).filter(|&a| u[a] != 0.0).map(|a| {
        u[a] * math::sum_compensated((0..n).filter(|&b| v[b] != 0.0).map(|b| k[a * n + b] * v[b]))
    }))
}

/// Frank–Wolfe descent on the quadratic `L^p` objective from `start`.
fn descend_quadratic(eq: &Equalized, k: &[f64], start: Coupling, metric: Metric) -> Result<Found> {
    let n = start.as_slice().len();
    let mut c = start;
    let mut q = quad(k, c.as_slice(), c.as_slice());
    for _ in 0..MAX_ITERATIONS {
        let cur = c.as_slice();
        let grad: Vec<f64> = (0..n)
            .map(|a| 2.0 * math::sum_compensated((0..n).filter(|&b| cur[b] != 0.0).map(|b| k[a * n + b] * cur[b])))
            .collect();
        let target = lp_vertex(eq, &grad);
        let d: Vec<f64> = target.as_slice().iter().zip(cur).map(|(s, c)| s - c).collect();
        let slope = quad(k, &d, cur);
        if slope >= 0.0 {
            break;
        }
        let curv = quad(k, &d, &d);
        let gamma = if curv > 0.0 { (-slope / curv).min(1.0) } else { 1.0 };
        let cand = c.mix(&target, gamma);
        let q_new = quad(k, cand.as_slice(), cand.as_slice());
        if q - q_new < MIN_IMPROVEMENT {
            if q_new < q {
                c = cand;
            }
            break;
        }
        q = q_new;
        c = cand;
    }
    let (value, exact_eval) = coupling_objective(&eq.w1, &eq.w2, &c, metric, K_EXACT)?;
    Ok(Found { value, exact_eval, coupling: c })
}

fn attains(value: f64, lower: f64) -> bool {
    value <= lower + 1e-12 * value.max(1.0)
}

fn alternating_lp(eq: &Equalized, metric: Metric, opts: &Options, extra: &[Coupling], lower: f64) -> Result<Found> {
    let canonical = Coupling::northwest_corner(eq.w1.weights(), eq.w2.weights());
    let (value, exact_eval) = coupling_objective(&eq.w1, &eq.w2, &canonical, metric, opts.k_exact)?;
    if exact_eval && attains(value, lower) {
        return Ok(Found { value, exact_eval, coupling: canonical });
    }
    let mut starts = vec![canonical];
    starts.extend(extra.iter().cloned());
    starts.extend(opts.warm_starts.iter().cloned());
    for s in &starts {
        if s.rows() != eq.w1.block_count() || s.cols() != eq.w2.block_count() {
            return Err(Error::InvalidArgument("warm start has the wrong shape"));
        }
    }
    let fixed = starts.len();
    let random = opts.restarts.saturating_sub(1);
    let k = match metric {
        Metric::Cut => Vec::new(),
        Metric::L1 => kernel(&Grid { w1: &eq.w1, w2: &eq.w2, m: eq.w1.block_count(), n: eq.w2.block_count() }, 1.0),
        Metric::Lp(p) => kernel(&Grid { w1: &eq.w1, w2: &eq.w2, m: eq.w1.block_count(), n: eq.w2.block_count() }, p),
    };
    let runs = par::map_indices(fixed + random, |idx| {
        let start = if idx < fixed { starts[idx].clone() } else { random_vertex(eq, opts.seed, idx - fixed + 1) };
        match metric {
            Metric::Cut => descend_cut(eq, start, opts.k_exact, math::derive_seed(opts.seed, idx as u64)),
            _ => descend_quadratic(eq, &k, start, metric),
        }
    });
    let found = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pick_best(found).expect("at least the canonical start"))
}

fn classify(value: f64, lower: f64) -> EstimateKind {
    if attains(value, lower) {
        EstimateKind::Exact
    } else if lower > 0.0 {
        EstimateKind::Bracket
    } else {
        EstimateKind::Upper
    }
}

fn estimate(w1: &StepGraphon, w2: &StepGraphon, metric: Metric, opts: &Options, label: &str) -> Result<MetricEstimate> {
    let eq = equalize_masses(w1, w2);
    let (k1, k2) = (w1.block_count(), w2.block_count());
    let lower = lower_bound(w1, w2, metric)?;
    let (found, method) = match opts.mode {
        Mode::Permutation => {
            let (f, count) = permutation_search(&eq, k1, k2, metric, opts.k_exact)?;
            (f, format!("permutation-exhaustive over {count} block matchings"))
        }
        Mode::AlternatingLp => {
            let f = alternating_lp(&eq, metric, opts, &[], lower)?;
            (f, format!("alternating-lp, {} restarts, seed {}", opts.restarts.max(1), opts.seed))
        }
        Mode::Both => match permutation_search(&eq, k1, k2, metric, opts.k_exact) {
            Ok((perm, count)) if perm.exact_eval && attains(perm.value, lower) => {
                (perm, format!("permutation-exhaustive over {count} block matchings"))
            }
            Ok((perm, count)) => {
                let alt = alternating_lp(&eq, metric, opts, core::slice::from_ref(&perm.coupling), lower)?;
                let f = if alt.value < perm.value { alt } else { perm };
                (f, format!("permutation-exhaustive over {count} block matchings, then alternating-lp, {} restarts, seed {}", opts.restarts.max(1), opts.seed))
            }
            Err(Error::ModeUnsupported(_)) => {
                let f = alternating_lp(&eq, metric, opts, &[], lower)?;
                (f, format!("alternating-lp, {} restarts, seed {} (permutation mode not applicable)", opts.restarts.max(1), opts.seed))
            }
            Err(e) => return Err(e),
        },
    };
    let mut method = format!("{label}: {method}");
    if !found.exact_eval {
        method.push_str("; cut norm of the refined difference bounded by its L1 norm");
    }
    // The lower bound holds for the true distance, which the value bounds
    // from above; rounding may put the value a hair below it.
    let value = found.value.max(0.0);
    Ok(MetricEstimate { kind: classify(value, lower), value, lower: lower.min(value), coupling: found.coupling, method })
}

/// Cut distance `δ_□(W₁, W₂)`.
pub fn cut_distance(w1: &StepGraphon, w2: &StepGraphon, opts: &Options) -> Result<MetricEstimate> {
    estimate(w1, w2, Metric::Cut, opts, "cut")
}

/// Invariant `L¹` distance `δ₁(W₁, W₂)`.
pub fn delta_1(w1: &StepGraphon, w2: &StepGraphon, opts: &Options) -> Result<MetricEstimate> {
    estimate(w1, w2, Metric::L1, opts, "l1")
}

/// Invariant `L^p` distance `δ_p(W₁, W₂)` for non-negative graphons.
pub fn delta_p(w1: &StepGraphon, w2: &StepGraphon, p: f64, opts: &Options) -> Result<MetricEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    let signed = !(w1.is_nonnegative() && w2.is_nonnegative());
    if signed && !opts.allow_signed {
        return Err(Error::NegativeGraphon);
    }
    let label = if signed { format!("lp (p = {p}) NONMETRIC") } else { format!("lp (p = {p})") };
    estimate(w1, w2, Metric::Lp(p), opts, &label)
}

/// The same distance between the normalized graphons `W₁^s` and `W₂^s`.
pub fn stretched_distance(w1: &StepGraphon, w2: &StepGraphon, metric: Metric, opts: &Options) -> Result<MetricEstimate> {
    let (n1, n2) = (ops::normalize(w1), ops::normalize(w2));
    let mut est = match metric {
        Metric::Cut => cut_distance(&n1, &n2, opts)?,
        Metric::L1 => delta_1(&n1, &n2, opts)?,
        Metric::Lp(p) => delta_p(&n1, &n2, p, opts)?,
    };
    est.method = format!("stretched {}", est.method);
    Ok(est)
}
