//! Poisson random-graph process, graph/graphon conversion and the
//! sampling experiments built on them.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::graphon::{Mass, StepGraphon};
use crate::math::{self, derive_seed, Stream};
use crate::metrics::{self, Metric, Mode, Options};
use crate::par;
use crate::stats::{self, TestResult};

/// Largest number of groups the convergence experiment coarsens a sampled
/// graph into before estimating its distance to the generator.
pub const COARSEN_BLOCKS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub birth: f64,
    pub block: usize,
}

/// A realization of the process up to time `t`. Vertices are sorted by birth
/// time; edges are `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    pub t: f64,
}

impl SampledGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices.len()];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphMode {
    /// Uniform probability measure on the vertices.
    Probability,
    /// Counting measure: every vertex has mass 1.
    Counting,
}

fn check_sampleable(w: &StepGraphon) -> Result<()> {
    let k = w.block_count();
    for i in 0..k {
        for j in 0..k {
            let v = w.value(i, j);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ValueOutOfRange { i, j, value: v });
            }
        }
    }
    if !w.support_mass().is_finite() {
        return Err(Error::InfiniteSupport);
    }
    Ok(())
}

/// Samples the process on the blocks of `w` up to time `t`.
///
/// Block `i` receives a Poisson(`t·w_i`) number of vertices with uniform
/// birth times on `[0, t]`; every pair is joined independently with the
/// probability given by the blocks of its endpoints. Ambient mass outside the
/// blocks carries no vertices.
pub fn sample_tilde_graph(w: &StepGraphon, t: f64, seed: u64) -> Result<SampledGraph> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidArgument("t must be positive and finite"));
    }
    check_sampleable(w)?;
    let mut vertices = Vec::new();
    for (i, &wi) in w.weights().iter().enumerate() {
        let lambda = t * wi;
        let count = if lambda > 0.0 {
            let poisson = Poisson::new(lambda).map_err(|_| Error::InvalidArgument("Poisson rate out of range"))?;
            poisson.sample(&mut math::rng(seed, Stream::VertexCount(i))) as u64
        } else {
            0
        };
        let mut births = math::rng(seed, Stream::BirthTime(i));
        for _ in 0..count {
            vertices.push(Vertex { birth: births.random::<f64>() * t, block: i });
        }
    }
    vertices.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.block.cmp(&b.block)));
    let mut edge_rng = math::rng(seed, Stream::Edges);
    let mut edges = Vec::new();
    for u in 0..vertices.len() {
        let row = w.row(vertices[u].block);
        for v in u + 1..vertices.len() {
            let p = row[vertices[v].block];
            if edge_rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(SampledGraph { vertices, edges, t })
}

/// Keeps the vertices of degree at least one, in their original order.
pub fn drop_isolated(g: &SampledGraph) -> SampledGraph {
    let deg = g.degrees();
    let mut map = vec![usize::MAX; g.vertices.len()];
    let mut vertices = Vec::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if deg[i] > 0 {
            map[i] = vertices.len();
            vertices.push(*v);
        }
    }
    let edges = g.edges.iter().map(|&(u, v)| (map[u], map[v])).collect();
    SampledGraph { vertices, edges, t: g.t }
}

/// Adjacency graphon of a simple graph on `n` vertices.
pub fn graph_to_graphon(n: usize, edges: &[(usize, usize)], mode: GraphMode) -> Result<StepGraphon> {
    let mut values = vec![0.0; n * n];
    for &(u, v) in edges {
        for x in [u, v] {
            if x >= n {
                return Err(Error::VertexOutOfRange { vertex: x, vertices: n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if values[u * n + v] != 0.0 {
            return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
        }
        values[u * n + v] = 1.0;
        values[v * n + u] = 1.0;
    }
    match mode {
        GraphMode::Probability => {
            if n == 0 {
                return Ok(StepGraphon::zero(Mass::Finite(1.0)));
            }
            StepGraphon::from_flat(vec![1.0 / n as f64; n], values, Mass::Finite(1.0))
        }
        GraphMode::Counting => StepGraphon::from_flat(vec![1.0; n], values, Mass::Infinite),
    }
}

/// One two-sample comparison inside [`InvarianceReport`].
#[derive(Clone, Debug, PartialEq)]
pub struct NamedTest {
    pub name: &'static str,
    pub result: TestResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub u: f64,
    pub t: f64,
    pub runs: usize,
    pub alpha: f64,
    pub tests: Vec<NamedTest>,
    pub pass: bool,
}

/// Compares the process for `W^(u)` at time `t` with the process for `W` at
/// time `√u·t`, on vertex and edge counts (KS and chi-square each).
///
/// The family of four tests is held at level `alpha = 0.01` with a
/// Bonferroni correction. For `u = 1` both sides use the same seeds, so the
/// comparison is of the process with itself.
pub fn stretch_time_invariance_check(w: &StepGraphon, u: f64, t: f64, runs: usize, seed: u64) -> Result<InvarianceReport> {
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be positive"));
    }
    let stretched = crate::ops::stretch(w, u)?;
    let t2 = math::sqrt(u) * t;
    check_sampleable(w)?;
    let offset = if u == 1.0 { 0 } else { runs as u64 };
    let side = |g: &StepGraphon, time: f64, base: u64| -> Result<(Vec<u64>, Vec<u64>)> {
        let samples = par::map_indices(runs, |r| sample_tilde_graph(g, time, derive_seed(seed, base + r as u64)));
        let mut vc = Vec::with_capacity(runs);
        let mut ec = Vec::with_capacity(runs);
        for s in samples {
            let s = s?;
            vc.push(s.vertex_count() as u64);
            ec.push(s.edge_count() as u64);
        }
        Ok((vc, ec))
    };
    let (va, ea) = side(&stretched, t, 0)?;
    let (vb, eb) = side(w, t2, offset)?;
    let as_f = |x: &[u64]| x.iter().map(|&c| c as f64).collect::<Vec<_>>();
    let tests = vec![
        NamedTest { name: "vertices_ks", result: stats::ks_two_sample(&as_f(&va), &as_f(&vb)) },
        NamedTest { name: "vertices_chi2", result: stats::chi_square_two_sample(&va, &vb).0 },
        NamedTest { name: "edges_ks", result: stats::ks_two_sample(&as_f(&ea), &as_f(&eb)) },
        NamedTest { name: "edges_chi2", result: stats::chi_square_two_sample(&ea, &eb).0 },
    ];
    let alpha = 0.01;
    let pass = tests.iter().all(|x| x.result.p_value >= alpha / tests.len() as f64);
    Ok(InvarianceReport { u, t, runs, alpha, tests, pass })
}

/// Collapses a sampled graph to one block per generating block (merged down
/// to at most `COARSEN_BLOCKS` groups), with counting-measure weights and
/// edge densities as values.
pub fn coarsen_by_block(g: &SampledGraph, blocks: usize) -> StepGraphon {
    let groups = blocks.clamp(1, COARSEN_BLOCKS);
    let group = |b: usize| if blocks <= COARSEN_BLOCKS { b } else { b * groups / blocks };
    let mut count = vec![0u64; groups];
    for v in &g.vertices {
        count[group(v.block)] += 1;
    }
    let mut e = vec![0u64; groups * groups];
    for &(u, v) in &g.edges {
        let (a, b) = (group(g.vertices[u].block), group(g.vertices[v].block));
        e[a * groups + b] += 1;
        e[b * groups + a] += 1;
    }
    let live: Vec<usize> = (0..groups).filter(|&a| count[a] > 0).collect();
    let weights: Vec<f64> = live.iter().map(|&a| count[a] as f64).collect();
    let mut values = Vec::with_capacity(live.len() * live.len());
    for &a in &live {
        for &b in &live {
            values.push(e[a * groups + b] as f64 / (count[a] as f64 * count[b] as f64));
        }
    }
    if live.is_empty() {
        return StepGraphon::zero(Mass::Infinite);
    }
    StepGraphon::from_flat(weights, values, Mass::Infinite).expect("coarsened graph is a valid graphon")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesRow {
    pub t: f64,
    pub run: usize,
    pub estimate: f64,
    pub median: f64,
}

/// Restarts used for each distance estimate in [`convergence_series`].
pub const CONVERGENCE_RESTARTS: usize = 4;

/// For each `t` and run: sample `G_t`, coarsen it by generating block and
/// estimate its stretched cut distance to `w`. Rows are ordered by `t`, then
/// run, and carry the median estimate of their `t`.
pub fn convergence_series(w: &StepGraphon, t_grid: &[f64], runs: usize, seed: u64) -> Result<Vec<SeriesRow>> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidArgument("t grid needs at least two points"));
    }
    if t_grid.windows(2).any(|p| p[0] >= p[1]) || !(t_grid[0] > 0.0) {
        return Err(Error::InvalidArgument("t grid must be positive and increasing"));
    }
    if runs == 0 {
        return Err(Error::InvalidArgument("runs must be positive"));
    }
    check_sampleable(w)?;
    let k = w.block_count();
    let jobs = t_grid.len() * runs;
    let estimates = par::map_indices(jobs, |job| -> Result<f64> {
        let (ti, run) = (job / runs, job % runs);
        let s = derive_seed(seed, job as u64);
        let g = drop_isolated(&sample_tilde_graph(w, t_grid[ti], s)?);
        let coarse = coarsen_by_block(&g, k);
        let mut opts = Options::with_mode(Mode::AlternatingLp, derive_seed(s, run as u64));
        opts.restarts = CONVERGENCE_RESTARTS;
        Ok(metrics::stretched_distance(&coarse, w, Metric::Cut, &opts)?.value)
    });
    let estimates = estimates.into_iter().collect::<Result<Vec<f64>>>()?;
    let mut rows = Vec::with_capacity(jobs);
    for (ti, &t) in t_grid.iter().enumerate() {
        let chunk = &estimates[ti * runs..(ti + 1) * runs];
        let median = stats::median(chunk);
        for (run, &estimate) in chunk.iter().enumerate() {
            rows.push(SeriesRow { t, run, estimate, median });
        }
    }
    Ok(rows)
}

/// Median estimate per grid point, in grid order.
pub fn series_medians(rows: &[SeriesRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in rows {
        if out.last().map_or(true, |&(t, _)| t != r.t) {
            out.push((r.t, r.median));
        }
    }
    out
}
