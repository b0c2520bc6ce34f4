//! Transportation simplex: minimize `Σ c_ij x_ij` over non-negative `x` with
//! prescribed row and column sums.
//!
//! The basis is a spanning tree of the bipartite row/column graph. Pivoting
//! follows Bland's rule (lowest-index entering cell, lowest-index leaving cell
//! among ties), which rules out cycling on degenerate vertices.
//!
//! Flows are carried in a generic [`Flow`] type. When every marginal is a
//! dyadic rational with denominator at most `2^20` the solve runs in exact
//! `Ratio<i128>` arithmetic, so the returned vertex is bit-exact; otherwise
//! it runs in `f64`. Costs are always `f64`: they only steer pivoting.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_rational::Ratio;
use num_traits::Zero;

use crate::math::ratio_to_f64;

/// Largest denominator exponent accepted for the exact path.
pub const EXACT_DENOMINATOR_BITS: u32 = 20;

/// Arithmetic needed to move flow around the basis tree.
pub trait Flow: Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Zero {
    /// True when the value should be treated as exhausted.
    fn is_exhausted(&self, scale: &Self) -> bool;
}

impl Flow for f64 {
    fn is_exhausted(&self, scale: &f64) -> bool {
        *self <= 1e-14 * scale.abs().max(1.0)
    }
}

impl Flow for Ratio<i128> {
    fn is_exhausted(&self, _scale: &Self) -> bool {
        *self <= Ratio::zero()
    }
}

/// Converts `x` to an exact rational if it is a dyadic with denominator at
/// most `2^20` and a modest numerator.
pub fn to_exact(x: f64) -> Option<Ratio<i128>> {
    let scale = (1u64 << EXACT_DENOMINATOR_BITS) as f64;
    let s = x * scale;
    if !s.is_finite() || s != libm::trunc(s) || s.abs() >= 9.0e15 {
        return None;
    }
    Some(Ratio::new(s as i128, 1i128 << EXACT_DENOMINATOR_BITS))
}

/// Solves the transportation problem for `f64` marginals, using exact
/// arithmetic when the marginals allow it. `cost` is row-major `m x n`.
pub fn solve(rows: &[f64], cols: &[f64], cost: &[f64]) -> Vec<f64> {
    if let Some(flows) = solve_exact_if_rational(rows, cols, cost) {
        return flows;
    }
    solve_generic(rows, cols, cost)
}

/// The exact path alone; `None` if the marginals are not eligible or do not
/// balance exactly.
pub fn solve_exact_if_rational(rows: &[f64], cols: &[f64], cost: &[f64]) -> Option<Vec<f64>> {
    let a: Option<Vec<_>> = rows.iter().map(|&x| to_exact(x)).collect();
    let b: Option<Vec<_>> = cols.iter().map(|&x| to_exact(x)).collect();
    let (a, b) = (a?, b?);
    let sa = a.iter().fold(Ratio::zero(), |s: Ratio<i128>, x| s + *x);
    let sb = b.iter().fold(Ratio::zero(), |s: Ratio<i128>, x| s + *x);
    if sa != sb {
        return None;
    }
    Some(solve_generic(&a, &b, cost).iter().map(ratio_to_f64).collect())
}

/// Transportation simplex over any [`Flow`] type.
pub fn solve_generic<T: Flow>(rows: &[T], cols: &[T], cost: &[f64]) -> Vec<T> {
    let (m, n) = (rows.len(), cols.len());
    assert_eq!(cost.len(), m * n, "cost matrix shape");
    let mut flow = vec![T::zero(); m * n];
    if m == 0 || n == 0 {
        return flow;
    }
    let scale = rows.iter().fold(T::zero(), |s, x| s + x.clone());
    let mut basic = vec![false; m * n];

    // North-west corner start with exactly m + n - 1 basic cells.
    let mut ra = rows.to_vec();
    let mut rb = cols.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let q = if ra[i] <= rb[j] { ra[i].clone() } else { rb[j].clone() };
        flow[i * n + j] = q.clone();
        basic[i * n + j] = true;
        ra[i] = ra[i].clone() - q.clone();
        rb[j] = rb[j].clone() - q;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || ra[i].is_exhausted(&scale) {
            i += 1;
        } else {
            j += 1;
        }
    }

    let cmax = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let tol = 1e-12 * cmax.max(1e-300);
    let max_iter = 50 * (m + n) * (m + n) + 1000;
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n];
    let mut parent = vec![usize::MAX; m + n];

    for _ in 0..max_iter {
        // Tree adjacency over node ids: rows 0..m, columns m..m+n.
        for a in adj.iter_mut() {
            a.clear();
        }
        for (idx, _) in basic.iter().enumerate().filter(|(_, &b)| b) {
            let (r, c) = (idx / n, idx % n);
            adj[r].push(m + c);
            adj[m + c].push(r);
        }
        potentials(&adj, cost, m, n, &mut u, &mut v);

        let entering = (0..m * n).find(|&idx| {
            !basic[idx] && cost[idx] - u[idx / n] - v[idx % n] < -tol
        });
        let Some(enter) = entering else { break };
        let (er, ec) = (enter / n, enter % n);

        // Path in the tree from row er to column ec.
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        let mut queue = VecDeque::new();
        parent[er] = er;
        queue.push_back(er);
        while let Some(node) = queue.pop_front() {
            if node == m + ec {
                break;
            }
            for &next in &adj[node] {
                if parent[next] == usize::MAX {
                    parent[next] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut path = vec![m + ec];
        while *path.last().unwrap() != er {
            let last = *path.last().unwrap();
            path.push(parent[last]);
        }
        path.reverse(); // er, ..., m + ec
        let cell = |a: usize, b: usize| {
            let (r, c) = if a < m { (a, b - m) } else { (b, a - m) };
            r * n + c
        };
        let edges: Vec<usize> = path.windows(2).map(|w| cell(w[0], w[1])).collect();
        let len = edges.len();
        // Edge adjacent to the entering column loses flow, then signs alternate.
        let minus: Vec<usize> = (0..len).filter(|e| (len - 1 - e) % 2 == 0).map(|e| edges[e]).collect();
        let plus: Vec<usize> = (0..len).filter(|e| (len - 1 - e) % 2 == 1).map(|e| edges[e]).collect();

        let mut leave = minus[0];
        for &c in &minus[1..] {
            if flow[c] < flow[leave] || (flow[c] == flow[leave] && c < leave) {
                leave = c;
            }
        }
        let theta = flow[leave].clone();
        flow[enter] = theta.clone();
        for &c in &plus {
            flow[c] = flow[c].clone() + theta.clone();
        }
        for &c in &minus {
            flow[c] = flow[c].clone() - theta.clone();
            if flow[c] < T::zero() {
                flow[c] = T::zero();
            }
        }
        flow[leave] = T::zero();
        basic[leave] = false;
        basic[enter] = true;
    }
    flow
}

fn potentials(adj: &[Vec<usize>], cost: &[f64], m: usize, n: usize, u: &mut [f64], v: &mut [f64]) {
    let mut seen = vec![false; m + n];
    let mut queue = VecDeque::new();
    // The basis tree spans every node; start from row 0.
    seen[0] = true;
    u[0] = 0.0;
    queue.push_back(0);
    while let Some(node) = queue.pop_front() {
        for &next in &adj[node] {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            if node < m {
                let c = next - m;
                v[c] = cost[node * n + c] - u[node];
            } else {
                let r = next;
                u[r] = cost[r * n + (node - m)] - v[node - m];
            }
            queue.push_back(next);
        }
    }
}

/// `Σ c_ij x_ij`.
pub fn objective(cost: &[f64], flow: &[f64]) -> f64 {
    crate::math::sum_compensated(cost.iter().zip(flow).map(|(c, x)| c * x))
}
