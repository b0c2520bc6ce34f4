//! Coupling measures between two block partitions: non-negative matrices on
//! the transportation polytope of two weight vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Axis, Error, Result};
use crate::graphon::MASS_TOL;
use crate::math::{close_rel, sum_compensated};

#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`.
    data: Vec<f64>,
    row_marginals: Vec<f64>,
    col_marginals: Vec<f64>,
}

fn marginal_ok(found: f64, expected: f64, total: f64) -> bool {
    close_rel(found, expected, MASS_TOL) || (found - expected).abs() <= MASS_TOL * total
}

impl Coupling {
    /// Validates a row-major matrix against the target marginals.
    pub fn new(data: Vec<f64>, row_marginals: Vec<f64>, col_marginals: Vec<f64>) -> Result<Self> {
        let (rows, cols) = (row_marginals.len(), col_marginals.len());
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument("coupling matrix shape does not match marginals"));
        }
        if data.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidArgument("coupling entries must be finite and non-negative"));
        }
        let c = Self { rows, cols, data, row_marginals, col_marginals };
        let total = sum_compensated(c.row_marginals.iter().copied());
        for i in 0..rows {
            let (found, expected) = (c.row_sum(i), c.row_marginals[i]);
            if !marginal_ok(found, expected, total) {
                return Err(Error::MarginalMismatch { axis: Axis::Row, index: i, expected, found });
            }
        }
        for j in 0..cols {
            let (found, expected) = (c.col_sum(j), c.col_marginals[j]);
            if !marginal_ok(found, expected, total) {
                return Err(Error::MarginalMismatch { axis: Axis::Column, index: j, expected, found });
            }
        }
        Ok(c)
    }

    pub(crate) fn from_parts(data: Vec<f64>, row_marginals: Vec<f64>, col_marginals: Vec<f64>) -> Self {
        let (rows, cols) = (row_marginals.len(), col_marginals.len());
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data, row_marginals, col_marginals }
    }

    /// North-west corner coupling: masses laid out in order along both
    /// sides and matched monotonically.
    ///
    /// Whenever the remaining row and column masses agree to relative
    /// `1e-12`, both are closed together so that matching blocks do not
    /// leave rounding slivers.
    pub fn northwest_corner(row_marginals: &[f64], col_marginals: &[f64]) -> Self {
        let (m, n) = (row_marginals.len(), col_marginals.len());
        let mut data = vec![0.0; m * n];
        let mut ra = row_marginals.to_vec();
        let mut rb = col_marginals.to_vec();
        let (mut i, mut j) = (0, 0);
        while i < m && j < n {
            if ra[i] <= 0.0 {
                i += 1;
                continue;
            }
            if rb[j] <= 0.0 {
                j += 1;
                continue;
            }
            if close_rel(ra[i], rb[j], MASS_TOL) {
                data[i * n + j] += ra[i];
                i += 1;
                j += 1;
            } else if ra[i] < rb[j] {
                data[i * n + j] += ra[i];
                rb[j] -= ra[i];
                i += 1;
            } else {
                data[i * n + j] += rb[j];
                ra[i] -= rb[j];
                j += 1;
            }
        }
        Self::from_parts(data, row_marginals.to_vec(), col_marginals.to_vec())
    }

    /// Coupling that sends row block `i` wholly to column block `target[i]`.
    /// Requires matching masses along the assignment.
    pub fn from_assignment(
        target: &[usize],
        row_marginals: &[f64],
        col_marginals: &[f64],
    ) -> Result<Self> {
        let n = col_marginals.len();
        let mut data = vec![0.0; row_marginals.len() * n];
        for (i, &j) in target.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidArgument("assignment target out of range"));
            }
            data[i * n + j] += row_marginals[i];
        }
        Self::new(data, row_marginals.to_vec(), col_marginals.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row_marginals(&self) -> &[f64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[f64] {
        &self.col_marginals
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        sum_compensated(self.data[i * self.cols..(i + 1) * self.cols].iter().copied())
    }

    pub fn col_sum(&self, j: usize) -> f64 {
        sum_compensated((0..self.rows).map(|i| self.data[i * self.cols + j]))
    }

    /// Cells with positive mass, row-major: `(row, col, mass)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(move |(idx, &x)| (idx / cols, idx % cols, x))
    }

    pub fn support_size(&self) -> usize {
        self.data.iter().filter(|&&x| x > 0.0).count()
    }

    /// Convex combination `(1 − γ)·self + γ·other`.
    pub fn mix(&self, other: &Self, gamma: f64) -> Self {
        debug_assert_eq!(self.data.len(), other.data.len());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| {
                if gamma >= 1.0 {
                    b
                } else if gamma <= 0.0 {
                    a
                } else {
                    (1.0 - gamma) * a + gamma * b
                }
            })
            .collect();
        Self::from_parts(data, self.row_marginals.clone(), self.col_marginals.clone())
    }

    /// Transpose: a coupling of the second space with the first.
    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Self::from_parts(data, self.col_marginals.clone(), self.row_marginals.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn northwest_corner_matches_marginals() {
        let c = Coupling::northwest_corner(&[0.5, 0.5, 1.0], &[1.0, 0.25, 0.75]);
        let checked = Coupling::new(c.as_slice().to_vec(), vec![0.5, 0.5, 1.0], vec![1.0, 0.25, 0.75]);
        assert!(checked.is_ok());
        assert_eq!(c.get(0, 0), 0.5);
        assert_eq!(c.get(1, 0), 0.5);
        assert_eq!(c.get(2, 1), 0.25);
        assert_eq!(c.get(2, 2), 0.75);
    }

    #[test]
    fn northwest_corner_snaps_near_equal_masses() {
        let a = 0.1 + 0.2;
        let c = Coupling::northwest_corner(&[a, 1.0], &[0.3, 1.0]);
        assert_eq!(c.support_size(), 2);
    }

    #[test]
    fn rejects_bad_marginals() {
        let err = Coupling::new(vec![1.0, 0.0, 0.0, 0.5], vec![1.0, 1.0], vec![1.0, 1.0]);
        assert!(matches!(err, Err(Error::MarginalMismatch { axis: Axis::Row, index: 1, .. })));
        let neg = Coupling::new(vec![-1.0], vec![-1.0], vec![-1.0]);
        assert!(neg.is_err());
    }

    #[test]
    fn transposition_assignment() {
        let c = Coupling::from_assignment(&[1, 0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(c.transpose().as_slice(), &[0.0, 1.0, 1.0, 0.0]);
    }
}
