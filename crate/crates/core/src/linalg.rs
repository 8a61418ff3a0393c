//! Dense exact linear algebra over the rationals: Gaussian elimination,
//! rank, nullspace and linear system solving. Matrices are small (tens of
//! rows) so fraction-free tricks are not needed.

use num_traits::{One, Zero};

use crate::num::{is_zero_vec, zeros, QVector, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: Vec<QVector>,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Inconsistent,
    /// The system has exactly one solution.
    Unique(QVector),
    /// Underdetermined; the carried vector is the particular solution with
    /// all free variables set to zero.
    Many(QVector),
}

impl QMatrix {
    pub fn new(rows: Vec<QVector>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        QMatrix { rows, cols }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows.len()).find(|&i| !self.rows[i][c].is_zero()) else {
                continue;
            };
            self.rows.swap(r, p);
            let inv = {
                let lead = self.rows[r][c].clone();
                Rational::one() / lead
            };
            for x in self.rows[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..self.rows.len() {
                if i != r && !self.rows[i][c].is_zero() {
                    let f = self.rows[i][c].clone();
                    for j in 0..self.cols {
                        let delta = &self.rows[r][j] * &f;
                        self.rows[i][j] = &self.rows[i][j] - &delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of `{x : Mx = 0}`.
    pub fn nullspace(&self) -> Vec<QVector> {
        let mut m = self.clone();
        let pivots = m.rref();
        let is_pivot: Vec<bool> = {
            let mut b = vec![false; self.cols];
            for &c in &pivots {
                b[c] = true;
            }
            b
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = zeros(self.cols);
            v[free] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.rows[r][free].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Indices of a maximal linearly independent subset of the rows, in
    /// input order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut picked: Vec<usize> = Vec::new();
        let mut echelon: Vec<QVector> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut v = row.clone();
            for e in &echelon {
                // e is normalized with leading 1 at its pivot position
                let pc = e.iter().position(|x| !x.is_zero()).unwrap();
                if !v[pc].is_zero() {
                    let f = v[pc].clone();
                    for j in 0..self.cols {
                        let delta = &e[j] * &f;
                        v[j] = &v[j] - &delta;
                    }
                }
            }
            if !is_zero_vec(&v) {
                let pc = v.iter().position(|x| !x.is_zero()).unwrap();
                let inv = Rational::one() / v[pc].clone();
                for x in v.iter_mut() {
                    *x = &*x * &inv;
                }
                echelon.push(v);
                echelon.sort_by_key(|e| e.iter().position(|x| !x.is_zero()).unwrap());
                picked.push(i);
            }
        }
        picked
    }

    /// Solve `Mx = b` exactly.
    pub fn solve(&self, b: &[Rational]) -> Solution {
        debug_assert_eq!(b.len(), self.rows.len());
        let mut aug = QMatrix::new(
            self.rows
                .iter()
                .zip(b)
                .map(|(r, bi)| {
                    let mut row = r.clone();
                    row.push(bi.clone());
                    row
                })
                .collect(),
            self.cols + 1,
        );
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Solution::Inconsistent;
        }
        let mut x = zeros(self.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.rows[r][self.cols].clone();
        }
        if pivots.len() == self.cols {
            Solution::Unique(x)
        } else {
            Solution::Many(x)
        }
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.cols;
        if self.rows.len() != n {
            return None;
        }
        let mut aug = QMatrix::new(
            self.rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = r.clone();
                    row.extend(crate::num::unit(n, i));
                    row
                })
                .collect(),
            2 * n,
        );
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(QMatrix::new(
            aug.rows.into_iter().map(|r| r[n..].to_vec()).collect(),
            n,
        ))
    }
}

/// Dimension of the affine hull of a point set (-1 for the empty set).
pub fn affine_dim(points: &[QVector]) -> i64 {
    match points.first() {
        None => -1,
        Some(p0) => {
            let dirs: Vec<QVector> = points[1..].iter().map(|p| crate::num::sub(p, p0)).collect();
            if dirs.is_empty() {
                0
            } else {
                let cols = p0.len();
                QMatrix::new(dirs, cols).rank() as i64
            }
        }
    }
}
