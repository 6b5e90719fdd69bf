//! Dense matrices over GF(2^s) and Gaussian elimination.

use crate::gf2e::{Fe, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    /// Builds from row vectors; all rows must share a length.
    pub fn from_rows(rows: &[Vec<Fe>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Fe>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Fe] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Fe) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Fe] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Fe]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn col(&self, c: usize) -> Vec<Fe> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            let src = self.row(r);
            for (j, &c) in idx.iter().enumerate() {
                out.data[r * idx.len() + j] = src[c];
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// M v.
    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        self.row_iter().map(|row| f.dot(row, v)).collect()
    }

    /// M v, touching only the nonzero entries of v.
    pub fn mul_sparse_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        let nz: Vec<(usize, Fe)> =
            v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, &x)| (i, x)).collect();
        self.row_iter()
            .map(|row| nz.iter().fold(Fe::ZERO, |acc, &(i, x)| acc + f.mul(row[i], x)))
            .collect()
    }

    /// u^T M.
    pub fn vec_mul(&self, f: &Field, u: &[Fe]) -> Vec<Fe> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![Fe::ZERO; self.cols];
        for (r, &c) in u.iter().enumerate() {
            f.axpy(c, self.row(r), &mut out);
        }
        out
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![Fe::ZERO; other.cols];
            for (k, &c) in self.row(r).iter().enumerate() {
                f.axpy(c, other.row(k), &mut acc);
            }
            out.row_mut(r).copy_from_slice(&acc);
        }
        out
    }

    /// In-place reduced row echelon form, pivoting only in columns `< pivot_limit`.
    /// Pivots are normalized to 1; returns the pivot columns in row order.
    pub fn rref_limited(&mut self, f: &Field, pivot_limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut buf = vec![Fe::ZERO; self.cols];
        for c in 0..pivot_limit.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            let cols = self.cols;
            f.scale(inv, &mut self.row_mut(r)[c..]);
            buf[c..].copy_from_slice(&self.data[r * cols + c..(r + 1) * cols]);
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let x = self.get(i, c);
                if !x.is_zero() {
                    f.axpy(x, &buf[c..], &mut self.data[i * cols + c..(i + 1) * cols]);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        self.rref_limited(f, self.cols)
    }

    pub fn rank(&self, f: &Field) -> usize {
        // Eliminate on the smaller side.
        if self.cols < self.rows {
            return self.transpose().rank(f);
        }
        self.clone().rref(f).len()
    }

    /// Basis of {v : M v = 0}, one vector per free column in ascending order,
    /// with that free variable set to 1.
    pub fn kernel(&self, f: &Field) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[free] = Fe::ONE;
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = m.get(i, free);
                }
                v
            })
            .collect()
    }

    /// Basis of {u : u^T M = 0}.
    pub fn left_kernel(&self, f: &Field) -> Vec<Vec<Fe>> {
        self.transpose().kernel(f)
    }

    /// Some x with M x = b (free variables zero), or None when inconsistent.
    pub fn solve(&self, f: &Field, b: &[Fe]) -> Option<Vec<Fe>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, b[r]);
        }
        let pivots = aug.rref_limited(f, self.cols);
        if (pivots.len()..self.rows).any(|r| !aug.get(r, self.cols).is_zero()) {
            return None;
        }
        let mut x = vec![Fe::ZERO; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(i, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, or None when singular.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.set(r, n + r, Fe::ONE);
        }
        if aug.rref_limited(f, n).len() < n {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(aug.select_cols(&idx))
    }
}
