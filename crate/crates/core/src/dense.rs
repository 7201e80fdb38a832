//! Small dense kernels for local blocks: row-major matrices and a packed
//! Cholesky factorization.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{AsmgError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Square sub-block or rectangular slice `[r0, r1) x [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DenseMatrix {
        let mut b = DenseMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            b.row_mut(i - r0).copy_from_slice(&self.row(i)[c0..c1]);
        }
        b
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                out.row_mut(i)
                    .iter_mut()
                    .zip(orow)
                    .for_each(|(o, b)| *o += a * b);
            }
        }
        out
    }

    /// `y = M x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y += M^T x`
    pub fn mul_t_vec_add(&self, x: &[f64], y: &mut [f64]) {
        for (i, &xi) in x.iter().enumerate().take(self.rows) {
            if xi == 0.0 {
                continue;
            }
            y.iter_mut()
                .zip(self.row(i))
                .for_each(|(yj, a)| *yj += a * xi);
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower Cholesky factor `L` with `A = L L^T`, stored packed by rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cholesky {
    n: usize,
    packed: Vec<f64>,
}

#[inline]
fn tri(i: usize) -> usize {
    i * (i + 1) / 2
}

/// Dot product with four independent accumulators, which lets the compiler
/// vectorize the loop.
#[inline]
pub(crate) fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

impl Cholesky {
    /// Factors the symmetric matrix `a`; only the lower triangle is read.
    /// A pivot below `tiny * max_diag` counts as a failure.
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols());
        let mut packed = vec![0.0; tri(n)];
        for i in 0..n {
            packed[tri(i)..tri(i) + i + 1].copy_from_slice(&a.row(i)[..=i]);
        }
        Self::factor_packed(n, packed)
    }

    /// Factors `a + shift * 1 1^T` for a sparse symmetric `a` without forming
    /// the full dense matrix.
    pub fn factor_shifted(a: &crate::sparse::SymSparseMatrix, shift: f64) -> Result<Self> {
        let n = a.n();
        let mut packed = vec![shift; tri(n)];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    packed[tri(i) + j] += v;
                }
            }
        }
        Self::factor_packed(n, packed)
    }

    /// Factors from a packed lower triangle (row `i` holds columns `0..=i`).
    pub fn factor_packed(n: usize, mut packed: Vec<f64>) -> Result<Self> {
        assert_eq!(packed.len(), tri(n));
        let max_diag = (0..n).map(|i| packed[tri(i) + i].abs()).fold(0.0, f64::max);
        let floor = max_diag * 1e-14;
        for i in 0..n {
            let (done, rest) = packed.split_at_mut(tri(i));
            let row_i = &mut rest[..=i];
            for j in 0..i {
                let row_j = &done[tri(j)..tri(j) + j + 1];
                let s = dot4(&row_i[..j], &row_j[..j]);
                row_i[j] = (row_i[j] - s) / row_j[j];
            }
            let d = row_i[i] - dot4(&row_i[..i], &row_i[..i]);
            if !(d > floor) {
                return Err(AsmgError::NotSpd {
                    context: format!("cholesky of order {n}"),
                    row: i,
                    pivot: d,
                });
            }
            row_i[i] = d.sqrt();
        }
        Ok(Self { n, packed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let row = &self.packed[tri(i)..tri(i) + i + 1];
            let s = dot4(&row[..i], &b[..i]);
            b[i] = (b[i] - s) / row[i];
        }
        for i in (0..n).rev() {
            let row = &self.packed[tri(i)..tri(i) + i + 1];
            b[i] /= row[i];
            let xi = b[i];
            b[..i].iter_mut().zip(&row[..i]).for_each(|(bj, l)| *bj -= l * xi);
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `y = A x = L (L^T x)` from the factor alone.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut t = vec![0.0; n];
        for i in 0..n {
            let row = &self.packed[tri(i)..tri(i) + i + 1];
            for (j, l) in row.iter().enumerate() {
                t[j] += l * x[i];
            }
        }
        (0..n)
            .map(|i| {
                let row = &self.packed[tri(i)..tri(i) + i + 1];
                row.iter().zip(&t[..=i]).map(|(l, v)| l * v).sum()
            })
            .collect()
    }

    /// Memory held by the factor, in f64 words.
    pub fn stored_len(&self) -> usize {
        self.packed.len()
    }
}
