//! Gauss-Seidel smoothing.

use crate::error::{AsmgError, Result};
use crate::sparse::SymSparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One in-place Gauss-Seidel sweep for `A x = b`.
pub fn gauss_seidel_sweep(a: &SymSparseMatrix, x: &mut [f64], b: &[f64], dir: Direction) -> Result<()> {
    let n = a.n();
    if x.len() != n || b.len() != n {
        return Err(AsmgError::DimensionMismatch {
            context: "Gauss-Seidel vector length",
            expected: n,
            found: if x.len() != n { x.len() } else { b.len() },
        });
    }
    let mut relax = |i: usize| -> Result<()> {
        let (cols, vals) = a.row(i);
        let mut diag = 0.0;
        let mut s = b[i];
        for (&j, &v) in cols.iter().zip(vals) {
            if j == i {
                diag = v;
            } else {
                s -= v * x[j];
            }
        }
        if diag <= 0.0 {
            if cols.iter().all(|&j| j == i) {
                // isolated row: nothing to couple
                return Ok(());
            }
            return Err(AsmgError::ZeroDiagonal(i));
        }
        x[i] = s / diag;
        Ok(())
    };
    match dir {
        Direction::Forward => (0..n).try_for_each(&mut relax),
        Direction::Backward => (0..n).rev().try_for_each(&mut relax),
    }
}

/// Pre-smoothing with forward sweeps and post-smoothing with backward
/// sweeps, so the smoothed operator stays symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Smoother {
    pub sweeps: usize,
}

impl Smoother {
    pub fn new(sweeps: usize) -> Self {
        Self { sweeps }
    }

    pub fn pre(&self, a: &SymSparseMatrix, x: &mut [f64], b: &[f64]) -> Result<()> {
        (0..self.sweeps).try_for_each(|_| gauss_seidel_sweep(a, x, b, Direction::Forward))
    }

    pub fn post(&self, a: &SymSparseMatrix, x: &mut [f64], b: &[f64]) -> Result<()> {
        (0..self.sweeps).try_for_each(|_| gauss_seidel_sweep(a, x, b, Direction::Backward))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::generators;
    use crate::graph::build_laplacian;
    use crate::krylov::random_start;
    use crate::sparse::dot;

    fn two_by_two() -> SymSparseMatrix {
        SymSparseMatrix::from_dense(&DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]))
    }

    #[test]
    fn forward_sweep_hand_trace() {
        let a = two_by_two();
        let mut x = vec![0.0; 2];
        gauss_seidel_sweep(&a, &mut x, &[1.0, 1.0], Direction::Forward).unwrap();
        assert_eq!(x, vec![0.5, 0.75]);
    }

    #[test]
    fn exact_solution_is_fixed_point() {
        let a = build_laplacian(&generators::cycle(7));
        let x0 = random_start(7, 3);
        let b = a.mul_vec(&x0);
        for dir in [Direction::Forward, Direction::Backward] {
            let mut x = x0.clone();
            gauss_seidel_sweep(&a, &mut x, &b, dir).unwrap();
            for (u, v) in x.iter().zip(&x0) {
                assert!((u - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn backward_equals_forward_on_reversed_numbering() {
        let g = generators::random_connected(12, 0.2, 5);
        let a = build_laplacian(&g);
        let n = 12;
        let rev = |i: usize| n - 1 - i;
        let edges: Vec<_> = g.edges().map(|(u, v)| (rev(u), rev(v))).collect();
        let ar = build_laplacian(&crate::graph::Graph::from_edges(n, &edges));
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let br: Vec<f64> = (0..n).map(|i| b[rev(i)]).collect();
        let mut x = random_start(n, 1);
        let mut xr: Vec<f64> = (0..n).map(|i| x[rev(i)]).collect();
        gauss_seidel_sweep(&a, &mut x, &b, Direction::Backward).unwrap();
        gauss_seidel_sweep(&ar, &mut xr, &br, Direction::Forward).unwrap();
        for i in 0..n {
            assert!((x[i] - xr[rev(i)]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_diagonal_is_reported() {
        let a = SymSparseMatrix::from_triplets(2, &[(0, 1, -1.0), (1, 0, -1.0), (1, 1, 1.0)]);
        let mut x = vec![0.0; 2];
        assert!(matches!(
            gauss_seidel_sweep(&a, &mut x, &[0.0, 0.0], Direction::Forward),
            Err(AsmgError::ZeroDiagonal(0))
        ));
    }

    #[test]
    fn energy_seminorm_does_not_increase() {
        // b = 0, so the error is the iterate itself modulo constants
        for seed in 0..5 {
            let a = build_laplacian(&generators::random_connected(40, 0.08, seed));
            let energy = |x: &[f64]| dot(x, &a.mul_vec(x));
            let mut x = random_start(40, seed + 10);
            let mut prev = energy(&x);
            for dir in [Direction::Forward, Direction::Backward, Direction::Forward] {
                gauss_seidel_sweep(&a, &mut x, &[0.0; 40], dir).unwrap();
                let e = energy(&x);
                assert!(e <= prev * (1.0 + 1e-12), "{e} > {prev}");
                prev = e;
            }
        }
    }
}
