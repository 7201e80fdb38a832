//! The transfer `Pi = (R D R^T)^{-1} R D` from the auxiliary space back to
//! the level space, and its transpose.
//!
//! Auxiliary vectors are laid out as the `n1` coarse dofs followed by the
//! fine copies of each macrostructure at `AuxiliaryBlocks::block_offsets`.
//! `R` keeps the coarse part and sums the fine copies. `D` is the identity
//! on the coarse part and a per-block approximation of `A22` on the fine
//! part, so `R D R^T` only has a nontrivial fine block `F`.

use serde::{Deserialize, Serialize};

use crate::asca::LocalSchurBlock;
use crate::error::{AsmgError, Result};
use crate::hierarchy::CoarseSplit;
use crate::krylov::{Jacobi, Preconditioner};
use crate::sparse::{axpy, dot, norm2, SymSparseMatrix};

/// Which part of each fine block weights the fine copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DTildeKind {
    /// `diag(A22)`: `F` is diagonal and `Pi` is a weighted average.
    #[default]
    Diagonal,
    /// The full block `A22`.
    Exact,
    /// Diagonal and first off-diagonals of `A22`.
    Tridiagonal,
}

enum FineSolver {
    Diagonal(Vec<f64>),
    Sparse { f: SymSparseMatrix, jacobi: Jacobi },
}

const FINE_TOL: f64 = 1e-14;
const FINE_MAX_ITERS: usize = 2000;

/// Transfer data of one level. Borrows the level's split.
pub struct Transfer<'a> {
    split: &'a CoarseSplit,
    kind: DTildeKind,
    n: usize,
    /// Fine rank of each level vertex, `usize::MAX` for coarse ones.
    fine_rank: Vec<usize>,
    solver: FineSolver,
}

impl<'a> Transfer<'a> {
    pub fn new(split: &'a CoarseSplit, n: usize, kind: DTildeKind) -> Result<Self> {
        let mut fine_rank = vec![usize::MAX; n];
        for (r, &v) in split.fine_ids.iter().enumerate() {
            fine_rank[v] = r;
        }
        let n2 = split.fine_ids.len();
        let solver = match kind {
            DTildeKind::Diagonal => {
                let mut f = vec![0.0; n2];
                for b in &split.blocks {
                    for (&v, &d) in b.fine.iter().zip(&b.local.a22_diag) {
                        f[fine_rank[v]] += d;
                    }
                }
                if let Some(i) = f.iter().position(|&d| !(d > 0.0)) {
                    return Err(AsmgError::NotSpd {
                        context: "diagonal of R D R^T".into(),
                        row: split.fine_ids[i],
                        pivot: f[i],
                    });
                }
                FineSolver::Diagonal(f.into_iter().map(|d| 1.0 / d).collect())
            }
            DTildeKind::Exact | DTildeKind::Tridiagonal => {
                let mut t = Vec::new();
                for b in &split.blocks {
                    let rows = fine_block(b, kind);
                    for (p, row) in rows.iter().enumerate() {
                        for &(q, v) in row {
                            t.push((fine_rank[b.fine[p]], fine_rank[b.fine[q]], v));
                        }
                    }
                }
                let f = SymSparseMatrix::from_triplets(n2, &t);
                let jacobi = Jacobi::new(&f);
                FineSolver::Sparse { f, jacobi }
            }
        };
        Ok(Self {
            split,
            kind,
            n,
            fine_rank,
            solver,
        })
    }

    pub fn kind(&self) -> DTildeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_tilde(&self) -> usize {
        self.split.aux.n_tilde
    }

    fn solve_fine(&self, b: &[f64]) -> Result<Vec<f64>> {
        match &self.solver {
            FineSolver::Diagonal(inv) => Ok(b.iter().zip(inv).map(|(b, d)| b * d).collect()),
            FineSolver::Sparse { f, jacobi } => cg(f, b, jacobi),
        }
    }

    fn apply_d(&self, b: &LocalSchurBlock, x: &[f64]) -> Vec<f64> {
        let l = &b.local;
        match self.kind {
            DTildeKind::Diagonal => x.iter().zip(&l.a22_diag).map(|(x, d)| x * d).collect(),
            DTildeKind::Exact => l.a22.mul_vec(x),
            DTildeKind::Tridiagonal => {
                let mut y: Vec<f64> = x.iter().zip(&l.a22_diag).map(|(x, d)| x * d).collect();
                for (i, &s) in l.a22_sub.iter().enumerate() {
                    y[i + 1] += s * x[i];
                    y[i] += s * x[i + 1];
                }
                y
            }
        }
    }

    /// `Pi w` for an auxiliary vector `w`.
    pub fn apply_pi(&self, w: &[f64]) -> Result<Vec<f64>> {
        let aux = &self.split.aux;
        check_len("auxiliary vector", aux.n_tilde, w.len())?;
        let mut out = vec![0.0; self.n];
        for (c, &v) in self.split.coarse_ids().iter().enumerate() {
            out[v] = w[c];
        }
        let mut acc = vec![0.0; self.split.fine_ids.len()];
        for (b, &off) in self.split.blocks.iter().zip(&aux.block_offsets) {
            let dw = self.apply_d(b, &w[off..off + b.n_fine()]);
            for (&v, x) in b.fine.iter().zip(dw) {
                acc[self.fine_rank[v]] += x;
            }
        }
        let y = self.solve_fine(&acc)?;
        for (&v, x) in self.split.fine_ids.iter().zip(y) {
            out[v] = x;
        }
        Ok(out)
    }

    /// `Pi^T d` for a level vector `d`.
    pub fn apply_pi_transpose(&self, d: &[f64]) -> Result<Vec<f64>> {
        let aux = &self.split.aux;
        check_len("level vector", self.n, d.len())?;
        let mut out = vec![0.0; aux.n_tilde];
        for (c, &v) in self.split.coarse_ids().iter().enumerate() {
            out[c] = d[v];
        }
        let dfine: Vec<f64> = self.split.fine_ids.iter().map(|&v| d[v]).collect();
        let y = self.solve_fine(&dfine)?;
        for (b, &off) in self.split.blocks.iter().zip(&aux.block_offsets) {
            let local: Vec<f64> = b.fine.iter().map(|&v| y[self.fine_rank[v]]).collect();
            out[off..off + b.n_fine()].copy_from_slice(&self.apply_d(b, &local));
        }
        Ok(out)
    }

    /// `R^T v`: copies of `v` in the auxiliary layout.
    pub fn inclusion_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        let aux = &self.split.aux;
        check_len("level vector", self.n, v.len())?;
        let mut out = vec![0.0; aux.n_tilde];
        for (c, &u) in self.split.coarse_ids().iter().enumerate() {
            out[c] = v[u];
        }
        for (b, &off) in self.split.blocks.iter().zip(&aux.block_offsets) {
            for (p, &u) in b.fine.iter().enumerate() {
                out[off + p] = v[u];
            }
        }
        Ok(out)
    }
}

fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(AsmgError::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Rows of the fine weighting block as `(column, value)` lists.
fn fine_block(b: &LocalSchurBlock, kind: DTildeKind) -> Vec<Vec<(usize, f64)>> {
    let l = &b.local;
    let nf = b.n_fine();
    let mut rows: Vec<Vec<(usize, f64)>> = (0..nf).map(|i| vec![(i, l.a22_diag[i])]).collect();
    match kind {
        DTildeKind::Diagonal => {}
        DTildeKind::Tridiagonal => {
            for (i, &s) in l.a22_sub.iter().enumerate() {
                rows[i + 1].push((i, s));
                rows[i].push((i + 1, s));
            }
        }
        DTildeKind::Exact => {
            let mut e = vec![0.0; nf];
            for q in 0..nf {
                e.iter_mut().for_each(|x| *x = 0.0);
                e[q] = 1.0;
                let col = l.a22.mul_vec(&e);
                for (p, &v) in col.iter().enumerate() {
                    if p != q && v != 0.0 {
                        rows[p].push((q, v));
                    }
                }
            }
        }
    }
    rows
}

/// Jacobi-preconditioned CG on the SPD matrix `f`.
fn cg(f: &SymSparseMatrix, b: &[f64], pre: &Jacobi) -> Result<Vec<f64>> {
    let n = f.n();
    let mut x = vec![0.0; n];
    let b0 = norm2(b);
    if b0 == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    pre.apply(&r, &mut z)?;
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    for _ in 0..FINE_MAX_ITERS {
        f.matvec(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(AsmgError::NotSpd {
                context: "R D R^T".into(),
                row: 0,
                pivot: pq,
            });
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        if norm2(&r) <= FINE_TOL * b0 {
            break;
        }
        pre.apply(&r, &mut z)?;
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    Ok(x)
}
