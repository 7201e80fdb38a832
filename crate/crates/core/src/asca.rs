//! Additive Schur complement approximation.
//!
//! Each macrostructure matrix is split in its two-level numbering as
//!
//! ```text
//! A_G = [ A11  A12 ]   coarse
//!       [ A21  A22 ]   fine
//! ```
//!
//! and contributes its exact local Schur complement
//! `S_G = A11 - A12 A22^{-1} A21` to the coarse operator
//! `Q = sum_G R_G^T S_G R_G`. The same blocks define the auxiliary space
//! matrix used by the preconditioner: `A11~ = sum R^T A11 R`, `A12~` the
//! row of couplings and `A22~ = blockdiag(A22)`.

use serde::{Deserialize, Serialize};

use crate::dense::{Cholesky, DenseMatrix};
use crate::error::{AsmgError, Result};
use crate::sparse::SymSparseMatrix;

/// Factored blocks of one macrostructure matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalSchur {
    pub schur: DenseMatrix,
    pub a11: DenseMatrix,
    /// Coupling block, `n_coarse x n_fine`.
    pub a12: DenseMatrix,
    pub a22: Cholesky,
    pub a22_diag: Vec<f64>,
    /// First sub-diagonal of `A22` in local fine order.
    pub a22_sub: Vec<f64>,
}

/// Local Schur complement with its local-to-global maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalSchurBlock {
    pub macro_id: usize,
    /// Global coarse dof index of each local coarse row (`R_{G:1}`).
    pub coarse: Vec<usize>,
    /// Level vertex id of each local fine row.
    pub fine: Vec<usize>,
    pub local: LocalSchur,
}

impl LocalSchurBlock {
    pub fn n_coarse(&self) -> usize {
        self.coarse.len()
    }

    pub fn n_fine(&self) -> usize {
        self.fine.len()
    }
}

/// Exact dense Schur complement of `a_g` onto its first `n_coarse` rows.
///
/// The result is symmetrized and its diagonal reset to the negated sum of
/// its off-diagonal row, which restores zero row sums lost to roundoff.
pub fn local_schur_complement(a_g: &DenseMatrix, n_coarse: usize) -> Result<LocalSchur> {
    let n = a_g.rows();
    let nf = n - n_coarse;
    let a11 = a_g.block(0, n_coarse, 0, n_coarse);
    let a12 = a_g.block(0, n_coarse, n_coarse, n);
    let a22m = a_g.block(n_coarse, n, n_coarse, n);
    let a22 = Cholesky::factor(&a22m).map_err(|e| match e {
        AsmgError::NotSpd { row, pivot, .. } => AsmgError::NotSpd {
            context: format!("fine block of a macrostructure ({nf} fine dofs)"),
            row,
            pivot,
        },
        e => e,
    })?;
    let a22_diag = (0..nf).map(|i| a22m[(i, i)]).collect();
    let a22_sub = (1..nf).map(|i| a22m[(i, i - 1)]).collect();

    // X = A22^{-1} A21, one column per coarse dof
    let solved: Vec<Vec<f64>> = (0..n_coarse).map(|c| a22.solve(a12.row(c))).collect();
    let mut schur = a11.clone();
    for i in 0..n_coarse {
        for (j, x) in solved.iter().enumerate() {
            let s: f64 = a12.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            schur[(i, j)] -= s;
        }
    }
    for i in 0..n_coarse {
        for j in 0..i {
            let avg = 0.5 * (schur[(i, j)] + schur[(j, i)]);
            schur[(i, j)] = avg;
            schur[(j, i)] = avg;
        }
    }
    for i in 0..n_coarse {
        let off: f64 = (0..n_coarse).filter(|&j| j != i).map(|j| schur[(i, j)]).sum();
        schur[(i, i)] = -off;
    }
    Ok(LocalSchur {
        schur,
        a11,
        a12,
        a22,
        a22_diag,
        a22_sub,
    })
}

/// `Q = sum_G R_{G:1}^T S_G R_{G:1}` on `n_coarse` global coarse dofs.
pub fn assemble_asca(blocks: &[LocalSchurBlock], n_coarse: usize) -> Result<SymSparseMatrix> {
    let mut seen = vec![false; n_coarse];
    let mut t = Vec::new();
    for b in blocks {
        for (p, &i) in b.coarse.iter().enumerate() {
            if i >= n_coarse {
                return Err(AsmgError::DimensionMismatch {
                    context: "coarse dof index",
                    expected: n_coarse,
                    found: i + 1,
                });
            }
            seen[i] = true;
            for (q, &j) in b.coarse.iter().enumerate() {
                let v = b.local.schur[(p, q)];
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(AsmgError::UncoveredCoarseDof(i));
    }
    Ok(SymSparseMatrix::from_triplets(n_coarse, &t))
}

/// Dimensions and assembled coarse block of the auxiliary matrix. The fine
/// blocks are the `A22` factors held by the [`LocalSchurBlock`]s.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuxiliaryBlocks {
    pub n1: usize,
    pub n2: usize,
    pub n_tilde: usize,
    pub a11_tilde: SymSparseMatrix,
    /// Offset of each macrostructure's fine block in the auxiliary vector.
    pub block_offsets: Vec<usize>,
}

impl AuxiliaryBlocks {
    /// `n2` is the number of fine dofs of the original space.
    pub fn build(blocks: &[LocalSchurBlock], n1: usize, n2: usize) -> Result<Self> {
        let mut t = Vec::new();
        let mut block_offsets = Vec::with_capacity(blocks.len());
        let mut off = n1;
        for b in blocks {
            if b.local.a12.rows() != b.n_coarse() || b.local.a12.cols() != b.n_fine() {
                return Err(AsmgError::DimensionMismatch {
                    context: "coupling block shape",
                    expected: b.n_coarse() * b.n_fine(),
                    found: b.local.a12.rows() * b.local.a12.cols(),
                });
            }
            block_offsets.push(off);
            off += b.n_fine();
            for (p, &i) in b.coarse.iter().enumerate() {
                for (q, &j) in b.coarse.iter().enumerate() {
                    let v = b.local.a11[(p, q)];
                    if v != 0.0 {
                        t.push((i, j, v));
                    }
                }
            }
        }
        Ok(Self {
            n1,
            n2,
            n_tilde: off,
            a11_tilde: SymSparseMatrix::from_triplets(n1, &t),
            block_offsets,
        })
    }

    /// Dense `A~`, for verification on small problems.
    pub fn to_dense(&self, blocks: &[LocalSchurBlock]) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n_tilde, self.n_tilde);
        let d = self.a11_tilde.to_dense();
        for i in 0..self.n1 {
            for j in 0..self.n1 {
                m[(i, j)] = d[(i, j)];
            }
        }
        for (b, &off) in blocks.iter().zip(&self.block_offsets) {
            let nf = b.n_fine();
            let mut e = vec![0.0; nf];
            for q in 0..nf {
                e.iter_mut().for_each(|x| *x = 0.0);
                e[q] = 1.0;
                let col = b.local.a22.mul_vec(&e);
                for p in 0..nf {
                    m[(off + p, off + q)] = col[p];
                }
            }
            for (p, &i) in b.coarse.iter().enumerate() {
                for q in 0..nf {
                    m[(i, off + q)] = b.local.a12[(p, q)];
                    m[(off + q, i)] = b.local.a12[(p, q)];
                }
            }
        }
        m
    }

    /// `R A~ R^T` in the original numbering; `coarse_ids[c]` is the level
    /// vertex of coarse dof `c`.
    pub fn reconstruct(&self, blocks: &[LocalSchurBlock], coarse_ids: &[usize], n: usize) -> SymSparseMatrix {
        let mut t = Vec::new();
        for i in 0..self.n1 {
            let (cols, vals) = self.a11_tilde.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                t.push((coarse_ids[i], coarse_ids[j], v));
            }
        }
        for b in blocks {
            let nf = b.n_fine();
            let mut e = vec![0.0; nf];
            for q in 0..nf {
                e.iter_mut().for_each(|x| *x = 0.0);
                e[q] = 1.0;
                let col = b.local.a22.mul_vec(&e);
                for p in 0..nf {
                    if col[p] != 0.0 {
                        t.push((b.fine[p], b.fine[q], col[p]));
                    }
                }
            }
            for (p, &i) in b.coarse.iter().enumerate() {
                for (q, &f) in b.fine.iter().enumerate() {
                    let v = b.local.a12[(p, q)];
                    if v != 0.0 {
                        t.push((coarse_ids[i], f, v));
                        t.push((f, coarse_ids[i], v));
                    }
                }
            }
        }
        SymSparseMatrix::from_triplets(n, &t)
    }
}

/// Outcome of checking the coarse operator against the pattern predicted by
/// the local Schur complements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityAudit {
    /// Nonzeros `q_ij` with no local block containing both `i` and `j`.
    pub pattern_violations: usize,
    /// Maximum degree of the factor graph (blocks sharing a coarse dof).
    pub c1: usize,
    /// Largest number of coarse dofs in one block.
    pub c2: usize,
    /// Row bound `(c1 + 1)(c2 - 1) + 1`.
    pub c3: usize,
    pub max_row_nnz: usize,
    pub bound_holds: bool,
}

/// Audits `q` against the blocks it was assembled from.
pub fn audit_sparsity(q: &SymSparseMatrix, blocks: &[LocalSchurBlock]) -> SparsityAudit {
    let n = q.n();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, b) in blocks.iter().enumerate() {
        for &i in &b.coarse {
            holders[i].push(k);
        }
    }

    let mut violations = 0;
    let mut mark = vec![usize::MAX; n];
    for i in 0..n {
        for &k in &holders[i] {
            for &j in &blocks[k].coarse {
                mark[j] = i;
            }
        }
        let (cols, vals) = q.row(i);
        violations += cols
            .iter()
            .zip(vals)
            .filter(|&(&j, &v)| v != 0.0 && mark[j] != i)
            .count();
    }

    // factor graph degree
    let mut c1 = 0;
    let mut seen = vec![usize::MAX; blocks.len()];
    for (k, b) in blocks.iter().enumerate() {
        let mut deg = 0;
        for &i in &b.coarse {
            for &other in &holders[i] {
                if other != k && seen[other] != k {
                    seen[other] = k;
                    deg += 1;
                }
            }
        }
        c1 = c1.max(deg);
    }
    let c2 = blocks.iter().map(LocalSchurBlock::n_coarse).max().unwrap_or(0);
    let c3 = (c1 + 1) * c2.saturating_sub(1) + 1;
    let max_row_nnz = q.max_row_nnz();
    SparsityAudit {
        pattern_violations: violations,
        c1,
        c2,
        c3,
        max_row_nnz,
        bound_holds: max_row_nnz <= c3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_laplacian;
    use crate::generators;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn path_schur_onto_endpoints() {
        // local order: coarse {0, 2}, fine {1}
        let a = dense(&[&[1.0, 0.0, -1.0], &[0.0, 1.0, -1.0], &[-1.0, -1.0, 2.0]]);
        let s = local_schur_complement(&a, 2).unwrap();
        let expect = [[0.5, -0.5], [-0.5, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.schur[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn no_fine_dofs_returns_the_matrix() {
        let a = build_laplacian(&generators::complete(3)).to_dense();
        let s = local_schur_complement(&a, 3).unwrap();
        assert_eq!(s.schur, a);
        assert_eq!(s.a22.n(), 0);
    }

    #[test]
    fn triangle_schur_onto_one_vertex_is_zero() {
        let a = build_laplacian(&generators::complete(3)).to_dense();
        let s = local_schur_complement(&a, 1).unwrap();
        assert_eq!(s.schur[(0, 0)], 0.0);
    }

    #[test]
    fn disconnected_fine_vertex_is_not_spd() {
        // vertex 2 is isolated from everything
        let a = dense(&[&[1.0, -1.0, 0.0], &[-1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert!(matches!(local_schur_complement(&a, 2), Err(AsmgError::NotSpd { .. })));
    }

    fn block(coarse: Vec<usize>, schur: DenseMatrix) -> LocalSchurBlock {
        let n = coarse.len();
        LocalSchurBlock {
            macro_id: 0,
            coarse,
            fine: vec![],
            local: LocalSchur {
                a11: schur.clone(),
                schur,
                a12: DenseMatrix::zeros(n, 0),
                a22: Cholesky::factor(&DenseMatrix::zeros(0, 0)).unwrap(),
                a22_diag: vec![],
                a22_sub: vec![],
            },
        }
    }

    #[test]
    fn single_block_is_identity_assembly() {
        let s = build_laplacian(&generators::path(3)).to_dense();
        let q = assemble_asca(&[block(vec![0, 1, 2], s.clone())], 3).unwrap();
        assert_eq!(q.to_dense(), s);
    }

    #[test]
    fn disjoint_blocks_give_block_diagonal_q() {
        let e = dense(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let q = assemble_asca(&[block(vec![0, 2], e.clone()), block(vec![1, 3], e)], 4).unwrap();
        assert_eq!(q.get(0, 1), 0.0);
        assert_eq!(q.get(0, 2), -1.0);
        assert_eq!(q.get(1, 3), -1.0);
        let audit = audit_sparsity(&q, &[]);
        // no blocks supplied: every nonzero is unexplained
        assert_eq!(audit.pattern_violations, q.nnz());
    }

    #[test]
    fn uncovered_coarse_dof_is_reported() {
        let e = dense(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert!(matches!(
            assemble_asca(&[block(vec![0, 2], e)], 3),
            Err(AsmgError::UncoveredCoarseDof(1))
        ));
    }

    #[test]
    fn audit_of_single_clique_block() {
        let s = build_laplacian(&generators::complete(4)).to_dense();
        let blocks = [block(vec![0, 1, 2, 3], s)];
        let q = assemble_asca(&blocks, 4).unwrap();
        let audit = audit_sparsity(&q, &blocks);
        assert_eq!(audit.pattern_violations, 0);
        assert_eq!((audit.c1, audit.c2, audit.c3), (0, 4, 4));
        assert_eq!(audit.max_row_nnz, 4);
        assert!(audit.bound_holds);
    }
}
