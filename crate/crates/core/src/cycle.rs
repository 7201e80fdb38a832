//! Auxiliary space multigrid preconditioner.
//!
//! On each level the residual is pre-smoothed, moved to the auxiliary space
//! with `Pi^T`, solved there through the two-by-two block factorization of
//! the auxiliary matrix (whose Schur complement is the next level matrix),
//! moved back with `Pi` and post-smoothed. The coarse Schur complement
//! system is solved exactly on the coarsest level and otherwise by `nu`
//! generalized CG steps preconditioned by the next level. `nu = 1` is the
//! V-cycle and `nu = 2` the W-cycle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{Cholesky, DenseMatrix};
use crate::error::{AsmgError, Result};
use crate::hierarchy::Hierarchy;
use crate::krylov::{gcg_solve, Preconditioner};
use crate::smoother::Smoother;
use crate::sparse::{project_out_constant, SymSparseMatrix};
use crate::transfer::{DTildeKind, Transfer};

/// How the coarse Schur complement system is solved below the second
/// coarsest level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoarseCorrection {
    /// `nu` steps of generalized CG preconditioned by the next level.
    Gcg,
    /// One application of the next level preconditioner. Keeps the whole
    /// preconditioner linear and symmetric.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclePlan {
    pub nu: usize,
    pub smoothing_steps: usize,
    pub dtilde: DTildeKind,
    pub correction: CoarseCorrection,
}

impl CyclePlan {
    pub fn v_cycle() -> Self {
        Self {
            nu: 1,
            smoothing_steps: 2,
            dtilde: DTildeKind::Diagonal,
            correction: CoarseCorrection::Gcg,
        }
    }

    pub fn w_cycle() -> Self {
        Self {
            nu: 2,
            ..Self::v_cycle()
        }
    }

    pub fn linear() -> Self {
        Self {
            correction: CoarseCorrection::Linear,
            ..Self::v_cycle()
        }
    }
}

impl Default for CyclePlan {
    fn default() -> Self {
        Self::w_cycle()
    }
}

/// Exact solver for a singular Laplacian-like matrix: dense Cholesky of
/// `A + (1/n) 1 1^T`. Right-hand sides are projected onto the range and the
/// solution returned mean free.
#[derive(Debug, Clone)]
pub struct CoarsestSolver {
    chol: Cholesky,
}

impl CoarsestSolver {
    pub fn new(a: &SymSparseMatrix) -> Result<Self> {
        let n = a.n();
        let chol = Cholesky::factor_shifted(a, 1.0 / n as f64).map_err(|e| match e {
            AsmgError::NotSpd { row, pivot, .. } => AsmgError::NotSpd {
                context: format!("coarsest matrix plus rank-1 update ({n} dofs)"),
                row,
                pivot,
            },
            e => e,
        })?;
        Ok(Self { chol })
    }

    pub fn n(&self) -> usize {
        self.chol.n()
    }

    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        let mut z = r.to_vec();
        project_out_constant(&mut z);
        self.chol.solve_in_place(&mut z);
        project_out_constant(&mut z);
        z
    }
}

/// Pseudo-inverse action of the singular matrix `a` on `r`.
pub fn coarsest_solve(a: &SymSparseMatrix, r: &[f64]) -> Result<Vec<f64>> {
    Ok(CoarsestSolver::new(a)?.solve(r))
}

/// Multilevel preconditioner over the first `n_levels` levels of a
/// hierarchy; the last of them is solved exactly.
pub struct AsmgPreconditioner<'h> {
    hierarchy: &'h Hierarchy,
    plan: CyclePlan,
    n_levels: usize,
    transfers: Vec<Transfer<'h>>,
    smoother: Smoother,
    coarsest: CoarsestSolver,
}

impl<'h> AsmgPreconditioner<'h> {
    /// Uses all levels of `hierarchy`.
    pub fn new(hierarchy: &'h Hierarchy, plan: CyclePlan) -> Result<Self> {
        Self::with_levels(hierarchy, plan, hierarchy.n_levels())
    }

    /// Uses the `n_levels` finest levels, treating the last one as coarsest.
    pub fn with_levels(hierarchy: &'h Hierarchy, plan: CyclePlan, n_levels: usize) -> Result<Self> {
        if plan.nu == 0 {
            return Err(AsmgError::InvalidConfig("nu must be at least 1".into()));
        }
        if n_levels == 0 || n_levels > hierarchy.n_levels() {
            return Err(AsmgError::InvalidConfig(format!(
                "requested {n_levels} levels, hierarchy has {}",
                hierarchy.n_levels()
            )));
        }
        let transfers = hierarchy.levels[..n_levels - 1]
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let split = l.split.as_ref().ok_or_else(|| {
                    AsmgError::InvalidConfig(format!("level {k} has no coarse split"))
                })?;
                Transfer::new(split, l.n(), plan.dtilde).map_err(|e| e.at_level(k))
            })
            .collect::<Result<Vec<_>>>()?;
        let coarsest = CoarsestSolver::new(&hierarchy.levels[n_levels - 1].a)
            .map_err(|e| e.at_level(n_levels - 1))?;
        Ok(Self {
            hierarchy,
            plan,
            n_levels,
            transfers,
            smoother: Smoother::new(plan.smoothing_steps),
            coarsest,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn plan(&self) -> CyclePlan {
        self.plan
    }

    /// Dofs per level in use, finest first.
    pub fn cdof(&self) -> Vec<usize> {
        self.hierarchy.sizes()[..self.n_levels].to_vec()
    }

    /// Applies the preconditioner of level `k` to `r`.
    pub fn apply_level(&self, k: usize, r: &[f64]) -> Result<Vec<f64>> {
        if k >= self.n_levels {
            return Err(AsmgError::InvalidConfig(format!(
                "level {k} outside the {} levels in use",
                self.n_levels
            )));
        }
        if k + 1 == self.n_levels {
            return Ok(self.coarsest.solve(r));
        }
        let z = self.two_level_step(k, r)?;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(AsmgError::NonFinite(k));
        }
        Ok(z)
    }

    fn two_level_step(&self, k: usize, r: &[f64]) -> Result<Vec<f64>> {
        let level = &self.hierarchy.levels[k];
        let a = &level.a;
        let n = a.n();
        if r.len() != n {
            return Err(AsmgError::DimensionMismatch {
                context: "residual length",
                expected: n,
                found: r.len(),
            });
        }
        let split = level.split.as_ref().expect("checked at setup");
        let transfer = &self.transfers[k];
        let aux = &split.aux;

        let mut x = vec![0.0; n];
        self.smoother.pre(a, &mut x, r)?;
        let ax = a.mul_vec(&x);
        let mut d: Vec<f64> = r.iter().zip(&ax).map(|(r, ax)| r - ax).collect();
        project_out_constant(&mut d);
        let d_aux = transfer.apply_pi_transpose(&d)?;

        // forward elimination of the fine blocks
        let t: Vec<Vec<f64>> = split
            .blocks
            .par_iter()
            .zip(&aux.block_offsets)
            .with_min_len(32)
            .map(|(b, &off)| b.local.a22.solve(&d_aux[off..off + b.n_fine()]))
            .collect();
        let mut y = d_aux[..aux.n1].to_vec();
        for (b, tb) in split.blocks.iter().zip(&t) {
            for (p, &c) in b.coarse.iter().enumerate() {
                y[c] -= crate::sparse::dot(b.local.a12.row(p), tb);
            }
        }
        project_out_constant(&mut y);

        let z_c = self.coarse_correction(k + 1, &y)?;

        // back substitution
        let w: Vec<Vec<f64>> = split
            .blocks
            .par_iter()
            .zip(&aux.block_offsets)
            .with_min_len(32)
            .map(|(b, &off)| {
                let mut rhs = d_aux[off..off + b.n_fine()].to_vec();
                let zc: Vec<f64> = b.coarse.iter().map(|&c| z_c[c]).collect();
                for (p, &zp) in zc.iter().enumerate() {
                    for (q, v) in b.local.a12.row(p).iter().enumerate() {
                        rhs[q] -= v * zp;
                    }
                }
                b.local.a22.solve_in_place(&mut rhs);
                rhs
            })
            .collect();
        let mut u_aux = z_c;
        u_aux.reserve(aux.n_tilde - aux.n1);
        for wb in w {
            u_aux.extend(wb);
        }
        let corr = transfer.apply_pi(&u_aux)?;
        x.iter_mut().zip(&corr).for_each(|(x, c)| *x += c);

        self.smoother.post(a, &mut x, r)?;
        Ok(x)
    }

    fn coarse_correction(&self, j: usize, y: &[f64]) -> Result<Vec<f64>> {
        if j + 1 == self.n_levels {
            return Ok(self.coarsest.solve(y));
        }
        let z = match self.plan.correction {
            CoarseCorrection::Linear => self.apply_level(j, y)?,
            CoarseCorrection::Gcg => {
                let a = &self.hierarchy.levels[j].a;
                gcg_solve(a, y, &LevelView { p: self, level: j }, self.plan.nu, true)
                    .map_err(|e| match e {
                        AsmgError::NonFinite(_) => AsmgError::NonFinite(j),
                        e => e,
                    })?
            }
        };
        Ok(z)
    }

    /// Dense matrix of the level-0 preconditioner restricted to the mean-free
    /// subspace, `P B^{-1} P` with `P` the projection. Only meaningful for the
    /// linear variants.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let n = self.hierarchy.levels[0].n();
        let mut m = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            project_out_constant(&mut e);
            let mut col = self.apply_level(0, &e)?;
            project_out_constant(&mut col);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }
}

struct LevelView<'p, 'h> {
    p: &'p AsmgPreconditioner<'h>,
    level: usize,
}

impl Preconditioner for LevelView<'_, '_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&self.p.apply_level(self.level, r)?);
        Ok(())
    }

    fn is_linear(&self) -> bool {
        false
    }
}

impl Preconditioner for AsmgPreconditioner<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(&self.apply_level(0, r)?);
        Ok(())
    }

    fn is_linear(&self) -> bool {
        self.n_levels <= 2 || self.plan.correction == CoarseCorrection::Linear
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::build_laplacian;
    use crate::hierarchy::{build_hierarchy, HierarchyParams};
    use crate::krylov::{deflated_pcg, random_start, SolveParams};
    use crate::sparse::{dot, norm2};

    fn hierarchy(g: &crate::graph::Graph, max_coarse: usize) -> Hierarchy {
        let params = HierarchyParams {
            max_coarse,
            ..Default::default()
        };
        build_hierarchy(&build_laplacian(g), &params).unwrap()
    }

    #[test]
    fn coarsest_solve_on_p3() {
        let a = build_laplacian(&generators::path(3));
        let z = coarsest_solve(&a, &[1.0, 0.0, -1.0]).unwrap();
        for (zi, e) in z.iter().zip([1.0, 0.0, -1.0]) {
            assert!((zi - e).abs() < 1e-12);
        }
        let z = coarsest_solve(&a, &[2.0; 3]).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn zero_residual_gives_zero() {
        let h = hierarchy(&generators::grid2d(12, 12, false), 10);
        let p = AsmgPreconditioner::new(&h, CyclePlan::w_cycle()).unwrap();
        let z = p.apply_level(0, &vec![0.0; 144]).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_variant_is_symmetric() {
        let g = generators::random_connected(30, 0.08, 2);
        let h = hierarchy(&g, 3);
        assert!(h.n_levels() >= 3);
        for kind in [DTildeKind::Diagonal, DTildeKind::Exact, DTildeKind::Tridiagonal] {
            let plan = CyclePlan {
                dtilde: kind,
                ..CyclePlan::linear()
            };
            let p = AsmgPreconditioner::new(&h, plan).unwrap();
            let m = p.to_dense().unwrap();
            let scale = m.max_abs();
            for i in 0..30 {
                for j in 0..i {
                    assert!((m[(i, j)] - m[(j, i)]).abs() <= 1e-10 * scale, "{kind:?} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn two_level_is_positive_on_range() {
        let g = generators::random_connected(25, 0.1, 7);
        let h = hierarchy(&g, 3);
        let p = AsmgPreconditioner::with_levels(&h, CyclePlan::v_cycle(), 2).unwrap();
        assert!(p.is_linear());
        let a = &h.levels[0].a;
        for seed in 0..5 {
            let v = random_start(25, seed);
            let av = a.mul_vec(&v);
            let bav = p.apply_level(0, &av).unwrap();
            assert!(dot(&a.mul_vec(&bav), &v) > 0.0);
        }
    }

    #[test]
    fn exact_two_level_without_smoothing_inverts_on_range() {
        // a single macrostructure covers the whole graph, so the auxiliary
        // space is the original one and the block solve is exact
        let g = generators::cycle(6);
        let h = hierarchy(&g, 1);
        let split = h.levels[0].split.as_ref().unwrap();
        let plan = CyclePlan {
            smoothing_steps: 0,
            dtilde: DTildeKind::Exact,
            ..CyclePlan::v_cycle()
        };
        let p = AsmgPreconditioner::with_levels(&h, plan, 2).unwrap();
        let a = &h.levels[0].a;
        let v = random_start(6, 1);
        let mut z = p.apply_level(0, &a.mul_vec(&v)).unwrap();
        project_out_constant(&mut z);
        assert_eq!(split.covering.macros.len(), 1);
        let err: f64 = z.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn w_cycle_converges_on_grid() {
        let g = generators::grid2d(40, 40, false);
        let h = hierarchy(&g, 40);
        assert!(h.n_levels() >= 3);
        let p = AsmgPreconditioner::new(&h, CyclePlan::w_cycle()).unwrap();
        let a = &h.levels[0].a;
        let mut x = random_start(1600, 3);
        let rep = deflated_pcg(a, &vec![0.0; 1600], &mut x, &p, &SolveParams::default()).unwrap();
        assert!(rep.converged, "{:?}", rep.residual_history);
        assert!(rep.iterations < 40, "{}", rep.iterations);
        assert!(norm2(&a.mul_vec(&x)) <= 1e-6);
    }

    #[test]
    fn too_many_levels_is_rejected() {
        let h = hierarchy(&generators::path(5), 1);
        assert!(AsmgPreconditioner::with_levels(&h, CyclePlan::v_cycle(), 9).is_err());
        let plan = CyclePlan {
            nu: 0,
            ..CyclePlan::v_cycle()
        };
        assert!(AsmgPreconditioner::new(&h, plan).is_err());
    }
}
