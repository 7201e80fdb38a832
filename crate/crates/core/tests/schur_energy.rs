//! Energy comparison between the additive coarse operator and the exact
//! Schur complement on the same coarse set.
//!
//! Since `A = sum_G R_G^T A_G R_G`, minimising the energy over fine values
//! macrostructure by macrostructure can only lower it, so
//! `v^T Q v <= v^T S v` for every coarse vector `v`.

use asmg::{build_hierarchy, build_laplacian, generators, HierarchyParams, SymSparseMatrix};
use nalgebra::DMatrix;

fn dense(a: &SymSparseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.n(), a.n(), |i, j| a.get(i, j))
}

#[test]
fn additive_coarse_operator_underestimates_schur_energy() {
    let mut max_excess = f64::NEG_INFINITY;
    let mut min_excess = f64::INFINITY;
    for seed in 0..30u64 {
        let n = 10 + (seed as usize * 13) % 41;
        let a = build_laplacian(&generators::random_connected(n, 0.08, seed));
        let h = build_hierarchy(&a, &HierarchyParams { max_coarse: n - 1, ..Default::default() }).unwrap();
        let split = h.levels[0].split.as_ref().unwrap();
        let (c, f) = (split.coarse_ids(), &split.fine_ids);
        let ad = dense(&a);
        let a11 = DMatrix::from_fn(c.len(), c.len(), |i, j| ad[(c[i], c[j])]);
        let a12 = DMatrix::from_fn(c.len(), f.len(), |i, j| ad[(c[i], f[j])]);
        let a22 = DMatrix::from_fn(f.len(), f.len(), |i, j| ad[(f[i], f[j])]);
        let s = &a11 - &a12 * a22.cholesky().unwrap().solve(&a12.transpose());
        let q = dense(&h.levels[1].a);
        let eig = (&q - &s).symmetric_eigenvalues();
        let scale = s.norm();
        max_excess = max_excess.max(eig.max() / scale);
        min_excess = min_excess.min(eig.min() / scale);
    }
    println!("spectrum of (Q - S)/|S| over 30 graphs: [{min_excess:.3e}, {max_excess:.3e}]");
    assert!(max_excess <= 1e-12, "Q exceeds S in energy: {max_excess:e}");
}
