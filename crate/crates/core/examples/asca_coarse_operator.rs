//! The additive Schur complement approximation on a 2D grid: coarse operator
//! properties, sparsity audit, and a comparison with the exact Schur
//! complement of the whole matrix.

use asmg::dense::Cholesky;
use asmg::{build_hierarchy, build_laplacian, generators, HierarchyParams};

fn main() -> asmg::Result<()> {
    let g = generators::grid2d(12, 12, true);
    let a = build_laplacian(&g);
    let h = build_hierarchy(&a, &HierarchyParams { max_coarse: 10, ..Default::default() })?;
    println!("level sizes: {:?}", h.sizes());

    let split = h.levels[0].split.as_ref().unwrap();
    let q = &h.levels[1].a;
    let scale = q.max_abs();
    let row_sum = q.row_sums().iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let max_off = (0..q.n())
        .flat_map(|i| {
            let (c, v) = q.row(i);
            c.iter().zip(v).filter(move |(&j, _)| j != i).map(|(_, &v)| v).collect::<Vec<_>>()
        })
        .fold(f64::MIN, f64::max);
    println!("Q: n = {}, nnz = {}, max |Q 1| / max|q| = {:.1e}, largest off-diagonal = {max_off:.3}", q.n(), q.nnz(), row_sum / scale);
    println!("audit: {:?}", split.audit);

    // exact Schur complement onto the same coarse set, densely
    let coarse = split.coarse_ids();
    let fine = &split.fine_ids;
    let d = a.to_dense();
    let sub = |rows: &[usize], cols: &[usize]| {
        asmg::dense::DenseMatrix::from_rows(
            &rows.iter().map(|&i| cols.iter().map(|&j| d[(i, j)]).collect()).collect::<Vec<_>>(),
        )
    };
    let a11 = sub(coarse, coarse);
    let a12 = sub(coarse, fine);
    let chol = Cholesky::factor(&sub(fine, fine))?;
    let mut s = a11.clone();
    for j in 0..coarse.len() {
        let col: Vec<f64> = (0..fine.len()).map(|k| a12[(j, k)]).collect();
        let x = chol.solve(&col);
        for i in 0..coarse.len() {
            s[(i, j)] -= a12.row(i).iter().zip(&x).map(|(u, v)| u * v).sum::<f64>();
        }
    }
    let diff = q.to_dense().sub(&s).frobenius_norm() / s.frobenius_norm();
    println!("|Q - S| / |S| = {diff:.3} (Q is sparser than the exact Schur complement)");
    let dense_nnz = (0..s.rows()).flat_map(|i| (0..s.cols()).map(move |j| (i, j))).filter(|&(i, j)| s[(i, j)].abs() > 1e-12).count();
    println!("nonzeros: Q {} vs exact {}", q.nnz(), dense_nnz);
    Ok(())
}
