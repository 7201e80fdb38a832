//! Deflation versus the rank-1 update for the singular Laplacian system.

use asmg::krylov::{random_start, rank1_pcg, deflated_pcg, SolveParams};
use asmg::sparse::{mean, project_out_constant};
use asmg::{build_hierarchy, build_laplacian, generators, AsmgPreconditioner, CyclePlan, HierarchyParams};

fn main() -> asmg::Result<()> {
    let g = generators::road_like(60, 60, 0.3, 5);
    let a = build_laplacian(&g);
    let n = a.n();
    let h = build_hierarchy(&a, &HierarchyParams::default())?;
    let p = AsmgPreconditioner::new(&h, CyclePlan::w_cycle())?;

    // a consistent right-hand side with a known solution
    let mut u = random_start(n, 11);
    project_out_constant(&mut u);
    let b = a.mul_vec(&u);
    let params = SolveParams::default();

    let mut x1 = vec![0.0; n];
    let r1 = deflated_pcg(&a, &b, &mut x1, &p, &params)?;
    let mut x2 = vec![0.0; n];
    let r2 = rank1_pcg(&a, &b, &mut x2, &p, &params)?;
    let err = |x: &[f64]| x.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    println!("deflated: {} iterations, max error {:.1e}, mean {:.1e}", r1.iterations, err(&x1), mean(&x1));
    println!("rank-1:   {} iterations, max error {:.1e}, mean {:.1e}", r2.iterations, err(&x2), mean(&x2));
    Ok(())
}
