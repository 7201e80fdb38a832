//! The two-grid auxiliary space preconditioner: symmetry of the linear
//! operator, the three fine-block weightings, and PCG iteration counts.

use asmg::cycle::CyclePlan;
use asmg::krylov::{deflated_pcg, random_start, Jacobi, SolveParams};
use asmg::{build_hierarchy, build_laplacian, generators, AsmgPreconditioner, DTildeKind, HierarchyParams};

fn main() -> asmg::Result<()> {
    let small = generators::random_connected(30, 0.1, 1);
    let h = build_hierarchy(&build_laplacian(&small), &HierarchyParams { max_coarse: 5, ..Default::default() })?;
    let p = AsmgPreconditioner::with_levels(&h, CyclePlan::v_cycle(), 2)?;
    let m = p.to_dense()?;
    let asym = m.sub(&m.transpose()).max_abs() / m.max_abs();
    println!("two-grid operator on 30 vertices: relative asymmetry {asym:.1e}");

    let g = generators::grid2d(60, 60, true);
    let a = build_laplacian(&g);
    let n = a.n();
    let h = build_hierarchy(&a, &HierarchyParams::default())?;
    println!("60x60 9-point grid, level sizes {:?}", h.sizes());
    let params = SolveParams::default();

    let mut x = random_start(n, 0);
    let rep = deflated_pcg(&a, &vec![0.0; n], &mut x, &Jacobi::new(&a), &params)?;
    println!("Jacobi PCG: {} iterations", rep.iterations);

    for dtilde in [DTildeKind::Diagonal, DTildeKind::Tridiagonal, DTildeKind::Exact] {
        let plan = CyclePlan { dtilde, ..CyclePlan::v_cycle() };
        let p = AsmgPreconditioner::with_levels(&h, plan, 2)?;
        let mut x = random_start(n, 0);
        let rep = deflated_pcg(&a, &vec![0.0; n], &mut x, &p, &params)?;
        println!(
            "two-grid, {dtilde:?} weights: {} iterations, true residual {:.1e}",
            rep.iterations, rep.true_relative_residual
        );
    }
    Ok(())
}
