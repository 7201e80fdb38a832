//! V- and W-cycles with an increasing number of levels in use on a 3D
//! 19-point grid graph.

use asmg::krylov::{deflated_pcg, random_start, SolveParams};
use asmg::{build_hierarchy, build_laplacian, generators, AsmgPreconditioner, CyclePlan, HierarchyParams};

fn main() -> asmg::Result<()> {
    let g = generators::grid3d(16, 2);
    let a = build_laplacian(&g);
    let n = a.n();
    let h = build_hierarchy(&a, &HierarchyParams::default())?;
    println!("n = {n}, level sizes {:?}", h.sizes());
    for (name, plan) in [("V", CyclePlan::v_cycle()), ("W", CyclePlan::w_cycle())] {
        for levels in 2..=h.n_levels() {
            let p = AsmgPreconditioner::with_levels(&h, plan, levels)?;
            let mut x = random_start(n, 1);
            let rep = deflated_pcg(&a, &vec![0.0; n], &mut x, &p, &SolveParams::default())?;
            println!(
                "{name}-cycle, {levels} levels: {:>3} iterations ({:.2} s)",
                rep.iterations, rep.wall_time_s
            );
        }
    }
    Ok(())
}
