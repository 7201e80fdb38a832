//! Property tests for the hierarchy and the solvers on random graphs.

use asmg::cycle::CoarseCorrection;
use asmg::krylov::{random_start, solve, Identity, Preconditioner};
use asmg::sparse::{dot, norm2, project_out_constant};
use asmg::{
    build_hierarchy, build_laplacian, deflated_pcg, generators, rank1_pcg, AsmgPreconditioner, CyclePlan,
    DTildeKind, HierarchyParams, SolveParams,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn mean_free_rhs(n: usize, seed: u64) -> Vec<f64> {
    let mut b = random_start(n, seed ^ 0x5eed);
    project_out_constant(&mut b);
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hierarchy_levels_are_laplacians(n in 10usize..120, p in 0.02f64..0.2, seed in 0u64..1000) {
        let a = build_laplacian(&generators::random_connected(n, p, seed));
        let h = build_hierarchy(&a, &HierarchyParams { max_coarse: 4, ..Default::default() }).unwrap();
        for w in h.sizes().windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        for level in &h.levels {
            let scale = level.a.max_abs();
            prop_assert!(level.a.symmetry_defect() <= 1e-12 * scale);
            for s in level.a.row_sums() {
                prop_assert!(s.abs() <= 1e-10 * scale);
            }
            if let Some(split) = &level.split {
                prop_assert_eq!(split.audit.pattern_violations, 0);
                prop_assert!(split.audit.bound_holds);
                prop_assert_eq!(split.coarse_ids().len() + split.fine_ids.len(), level.n());
            }
        }
    }

    #[test]
    fn pcg_solves_to_tolerance(n in 5usize..100, p in 0.05f64..0.3, seed in 0u64..1000) {
        let a = build_laplacian(&generators::random_connected(n, p, seed));
        let b = mean_free_rhs(n, seed);
        let params = SolveParams { tol: 1e-10, max_iters: 10 * n, ..Default::default() };
        let mut x = vec![0.0; n];
        let rep = deflated_pcg(&a, &b, &mut x, &Identity, &params).unwrap();
        prop_assert!(rep.converged);
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
        prop_assert!(norm2(&r) <= 10.0 * params.tol * norm2(&b));
    }

    #[test]
    fn kernel_shift_does_not_change_residuals(n in 5usize..60, seed in 0u64..1000) {
        // a constant added to the start only shifts the solution along the kernel
        let a = build_laplacian(&generators::random_connected(n, 0.1, seed));
        let b = mean_free_rhs(n, seed);
        let params = SolveParams { tol: 1e-9, max_iters: 10 * n, ..Default::default() };
        let mut x = random_start(n, seed);
        let mut y: Vec<f64> = x.iter().map(|v| v + 3.5).collect();
        let r1 = deflated_pcg(&a, &b, &mut x, &Identity, &params).unwrap();
        let r2 = deflated_pcg(&a, &b, &mut y, &Identity, &params).unwrap();
        prop_assert_eq!(r1.iterations, r2.iterations);
        project_out_constant(&mut x);
        project_out_constant(&mut y);
        for (u, v) in x.iter().zip(&y) {
            prop_assert!((v - u).abs() < 1e-8);
        }
    }

    #[test]
    fn kernel_modes_agree(n in 20usize..150, seed in 0u64..1000) {
        let a = build_laplacian(&generators::random_connected(n, 0.05, seed));
        let h = build_hierarchy(&a, &HierarchyParams { max_coarse: 8, ..Default::default() }).unwrap();
        let pre = AsmgPreconditioner::new(&h, CyclePlan::w_cycle()).unwrap();
        let b = vec![0.0; n];
        let params = SolveParams::default();
        let mut x = random_start(n, seed);
        let mut y = x.clone();
        let d = deflated_pcg(&a, &b, &mut x, &pre, &params).unwrap();
        let r = rank1_pcg(&a, &b, &mut y, &pre, &params).unwrap();
        prop_assert!(d.converged && r.converged);
        prop_assert!(d.iterations.abs_diff(r.iterations) <= 1);
        prop_assert!(d.true_relative_residual <= 1e-7 && r.true_relative_residual <= 1e-7);
    }
}

/// The linear variant is symmetric and positive definite on mean-free
/// vectors for every choice of `D~`.
#[test]
fn linear_preconditioner_is_spd_on_range() {
    for seed in 0..4 {
        let n = 60;
        let a = build_laplacian(&generators::random_connected(n, 0.06, seed));
        let h = build_hierarchy(&a, &HierarchyParams { max_coarse: 6, ..Default::default() }).unwrap();
        for dtilde in [DTildeKind::Diagonal, DTildeKind::Tridiagonal, DTildeKind::Exact] {
            let plan = CyclePlan { dtilde, correction: CoarseCorrection::Linear, ..CyclePlan::v_cycle() };
            let pre = AsmgPreconditioner::new(&h, plan).unwrap();
            assert!(pre.is_linear());
            let b = pre.to_dense().unwrap();
            let m = DMatrix::from_fn(n, n, |i, j| b[(i, j)]);
            assert!((&m - m.transpose()).norm() <= 1e-10 * m.norm());
            // restrict to the mean-free subspace
            let mut basis = DMatrix::zeros(n, n - 1);
            for k in 0..n - 1 {
                basis[(k, k)] = 1.0;
                basis[(k + 1, k)] = -1.0;
            }
            let restricted = basis.transpose() * &m * &basis;
            let lmin = restricted.symmetric_eigenvalues().min();
            assert!(lmin > 0.0, "seed {seed} {dtilde:?}: {lmin}");
        }
    }
}

/// Every D~ choice gives a convergent preconditioner on a mid-size grid.
#[test]
fn dtilde_variants_converge() {
    let g = generators::grid2d(30, 30, true);
    let a = build_laplacian(&g);
    let h = build_hierarchy(&a, &HierarchyParams::default()).unwrap();
    for dtilde in [DTildeKind::Diagonal, DTildeKind::Tridiagonal, DTildeKind::Exact] {
        let pre = AsmgPreconditioner::new(&h, CyclePlan { dtilde, ..CyclePlan::w_cycle() }).unwrap();
        let mut x = random_start(a.n(), 1);
        let rep = solve(&a, &vec![0.0; a.n()], &mut x, &pre, &SolveParams::default()).unwrap();
        assert!(rep.converged && rep.iterations < 30, "{dtilde:?}: {}", rep.iterations);
    }
}

/// `<B r, r> > 0` for the nonlinear W-cycle on random mean-free vectors.
#[test]
fn nonlinear_cycle_is_positive_on_samples() {
    let a = build_laplacian(&generators::random_geometric(400, 0.09, 3));
    let comps = asmg::graph::connected_components(&asmg::graph::adjacency_of_matrix(&a, 0.0)).1;
    if comps != 1 {
        return;
    }
    let h = build_hierarchy(&a, &HierarchyParams::default()).unwrap();
    let pre = AsmgPreconditioner::new(&h, CyclePlan::w_cycle()).unwrap();
    for seed in 0..10 {
        let r = random_start(a.n(), seed);
        let mut z = vec![0.0; a.n()];
        pre.apply(&r, &mut z).unwrap();
        assert!(dot(&z, &r) > 0.0);
    }
}
