//! Structures, coarse graph, macrostructures and partition-of-unity weights
//! for the path on five vertices and for a random graph.

use asmg::covering::{assemble_global, assemble_macro_matrix, build_covering, structure_laplacians};
use asmg::{build_laplacian, frontier_mis, generators, MisOrder};

fn main() -> asmg::Result<()> {
    let g = generators::path(5);
    let mis = frontier_mis(&g, &MisOrder::Ascending.permutation(5));
    let cov = build_covering(&g, &mis, 2, 1, MisOrder::Ascending)?;

    println!("coarse vertices: {:?}", cov.coarse.ids());
    for s in &cov.structures {
        println!(
            "structure at {}: vertices {:?} (first {} coarse), edges {:?}",
            s.focus, s.vertices, s.n_coarse, s.local_edges
        );
    }
    println!("coarse graph edges: {:?}", cov.coarse_graph.graph.edges().collect::<Vec<_>>());
    for (m, w) in cov.macros.iter().zip(&cov.sigma.per_macro) {
        println!(
            "macrostructure at {}: members {:?}, weights {:?}, vertices {:?}",
            m.focus, m.members, w, m.vertices
        );
    }

    // the weighted macrostructure matrices add back up to the Laplacian
    let g = generators::random_connected(150, 0.02, 4);
    let a = build_laplacian(&g);
    let mis = frontier_mis(&g, &MisOrder::Ascending.permutation(150));
    let cov = build_covering(&g, &mis, 2, 1, MisOrder::Ascending)?;
    let mats = structure_laplacians(&a, &g, &cov.structures);
    let macro_mats = (0..cov.macros.len())
        .map(|k| assemble_macro_matrix(k, &cov.macros, &cov.sigma, &mats))
        .collect::<asmg::Result<Vec<_>>>()?;
    let sum = assemble_global(&cov.macros, &macro_mats, 150);
    println!(
        "random graph: {} structures, {} macrostructures, |A - sum R^T A_G R| / |A| = {:.2e}",
        cov.structures.len(),
        cov.macros.len(),
        a.frobenius_distance(&sum) / a.frobenius_norm()
    );
    let sums = cov.sigma.partition_sums(&cov.macros);
    let worst = sums.iter().fold(0.0f64, |m, s| m.max((s - 1.0).abs()));
    println!("partition of unity: max |sum_G sigma - 1| = {worst:.2e}");
    Ok(())
}
