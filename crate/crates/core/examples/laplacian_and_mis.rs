//! Graph Laplacian, maximal independent sets and BFS balls on a small grid.

use asmg::graph::{bfs_ball, connected_components};
use asmg::{build_laplacian, frontier_mis, generators, maximal_independent_set, MisOrder};

fn main() {
    let g = generators::grid2d(6, 6, false);
    println!("6x6 grid: {} vertices, {} edges", g.n_vertices(), g.n_edges());

    let a = build_laplacian(&g);
    let ones = vec![1.0; g.n_vertices()];
    let max_row_sum = a.mul_vec(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("Laplacian: nnz = {}, max |A 1| = {max_row_sum}", a.nnz());

    let order = MisOrder::Ascending.permutation(g.n_vertices());
    let plain = maximal_independent_set(&g, &order);
    let frontier = frontier_mis(&g, &order);
    println!("greedy MIS ({}): {:?}", plain.len(), plain.ids());
    println!("frontier MIS ({}): {:?}", frontier.len(), frontier.ids());

    let shuffled = frontier_mis(&g, &MisOrder::Random(7).permutation(g.n_vertices()));
    println!("frontier MIS with seeded random order: {} vertices", shuffled.len());

    // the path 0-1-2-3 shows why the pipeline uses the frontier variant
    let p4 = generators::path(4);
    println!(
        "path 0-1-2-3, order [0,3,1,2]: greedy {:?}, frontier {:?}",
        maximal_independent_set(&p4, &[0, 3, 1, 2]).ids(),
        frontier_mis(&p4, &[0, 3, 1, 2]).ids()
    );

    let ball = bfs_ball(&g, 14, 2);
    println!("ball of radius 2 around vertex 14: {:?}", ball.ids());
    println!("components: {}", connected_components(&g).1);
}
