//! Synthetic graph families for tests, examples and benchmarks.
//!
//! All random generators are seeded and deterministic.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Graph {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        edges.push((n - 1, 0));
    }
    Graph::from_edges(n, &edges)
}

/// Star with center 0 and leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges)
}

/// `nx x ny` grid. With `diagonals` each vertex also connects to its four
/// diagonal neighbors (9-point stencil).
pub fn grid2d(nx: usize, ny: usize, diagonals: bool) -> Graph {
    let id = |i: usize, j: usize| i * ny + j;
    let mut edges = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                edges.push((id(i, j), id(i + 1, j)));
            }
            if j + 1 < ny {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if diagonals && i + 1 < nx {
                if j + 1 < ny {
                    edges.push((id(i, j), id(i + 1, j + 1)));
                }
                if j > 0 {
                    edges.push((id(i, j), id(i + 1, j - 1)));
                }
            }
        }
    }
    Graph::from_edges(nx * ny, &edges)
}

/// `n^3` grid where vertices are adjacent when their offsets differ by at
/// most one in every coordinate and by at most `max_changed` coordinates
/// (1: 7-point, 2: 19-point, 3: 27-point stencil).
pub fn grid3d(n: usize, max_changed: usize) -> Graph {
    let id = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        for dk in -1i64..=1 {
                            let changed = (di != 0) as usize + (dj != 0) as usize + (dk != 0) as usize;
                            if changed == 0 || changed > max_changed {
                                continue;
                            }
                            let (a, b, c) = (i as i64 + di, j as i64 + dj, k as i64 + dk);
                            let r = 0..n as i64;
                            if r.contains(&a) && r.contains(&b) && r.contains(&c) {
                                let w = id(a as usize, b as usize, c as usize);
                                let v = id(i, j, k);
                                if v < w {
                                    edges.push((v, w));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Graph::from_edges(n * n * n, &edges)
}

/// G(n, p) random graph; may be disconnected.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Random spanning tree on a shuffled vertex order plus G(n, p) edges, so
/// the result is always connected.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        edges.push((parent, order[k]));
    }
    let extra = erdos_renyi(n, p, seed);
    edges.extend(extra.edges());
    Graph::from_edges(n, &edges)
}

/// Sparse road-network-like graph: a random spanning tree of a 2D grid
/// plus a fraction `keep` of the remaining grid edges. Average degree is
/// about `2 + 2 * keep`.
pub fn road_like(nx: usize, ny: usize, keep: f64, seed: u64) -> Graph {
    let grid = grid2d(nx, ny, false);
    let n = grid.n_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = grid.edges().collect();
    edges.shuffle(&mut rng);

    // Kruskal with random weights gives a uniform-ish random spanning tree.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut chosen = Vec::with_capacity(n);
    let mut rest = Vec::new();
    for (u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent[a] = b;
            chosen.push((u, v));
        } else {
            rest.push((u, v));
        }
    }
    chosen.extend(rest.into_iter().filter(|_| rng.gen::<f64>() < keep));
    Graph::from_edges(n, &chosen)
}

/// Random geometric graph in the unit square with connection radius `r`.
pub fn random_geometric(n: usize, r: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let cells = (1.0 / r).floor().max(1.0) as usize;
    let cell_of = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    let mut buckets = vec![Vec::new(); cells * cells];
    for (i, &(x, y)) in pts.iter().enumerate() {
        buckets[cell_of(x) * cells + cell_of(y)].push(i);
    }
    let mut edges = Vec::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        let (cx, cy) = (cell_of(x) as i64, cell_of(y) as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let (a, b) = (cx + dx, cy + dy);
                if a < 0 || b < 0 || a >= cells as i64 || b >= cells as i64 {
                    continue;
                }
                for &j in &buckets[a as usize * cells + b as usize] {
                    if j > i {
                        let (u, v) = pts[j];
                        if (x - u).powi(2) + (y - v).powi(2) <= r * r {
                            edges.push((i, j));
                        }
                    }
                }
            }
        }
    }
    Graph::from_edges(n, &edges)
}
