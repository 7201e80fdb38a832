//! Unweighted undirected graphs, their Laplacians, and the combinatorial
//! queries the coarsening needs: maximal independent sets, BFS balls and
//! connected components.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::sparse::SymSparseMatrix;

/// Undirected graph in compressed neighbor-list form.
///
/// Neighbor lists are sorted, duplicate free, symmetric, and contain no
/// self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops are dropped and both
    /// orientations of an edge collapse to one.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        Self::from_adjacency(adj)
    }

    /// Builds a graph from per-vertex neighbor lists, symmetrizing as needed.
    pub fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut extra: Vec<(usize, usize)> = Vec::new();
        for (u, list) in adj.iter().enumerate() {
            for &v in list {
                extra.push((v, u));
            }
        }
        for (v, u) in extra {
            adj[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            neighbors.extend(list.iter().copied().filter(|&v| v != u));
            offsets.push(neighbors.len());
        }
        Self { offsets, neighbors }
    }

    pub fn n_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Index of `v` in the flat neighbor array of `u`; a unique slot per
    /// directed edge.
    pub(crate) fn edge_slot(&self, u: usize, v: usize) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|k| self.offsets[u] + k)
    }

    pub(crate) fn n_slots(&self) -> usize {
        self.neighbors.len()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Induced subgraph on `vertices` (any order), re-indexed by position.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut pos = vec![usize::MAX; self.n_vertices()];
        for (k, &v) in vertices.iter().enumerate() {
            pos[v] = k;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&w| (pos[w] != usize::MAX).then_some(pos[w]))
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    /// Checks every structural invariant; used by tests and ingestion.
    pub fn is_valid(&self) -> bool {
        let n = self.n_vertices();
        (0..n).all(|u| {
            let nb = self.neighbors(u);
            nb.windows(2).all(|w| w[0] < w[1])
                && nb.iter().all(|&v| v < n && v != u && self.has_edge(v, u))
        }) && self.neighbors.len().is_multiple_of(2)
    }
}

/// Sorted set of vertex ids with an O(1) membership bitmap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet {
    ids: Vec<usize>,
    member: Vec<bool>,
}

impl VertexSet {
    pub fn new(n_vertices: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut member = vec![false; n_vertices];
        let mut list: Vec<usize> = ids.into_iter().collect();
        list.sort_unstable();
        list.dedup();
        for &v in &list {
            member[v] = true;
        }
        Self { ids: list, member }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member.get(v).copied().unwrap_or(false)
    }

    /// Size of the ambient vertex range.
    pub fn universe(&self) -> usize {
        self.member.len()
    }

    /// Position of `v` within the sorted id list.
    pub fn rank(&self, v: usize) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }
}

/// Vertex visiting order for the greedy independent set scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MisOrder {
    #[default]
    Ascending,
    /// Seeded uniform random permutation.
    Random(u64),
}

impl MisOrder {
    pub fn permutation(self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        if let MisOrder::Random(seed) = self {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        order
    }
}

/// Graph Laplacian: degrees on the diagonal, `-1` at every edge.
pub fn build_laplacian(g: &Graph) -> SymSparseMatrix {
    let mut t = Vec::with_capacity(g.n_vertices() + 2 * g.n_edges());
    for u in 0..g.n_vertices() {
        t.push((u, u, g.degree(u) as f64));
        for &v in g.neighbors(u) {
            t.push((u, v, -1.0));
        }
    }
    SymSparseMatrix::from_triplets(g.n_vertices(), &t)
}

/// Greedy maximal independent set, scanning vertices in `order`.
pub fn maximal_independent_set(g: &Graph, order: &[usize]) -> VertexSet {
    let n = g.n_vertices();
    assert_eq!(order.len(), n, "order must be a permutation of the vertices");
    let mut blocked = vec![false; n];
    let mut chosen = Vec::new();
    for &v in order {
        if !blocked[v] {
            chosen.push(v);
            blocked[v] = true;
            for &w in g.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    VertexSet::new(n, chosen)
}

/// Greedy MIS that grows from the set chosen so far: the next vertex is the
/// earliest one in `order` among the undominated vertices at distance two
/// from a chosen vertex, and a new component is started only when no such
/// vertex remains. On a connected graph every chosen vertex after the first
/// is at distance two from an earlier one, so the "distance at most two"
/// graph on the result is connected. A plain scan does not guarantee this:
/// on the path `0-1-2-3` the order `[0, 3, 1, 2]` picks `{0, 3}`.
pub fn frontier_mis(g: &Graph, order: &[usize]) -> VertexSet {
    let n = g.n_vertices();
    assert_eq!(order.len(), n, "order must be a permutation of the vertices");
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut blocked = vec![false; n];
    let mut chosen = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut next = 0;
    loop {
        let v = match heap.pop() {
            Some(Reverse(r)) => order[r],
            None => {
                while next < n && blocked[order[next]] {
                    next += 1;
                }
                if next == n {
                    break;
                }
                order[next]
            }
        };
        if blocked[v] {
            continue;
        }
        chosen.push(v);
        blocked[v] = true;
        for &w in g.neighbors(v) {
            blocked[w] = true;
        }
        for &w in g.neighbors(v) {
            for &x in g.neighbors(w) {
                if !blocked[x] {
                    heap.push(Reverse(rank[x]));
                }
            }
        }
    }
    VertexSet::new(n, chosen)
}

/// Vertices at graph distance at most `radius` from `v`, including `v`.
pub fn bfs_ball(g: &Graph, v: usize, radius: usize) -> VertexSet {
    let mut visited = Vec::new();
    let mut scratch = vec![usize::MAX; g.n_vertices()];
    bfs_ball_with(g, v, radius, &mut scratch, &mut visited);
    VertexSet::new(g.n_vertices(), visited)
}

/// Allocation-free BFS ball. `dist` must be all `usize::MAX` on entry and
/// is restored on exit; `out` receives the ball in visiting order.
pub(crate) fn bfs_ball_with(
    g: &Graph,
    v: usize,
    radius: usize,
    dist: &mut [usize],
    out: &mut Vec<usize>,
) {
    out.clear();
    out.push(v);
    dist[v] = 0;
    let mut head = 0;
    while head < out.len() {
        let u = out[head];
        head += 1;
        let d = dist[u];
        if d == radius {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = d + 1;
                out.push(w);
            }
        }
    }
    for &u in out.iter() {
        dist[u] = usize::MAX;
    }
}

/// Connected component labels (numbered in order of first vertex) and the
/// number of components.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n_vertices();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if label[w] == usize::MAX {
                    label[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Adjacency graph of a symmetric matrix: edge `(i, j)`, `i != j`, iff
/// `|m_ij| > drop_tol`.
pub fn adjacency_of_matrix(m: &SymSparseMatrix, drop_tol: f64) -> Graph {
    let adj = (0..m.n())
        .map(|i| {
            let (cols, vals) = m.row(i);
            cols.iter()
                .zip(vals)
                .filter(|&(&j, &v)| j != i && v.abs() > drop_tol)
                .map(|(&j, _)| j)
                .collect()
        })
        .collect();
    Graph::from_adjacency(adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn is_independent(g: &Graph, s: &VertexSet) -> bool {
        s.ids().iter().all(|&v| g.neighbors(v).iter().all(|&w| !s.contains(w)))
    }

    fn is_maximal(g: &Graph, s: &VertexSet) -> bool {
        (0..g.n_vertices())
            .all(|v| s.contains(v) || g.neighbors(v).iter().any(|&w| s.contains(w)))
    }

    #[test]
    fn laplacian_of_path_and_triangle() {
        let p = build_laplacian(&generators::path(3)).to_dense();
        let expect = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(p[(i, j)], expect[i][j]);
            }
        }
        let t = build_laplacian(&generators::complete(3)).to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t[(i, j)], if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn laplacian_of_single_vertex_is_zero() {
        let l = build_laplacian(&Graph::from_edges(1, &[]));
        assert_eq!(l.n(), 1);
        assert_eq!(l.to_dense()[(0, 0)], 0.0);
    }

    #[test]
    fn mis_examples() {
        let p5 = generators::path(5);
        let s = maximal_independent_set(&p5, &MisOrder::Ascending.permutation(5));
        assert_eq!(s.ids(), &[0, 2, 4]);

        let star = generators::star(4);
        let s = maximal_independent_set(&star, &MisOrder::Ascending.permutation(5));
        assert_eq!(s.ids(), &[0]);
        assert!(is_maximal(&star, &s) && is_independent(&star, &s));

        let empty = Graph::from_edges(3, &[]);
        let s = maximal_independent_set(&empty, &[0, 1, 2]);
        assert_eq!(s.ids(), &[0, 1, 2]);
    }

    #[test]
    fn mis_respects_order() {
        let p5 = generators::path(5);
        let s = maximal_independent_set(&p5, &[1, 0, 2, 3, 4]);
        assert_eq!(s.ids(), &[1, 3]);
    }

    #[test]
    fn frontier_mis_keeps_distance_two_graph_connected() {
        let p4 = generators::path(4);
        assert_eq!(maximal_independent_set(&p4, &[0, 3, 1, 2]).ids(), &[0, 3]);
        assert_eq!(frontier_mis(&p4, &[0, 3, 1, 2]).ids(), &[0, 2]);
        assert_eq!(frontier_mis(&generators::path(5), &[0, 1, 2, 3, 4]).ids(), &[0, 2, 4]);
        assert_eq!(frontier_mis(&generators::star(4), &[0, 1, 2, 3, 4]).ids(), &[0]);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(frontier_mis(&two, &[0, 1, 2, 3]).ids(), &[0, 2]);
    }

    #[test]
    fn ball_examples() {
        let p5 = generators::path(5);
        assert_eq!(bfs_ball(&p5, 0, 2).ids(), &[0, 1, 2]);
        assert_eq!(bfs_ball(&p5, 3, 0).ids(), &[3]);
        assert_eq!(bfs_ball(&generators::complete(3), 0, 1).ids(), &[0, 1, 2]);
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&generators::path(3)).1, 1);
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let (labels, c) = connected_components(&two);
        assert_eq!(c, 2);
        assert_eq!(labels, vec![0, 0, 1, 1]);
        assert_eq!(connected_components(&Graph::from_edges(0, &[])).1, 0);
    }

    #[test]
    fn adjacency_examples() {
        let p3 = generators::path(3);
        assert_eq!(adjacency_of_matrix(&build_laplacian(&p3), 0.0), p3);

        let tiny = SymSparseMatrix::from_triplets(
            2,
            &[(0, 0, 1.0), (0, 1, -1e-16), (1, 0, -1e-16), (1, 1, 1.0)],
        );
        assert_eq!(adjacency_of_matrix(&tiny, 1e-12).n_edges(), 0);

        // exact Schur complement of the path onto {0, 2}
        let s = SymSparseMatrix::from_triplets(
            2,
            &[(0, 0, 0.5), (0, 1, -0.5), (1, 0, -0.5), (1, 1, 0.5)],
        );
        let g = adjacency_of_matrix(&s, 0.0);
        assert_eq!(g.n_edges(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn from_edges_cleans_input() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 1), (2, 1)]);
        assert!(g.is_valid());
        assert_eq!(g.n_edges(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn mis_is_independent_and_maximal(n in 1usize..200, p in 0.0f64..0.2, seed in any::<u64>(), shuffle in any::<bool>()) {
                let g = generators::erdos_renyi(n, p, seed);
                let order = if shuffle { MisOrder::Random(seed) } else { MisOrder::Ascending };
                let s = maximal_independent_set(&g, &order.permutation(n));
                prop_assert!(is_independent(&g, &s));
                prop_assert!(is_maximal(&g, &s));
            }

            #[test]
            fn frontier_mis_is_mis_with_connected_coarse_graph(n in 1usize..150, p in 0.0f64..0.1, seed in any::<u64>(), shuffle in any::<bool>()) {
                let g = generators::random_connected(n, p, seed);
                let order = if shuffle { MisOrder::Random(seed) } else { MisOrder::Ascending };
                let s = frontier_mis(&g, &order.permutation(n));
                prop_assert!(is_independent(&g, &s));
                prop_assert!(is_maximal(&g, &s));
                let mut edges = Vec::new();
                for (i, &u) in s.ids().iter().enumerate() {
                    for w in bfs_ball(&g, u, 2).ids() {
                        if let Some(j) = s.rank(*w) {
                            edges.push((i, j));
                        }
                    }
                }
                prop_assert_eq!(connected_components(&Graph::from_edges(s.len(), &edges)).1, 1);
            }

            #[test]
            fn laplacian_annihilates_constants(n in 1usize..120, p in 0.0f64..0.3, seed in any::<u64>()) {
                let g = generators::erdos_renyi(n, p, seed);
                let l = build_laplacian(&g);
                prop_assert!(l.row_sums().iter().all(|&s| s == 0.0));
                prop_assert!(l.mul_vec(&vec![1.0; n]).iter().all(|&s| s == 0.0));
                prop_assert_eq!(adjacency_of_matrix(&l, 0.0), g);
            }

            #[test]
            fn balls_are_monotone(n in 2usize..80, seed in any::<u64>(), r in 0usize..5) {
                let g = generators::random_connected(n, 0.05, seed);
                let v = (seed as usize) % n;
                let small = bfs_ball(&g, v, r);
                let big = bfs_ball(&g, v, r + 1);
                prop_assert!(small.ids().iter().all(|&u| big.contains(u)));
                prop_assert!(small.contains(v));
            }
        }
    }
}
