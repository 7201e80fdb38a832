//! Two-level covering of a graph by structure and macrostructure subgraphs.
//!
//! Given a maximal independent set `V1` of the graph `K`:
//!
//! 1. every `f` in `V1` is the focus of a structure: the ball of radius
//!    `structure_radius` around `f`, with all graph edges inside it;
//! 2. the coarse graph `K1` lives on `V1`, two foci being adjacent when
//!    they are at graph distance at most `structure_radius`;
//! 3. a maximal independent set `V2` of `K1` selects macrostructure foci;
//!    each macrostructure is the union of the structures whose foci lie
//!    within `macro_radius` of it in `K1`.
//!
//! Every local vertex list uses the two-level numbering: coarse vertices
//! (members of `V1`) first in ascending id, then fine vertices ascending.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{AsmgError, Result};
use crate::graph::{bfs_ball_with, frontier_mis, Graph, MisOrder, VertexSet};
use crate::sparse::SymSparseMatrix;

/// Structure subgraph `K_F` around one focus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub focus: usize,
    /// Local-to-global map, coarse vertices first.
    pub vertices: Vec<usize>,
    pub n_coarse: usize,
    /// Graph edges with both ends inside the structure, `(u, v)` with `u < v`.
    pub local_edges: Vec<(usize, usize)>,
}

impl Structure {
    pub fn coarse(&self) -> &[usize] {
        &self.vertices[..self.n_coarse]
    }

    pub fn fine(&self) -> &[usize] {
        &self.vertices[self.n_coarse..]
    }

    /// Vertex ids in ascending order.
    pub fn sorted_vertices(&self) -> Vec<usize> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }
}

/// Macrostructure `K_G`: a union of structures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Macrostructure {
    /// Focus as a vertex of the fine graph.
    pub focus: usize,
    /// Focus as a vertex of the coarse graph.
    pub focus_coarse: usize,
    /// Member structure ids, ascending.
    pub members: Vec<usize>,
    /// Local-to-global map, coarse vertices first.
    pub vertices: Vec<usize>,
    pub n_coarse: usize,
}

impl Macrostructure {
    pub fn coarse(&self) -> &[usize] {
        &self.vertices[..self.n_coarse]
    }

    pub fn fine(&self) -> &[usize] {
        &self.vertices[self.n_coarse..]
    }

    /// Local position of global vertex `v`.
    pub fn local_index(&self, v: usize) -> Option<usize> {
        if let Ok(k) = self.coarse().binary_search(&v) {
            return Some(k);
        }
        self.fine()
            .binary_search(&v)
            .ok()
            .map(|k| k + self.n_coarse)
    }
}

/// Coarse graph `K1` on the independent set, re-indexed `0..|V1|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseGraph {
    pub graph: Graph,
    pub coarse_to_fine: Vec<usize>,
}

impl CoarseGraph {
    pub fn fine_to_coarse(&self, v: usize) -> Option<usize> {
        self.coarse_to_fine.binary_search(&v).ok()
    }
}

/// Partition-of-unity weights `sigma[F, G]`, stored per macrostructure in
/// the order of its member list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    pub per_macro: Vec<Vec<f64>>,
    /// Number of macrostructures containing each structure.
    pub multiplicity: Vec<usize>,
}

impl ScalingFactors {
    pub fn get(&self, macros: &[Macrostructure], structure: usize, macro_id: usize) -> f64 {
        match macros[macro_id].members.binary_search(&structure) {
            Ok(k) => self.per_macro[macro_id][k],
            Err(_) => 0.0,
        }
    }

    /// `sum_G sigma[F, G]` for every structure `F`.
    pub fn partition_sums(&self, macros: &[Macrostructure]) -> Vec<f64> {
        let mut sums = vec![0.0; self.multiplicity.len()];
        for (g, m) in macros.iter().enumerate() {
            for (k, &f) in m.members.iter().enumerate() {
                sums[f] += self.per_macro[g][k];
            }
        }
        sums
    }
}

/// Local matrix attached to a structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StructureMatrix {
    /// Weighted Laplacian given by edges `(u, v, w)`, contributing
    /// `w (e_u - e_v)(e_u - e_v)^T`.
    Edges(Vec<(usize, usize, f64)>),
    /// Dense symmetric matrix on the listed global dofs.
    Dense { dofs: Vec<usize>, matrix: DenseMatrix },
}

/// Radii and ordering that define a covering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub structure_radius: usize,
    pub macro_radius: usize,
    pub mis_order: MisOrder,
}

impl Default for CoveringParams {
    fn default() -> Self {
        Self {
            structure_radius: 2,
            macro_radius: 1,
            mis_order: MisOrder::Ascending,
        }
    }
}

/// Complete two-level covering of one level's graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    pub coarse: VertexSet,
    pub structures: Vec<Structure>,
    pub coarse_graph: CoarseGraph,
    /// Macrostructure foci, in coarse graph numbering.
    pub macro_foci: VertexSet,
    pub macros: Vec<Macrostructure>,
    pub sigma: ScalingFactors,
}

/// Runs the whole covering pipeline for a given independent set.
pub fn build_covering(
    g: &Graph,
    mis: &VertexSet,
    structure_radius: usize,
    macro_radius: usize,
    order: MisOrder,
) -> Result<Covering> {
    let structures = build_structures(g, mis, structure_radius)?;
    let coarse_graph = build_coarse_graph(g, mis, structure_radius);
    let n1 = coarse_graph.graph.n_vertices();
    let macro_foci = frontier_mis(&coarse_graph.graph, &order.permutation(n1));
    let macros = build_macrostructures(&coarse_graph, &macro_foci, &structures, macro_radius)?;
    let sigma = scaling_factors(&structures, &macros)?;
    Ok(Covering {
        coarse: mis.clone(),
        structures,
        coarse_graph,
        macro_foci,
        macros,
        sigma,
    })
}

fn coarse_first(vertices: &mut [usize], mis: &VertexSet) -> usize {
    vertices.sort_unstable_by_key(|&v| (!mis.contains(v), v));
    vertices.iter().take_while(|&&v| mis.contains(v)).count()
}

/// One structure per independent-set vertex, in ascending focus order.
/// Fails if some graph edge lies in no structure.
pub fn build_structures(g: &Graph, mis: &VertexSet, radius: usize) -> Result<Vec<Structure>> {
    let n = g.n_vertices();
    let structures: Vec<Structure> = mis
        .ids()
        .par_iter()
        .map_init(
            || (vec![usize::MAX; n], vec![false; n], Vec::new()),
            |(dist, inside, ball), &f| {
                bfs_ball_with(g, f, radius, dist, ball);
                for &u in ball.iter() {
                    inside[u] = true;
                }
                let mut local_edges = Vec::new();
                for &u in ball.iter() {
                    for &v in g.neighbors(u) {
                        if v > u && inside[v] {
                            local_edges.push((u, v));
                        }
                    }
                }
                for &u in ball.iter() {
                    inside[u] = false;
                }
                local_edges.sort_unstable();
                let mut vertices = ball.clone();
                let n_coarse = coarse_first(&mut vertices, mis);
                Structure {
                    focus: f,
                    vertices,
                    n_coarse,
                    local_edges,
                }
            },
        )
        .collect();

    let mut covered = vec![false; g.n_slots()];
    for s in &structures {
        for &(u, v) in &s.local_edges {
            covered[g.edge_slot(u, v).expect("structure edge not in graph")] = true;
        }
    }
    if let Some((u, v)) = g
        .edges()
        .find(|&(u, v)| !covered[g.edge_slot(u, v).unwrap()])
    {
        return Err(AsmgError::UncoveredEdge(u, v));
    }
    Ok(structures)
}

/// Coarse graph on the independent set: foci at graph distance at most
/// `radius` are adjacent.
pub fn build_coarse_graph(g: &Graph, mis: &VertexSet, radius: usize) -> CoarseGraph {
    let n = g.n_vertices();
    let coarse_to_fine = mis.ids().to_vec();
    let adj: Vec<Vec<usize>> = mis
        .ids()
        .par_iter()
        .map_init(
            || (vec![usize::MAX; n], Vec::new()),
            |(dist, ball), &f| {
                bfs_ball_with(g, f, radius, dist, ball);
                ball.iter()
                    .filter(|&&v| v != f && mis.contains(v))
                    .map(|&v| mis.rank(v).unwrap())
                    .collect()
            },
        )
        .collect();
    CoarseGraph {
        graph: Graph::from_adjacency(adj),
        coarse_to_fine,
    }
}

/// One macrostructure per vertex of `foci` (coarse graph numbering).
/// `structures[i]` must be the structure focused at coarse vertex `i`.
pub fn build_macrostructures(
    k1: &CoarseGraph,
    foci: &VertexSet,
    structures: &[Structure],
    macro_radius: usize,
) -> Result<Vec<Macrostructure>> {
    let n1 = k1.graph.n_vertices();
    if structures.len() != n1 {
        return Err(AsmgError::DimensionMismatch {
            context: "structures per coarse vertex",
            expected: n1,
            found: structures.len(),
        });
    }
    for (i, s) in structures.iter().enumerate() {
        if s.focus != k1.coarse_to_fine[i] {
            return Err(AsmgError::IndexMap(format!(
                "structure {i} is focused at {} but coarse vertex {i} is {}",
                s.focus, k1.coarse_to_fine[i]
            )));
        }
    }
    let coarse_set: Vec<bool> = {
        let n = structures
            .iter()
            .flat_map(|s| s.vertices.iter())
            .max()
            .map_or(0, |m| m + 1);
        let mut c = vec![false; n];
        for &v in &k1.coarse_to_fine {
            if v < n {
                c[v] = true;
            }
        }
        c
    };

    let macros: Vec<Macrostructure> = foci
        .ids()
        .par_iter()
        .map_init(
            || (vec![usize::MAX; n1], Vec::new()),
            |(dist, ball), &h| {
                bfs_ball_with(&k1.graph, h, macro_radius, dist, ball);
                let mut members = ball.clone();
                members.sort_unstable();
                let mut coarse = Vec::new();
                let mut fine = Vec::new();
                for &m in &members {
                    for &v in &structures[m].vertices {
                        if coarse_set[v] {
                            coarse.push(v);
                        } else {
                            fine.push(v);
                        }
                    }
                }
                coarse.sort_unstable();
                coarse.dedup();
                fine.sort_unstable();
                fine.dedup();
                let n_coarse = coarse.len();
                coarse.extend(fine);
                Macrostructure {
                    focus: k1.coarse_to_fine[h],
                    focus_coarse: h,
                    members,
                    vertices: coarse,
                    n_coarse,
                }
            },
        )
        .collect();

    let mut assigned = vec![false; n1];
    for m in &macros {
        for &s in &m.members {
            assigned[s] = true;
        }
    }
    if let Some(s) = assigned.iter().position(|a| !a) {
        return Err(AsmgError::UnassignedStructure(s));
    }
    Ok(macros)
}

/// Uniform weights `sigma[F, G] = 1 / #{G : F in G}`.
pub fn scaling_factors(
    structures: &[Structure],
    macros: &[Macrostructure],
) -> Result<ScalingFactors> {
    let mut multiplicity = vec![0usize; structures.len()];
    for m in macros {
        for &s in &m.members {
            multiplicity[s] += 1;
        }
    }
    if let Some(s) = multiplicity.iter().position(|&c| c == 0) {
        return Err(AsmgError::UnassignedStructure(s));
    }
    let per_macro = macros
        .iter()
        .map(|m| {
            m.members
                .iter()
                .map(|&s| 1.0 / multiplicity[s] as f64)
                .collect()
        })
        .collect();
    Ok(ScalingFactors {
        per_macro,
        multiplicity,
    })
}

/// Structure matrices for a matrix whose graph is covered by `structures`.
///
/// Each edge `(u, v)` of `a` carries weight `-a_uv`; an edge shared by `c`
/// structures contributes `-a_uv / c` to each, so the structure matrices
/// sum to `a` exactly when `a` has zero row sums.
pub fn structure_laplacians(
    a: &SymSparseMatrix,
    g: &Graph,
    structures: &[Structure],
) -> Vec<StructureMatrix> {
    let mut mult = vec![0u32; g.n_slots()];
    for s in structures {
        for &(u, v) in &s.local_edges {
            mult[g.edge_slot(u, v).unwrap()] += 1;
        }
    }
    structures
        .iter()
        .map(|s| {
            StructureMatrix::Edges(
                s.local_edges
                    .iter()
                    .map(|&(u, v)| {
                        let c = mult[g.edge_slot(u, v).unwrap()] as f64;
                        (u, v, -a.get(u, v) / c)
                    })
                    .collect(),
            )
        })
        .collect()
}

/// `A_G = sum_F sigma[F, G] R^T A_F R` in the macrostructure's local
/// ordering.
pub fn assemble_macro_matrix(
    macro_id: usize,
    macros: &[Macrostructure],
    sigma: &ScalingFactors,
    structure_matrices: &[StructureMatrix],
) -> Result<DenseMatrix> {
    let g = &macros[macro_id];
    let n = g.vertices.len();
    let mut a = DenseMatrix::zeros(n, n);
    let locate = |v: usize| {
        g.local_index(v).ok_or_else(|| {
            AsmgError::IndexMap(format!(
                "vertex {v} of a member structure is missing from macrostructure {macro_id}"
            ))
        })
    };
    for (k, &f) in g.members.iter().enumerate() {
        let w = sigma.per_macro[macro_id][k];
        match &structure_matrices[f] {
            StructureMatrix::Edges(edges) => {
                for &(u, v, e) in edges {
                    let (i, j) = (locate(u)?, locate(v)?);
                    let c = w * e;
                    a[(i, i)] += c;
                    a[(j, j)] += c;
                    a[(i, j)] -= c;
                    a[(j, i)] -= c;
                }
            }
            StructureMatrix::Dense { dofs, matrix } => {
                let local: Vec<usize> = dofs.iter().map(|&d| locate(d)).collect::<Result<_>>()?;
                for (p, &i) in local.iter().enumerate() {
                    for (q, &j) in local.iter().enumerate() {
                        a[(i, j)] += w * matrix[(p, q)];
                    }
                }
            }
        }
    }
    Ok(a)
}

/// `sum_G R_G^T A_G R_G` as a global sparse matrix of order `n`.
pub fn assemble_global(macros: &[Macrostructure], macro_matrices: &[DenseMatrix], n: usize) -> SymSparseMatrix {
    let mut t = Vec::new();
    for (g, a) in macros.iter().zip(macro_matrices) {
        for (i, &u) in g.vertices.iter().enumerate() {
            for (j, &v) in g.vertices.iter().enumerate() {
                if a[(i, j)] != 0.0 {
                    t.push((u, v, a[(i, j)]));
                }
            }
        }
    }
    SymSparseMatrix::from_triplets(n, &t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::graph::{bfs_ball, build_laplacian};

    fn p5_covering() -> (Graph, Covering) {
        let g = generators::path(5);
        let mis = VertexSet::new(5, [0, 2, 4]);
        let c = build_covering(&g, &mis, 2, 1, MisOrder::Ascending).unwrap();
        (g, c)
    }

    #[test]
    fn p5_structures_match_balls() {
        let (g, c) = p5_covering();
        let sets: Vec<Vec<usize>> = c.structures.iter().map(Structure::sorted_vertices).collect();
        assert_eq!(sets, vec![vec![0, 1, 2], vec![0, 1, 2, 3, 4], vec![2, 3, 4]]);
        for s in &c.structures {
            assert_eq!(s.sorted_vertices(), bfs_ball(&g, s.focus, 2).ids());
        }
        // coarse-first numbering
        assert_eq!(c.structures[1].vertices, vec![0, 2, 4, 1, 3]);
        assert_eq!(c.structures[1].n_coarse, 3);
        // edge (1, 2) is shared
        let holders = c
            .structures
            .iter()
            .filter(|s| s.local_edges.contains(&(1, 2)))
            .count();
        assert!(holders >= 2);
    }

    #[test]
    fn triangle_has_one_structure() {
        let g = generators::complete(3);
        let mis = VertexSet::new(3, [0]);
        let c = build_covering(&g, &mis, 2, 1, MisOrder::Ascending).unwrap();
        assert_eq!(c.structures.len(), 1);
        assert_eq!(c.structures[0].sorted_vertices(), vec![0, 1, 2]);
        assert_eq!(c.structures[0].local_edges.len(), 3);
        assert_eq!(c.macros.len(), 1);
        assert_eq!(c.macros[0].vertices, c.structures[0].vertices);
        assert_eq!(c.sigma.per_macro, vec![vec![1.0]]);
    }

    #[test]
    fn coarse_graph_examples() {
        let g = generators::path(5);
        let k1 = build_coarse_graph(&g, &VertexSet::new(5, [0, 2, 4]), 2);
        assert_eq!(k1.coarse_to_fine, vec![0, 2, 4]);
        assert_eq!(k1.graph, generators::path(3));

        let star = generators::star(4);
        let k1 = build_coarse_graph(&star, &VertexSet::new(5, [0]), 2);
        assert_eq!(k1.graph.n_vertices(), 1);
        assert_eq!(k1.graph.n_edges(), 0);

        let c6 = generators::cycle(6);
        let k1 = build_coarse_graph(&c6, &VertexSet::new(6, [0, 2, 4]), 2);
        assert_eq!(k1.graph, generators::complete(3));
    }

    #[test]
    fn p5_macrostructures_and_sigma() {
        let (_, c) = p5_covering();
        assert_eq!(c.macro_foci.ids(), &[0, 2]);
        assert_eq!(c.macros[0].focus, 0);
        assert_eq!(c.macros[0].members, vec![0, 1]);
        assert_eq!(c.macros[1].focus, 4);
        assert_eq!(c.macros[1].members, vec![1, 2]);
        for m in &c.macros {
            let mut v = m.vertices.clone();
            v.sort_unstable();
            assert_eq!(v, vec![0, 1, 2, 3, 4]);
            assert_eq!(m.coarse(), &[0, 2, 4]);
        }
        assert_eq!(c.sigma.get(&c.macros, 0, 0), 1.0);
        assert_eq!(c.sigma.get(&c.macros, 1, 0), 0.5);
        assert_eq!(c.sigma.get(&c.macros, 1, 1), 0.5);
        assert_eq!(c.sigma.get(&c.macros, 2, 1), 1.0);
        assert_eq!(c.sigma.get(&c.macros, 2, 0), 0.0);
    }

    #[test]
    fn six_cycle_macrostructures() {
        let g = generators::cycle(6);
        let mis = VertexSet::new(6, [0, 2, 4]);
        let c = build_covering(&g, &mis, 2, 1, MisOrder::Ascending).unwrap();
        // K1 is a triangle, so one macrostructure holds all three structures
        assert_eq!(c.macros.len(), 1);
        assert_eq!(c.macros[0].members, vec![0, 1, 2]);
        for f in 0..3 {
            let k1_nbrs: Vec<usize> = c.coarse_graph.graph.neighbors(f).to_vec();
            let holders: Vec<usize> = (0..c.macros.len())
                .filter(|&m| c.macros[m].members.contains(&f))
                .collect();
            let expected: Vec<usize> = (0..c.macros.len())
                .filter(|&m| {
                    let h = c.macros[m].focus_coarse;
                    h == f || k1_nbrs.contains(&h)
                })
                .collect();
            assert_eq!(holders, expected);
        }
    }

    #[test]
    fn scaling_with_three_holders() {
        let s = |f| Structure {
            focus: f,
            vertices: vec![f],
            n_coarse: 1,
            local_edges: vec![],
        };
        let m = |id, members: Vec<usize>| Macrostructure {
            focus: id,
            focus_coarse: id,
            members,
            vertices: vec![],
            n_coarse: 0,
        };
        let structures = vec![s(0), s(1)];
        let macros = vec![m(0, vec![0, 1]), m(1, vec![0]), m(2, vec![0])];
        let sigma = scaling_factors(&structures, &macros).unwrap();
        assert_eq!(sigma.per_macro[1], vec![1.0 / 3.0]);
        let sums = sigma.partition_sums(&macros);
        assert!(sums.iter().all(|s| (s - 1.0).abs() <= 1e-15));

        let lonely = vec![m(0, vec![0])];
        assert!(matches!(
            scaling_factors(&structures, &lonely),
            Err(AsmgError::UnassignedStructure(1))
        ));
    }

    #[test]
    fn p5_macro_matrix_matches_dense_oracle() {
        let (g, c) = p5_covering();
        let a = build_laplacian(&g);
        let mats = structure_laplacians(&a, &g, &c.structures);
        let ag = assemble_macro_matrix(0, &c.macros, &c.sigma, &mats).unwrap();

        // oracle in global numbering: every P5 edge is shared by exactly two
        // structures, so A_F = L(K_F) / 2; A_G0 = 1 * A_F0 + 1/2 * A_F2
        let lap = |edges: &[(usize, usize)]| {
            let mut m = [[0.0f64; 5]; 5];
            for &(u, v) in edges {
                m[u][u] += 1.0;
                m[v][v] += 1.0;
                m[u][v] -= 1.0;
                m[v][u] -= 1.0;
            }
            m
        };
        let f0 = lap(&[(0, 1), (1, 2)]);
        let f2 = lap(&[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let g0 = &c.macros[0];
        for (i, &u) in g0.vertices.iter().enumerate() {
            let mut row_sum = 0.0;
            for (j, &v) in g0.vertices.iter().enumerate() {
                let expect = 0.5 * f0[u][v] + 0.25 * f2[u][v];
                assert!((ag[(i, j)] - expect).abs() < 1e-15, "({u},{v})");
                row_sum += ag[(i, j)];
            }
            assert!(row_sum.abs() < 1e-15);
        }
    }

    #[test]
    fn dense_structure_matrices_assemble_by_global_id() {
        let g = Macrostructure {
            focus: 0,
            focus_coarse: 0,
            members: vec![0, 1],
            vertices: vec![3, 7, 5],
            n_coarse: 2,
        };
        let sigma = ScalingFactors {
            per_macro: vec![vec![1.0, 1.0]],
            multiplicity: vec![1, 1],
        };
        let one = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let mats = vec![
            StructureMatrix::Dense { dofs: vec![7, 3], matrix: one.clone() },
            StructureMatrix::Dense { dofs: vec![5, 7], matrix: one },
        ];
        let a = assemble_macro_matrix(0, &[g], &sigma, &mats).unwrap();
        let expect = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn disjoint_supports_give_block_diagonal_assembly() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let mis = VertexSet::new(4, [0, 2]);
        let structures = build_structures(&g, &mis, 2).unwrap();
        let a = build_laplacian(&g);
        let mats = structure_laplacians(&a, &g, &structures);
        let macros = vec![Macrostructure {
            focus: 0,
            focus_coarse: 0,
            members: vec![0, 1],
            vertices: vec![0, 2, 1, 3],
            n_coarse: 2,
        }];
        let sigma = scaling_factors(&structures, &macros).unwrap();
        let ag = assemble_macro_matrix(0, &macros, &sigma, &mats).unwrap();
        // local order 0, 2, 1, 3: no coupling between {0, 1} and {2, 3}
        assert_eq!(ag[(0, 1)], 0.0);
        assert_eq!(ag[(0, 3)], 0.0);
        assert_eq!(ag[(1, 2)], 0.0);
        assert_eq!(ag[(0, 2)], -1.0);
    }

    #[test]
    fn missing_vertex_is_an_index_map_error() {
        let macros = vec![Macrostructure {
            focus: 0,
            focus_coarse: 0,
            members: vec![0],
            vertices: vec![0],
            n_coarse: 1,
        }];
        let sigma = ScalingFactors {
            per_macro: vec![vec![1.0]],
            multiplicity: vec![1],
        };
        let mats = vec![StructureMatrix::Edges(vec![(0, 1, 1.0)])];
        assert!(matches!(
            assemble_macro_matrix(0, &macros, &sigma, &mats),
            Err(AsmgError::IndexMap(_))
        ));
    }

    #[test]
    fn radius_one_leaves_edges_uncovered() {
        // foci 0 and 3 of the path 0-1-2-3 with radius 1 miss edge (1, 2)
        let g = generators::path(4);
        let mis = VertexSet::new(4, [0, 3]);
        assert!(matches!(
            build_structures(&g, &mis, 1),
            Err(AsmgError::UncoveredEdge(1, 2))
        ));
    }
}
