//! Recursive construction of the multilevel hierarchy `A^(k+1) := Q^(k)`.
//!
//! The combinatorial procedure runs on the chain of coarse graphs
//! `K = K0, K1, K2, ...`: the macrostructure foci chosen on level `k` (an
//! independent set of `K(k+1)`) are the coarse dofs of level `k + 1`.
//! On level 0 the structure matrices are edge-weighted Laplacians of the
//! structure subgraphs. On every coarser level the structures are the coarse
//! vertex sets of the previous level's macrostructures and their matrices
//! are the local Schur complements, so they sum to `A^(k)` exactly.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asca::{
    assemble_asca, audit_sparsity, local_schur_complement, AuxiliaryBlocks, LocalSchurBlock,
    SparsityAudit,
};
use crate::covering::{
    assemble_macro_matrix, build_covering, structure_laplacians, Covering, StructureMatrix,
};
use crate::error::{AsmgError, Result};
use crate::graph::{
    adjacency_of_matrix, connected_components, frontier_mis, Graph, MisOrder,
    VertexSet,
};
use crate::sparse::SymSparseMatrix;

/// Hard cap on the number of levels.
pub const MAX_LEVELS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HierarchyParams {
    /// Structure radius on the finest level.
    pub structure_radius: usize,
    /// Macrostructure radius in the coarse graph. Coarser levels use
    /// structures of radius `macro_radius + 1`.
    pub macro_radius: usize,
    /// Stop coarsening once a level has at most this many dofs.
    pub max_coarse: usize,
    pub max_levels: usize,
    pub mis_order: MisOrder,
    /// Drop tolerance for the adjacency graph of the input matrix.
    pub drop_tol: f64,
    /// Coarse entries with `|q_ij| <= prune_rel * max |q|` are not stored.
    pub prune_rel: f64,
}

impl Default for HierarchyParams {
    fn default() -> Self {
        Self {
            structure_radius: 2,
            macro_radius: 1,
            max_coarse: 40,
            max_levels: MAX_LEVELS,
            mis_order: MisOrder::Ascending,
            drop_tol: 0.0,
            prune_rel: 1e-14,
        }
    }
}

/// Two-level data attached to every level except the coarsest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoarseSplit {
    pub covering: Covering,
    pub blocks: Vec<LocalSchurBlock>,
    pub aux: AuxiliaryBlocks,
    /// Level vertices that are not coarse, ascending.
    pub fine_ids: Vec<usize>,
    pub audit: SparsityAudit,
    /// Frobenius norm of what pruning removed from `Q`.
    pub pruned_norm: f64,
}

impl CoarseSplit {
    /// Level vertex of each coarse dof.
    pub fn coarse_ids(&self) -> &[usize] {
        self.covering.coarse.ids()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Level {
    pub a: SymSparseMatrix,
    pub graph: Graph,
    pub split: Option<CoarseSplit>,
}

impl Level {
    pub fn n(&self) -> usize {
        self.a.n()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
    pub params: HierarchyParams,
}

impl Hierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Dofs per level, finest first.
    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::n).collect()
    }

    /// Stored nonzeros over all levels relative to the finest level.
    pub fn operator_complexity(&self) -> f64 {
        let total: usize = self.levels.iter().map(|l| l.a.nnz()).sum();
        total as f64 / self.levels[0].a.nnz().max(1) as f64
    }

    /// Writes the versioned debugging dump: a header with the level sizes,
    /// then one record per level with its coarse dof list and the matrix as
    /// compressed rows.
    pub fn dump_json<W: Write>(&self, w: W) -> Result<()> {
        let dump = HierarchyDump {
            format: "asmg-hierarchy".into(),
            version: DUMP_VERSION,
            sizes: self.sizes(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelDump {
                    n: l.n(),
                    coarse: l.split.as_ref().map(|s| s.coarse_ids().to_vec()),
                    row_offsets: l.a.row_offsets().to_vec(),
                    col_indices: l.a.col_indices().to_vec(),
                    values: l.a.values().to_vec(),
                })
                .collect(),
        };
        serde_json::to_writer(w, &dump)?;
        Ok(())
    }
}

pub const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyDump {
    pub format: String,
    pub version: u32,
    pub sizes: Vec<usize>,
    pub levels: Vec<LevelDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub n: usize,
    pub coarse: Option<Vec<usize>>,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

/// Builds the hierarchy for the Laplacian `a` of a connected graph.
pub fn build_hierarchy(a: &SymSparseMatrix, params: &HierarchyParams) -> Result<Hierarchy> {
    if a.n() == 0 {
        return Err(AsmgError::EmptyGraph);
    }
    if params.structure_radius < 2 || params.macro_radius < 1 {
        return Err(AsmgError::InvalidConfig(format!(
            "structure radius {} must be >= 2 and macro radius {} >= 1",
            params.structure_radius, params.macro_radius
        )));
    }
    let max_levels = params.max_levels.clamp(1, MAX_LEVELS);
    let graph = adjacency_of_matrix(a, params.drop_tol);
    if connected_components(&graph).1 != 1 {
        return Err(AsmgError::InvalidConfig(
            "matrix graph must be connected".into(),
        ));
    }

    let mut levels = Vec::new();
    let mut a = a.clone();
    let mut graph = graph;
    let mut mis: Option<VertexSet> = None;
    let mut prev_blocks: Option<Vec<LocalSchurBlock>> = None;

    loop {
        let k = levels.len();
        let n = a.n();
        if n <= params.max_coarse || n <= 1 {
            levels.push(Level {
                a,
                graph,
                split: None,
            });
            break;
        }
        if k + 1 >= max_levels {
            return Err(AsmgError::LevelCap(max_levels));
        }
        let mis_k = mis
            .take()
            .unwrap_or_else(|| frontier_mis(&graph, &params.mis_order.permutation(n)));
        let radius = if k == 0 {
            params.structure_radius
        } else {
            params.macro_radius + 1
        };
        let built = build_level(&a, &graph, &mis_k, radius, params, prev_blocks.as_deref())
            .map_err(|e| e.at_level(k))?;
        let n_next = built.q.n();
        if n_next >= n {
            return Err(AsmgError::Stall { level: k, n });
        }
        let next_graph = built.split.covering.coarse_graph.graph.clone();
        let next_mis = VertexSet::new(n_next, built.split.covering.macro_foci.ids().iter().copied());
        prev_blocks = Some(built.split.blocks.clone());
        levels.push(Level {
            a,
            graph,
            split: Some(built.split),
        });
        a = built.q;
        graph = next_graph;
        mis = Some(next_mis);
    }
    Ok(Hierarchy {
        levels,
        params: *params,
    })
}

struct BuiltLevel {
    split: CoarseSplit,
    q: SymSparseMatrix,
}

fn build_level(
    a: &SymSparseMatrix,
    graph: &Graph,
    mis: &VertexSet,
    radius: usize,
    params: &HierarchyParams,
    prev_blocks: Option<&[LocalSchurBlock]>,
) -> Result<BuiltLevel> {
    let n = a.n();
    let covering = build_covering(graph, mis, radius, params.macro_radius, params.mis_order)?;

    let structure_matrices = match prev_blocks {
        None => structure_laplacians(a, graph, &covering.structures),
        Some(blocks) => coarse_structure_matrices(&covering, blocks)?,
    };

    let k1 = &covering.coarse_graph;
    let blocks: Vec<LocalSchurBlock> = (0..covering.macros.len())
        .into_par_iter()
        .map(|g| {
            let a_g = assemble_macro_matrix(g, &covering.macros, &covering.sigma, &structure_matrices)?;
            let m = &covering.macros[g];
            let local = local_schur_complement(&a_g, m.n_coarse)?;
            Ok(LocalSchurBlock {
                macro_id: g,
                coarse: m
                    .coarse()
                    .iter()
                    .map(|&v| k1.fine_to_coarse(v).expect("coarse vertex outside V1"))
                    .collect(),
                fine: m.fine().to_vec(),
                local,
            })
        })
        .collect::<Result<_>>()?;

    let n1 = mis.len();
    let q_full = assemble_asca(&blocks, n1)?;
    let audit = audit_sparsity(&q_full, &blocks);
    let q = q_full.pruned(params.prune_rel * q_full.max_abs());
    let pruned_norm = q_full.frobenius_distance(&q);
    if q.values().iter().any(|v| !v.is_finite()) {
        return Err(AsmgError::NonFinite(0));
    }
    let fine_ids: Vec<usize> = (0..n).filter(|&v| !mis.contains(v)).collect();
    let aux = AuxiliaryBlocks::build(&blocks, n1, fine_ids.len())?;
    Ok(BuiltLevel {
        split: CoarseSplit {
            covering,
            blocks,
            aux,
            fine_ids,
            audit,
            pruned_norm,
        },
        q,
    })
}

/// Structure matrices on a coarse level: structure `i` is focused at the
/// focus of previous macrostructure `i`, and its matrix is that
/// macrostructure's Schur complement. Verifies that the structure built by
/// the ball rule has exactly the macrostructure's coarse vertex set.
fn coarse_structure_matrices(
    covering: &Covering,
    prev_blocks: &[LocalSchurBlock],
) -> Result<Vec<StructureMatrix>> {
    if prev_blocks.len() != covering.structures.len() {
        return Err(AsmgError::DimensionMismatch {
            context: "structures vs previous macrostructures",
            expected: prev_blocks.len(),
            found: covering.structures.len(),
        });
    }
    covering
        .structures
        .iter()
        .zip(prev_blocks)
        .enumerate()
        .map(|(i, (s, b))| {
            let mut dofs = b.coarse.clone();
            dofs.sort_unstable();
            if s.sorted_vertices() != dofs {
                return Err(AsmgError::IndexMap(format!(
                    "structure {i} (focus {}) does not match the coarse set of macrostructure {i}",
                    s.focus
                )));
            }
            Ok(StructureMatrix::Dense {
                dofs: b.coarse.clone(),
                matrix: b.local.schur.clone(),
            })
        })
        .collect()
}
