//! Multilevel auxiliary-space preconditioning for graph Laplacians.
//!
//! The coarse operators are built by additive Schur complement
//! approximation over overlapping macrostructures obtained from a
//! maximal-independent-set covering of the graph. The resulting hierarchy
//! drives a two-grid or nonlinear multilevel (V/W) preconditioner for
//! conjugate gradient solvers on the singular Laplacian system.
//!
//! ```
//! use asmg::{build_hierarchy, build_laplacian, generators, HierarchyParams};
//!
//! let a = build_laplacian(&generators::grid2d(20, 20, false));
//! let h = build_hierarchy(&a, &HierarchyParams::default()).unwrap();
//! assert!(h.n_levels() >= 2);
//! ```

pub mod asca;
pub mod covering;
pub mod cycle;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod hierarchy;
pub mod krylov;
pub mod mm;
pub mod smoother;
pub mod sparse;
pub mod transfer;

pub use error::{AsmgError, Result};
pub use graph::{build_laplacian, frontier_mis, maximal_independent_set, Graph, MisOrder, VertexSet};
pub use hierarchy::{build_hierarchy, Hierarchy, HierarchyParams};
pub use krylov::{deflated_pcg, rank1_pcg, KernelMode, SolveParams, SolveReport};
pub use sparse::SymSparseMatrix;
pub use cycle::{AsmgPreconditioner, CyclePlan};
pub use transfer::DTildeKind;
