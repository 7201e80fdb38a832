use thiserror::Error;

/// Errors raised while building or applying the multigrid hierarchy.
#[derive(Debug, Error)]
pub enum AsmgError {
    #[error("edge ({0}, {1}) is not covered by any structure")]
    UncoveredEdge(usize, usize),

    #[error("structure {0} is not contained in any macrostructure")]
    UnassignedStructure(usize),

    #[error("coarse dof {0} appears in no local Schur block")]
    UncoveredCoarseDof(usize),

    #[error("matrix is not positive definite ({context}): pivot {pivot:e} at row {row}")]
    NotSpd {
        context: String,
        row: usize,
        pivot: f64,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("coarsening stalled on level {level}: {n} dofs did not decrease")]
    Stall { level: usize, n: usize },

    #[error("level cap of {0} levels reached before the coarse size target")]
    LevelCap(usize),

    #[error("non-finite value encountered on level {0}")]
    NonFinite(usize),

    #[error("index map mismatch: {0}")]
    IndexMap(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("on level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<AsmgError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AsmgError {
    pub(crate) fn at_level(self, level: usize) -> Self {
        match self {
            e @ AsmgError::AtLevel { .. } => e,
            e => AsmgError::AtLevel {
                level,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, AsmgError>;
