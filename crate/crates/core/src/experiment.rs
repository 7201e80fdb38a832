//! Experiment driver: one hierarchy, solved with 2, 3, ... levels in use,
//! reported as an iterations-per-level-count table or as JSON.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cycle::{AsmgPreconditioner, CoarseCorrection, CyclePlan};
use crate::error::{AsmgError, Result};
use crate::graph::{build_laplacian, Graph, MisOrder};
use crate::hierarchy::{build_hierarchy, Hierarchy, HierarchyParams};
use crate::krylov::{random_start, solve, KernelMode, OuterMethod, SolveParams, SolveReport};
use crate::mm::{read_matrix_market, IngestReport};
use crate::transfer::DTildeKind;

pub const REPORT_FORMAT: &str = "asmg-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cycle {
    V,
    W,
}

impl Cycle {
    pub fn nu(self) -> usize {
        match self {
            Cycle::V => 1,
            Cycle::W => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Cycle::V => "V-cycle",
            Cycle::W => "W-cycle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cycles: Vec<Cycle>,
    pub smoothing_steps: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub max_coarse: usize,
    pub structure_radius: usize,
    pub macro_radius: usize,
    pub dtilde: DTildeKind,
    pub kernel: KernelMode,
    pub outer: OuterMethod,
    pub seed: u64,
    pub mis_order: MisOrder,
    /// Largest level count to run; `None` runs every level count.
    pub max_levels: Option<usize>,
    /// Level counts whose coarsest level exceeds this size are skipped.
    pub max_exact_coarse: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cycles: vec![Cycle::V, Cycle::W],
            smoothing_steps: 2,
            tol: 1e-8,
            max_iters: 500,
            max_coarse: 40,
            structure_radius: 2,
            macro_radius: 1,
            dtilde: DTildeKind::Diagonal,
            kernel: KernelMode::Deflate,
            outer: OuterMethod::Auto,
            seed: 0,
            mis_order: MisOrder::Ascending,
            max_levels: None,
            max_exact_coarse: 10_000,
        }
    }
}

impl RunConfig {
    pub fn hierarchy_params(&self) -> HierarchyParams {
        HierarchyParams {
            structure_radius: self.structure_radius,
            macro_radius: self.macro_radius,
            max_coarse: self.max_coarse,
            mis_order: self.mis_order,
            ..Default::default()
        }
    }

    pub fn plan(&self, cycle: Cycle) -> CyclePlan {
        CyclePlan {
            nu: cycle.nu(),
            smoothing_steps: self.smoothing_steps,
            dtilde: self.dtilde,
            correction: CoarseCorrection::Gcg,
        }
    }

    pub fn solve_params(&self) -> SolveParams {
        SolveParams {
            tol: self.tol,
            max_iters: self.max_iters,
            kernel: self.kernel,
            outer: self.outer,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(AsmgError::InvalidConfig(format!("tolerance {} must be positive", self.tol)));
        }
        if self.cycles.is_empty() {
            return Err(AsmgError::InvalidConfig("no cycle selected".into()));
        }
        Ok(())
    }
}

/// One solve with a given cycle and number of levels in use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRun {
    pub cycle: Cycle,
    pub levels: usize,
    /// Size of the coarsest level in use.
    pub coarsest: usize,
    /// `None` when the coarsest level was too large for an exact solve.
    pub solve: Option<SolveReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format: String,
    pub version: u32,
    /// Vertex numbering in all fields is zero-based.
    pub ingest: Option<IngestReport>,
    pub n: usize,
    pub nnz: usize,
    pub config: RunConfig,
    pub level_sizes: Vec<usize>,
    pub operator_complexity: f64,
    pub setup_time_s: f64,
    pub runs: Vec<LevelRun>,
}

impl ExperimentReport {
    /// Whether every solve that ran converged.
    pub fn all_converged(&self) -> bool {
        self.runs.iter().filter_map(|r| r.solve.as_ref()).all(|s| s.converged)
    }

    pub fn iterations(&self, cycle: Cycle) -> Vec<Option<usize>> {
        self.runs
            .iter()
            .filter(|r| r.cycle == cycle)
            .map(|r| r.solve.as_ref().map(|s| s.iterations))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        if r.format != REPORT_FORMAT || r.version != REPORT_VERSION {
            return Err(AsmgError::InvalidConfig(format!(
                "unsupported report {} v{}",
                r.format, r.version
            )));
        }
        Ok(r)
    }

    /// Table with one column per level count: iterations per cycle and the
    /// size of the coarsest level. Skipped runs show `-`, unconverged ones
    /// a trailing `*`.
    pub fn table(&self) -> String {
        let mut level_counts: Vec<usize> = self.runs.iter().map(|r| r.levels).collect();
        level_counts.sort_unstable();
        level_counts.dedup();
        let mut rows: Vec<(String, Vec<String>)> = Vec::new();
        rows.push((
            "Levels".into(),
            level_counts.iter().map(|l| l.to_string()).collect(),
        ));
        for cycle in &self.config.cycles {
            let cells = level_counts
                .iter()
                .map(|&l| {
                    match self
                        .runs
                        .iter()
                        .find(|r| r.cycle == *cycle && r.levels == l)
                        .and_then(|r| r.solve.as_ref())
                    {
                        Some(s) if s.converged => s.iterations.to_string(),
                        Some(s) => format!("{}*", s.iterations),
                        None => "-".into(),
                    }
                })
                .collect();
            rows.push((cycle.label().into(), cells));
        }
        rows.push((
            "CDOF".into(),
            level_counts.iter().map(|&l| self.level_sizes[l - 1].to_string()).collect(),
        ));

        let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let cell_w = rows
            .iter()
            .flat_map(|r| r.1.iter().map(String::len))
            .max()
            .unwrap_or(1)
            .max(4);
        let mut out = String::new();
        for (label, cells) in &rows {
            let _ = write!(out, "{label:<label_w$}");
            for c in cells {
                let _ = write!(out, "  {c:>cell_w$}");
            }
            out.push('\n');
        }
        if level_counts == [1] {
            out.push_str("(graph at or below the coarse size limit: direct solve only)\n");
        }
        if self.runs.iter().any(|r| r.solve.is_none()) {
            let _ = writeln!(
                out,
                "(-: coarsest level above {} dofs, exact solve skipped)",
                self.config.max_exact_coarse
            );
        }
        if self.runs.iter().any(|r| r.solve.as_ref().is_some_and(|s| !s.converged)) {
            let _ = writeln!(out, "(*: not converged within {} iterations)", self.config.max_iters);
        }
        out
    }
}

/// Runs the experiment on a Matrix Market file.
pub fn run_experiment_file(path: &std::path::Path, config: &RunConfig) -> Result<(ExperimentReport, Hierarchy)> {
    let (graph, ingest) = read_matrix_market(path)?;
    let (mut report, h) = run_experiment_with_hierarchy(&graph, config)?;
    report.ingest = Some(ingest);
    Ok((report, h))
}

/// Builds one hierarchy for the Laplacian of `graph` and, for every level
/// count from 2 up to the full depth, solves `A u = 0` from a seeded random
/// start.
pub fn run_experiment(graph: &Graph, config: &RunConfig) -> Result<ExperimentReport> {
    Ok(run_experiment_with_hierarchy(graph, config)?.0)
}

/// [`run_experiment`], also returning the hierarchy it built.
pub fn run_experiment_with_hierarchy(graph: &Graph, config: &RunConfig) -> Result<(ExperimentReport, Hierarchy)> {
    config.validate()?;
    let a = build_laplacian(graph);
    let t = Instant::now();
    let h = build_hierarchy(&a, &config.hierarchy_params())?;
    let setup_time_s = t.elapsed().as_secs_f64();
    let sizes = h.sizes();

    let deepest = config.max_levels.unwrap_or(usize::MAX).min(h.n_levels()).max(1);
    let level_counts: Vec<usize> = if h.n_levels() == 1 {
        vec![1]
    } else {
        (2..=deepest.max(2)).collect()
    };

    let n = a.n();
    let b = vec![0.0; n];
    let params = config.solve_params();
    let mut runs = Vec::new();
    for &cycle in &config.cycles {
        for &levels in &level_counts {
            let coarsest = sizes[levels - 1];
            if coarsest > config.max_exact_coarse {
                runs.push(LevelRun {
                    cycle,
                    levels,
                    coarsest,
                    solve: None,
                });
                continue;
            }
            let p = AsmgPreconditioner::with_levels(&h, config.plan(cycle), levels)?;
            let mut x = random_start(n, config.seed);
            let mut rep = solve(&a, &b, &mut x, &p, &params)?;
            rep.cdof = p.cdof();
            runs.push(LevelRun {
                cycle,
                levels,
                coarsest,
                solve: Some(rep),
            });
        }
    }
    let report = ExperimentReport {
        format: REPORT_FORMAT.into(),
        version: REPORT_VERSION,
        ingest: None,
        n,
        nnz: a.nnz(),
        config: config.clone(),
        operator_complexity: h.operator_complexity(),
        level_sizes: sizes,
        setup_time_s,
        runs,
    };
    Ok((report, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn tiny_graph_gives_single_column() {
        let rep = run_experiment(&generators::path(10), &RunConfig::default()).unwrap();
        assert_eq!(rep.level_sizes, vec![10]);
        assert_eq!(rep.runs.len(), 2);
        assert!(rep.all_converged());
        let t = rep.table();
        assert!(t.contains("direct solve"), "{t}");
    }

    #[test]
    fn grid_table_has_one_column_per_level_count() {
        let rep = run_experiment(&generators::grid2d(30, 30, true), &RunConfig::default()).unwrap();
        let depth = rep.level_sizes.len();
        assert!(depth >= 3);
        assert_eq!(rep.iterations(Cycle::W).len(), depth - 1);
        assert!(rep.all_converged());
        let t = rep.table();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("Levels"));
        assert!(lines[1].starts_with("V-cycle"));
        assert!(lines[2].starts_with("W-cycle"));
        assert!(lines[3].starts_with("CDOF"));
        let cdof: Vec<usize> = lines[3].split_whitespace().skip(1).map(|c| c.parse().unwrap()).collect();
        assert!(cdof.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn json_round_trips() {
        let rep = run_experiment(&generators::grid2d(12, 12, false), &RunConfig {
            max_coarse: 20,
            ..Default::default()
        })
        .unwrap();
        let back = ExperimentReport::from_json(&rep.to_json().unwrap()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn large_coarsest_levels_are_skipped() {
        let config = RunConfig {
            max_exact_coarse: 50,
            cycles: vec![Cycle::W],
            ..Default::default()
        };
        let rep = run_experiment(&generators::grid2d(30, 30, false), &config).unwrap();
        assert!(rep.runs[0].solve.is_none());
        assert!(rep.runs.last().unwrap().solve.is_some());
        assert!(rep.table().contains('-'));
    }
}
