//! Command line front end: `asmg solve --matrix file.mtx ...`.
//!
//! Exit status is 0 when every solve converged, 2 when some did not and 1
//! on any error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use asmg::experiment::{run_experiment_file, Cycle, RunConfig};
use asmg::krylov::{KernelMode, OuterMethod, OUTER_WINDOW};
use asmg::{DTildeKind, MisOrder};

#[derive(Parser)]
#[command(name = "asmg", version, about = "Multilevel solver for graph Laplacian systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the hierarchy for a Matrix Market graph and solve A u = 0 from a
    /// random start with every level count.
    Solve(SolveArgs),
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    cycle: CycleArg,
    /// Gauss-Seidel sweeps before and after each coarse correction.
    #[arg(long, default_value_t = 2)]
    smooth: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 40)]
    max_coarse: usize,
    /// Structure radius on the finest level.
    #[arg(long, default_value_t = 2)]
    radius: usize,
    #[arg(long, default_value_t = 1)]
    macro_radius: usize,
    #[arg(long, value_enum, default_value = "diag")]
    dtilde: DTildeArg,
    #[arg(long, value_enum, default_value = "deflate")]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value = "auto")]
    outer: OuterArg,
    /// Seed of the random start vector.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Visit vertices in a random order seeded with this value when picking
    /// independent sets, instead of ascending order.
    #[arg(long)]
    mis_seed: Option<u64>,
    /// Largest number of levels to run.
    #[arg(long)]
    max_levels: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    max_exact_coarse: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    /// Write the hierarchy as JSON to this file.
    #[arg(long)]
    dump_hierarchy: Option<PathBuf>,
    /// Reserved; weighted input is not supported.
    #[arg(long, hide = true)]
    keep_weights: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CycleArg {
    V,
    W,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DTildeArg {
    Diag,
    Exact,
    Tridiag,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Deflate,
    Rank1,
}

#[derive(Clone, Copy, ValueEnum)]
enum OuterArg {
    Auto,
    Pcg,
    Gcg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

impl SolveArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            cycles: match self.cycle {
                CycleArg::V => vec![Cycle::V],
                CycleArg::W => vec![Cycle::W],
                CycleArg::Both => vec![Cycle::V, Cycle::W],
            },
            smoothing_steps: self.smooth,
            tol: self.tol,
            max_iters: self.max_iters,
            max_coarse: self.max_coarse,
            structure_radius: self.radius,
            macro_radius: self.macro_radius,
            dtilde: match self.dtilde {
                DTildeArg::Diag => DTildeKind::Diagonal,
                DTildeArg::Exact => DTildeKind::Exact,
                DTildeArg::Tridiag => DTildeKind::Tridiagonal,
            },
            kernel: match self.kernel {
                KernelArg::Deflate => KernelMode::Deflate,
                KernelArg::Rank1 => KernelMode::Rank1,
            },
            outer: match self.outer {
                OuterArg::Auto => OuterMethod::Auto,
                OuterArg::Pcg => OuterMethod::Pcg,
                OuterArg::Gcg => OuterMethod::Gcg { window: OUTER_WINDOW },
            },
            seed: self.seed,
            mis_order: self.mis_seed.map_or(MisOrder::Ascending, MisOrder::Random),
            max_levels: self.max_levels,
            max_exact_coarse: self.max_exact_coarse,
        }
    }
}

fn solve(args: &SolveArgs) -> Result<bool, Box<dyn std::error::Error>> {
    if args.keep_weights {
        return Err("--keep-weights is not supported: edge weights are discarded".into());
    }
    let (report, hierarchy) = run_experiment_file(&args.matrix, &args.config())?;
    if let Some(path) = &args.dump_hierarchy {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        hierarchy.dump_json(file)?;
    }
    match args.format {
        FormatArg::Json => println!("{}", report.to_json()?),
        FormatArg::Table => {
            if let Some(ingest) = &report.ingest {
                println!("{}", ingest.summary());
            }
            println!(
                "setup {:.2} s, operator complexity {:.2}, level sizes {:?}",
                report.setup_time_s, report.operator_complexity, report.level_sizes
            );
            print!("{}", report.table());
        }
    }
    Ok(report.all_converged())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match &cli.command {
        Command::Solve(args) => match solve(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(2),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
