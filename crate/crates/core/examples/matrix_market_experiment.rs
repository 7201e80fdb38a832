//! The full experiment: write a graph as Matrix Market, read it back, and
//! print the iterations-per-level-count table. Pass a `.mtx` path to run on
//! your own matrix instead.

use asmg::experiment::{run_experiment_file, RunConfig};
use asmg::generators;
use asmg::mm::write_matrix_market;

fn main() -> asmg::Result<()> {
    let path = match std::env::args().nth(1) {
        Some(p) => std::path::PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("asmg-example-road.mtx");
            let g = generators::road_like(100, 100, 0.25, 3);
            write_matrix_market(&g, std::io::BufWriter::new(std::fs::File::create(&p)?))?;
            p
        }
    };
    let (report, _) = run_experiment_file(&path, &RunConfig::default())?;
    if let Some(ingest) = &report.ingest {
        println!("{}", ingest.summary());
    }
    print!("{}", report.table());
    Ok(())
}
