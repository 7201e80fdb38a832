//! Builds a multilevel hierarchy and writes the versioned JSON dump.
//!
//! Usage: `cargo run --example hierarchy_dump [output.json]`

use asmg::hierarchy::HierarchyDump;
use asmg::{build_hierarchy, build_laplacian, generators, HierarchyParams};

fn main() -> asmg::Result<()> {
    let g = generators::grid3d(12, 1);
    let a = build_laplacian(&g);
    let h = build_hierarchy(&a, &HierarchyParams::default())?;
    println!("level sizes {:?}, operator complexity {:.2}", h.sizes(), h.operator_complexity());
    for (k, l) in h.levels.iter().enumerate() {
        let audit = l.split.as_ref().map(|s| (s.covering.macros.len(), s.audit.max_row_nnz, s.audit.c3));
        println!("level {k}: n = {}, nnz = {}, (macrostructures, max row nnz, bound) = {audit:?}", l.n(), l.a.nnz());
    }

    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir().join("asmg-hierarchy.json").display().to_string()
    });
    h.dump_json(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    let back: HierarchyDump = serde_json::from_reader(std::fs::File::open(&path)?)?;
    println!("wrote {path}: format {} v{}, sizes {:?}", back.format, back.version, back.sizes);
    Ok(())
}
