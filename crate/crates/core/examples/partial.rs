//! The type-independent recogniser on tables with some rules drawn.

use tablegrid::eval::f1_report;
use tablegrid::raster::{binarize, Threshold};
use tablegrid::synth::{generate, BorderStyle, RuleMask, TableSpec};
use tablegrid::tsr::{assemble_structure, recognize, TsrConfig, TsrMode};

fn main() -> tablegrid::Result<()> {
    let masks = [
        RuleMask { outer: true, header: true, inner_rows: false, inner_cols: false },
        RuleMask { outer: false, header: false, inner_rows: true, inner_cols: false },
        RuleMask { outer: true, header: false, inner_rows: true, inner_cols: true },
    ];
    let cfg = TsrConfig::default();
    for m in masks {
        let mut spec = TableSpec::uniform(3, 3, 56, 28, BorderStyle::Partial(m));
        spec.gutter = 2;
        spec.line_thickness = 2;
        let (page, truth) = generate(&spec)?;
        let grid = recognize(&binarize(&page, Threshold::Auto), TsrMode::Partial, &cfg)?;
        let found = assemble_structure(&grid.cell_boxes(cfg.min_cell_area)?, truth.region)?;
        let report = f1_report(&found.boxes(), &truth.boxes());
        println!("{m:?}: {}x{}, F1@0.6 {:.3}", found.n_rows, found.n_cols, report.f1_at(0.6).unwrap_or(0.0));
    }
    Ok(())
}
