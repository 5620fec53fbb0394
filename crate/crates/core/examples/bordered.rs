//! Recognise a fully ruled table from its line masks.

use tablegrid::raster::{binarize, Threshold};
use tablegrid::synth::{generate, BorderStyle, TableSpec};
use tablegrid::tsr::{assemble_structure, tsr_bordered, TsrConfig};
use tablegrid::BBox;

fn main() -> tablegrid::Result<()> {
    let spec = TableSpec::uniform(3, 4, 60, 30, BorderStyle::Full);
    let (page, truth) = generate(&spec)?;
    let bin = binarize(&page, Threshold::Auto);

    let grid = tsr_bordered(&bin, &TsrConfig::default())?;
    let cells = grid.cell_boxes(TsrConfig::default().min_cell_area)?;
    let region = BBox { x: 0, y: 0, w: page.width(), h: page.height() };
    let table = assemble_structure(&cells, region)?;

    println!("truth {}x{}, found {}x{}", truth.n_rows, truth.n_cols, table.n_rows, table.n_cols);
    for c in table.cells.iter().take(4) {
        println!("  r{} c{}: {:?}", c.row, c.col, c.bbox);
    }
    Ok(())
}
