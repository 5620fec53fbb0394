//! Recognise a table with no rules from its whitespace bands.

use tablegrid::raster::{binarize, Threshold};
use tablegrid::synth::{generate, BorderStyle, TableSpec};
use tablegrid::tsr::{tsr_unbordered, TsrConfig};

fn main() -> tablegrid::Result<()> {
    let spec = TableSpec::uniform(4, 3, 50, 24, BorderStyle::None);
    let (page, truth) = generate(&spec)?;
    let bin = binarize(&page, Threshold::Auto);

    // a column counts as empty when an 8 px wide full-height strip fits
    let cfg = TsrConfig { v_strip_width: 8, ..TsrConfig::default() };
    let cells = tsr_unbordered(&bin, &cfg)?.cell_boxes(cfg.min_cell_area)?;
    println!("{} cells found, {} expected", cells.len(), truth.cells.len());
    Ok(())
}
