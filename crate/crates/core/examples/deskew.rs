//! Measure and undo page rotation.

use tablegrid::preprocess::{deskew, measure_skew};
use tablegrid::synth::{generate, BorderStyle, TableSpec};

fn main() -> tablegrid::Result<()> {
    for angle in [-7.0, -2.5, 4.0] {
        let mut spec = TableSpec::uniform(4, 3, 70, 30, BorderStyle::Full);
        spec.line_thickness = 3;
        spec.gutter = 3;
        spec.margin = 40;
        spec.rotation = angle;
        let (page, _) = generate(&spec)?;
        let d = deskew(&page)?;
        println!(
            "rotated {angle:+.1}: measured {:+.2}, applied {:+.2}, residual {:+.2}",
            measure_skew(&page)?,
            d.applied_angle,
            measure_skew(&d.image)?
        );
    }
    Ok(())
}
