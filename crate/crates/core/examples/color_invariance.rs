//! Shaded cells are flipped back to black-on-white before recognition.

use tablegrid::preprocess::normalize_colors;
use tablegrid::raster::{binarize, Threshold};
use tablegrid::synth::{generate, BorderStyle, TableSpec};

fn main() -> tablegrid::Result<()> {
    let mut spec = TableSpec::uniform(2, 3, 60, 28, BorderStyle::Full);
    let plain = binarize(&generate(&spec)?.0, Threshold::Auto);
    spec.polarity_plan = vec![true, false, false, false, true, false];
    let shaded = binarize(&generate(&spec)?.0, Threshold::Auto);

    let fixed = normalize_colors(&shaded);
    let agree = |a: &tablegrid::BinaryImage| {
        let same = a.data().iter().zip(plain.data()).filter(|(p, q)| p == q).count();
        100.0 * same as f64 / plain.data().len() as f64
    };
    println!("agreement with the unshaded table: before {:.2}%, after {:.2}%", agree(&shaded), agree(&fixed));
    Ok(())
}
