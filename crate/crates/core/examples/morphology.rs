//! Erosion, dilation and strip kernels on a tiny binary image.

use tablegrid::morphology::{dilate, erode, erode_spanning, Kernel, Orientation};
use tablegrid::{BinaryImage, Polarity};

fn show(title: &str, img: &BinaryImage) {
    println!("{title}:");
    for y in 0..img.height() {
        let row: String = (0..img.width()).map(|x| if img.get(x, y) == 1 { '#' } else { '.' }).collect();
        println!("  {row}");
    }
}

fn main() -> tablegrid::Result<()> {
    let mut img = BinaryImage::new(12, 7, 0, Polarity::ForegroundIsOne);
    for y in 1..6 {
        for x in 2..9 {
            img.set(x, y, 1);
        }
    }
    img.set(10, 3, 1);
    for x in 0..12 {
        img.set(x, 4, 1);
    }
    show("input", &img);

    let k = Kernel::new(3, 3)?;
    show("erode 3x3", &erode(&img, &k));
    show("dilate 3x3", &dilate(&img, &k));
    // rows that are set across the whole width
    show("full-width rows", &erode_spanning(&img, Orientation::Horizontal, 1)?);
    Ok(())
}
