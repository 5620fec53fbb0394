//! IoU-thresholded F1 and the weighted average over 0.6..0.9.

use tablegrid::eval::{f1_report, iou, weighted_average, EvalReport};
use tablegrid::BBox;

fn bb(x: usize, y: usize, w: usize, h: usize) -> BBox {
    BBox { x, y, w, h }
}

fn main() {
    let gt: Vec<BBox> = (0..3).flat_map(|r| (0..2).map(move |c| bb(c * 100, r * 40, 100, 40))).collect();
    let pred: Vec<BBox> = gt.iter().enumerate().map(|(i, b)| bb(b.x + 3 * i, b.y, b.w, b.h)).collect();
    for (p, g) in pred.iter().zip(&gt) {
        print!("{:.2} ", iou(p, g));
    }
    println!();

    let report = f1_report(&pred, &gt);
    print!("{}", EvalReport::table([("shifted", &report)]));

    // per-threshold F1 of a competition entry, weighted by threshold
    println!("{:.4}", weighted_average(&[0.589, 0.404, 0.137, 0.015]));
}
