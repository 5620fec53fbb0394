//! Page alignment and color-invariance normalisation.

use crate::raster::{binarize, invert, median_filter, otsu_threshold, rotate, Threshold};
use crate::regions::{label, Connectivity};
use crate::{BinaryImage, Error, GrayImage, Polarity, Result};

/// Side of the noise-suppression median filter used before measuring skew.
pub const DESKEW_MEDIAN_KERNEL: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct DeskewResult {
    pub image: GrayImage,
    /// Rotation applied to the input, degrees counter-clockwise, in `[-45, 45)`.
    pub applied_angle: f64,
}

/// Rectangle of minimum area enclosing a point set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotatedRect {
    pub center: (f64, f64),
    /// Extent along the edge direction given by `angle`.
    pub width: f64,
    pub height: f64,
    /// Direction of one rectangle edge, degrees counter-clockwise from the
    /// +x axis as displayed (y grows downwards), in `[0, 90)`.
    pub angle: f64,
}

impl RotatedRect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; returns the hull counter-clockwise in the
/// coordinate frame of the input, without repeated end point.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum-area enclosing rectangle by rotating calipers over the hull
/// edges. `None` for an empty point set.
pub fn min_area_rect(points: &[(i64, i64)]) -> Option<RotatedRect> {
    let hull = convex_hull(points);
    match hull.len() {
        0 => return None,
        1 => {
            let (x, y) = hull[0];
            return Some(RotatedRect {
                center: (x as f64, y as f64),
                width: 0.0,
                height: 0.0,
                angle: 0.0,
            });
        }
        _ => {}
    }
    let mut best: Option<RotatedRect> = None;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let (dx, dy) = ((b.0 - a.0) as f64, (b.1 - a.1) as f64);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        let (mut min_u, mut max_u, mut min_v, mut max_v) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(px, py) in &hull {
            let (px, py) = (px as f64, py as f64);
            let u = px * ux + py * uy;
            let v = -px * uy + py * ux;
            min_u = min_u.min(u);
            max_u = max_u.max(u);
            min_v = min_v.min(v);
            max_v = max_v.max(v);
        }
        let (cu, cv) = ((min_u + max_u) / 2.0, (min_v + max_v) / 2.0);
        // display angle: flip y so counter-clockwise is positive
        let angle = (-dy).atan2(dx).to_degrees().rem_euclid(90.0);
        let rect = RotatedRect {
            center: (cu * ux - cv * uy, cu * uy + cv * ux),
            width: max_u - min_u,
            height: max_v - min_v,
            angle: if angle >= 90.0 { 0.0 } else { angle },
        };
        if best.is_none_or(|b| rect.area() < b.area() - 1e-9) {
            best = Some(rect);
        }
    }
    best
}

/// Maps an edge direction in degrees to the skew in `(-45, 45]`.
fn normalize_skew(angle: f64) -> f64 {
    let a = angle.rem_euclid(90.0);
    if a > 45.0 {
        a - 90.0
    } else {
        a
    }
}

/// When the median filter keeps less than this fraction of the page's
/// content it has erased thin strokes rather than noise, and skew is
/// measured on the unfiltered page instead.
pub const MIN_FILTER_RETENTION: f64 = 0.5;

/// Content pixels of the (usually filtered) binarised page as per-row extreme points
/// (all a hull can use).
fn content_extremes(img: &GrayImage) -> Result<Vec<(i64, i64)>> {
    let raw = binarize(img, Threshold::Auto);
    let filtered = binarize(&median_filter(img, DESKEW_MEDIAN_KERNEL)?, Threshold::Auto);
    let chosen = if (filtered.count(0) as f64) < MIN_FILTER_RETENTION * raw.count(0) as f64 {
        raw
    } else {
        filtered
    };
    let content = invert(&chosen);
    let (w, h) = content.dims();
    let mut pts = Vec::new();
    for y in 0..h {
        let row = &content.data()[y * w..(y + 1) * w];
        if let Some(first) = row.iter().position(|&v| v == 1) {
            let last = row.iter().rposition(|&v| v == 1).unwrap();
            pts.push((first as i64, y as i64));
            pts.push((last as i64, y as i64));
        }
    }
    if pts.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok(pts)
}

/// Counter-clockwise rotation of the page content in degrees, `(-45, 45]`,
/// from the minimum-area rectangle around all content pixels.
pub fn measure_skew(img: &GrayImage) -> Result<f64> {
    let pts = content_extremes(img)?;
    let rect = min_area_rect(&pts).ok_or(Error::EmptyDocument)?;
    Ok(normalize_skew(rect.angle))
}

/// Most frequent intensity among the pixels Otsu classes as background.
fn background_intensity(img: &GrayImage) -> u8 {
    let t = otsu_threshold(img) as usize;
    let hist = img.histogram();
    (t + 1..256)
        .max_by_key(|&v| (hist[v], std::cmp::Reverse(v)))
        .filter(|&v| hist[v] > 0)
        .map_or(255, |v| v as u8)
}

/// Measures skew on a median-filtered, binarised copy and undoes it on the
/// original image. Uncovered corners take the background intensity.
pub fn deskew(img: &GrayImage) -> Result<DeskewResult> {
    let skew = measure_skew(img)?;
    let applied_angle = if skew == 0.0 { 0.0 } else { -skew };
    let image = rotate(img, applied_angle, background_intensity(img));
    Ok(DeskewResult {
        image,
        applied_angle,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct NormalizeConfig {
    /// Regions whose bounding box is narrower or shorter than this are left
    /// alone, so solid glyph strokes and rules are never flipped.
    pub min_region_side: usize,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self { min_region_side: 8 }
    }
}

pub fn normalize_colors(img: &BinaryImage) -> BinaryImage {
    normalize_colors_with(img, &NormalizeConfig::default())
}

/// Forces black content on a white background.
///
/// If the image is mostly black it is inverted as a whole. Then every
/// 8-connected black region whose bounding box holds more black than white
/// pixels has that box inverted. Ties are left alone. Regions are visited
/// from the smallest box up, so a shaded cell is flipped before the rule
/// network around it is counted.
pub fn normalize_colors_with(img: &BinaryImage, cfg: &NormalizeConfig) -> BinaryImage {
    let mut out = img.clone().with_polarity(Polarity::ForegroundIsZero);
    if out.count(0) > out.count(1) {
        out.data_mut().iter_mut().for_each(|v| *v = 1 - *v);
    }
    let mut regions = label(&out, 0, Connectivity::Eight).components;
    regions.sort_by_key(|r| (r.bbox.area(), r.label));
    let w = out.width();
    for region in regions {
        let b = region.bbox;
        if b.w < cfg.min_region_side || b.h < cfg.min_region_side {
            continue;
        }
        let data = out.data_mut();
        let black: usize = (b.y..b.bottom())
            .map(|y| data[y * w + b.x..y * w + b.right()].iter().filter(|&&v| v == 0).count())
            .sum();
        if 2 * black > b.area() {
            for y in b.y..b.bottom() {
                data[y * w + b.x..y * w + b.right()].iter_mut().for_each(|v| *v = 1 - *v);
            }
        }
    }
    out
}
