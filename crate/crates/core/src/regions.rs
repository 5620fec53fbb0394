//! Connected-component labelling and bounding boxes.

use serde::{Deserialize, Serialize};

use crate::{BinaryImage, Error, Result};

/// Axis-aligned pixel rectangle `[x, x + w) x [y, y + h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x0 < x1 && y0 < y1).then(|| BBox::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn overlaps(&self, other: &BBox) -> bool {
        self.intersection(other).is_some()
    }

    pub fn contains(&self, other: &BBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Grows the box by `margin` on every side, clamped to `[0, w) x [0, h)`.
    pub fn expand_clamped(&self, margin: usize, dims: (usize, usize)) -> BBox {
        let x0 = self.x.saturating_sub(margin);
        let y0 = self.y.saturating_sub(margin);
        let x1 = (self.right() + margin).min(dims.0);
        let y1 = (self.bottom() + margin).min(dims.1);
        BBox::new(x0, y0, x1.saturating_sub(x0), y1.saturating_sub(y0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Component {
    pub label: u32,
    pub bbox: BBox,
    pub area: usize,
}

/// Per-pixel labels plus the component table. `labels[i] == 0` marks
/// non-target pixels; component `c` carries label `c.label` (1-based).
#[derive(Clone, Debug)]
pub struct Labeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub components: Vec<Component>,
}

/// Components of `target`-valued pixels in scanline order of each
/// component's first pixel.
pub fn connected_components(img: &BinaryImage, target: u8, connectivity: Connectivity) -> Vec<Component> {
    label(img, target, connectivity).components
}

/// Two-pass union-find labelling.
pub fn label(img: &BinaryImage, target: u8, connectivity: Connectivity) -> Labeling {
    let (w, h) = img.dims();
    let data = img.data();
    let mut provisional = vec![0u32; w * h];
    // parent[0] is a sentinel
    let mut parent: Vec<u32> = vec![0];

    fn find(parent: &mut [u32], mut a: u32) -> u32 {
        while parent[a as usize] != a {
            parent[a as usize] = parent[parent[a as usize] as usize];
            a = parent[a as usize];
        }
        a
    }
    fn union(parent: &mut [u32], a: u32, b: u32) {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi as usize] = lo;
        }
    }

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if data[i] != target {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            if x > 0 {
                neighbours[n] = provisional[i - 1];
                n += 1;
            }
            if y > 0 {
                neighbours[n] = provisional[i - w];
                n += 1;
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        neighbours[n] = provisional[i - w - 1];
                        n += 1;
                    }
                    if x + 1 < w {
                        neighbours[n] = provisional[i - w + 1];
                        n += 1;
                    }
                }
            }
            let mut current = 0u32;
            for &l in neighbours[..n].iter().filter(|&&l| l != 0) {
                if current == 0 {
                    current = l;
                } else {
                    union(&mut parent, current, l);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            provisional[i] = current;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut components: Vec<Component> = Vec::new();
    let mut extents: Vec<(usize, usize, usize, usize)> = Vec::new();
    for i in 0..w * h {
        let p = provisional[i];
        if p == 0 {
            continue;
        }
        let root = find(&mut parent, p) as usize;
        if remap[root] == 0 {
            components.push(Component {
                label: components.len() as u32 + 1,
                bbox: BBox::new(0, 0, 1, 1),
                area: 0,
            });
            extents.push((usize::MAX, usize::MAX, 0, 0));
            remap[root] = components.len() as u32;
        }
        let l = remap[root];
        provisional[i] = l;
        let (x, y) = (i % w, i / w);
        let c = &mut components[l as usize - 1];
        c.area += 1;
        let e = &mut extents[l as usize - 1];
        e.0 = e.0.min(x);
        e.1 = e.1.min(y);
        e.2 = e.2.max(x);
        e.3 = e.3.max(y);
    }
    for (c, e) in components.iter_mut().zip(extents) {
        c.bbox = BBox::new(e.0, e.1, e.2 - e.0 + 1, e.3 - e.1 + 1);
    }
    Labeling {
        width: w,
        height: h,
        labels: provisional,
        components,
    }
}

pub const DEFAULT_MIN_CELL_AREA: usize = 16;

/// Reads cell interiors off a grid-cell image (black separators, white
/// cells): 4-connected white components, minus the one spanning the whole
/// image (the outside) and those smaller than `min_cell_area`.
pub fn extract_cell_boxes(grid: &BinaryImage, min_cell_area: usize) -> Result<Vec<BBox>> {
    let full = BBox::new(0, 0, grid.width(), grid.height());
    let cells: Vec<BBox> = connected_components(grid, 1, Connectivity::Four)
        .into_iter()
        .filter(|c| c.bbox != full && c.area >= min_cell_area)
        .map(|c| c.bbox)
        .collect();
    if cells.is_empty() {
        return Err(Error::NoCellsFound);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Polarity;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn img(w: usize, h: usize, data: Vec<u8>) -> BinaryImage {
        BinaryImage::from_vec(w, h, data, Polarity::ForegroundIsZero).unwrap()
    }

    /// Flood fill from each unvisited target pixel; returns pixel sets.
    fn flood_oracle(img: &BinaryImage, target: u8, conn: Connectivity) -> BTreeSet<BTreeSet<(usize, usize)>> {
        let (w, h) = img.dims();
        let mut seen = vec![false; w * h];
        let mut out = BTreeSet::new();
        for sy in 0..h {
            for sx in 0..w {
                if seen[sy * w + sx] || img.get(sx, sy) != target {
                    continue;
                }
                let mut set = BTreeSet::new();
                let mut stack = vec![(sx, sy)];
                seen[sy * w + sx] = true;
                while let Some((x, y)) = stack.pop() {
                    set.insert((x, y));
                    for dy in -1i32..=1 {
                        for dx in -1i32..=1 {
                            if (dx == 0 && dy == 0) || (conn == Connectivity::Four && dx != 0 && dy != 0) {
                                continue;
                            }
                            let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                            if nx < 0 || ny < 0 || nx >= w as i32 || ny >= h as i32 {
                                continue;
                            }
                            let (nx, ny) = (nx as usize, ny as usize);
                            if !seen[ny * w + nx] && img.get(nx, ny) == target {
                                seen[ny * w + nx] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
                out.insert(set);
            }
        }
        out
    }

    fn pixel_sets(l: &Labeling) -> BTreeSet<BTreeSet<(usize, usize)>> {
        l.components
            .iter()
            .map(|c| {
                (0..l.width * l.height)
                    .filter(|&i| l.labels[i] == c.label)
                    .map(|i| (i % l.width, i / l.width))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn empty_image_has_no_components() {
        let b = BinaryImage::new(5, 5, 0, Polarity::ForegroundIsOne);
        assert!(connected_components(&b, 1, Connectivity::Eight).is_empty());
    }

    #[test]
    fn two_blocks() {
        let mut b = BinaryImage::new(6, 4, 0, Polarity::ForegroundIsOne);
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1), (4, 2), (5, 2), (4, 3), (5, 3)] {
            b.set(x, y, 1);
        }
        let cs = connected_components(&b, 1, Connectivity::Eight);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].bbox, BBox::new(0, 0, 2, 2));
        assert_eq!(cs[1].bbox, BBox::new(4, 2, 2, 2));
        assert!(cs.iter().all(|c| c.area == 4));
    }

    #[test]
    fn diagonal_contact_depends_on_connectivity() {
        let b = img(2, 2, vec![1, 0, 0, 1]);
        assert_eq!(connected_components(&b, 1, Connectivity::Four).len(), 2);
        assert_eq!(connected_components(&b, 1, Connectivity::Eight).len(), 1);
    }

    fn ruled_grid(w: usize, h: usize, xs: &[usize], ys: &[usize]) -> BinaryImage {
        let mut g = BinaryImage::new(w, h, 1, Polarity::ForegroundIsZero);
        for y in 0..h {
            for x in 0..w {
                if xs.contains(&x) || ys.contains(&y) {
                    g.set(x, y, 0);
                }
            }
        }
        g
    }

    #[test]
    fn two_by_two_grid_interiors() {
        let g = ruled_grid(30, 30, &[0, 15, 29], &[0, 15, 29]);
        let cells = extract_cell_boxes(&g, DEFAULT_MIN_CELL_AREA).unwrap();
        assert_eq!(
            cells,
            vec![
                BBox::new(1, 1, 14, 14),
                BBox::new(16, 1, 13, 14),
                BBox::new(1, 16, 14, 13),
                BBox::new(16, 16, 13, 13),
            ]
        );
    }

    #[test]
    fn outside_region_is_discarded() {
        // frame inset by 3 px leaves a ring touching every edge
        let mut g = BinaryImage::new(40, 20, 1, Polarity::ForegroundIsZero);
        for x in 3..37 {
            g.set(x, 3, 0);
            g.set(x, 16, 0);
        }
        for y in 3..17 {
            g.set(3, y, 0);
            g.set(20, y, 0);
            g.set(36, y, 0);
        }
        let cells = extract_cell_boxes(&g, DEFAULT_MIN_CELL_AREA).unwrap();
        assert_eq!(cells, vec![BBox::new(4, 4, 16, 12), BBox::new(21, 4, 15, 12)]);
    }

    #[test]
    fn one_by_three_grid() {
        let g = ruled_grid(46, 16, &[0, 15, 30, 45], &[0, 15]);
        let cells = extract_cell_boxes(&g, DEFAULT_MIN_CELL_AREA).unwrap();
        assert_eq!(cells.len(), 3);
        for pair in cells.windows(2) {
            assert!(pair[0].right() <= pair[1].x);
            assert_eq!((pair[0].y, pair[0].h), (pair[1].y, pair[1].h));
        }
    }

    #[test]
    fn blank_image_has_no_cells() {
        let g = BinaryImage::new(20, 20, 1, Polarity::ForegroundIsZero);
        assert!(matches!(extract_cell_boxes(&g, 16), Err(Error::NoCellsFound)));
    }

    #[test]
    fn small_slivers_are_dropped() {
        let g = ruled_grid(30, 10, &[0, 3, 29], &[0, 9]);
        let cells = extract_cell_boxes(&g, DEFAULT_MIN_CELL_AREA).unwrap();
        // the 2x8 sliver between x=0 and x=3 has area 16 and survives; a
        // higher threshold removes it
        assert_eq!(cells.len(), 2);
        assert_eq!(extract_cell_boxes(&g, 17).unwrap().len(), 1);
    }

    fn arb_img(max: usize) -> impl Strategy<Value = BinaryImage> {
        (1..=max, 1..=max).prop_flat_map(|(w, h)| {
            prop::collection::vec(0u8..2, w * h).prop_map(move |d| img(w, h, d))
        })
    }

    proptest! {
        #[test]
        fn union_find_matches_flood_fill(b in arb_img(12), eight in any::<bool>(), target in 0u8..2) {
            let conn = if eight { Connectivity::Eight } else { Connectivity::Four };
            let l = label(&b, target, conn);
            prop_assert_eq!(pixel_sets(&l), flood_oracle(&b, target, conn));
            prop_assert_eq!(l.components.iter().map(|c| c.area).sum::<usize>(), b.count(target));
            for c in &l.components {
                prop_assert!(c.area >= 1 && c.area <= c.bbox.area());
            }
            // scanline order of first pixels
            let firsts: Vec<usize> = l.components.iter()
                .map(|c| l.labels.iter().position(|&v| v == c.label).unwrap())
                .collect();
            prop_assert!(firsts.windows(2).all(|p| p[0] < p[1]));
        }

        #[test]
        fn labelling_commutes_with_transpose(b in arb_img(10)) {
            let (w, h) = b.dims();
            let mut t = BinaryImage::new(h, w, 0, Polarity::ForegroundIsZero);
            for y in 0..h {
                for x in 0..w {
                    t.set(y, x, b.get(x, y));
                }
            }
            let direct = pixel_sets(&label(&b, 1, Connectivity::Four));
            let transposed: BTreeSet<BTreeSet<(usize, usize)>> = pixel_sets(&label(&t, 1, Connectivity::Four))
                .into_iter()
                .map(|s| s.into_iter().map(|(x, y)| (y, x)).collect())
                .collect();
            prop_assert_eq!(direct, transposed);
        }

        #[test]
        fn cell_boxes_never_overlap(xs in prop::collection::btree_set(1usize..39, 0..6), ys in prop::collection::btree_set(1usize..29, 0..5)) {
            let mut xs: Vec<usize> = xs.into_iter().collect();
            let mut ys: Vec<usize> = ys.into_iter().collect();
            xs.extend([0, 39]);
            ys.extend([0, 29]);
            let g = ruled_grid(40, 30, &xs, &ys);
            if let Ok(cells) = extract_cell_boxes(&g, 4) {
                for (i, a) in cells.iter().enumerate() {
                    for b in &cells[i + 1..] {
                        prop_assert!(!a.overlaps(b));
                    }
                }
            }
        }
    }
}
