//! Table structure recognition.
//!
//! All three recognisers turn a normalised table crop (black content on
//! white) into a [`GridCellImage`]: black separators partitioning white cell
//! interiors. Cells are then read off with
//! [`extract_cell_boxes`](crate::regions::extract_cell_boxes) and grouped into
//! rows and columns by [`assemble_structure`].
//!
//! * [`tsr_bordered`] keeps the ruling lines: it erodes then dilates the
//!   inverted crop with thin strips longer than any glyph, so only lines
//!   survive, and ORs the two line masks.
//! * [`tsr_unbordered`] synthesises separators from whitespace: erosion with
//!   strips spanning the whole crop keeps only empty row and column bands.
//! * [`tsr_partial`] detects whatever lines exist, erases them, and hands the
//!   now-unbordered crop to [`tsr_unbordered`]. It works for all three kinds
//!   of table.

use serde::{Deserialize, Serialize};

use crate::morphology::{dilate, erode, erode_spanning, make_strip_kernel, Kernel, Orientation, StripKernelSpec, StripLength};
use crate::raster::{bitwise_and, bitwise_or, invert};
use crate::regions::{extract_cell_boxes, BBox, DEFAULT_MIN_CELL_AREA};
use crate::{BinaryImage, Error, Polarity, Result};

/// Kernel sizes for the recognisers.
///
/// Line lengths should exceed the tallest glyph yet stay below the smallest
/// cell side; strip sizes set the thinnest whitespace band that still counts
/// as a separator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TsrConfig {
    /// Length of the vertical line-detection strip.
    pub v_line_len: usize,
    /// Length of the horizontal line-detection strip.
    pub h_line_len: usize,
    /// Width of the full-height strip used to find empty columns.
    pub v_strip_width: usize,
    /// Height of the full-width strip used to find empty rows.
    pub h_strip_height: usize,
    pub min_cell_area: usize,
}

impl Default for TsrConfig {
    fn default() -> Self {
        Self {
            v_line_len: 20,
            h_line_len: 20,
            v_strip_width: 8,
            h_strip_height: 3,
            min_cell_area: DEFAULT_MIN_CELL_AREA,
        }
    }
}

impl TsrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.v_line_len < 2 || self.h_line_len < 2 {
            return Err(Error::InvalidSpec("line lengths must be >= 2".into()));
        }
        if self.v_strip_width == 0 || self.h_strip_height == 0 || self.min_cell_area == 0 {
            return Err(Error::InvalidSpec("strip sizes and min_cell_area must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TsrMode {
    Bordered,
    Unbordered,
    #[default]
    Partial,
}

impl std::str::FromStr for TsrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bordered" => Ok(TsrMode::Bordered),
            "unbordered" => Ok(TsrMode::Unbordered),
            "partial" => Ok(TsrMode::Partial),
            other => Err(Error::InvalidSpec(format!("unknown tsr mode `{other}`"))),
        }
    }
}

/// Black separators on white cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCellImage(BinaryImage);

impl GridCellImage {
    pub fn new(image: BinaryImage) -> Result<Self> {
        expect_polarity(&image, Polarity::ForegroundIsZero)?;
        Ok(Self(image))
    }

    pub fn image(&self) -> &BinaryImage {
        &self.0
    }

    pub fn into_inner(self) -> BinaryImage {
        self.0
    }

    pub fn cell_boxes(&self, min_cell_area: usize) -> Result<Vec<BBox>> {
        extract_cell_boxes(&self.0, min_cell_area)
    }
}

/// White line pixels on black, one image per direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineMasks {
    pub vertical: BinaryImage,
    pub horizontal: BinaryImage,
}

fn expect_polarity(img: &BinaryImage, expected: Polarity) -> Result<()> {
    if img.polarity() != expected {
        return Err(Error::PolarityMismatch {
            expected,
            found: img.polarity(),
        });
    }
    Ok(())
}

/// Opens the inverted crop with a `1 x v_line_len` and a `h_line_len x 1`
/// strip. Anything shorter than the strip (glyphs, noise) disappears.
pub fn extract_line_masks(table: &BinaryImage, cfg: &TsrConfig) -> Result<LineMasks> {
    expect_polarity(table, Polarity::ForegroundIsZero)?;
    cfg.validate()?;
    let inverted = invert(table);
    let open = |k: Kernel| dilate(&erode(&inverted, &k), &k);
    let kv = make_strip_kernel(StripKernelSpec::vertical(StripLength::Fixed(cfg.v_line_len), 1), table.dims())?;
    let kh = make_strip_kernel(StripKernelSpec::horizontal(StripLength::Fixed(cfg.h_line_len), 1), table.dims())?;
    Ok(LineMasks {
        vertical: open(kv),
        horizontal: open(kh),
    })
}

pub fn tsr_bordered(table: &BinaryImage, cfg: &TsrConfig) -> Result<GridCellImage> {
    let masks = extract_line_masks(table, cfg)?;
    let lines = bitwise_or(&masks.vertical, &masks.horizontal)?;
    GridCellImage::new(invert(&lines))
}

pub fn tsr_unbordered(table: &BinaryImage, cfg: &TsrConfig) -> Result<GridCellImage> {
    expect_polarity(table, Polarity::ForegroundIsZero)?;
    cfg.validate()?;
    // 1 where a band of h_strip_height rows (v_strip_width columns) is empty
    let empty_rows = erode_spanning(table, Orientation::Horizontal, cfg.h_strip_height)?;
    let empty_cols = erode_spanning(table, Orientation::Vertical, cfg.v_strip_width)?;
    // content rows AND content columns: cell interiors are 1, separators 0
    let cells = bitwise_and(&invert(&empty_rows), &invert(&empty_cols))?;
    // The separators (0) are now the drawn structure, so this is a grid-cell
    // image: relabel rather than flip pixels.
    GridCellImage::new(cells.with_polarity(Polarity::ForegroundIsZero))
}

/// Whitens the table wherever a line mask, grown by one pixel, is set.
pub fn erase_borders(table: &BinaryImage, vertical: &BinaryImage, horizontal: &BinaryImage) -> Result<BinaryImage> {
    expect_polarity(table, Polarity::ForegroundIsZero)?;
    for m in [vertical, horizontal] {
        if m.dims() != table.dims() {
            return Err(Error::DimensionMismatch {
                left: table.dims(),
                right: m.dims(),
            });
        }
    }
    let grow = Kernel::new(3, 3)?;
    let mask = dilate(&bitwise_or(vertical, horizontal)?, &grow);
    let mut out = table.clone();
    for (px, &m) in out.data_mut().iter_mut().zip(mask.data()) {
        if m == 1 {
            *px = 1;
        }
    }
    Ok(out)
}

pub fn tsr_partial(table: &BinaryImage, cfg: &TsrConfig) -> Result<GridCellImage> {
    let masks = extract_line_masks(table, cfg)?;
    let unbordered = erase_borders(table, &masks.vertical, &masks.horizontal)?;
    tsr_unbordered(&unbordered, cfg)
}

pub fn recognize(table: &BinaryImage, mode: TsrMode, cfg: &TsrConfig) -> Result<GridCellImage> {
    match mode {
        TsrMode::Bordered => tsr_bordered(table, cfg),
        TsrMode::Unbordered => tsr_unbordered(table, cfg),
        TsrMode::Partial => tsr_partial(table, cfg),
    }
}

/// One recognised cell, in table-local pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBox {
    #[serde(flatten)]
    pub bbox: BBox,
    pub row: usize,
    pub col: usize,
}

/// Recognised table: `region` is in page pixels, `cells` relative to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableStructure {
    pub region: BBox,
    pub n_rows: usize,
    pub n_cols: usize,
    pub cells: Vec<CellBox>,
}

impl TableStructure {
    pub fn boxes(&self) -> Vec<BBox> {
        self.cells.iter().map(|c| c.bbox).collect()
    }
}

/// Interval overlap strictly greater than half the shorter interval.
fn shares_band(a0: usize, a_len: usize, b0: usize, b_len: usize) -> bool {
    let overlap = (a0 + a_len).min(b0 + b_len) as isize - a0.max(b0) as isize;
    overlap > 0 && 2 * overlap as usize > a_len.min(b_len)
}

/// Groups cells into clusters along one axis; returns the cluster index of
/// every cell, clusters ordered by their leading edge.
fn cluster_axis(cells: &[BBox], axis: &'static str, interval: impl Fn(&BBox) -> (usize, usize)) -> Result<(usize, Vec<usize>)> {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| {
        let (start, len) = interval(&cells[i]);
        (start, len, i)
    });
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let (s, l) = interval(&cells[i]);
        let hits: Vec<usize> = clusters
            .iter()
            .enumerate()
            .filter(|(_, members)| {
                members.iter().any(|&m| {
                    let (ms, ml) = interval(&cells[m]);
                    shares_band(s, l, ms, ml)
                })
            })
            .map(|(c, _)| c)
            .collect();
        match hits.as_slice() {
            [] => clusters.push(vec![i]),
            [c] => clusters[*c].push(i),
            _ => {
                return Err(Error::InconsistentGrid {
                    cell: i,
                    clusters: hits.len(),
                    axis,
                })
            }
        }
    }
    let mut keyed: Vec<(usize, usize, usize)> = clusters
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let start = members.iter().map(|&m| interval(&cells[m]).0).min().unwrap();
            let end = members.iter().map(|&m| {
                let (s, l) = interval(&cells[m]);
                s + l
            }).max().unwrap();
            (start, end, c)
        })
        .collect();
    keyed.sort();
    let mut assignment = vec![0usize; cells.len()];
    for (rank, &(_, _, c)) in keyed.iter().enumerate() {
        for &m in &clusters[c] {
            assignment[m] = rank;
        }
    }
    Ok((clusters.len(), assignment))
}

/// Assigns row and column indices. Two cells share a row iff their
/// y-intervals overlap by more than half of the shorter one; columns use the
/// x-intervals the same way.
pub fn assemble_structure(cells: &[BBox], region: BBox) -> Result<TableStructure> {
    if cells.is_empty() {
        return Err(Error::EmptyCellList);
    }
    let (n_rows, rows) = cluster_axis(cells, "row", |b| (b.y, b.h))?;
    let (n_cols, cols) = cluster_axis(cells, "column", |b| (b.x, b.w))?;
    let mut out: Vec<CellBox> = cells
        .iter()
        .enumerate()
        .map(|(i, &bbox)| CellBox {
            bbox,
            row: rows[i],
            col: cols[i],
        })
        .collect();
    out.sort_by_key(|c| (c.row, c.col, c.bbox.y, c.bbox.x));
    Ok(TableStructure {
        region,
        n_rows,
        n_cols,
        cells: out,
    })
}
