//! Table regions from an external detector.
//!
//! Any detector communicates through a small JSON document:
//!
//! ```json
//! {"pages": [{"page_id": "scan-01", "width": 1654, "height": 2339,
//!             "tables": [{"x": 120, "y": 300, "w": 1400, "h": 620, "confidence": 0.98}]}]}
//! ```
//!
//! Coordinates are page pixels of the aligned (deskewed) page.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{BBox, Error, GrayImage, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedRegion {
    #[serde(flatten)]
    pub bbox: BBox,
    pub confidence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRegionSet {
    pub page_id: String,
    pub width: usize,
    pub height: usize,
    pub regions: Vec<DetectedRegion>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Detections {
    pub pages: BTreeMap<String, TableRegionSet>,
    /// Clipping and dropping notices collected while loading.
    pub warnings: Vec<String>,
}

impl Detections {
    pub fn page(&self, page_id: &str) -> Result<&TableRegionSet> {
        self.pages
            .get(page_id)
            .ok_or_else(|| Error::UnknownPage(page_id.to_string()))
    }

    pub fn to_json(&self) -> String {
        let doc = RawDoc {
            pages: self
                .pages
                .values()
                .map(|p| RawPage {
                    page_id: p.page_id.clone(),
                    width: p.width as i64,
                    height: p.height as i64,
                    tables: p
                        .regions
                        .iter()
                        .map(|r| RawTable {
                            x: r.bbox.x as i64,
                            y: r.bbox.y as i64,
                            w: r.bbox.w as i64,
                            h: r.bbox.h as i64,
                            confidence: r.confidence,
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("detections serialise")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    pages: Vec<RawPage>,
}

#[derive(Serialize, Deserialize)]
struct RawPage {
    page_id: String,
    width: i64,
    height: i64,
    #[serde(default)]
    tables: Vec<RawTable>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    x: i64,
    y: i64,
    w: i64,
    h: i64,
    confidence: f64,
}

pub fn load_detections(path: impl AsRef<Path>) -> Result<Detections> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_detections(&text).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

/// Parses detections JSON, clipping regions to their page.
pub fn parse_detections(text: &str) -> Result<Detections> {
    let doc: RawDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let mut out = Detections::default();
    for (pi, page) in doc.pages.into_iter().enumerate() {
        let field = |f: &str| format!("pages[{pi}].{f}");
        if page.width < 1 || page.height < 1 {
            return Err(Error::Parse {
                context: field("width/height"),
                message: format!("page size {}x{} must be positive", page.width, page.height),
            });
        }
        let (pw, ph) = (page.width, page.height);
        let mut regions = Vec::with_capacity(page.tables.len());
        for (ti, t) in page.tables.into_iter().enumerate() {
            if !(0.0..=1.0).contains(&t.confidence) {
                return Err(Error::Parse {
                    context: field(&format!("tables[{ti}].confidence")),
                    message: format!("{} is outside [0, 1]", t.confidence),
                });
            }
            if t.w < 1 || t.h < 1 {
                return Err(Error::Parse {
                    context: field(&format!("tables[{ti}]")),
                    message: format!("region size {}x{} must be positive", t.w, t.h),
                });
            }
            let (x0, y0) = (t.x.max(0), t.y.max(0));
            let (x1, y1) = ((t.x + t.w).min(pw), (t.y + t.h).min(ph));
            if x1 <= x0 || y1 <= y0 {
                out.warnings.push(format!(
                    "page `{}` table {ti}: region lies outside the page, dropped",
                    page.page_id
                ));
                continue;
            }
            if (x0, y0, x1, y1) != (t.x, t.y, t.x + t.w, t.y + t.h) {
                let msg = format!("page `{}` table {ti}: region clipped to page bounds", page.page_id);
                log::warn!("{msg}");
                out.warnings.push(msg);
            }
            regions.push(DetectedRegion {
                bbox: BBox::new(x0 as usize, y0 as usize, (x1 - x0) as usize, (y1 - y0) as usize),
                confidence: t.confidence,
            });
        }
        if out.pages.contains_key(&page.page_id) {
            return Err(Error::Parse {
                context: field("page_id"),
                message: format!("duplicate page `{}`", page.page_id),
            });
        }
        out.pages.insert(
            page.page_id.clone(),
            TableRegionSet {
                page_id: page.page_id,
                width: pw as usize,
                height: ph as usize,
                regions,
            },
        );
    }
    Ok(out)
}

/// Fallback when no detector output exists: the whole page is one table.
pub fn whole_image_region(page_id: &str, dims: (usize, usize)) -> TableRegionSet {
    TableRegionSet {
        page_id: page_id.to_string(),
        width: dims.0,
        height: dims.1,
        regions: vec![DetectedRegion {
            bbox: BBox::new(0, 0, dims.0, dims.1),
            confidence: 1.0,
        }],
    }
}

/// Box actually read by [`crop`]: `region` grown by `margin`, clamped to
/// the page.
pub fn crop_box(dims: (usize, usize), region: BBox, margin: usize) -> Result<BBox> {
    if region.w == 0 || region.h == 0 || region.right() > dims.0 || region.bottom() > dims.1 {
        return Err(Error::InvalidRegion(format!(
            "{region:?} is empty or exceeds the {}x{} page",
            dims.0, dims.1
        )));
    }
    Ok(region.expand_clamped(margin, dims))
}

pub fn crop(img: &GrayImage, region: BBox, margin: usize) -> Result<GrayImage> {
    let b = crop_box(img.dims(), region, margin)?;
    let mut data = Vec::with_capacity(b.area());
    for y in b.y..b.bottom() {
        data.extend_from_slice(&img.data()[y * img.width() + b.x..y * img.width() + b.right()]);
    }
    GrayImage::from_vec(b.w, b.h, data)
}
