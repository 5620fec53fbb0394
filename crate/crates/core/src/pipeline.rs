//! End-to-end batch processing.
//!
//! Each page goes through deskew, region selection, crop, binarisation,
//! color normalisation, the selected recogniser and row/column assembly.
//! Every recognised table becomes one JSON file; a `manifest.json` records
//! per-page status, warnings and timings. A failing page never stops the
//! batch.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detect::{crop, crop_box, load_detections, whole_image_region, Detections};
use crate::preprocess::{deskew, normalize_colors_with, NormalizeConfig};
use crate::raster::{binarize, load_gray, Threshold};
use crate::tsr::{assemble_structure, recognize, TableStructure, TsrConfig, TsrMode};
use crate::{Error, GrayImage, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub tsr_mode: TsrMode,
    #[serde(flatten)]
    pub tsr: TsrConfig,
    pub deskew: bool,
    pub color_normalize: bool,
    pub normalize: NormalizeConfig,
    pub detections_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
    /// Extra pixels read around each detected region.
    pub crop_margin: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tsr_mode: TsrMode::Partial,
            tsr: TsrConfig::default(),
            deskew: true,
            color_normalize: true,
            normalize: NormalizeConfig::default(),
            detections_path: None,
            output_dir: PathBuf::from("out"),
            jobs: 0,
            crop_margin: 0,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            context: "pipeline config".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                context: path.display().to_string(),
                message,
            },
            other => other,
        })
    }
}

/// SHA-256 over every setting that can change a result, plus the
/// detections bytes. Output location and thread count are left out.
pub fn config_hash(cfg: &PipelineConfig, detections: Option<&[u8]>) -> String {
    let mut relevant = cfg.clone();
    relevant.output_dir = PathBuf::new();
    relevant.jobs = 0;
    relevant.detections_path = None;
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&relevant).expect("config serialises"));
    if let Some(bytes) = detections {
        h.update(b"\0detections\0");
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

/// Result of one page before anything is written.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PageResult {
    pub tables: Vec<TableStructure>,
    /// Rotation applied by deskew, degrees counter-clockwise.
    pub applied_angle: Option<f64>,
    pub warnings: Vec<String>,
    pub timings_ms: BTreeMap<String, f64>,
}

struct Clock<'a>(&'a mut BTreeMap<String, f64>);

impl Clock<'_> {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        out
    }
}

/// Runs every stage after loading on one page.
pub fn process_image(page_id: &str, img: &GrayImage, detections: Option<&Detections>, cfg: &PipelineConfig) -> Result<PageResult> {
    cfg.tsr.validate()?;
    let mut res = PageResult::default();
    let mut timings = BTreeMap::new();
    let mut clock = Clock(&mut timings);

    let aligned = if cfg.deskew {
        match clock.time("deskew", || deskew(img)) {
            Ok(d) => {
                res.applied_angle = Some(d.applied_angle);
                d.image
            }
            Err(Error::EmptyDocument) => {
                res.warnings.push("EmptyDocument: nothing to deskew".into());
                img.clone()
            }
            Err(e) => return Err(e),
        }
    } else {
        img.clone()
    };

    let regions = match detections {
        Some(d) => {
            let page = d.page(page_id)?;
            if (page.width, page.height) != aligned.dims() {
                res.warnings.push(format!(
                    "detections describe a {}x{} page, image is {}x{}",
                    page.width,
                    page.height,
                    aligned.width(),
                    aligned.height()
                ));
            }
            page.regions.clone()
        }
        None => whole_image_region(page_id, aligned.dims()).regions,
    };

    for (k, region) in regions.iter().enumerate() {
        let window = match crop_box(aligned.dims(), region.bbox, cfg.crop_margin) {
            Ok(b) => b,
            Err(e) => {
                res.warnings.push(format!("table {k}: {e}"));
                continue;
            }
        };
        let table = crop(&aligned, region.bbox, cfg.crop_margin)?;
        let bin = clock.time("binarize", || binarize(&table, Threshold::Auto));
        let bin = if cfg.color_normalize {
            clock.time("normalize", || normalize_colors_with(&bin, &cfg.normalize))
        } else {
            bin
        };
        let grid = clock.time("tsr", || recognize(&bin, cfg.tsr_mode, &cfg.tsr))?;
        let cells = match grid.cell_boxes(cfg.tsr.min_cell_area) {
            Ok(c) => c,
            Err(Error::NoCellsFound) => {
                res.warnings.push(format!("NoCellsFound: table {k} skipped"));
                continue;
            }
            Err(e) => return Err(e),
        };
        match clock.time("assemble", || assemble_structure(&cells, window)) {
            Ok(s) => res.tables.push(s),
            Err(e @ Error::InconsistentGrid { .. }) => res.warnings.push(format!("table {k}: {e}")),
            Err(e) => return Err(e),
        }
    }
    res.timings_ms = timings;
    Ok(res)
}

pub fn table_file_name(page_id: &str, index: usize) -> String {
    format!("{page_id}_t{index}.json")
}

/// On-disk form of one recognised table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableOutput {
    pub page_id: String,
    pub table_index: usize,
    pub config_hash: String,
    #[serde(flatten)]
    pub structure: TableStructure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PageStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRecord {
    pub page_id: String,
    pub path: PathBuf,
    pub status: PageStatus,
    pub error: Option<String>,
    pub applied_angle: Option<f64>,
    /// Table files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub timings_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub config: PipelineConfig,
    pub pages: Vec<PageRecord>,
    pub warnings: Vec<String>,
    pub n_failed: usize,
}

impl RunManifest {
    pub fn success(&self) -> bool {
        self.n_failed == 0
    }
}

pub fn page_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run_page(path: &Path, id: &str, detections: Option<&Detections>, cfg: &PipelineConfig, hash: &str) -> PageRecord {
    let mut record = PageRecord {
        page_id: id.to_string(),
        path: path.to_path_buf(),
        status: PageStatus::Ok,
        error: None,
        applied_angle: None,
        outputs: Vec::new(),
        warnings: Vec::new(),
        timings_ms: BTreeMap::new(),
    };
    let t0 = Instant::now();
    let outcome = load_gray(path).and_then(|img| {
        record.timings_ms.insert("load".into(), t0.elapsed().as_secs_f64() * 1e3);
        process_image(id, &img, detections, cfg)
    });
    let res = match outcome {
        Ok(r) => r,
        Err(e) => {
            log::warn!("{}: {e}", path.display());
            record.status = PageStatus::Failed;
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.applied_angle = res.applied_angle;
    record.warnings = res.warnings;
    record.timings_ms.extend(res.timings_ms);
    let t1 = Instant::now();
    for (k, structure) in res.tables.into_iter().enumerate() {
        let name = table_file_name(id, k);
        let out = TableOutput {
            page_id: id.to_string(),
            table_index: k,
            config_hash: hash.to_string(),
            structure,
        };
        if let Err(e) = write_json(&cfg.output_dir.join(&name), &out) {
            record.status = PageStatus::Failed;
            record.error = Some(e.to_string());
            break;
        }
        record.outputs.push(name);
    }
    record.timings_ms.insert("write".into(), t1.elapsed().as_secs_f64() * 1e3);
    record
}

/// Processes `pages` on a pool of `cfg.jobs` workers and writes the table
/// files and the manifest to `cfg.output_dir`. Only setup problems (bad
/// config, unreadable detections, unwritable output) are returned as
/// errors; page failures land in the manifest.
pub fn run_pipeline(pages: &[PathBuf], cfg: &PipelineConfig) -> Result<RunManifest> {
    cfg.tsr.validate()?;
    let (detections, det_bytes) = match &cfg.detections_path {
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
            (Some(load_detections(p)?), Some(bytes))
        }
        None => (None, None),
    };
    let hash = config_hash(cfg, det_bytes.as_deref());
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;

    let mut seen = HashSet::new();
    let ids: Vec<(String, bool)> = pages
        .iter()
        .map(|p| {
            let id = page_id(p);
            let fresh = seen.insert(id.clone());
            (id, fresh)
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("worker pool: {e}")))?;
    let records: Vec<PageRecord> = pool.install(|| {
        pages
            .par_iter()
            .zip(&ids)
            .map(|(path, (id, fresh))| {
                if *fresh {
                    run_page(path, id, detections.as_ref(), cfg, &hash)
                } else {
                    PageRecord {
                        page_id: id.clone(),
                        path: path.clone(),
                        status: PageStatus::Failed,
                        error: Some(format!("duplicate page id `{id}`")),
                        applied_angle: None,
                        outputs: Vec::new(),
                        warnings: Vec::new(),
                        timings_ms: BTreeMap::new(),
                    }
                }
            })
            .collect()
    });

    let manifest = RunManifest {
        config_hash: hash,
        config: cfg.clone(),
        n_failed: records.iter().filter(|r| r.status == PageStatus::Failed).count(),
        pages: records,
        warnings: detections.map(|d| d.warnings).unwrap_or_default(),
    };
    write_json(&cfg.output_dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if matches!(ext.as_deref(), Some("pgm" | "png")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
