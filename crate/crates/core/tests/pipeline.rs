use std::path::{Path, PathBuf};

use tablegrid::eval::iou;
use tablegrid::pipeline::{run_pipeline, PageStatus, PipelineConfig, TableOutput, MANIFEST_FILE};
use tablegrid::raster::save_pgm;
use tablegrid::synth::{generate, BorderStyle, TableSpec};
use tablegrid::{BBox, Error, GrayImage};

/// A ruled 2x3 table pasted into a larger white page at `at`.
fn page_with_table(at: (usize, usize)) -> (GrayImage, BBox, Vec<BBox>) {
    let spec = TableSpec::uniform(2, 3, 60, 30, BorderStyle::Full);
    let (table, truth) = generate(&spec).unwrap();
    let mut page = GrayImage::new(400, 300, 255);
    for y in 0..table.height() {
        for x in 0..table.width() {
            page.set(at.0 + x, at.1 + y, table.get(x, y));
        }
    }
    let region = BBox::new(at.0, at.1, table.width(), table.height());
    (page, region, truth.boxes())
}

fn write(dir: &Path, name: &str, img: &GrayImage) -> PathBuf {
    let p = dir.join(name);
    save_pgm(&p, img).unwrap();
    p
}

fn config(out: PathBuf) -> PipelineConfig {
    PipelineConfig {
        output_dir: out,
        jobs: 2,
        ..Default::default()
    }
}

fn read_table(cfg: &PipelineConfig, name: &str) -> TableOutput {
    serde_json::from_str(&std::fs::read_to_string(cfg.output_dir.join(name)).unwrap()).unwrap()
}

#[test]
fn detected_region_is_cropped_and_recognised() {
    let tmp = tempfile::tempdir().unwrap();
    let (page, region, truth) = page_with_table((70, 90));
    let path = write(tmp.path(), "scan.pgm", &page);
    let det = tmp.path().join("det.json");
    std::fs::write(
        &det,
        format!(
            r#"{{"pages":[{{"page_id":"scan","width":400,"height":300,
                "tables":[{{"x":{},"y":{},"w":{},"h":{},"confidence":0.97}}]}}]}}"#,
            region.x, region.y, region.w, region.h
        ),
    )
    .unwrap();
    let cfg = PipelineConfig {
        detections_path: Some(det),
        ..config(tmp.path().join("out"))
    };
    let m = run_pipeline(&[path], &cfg).unwrap();
    assert!(m.success());
    assert_eq!(m.pages[0].outputs, vec!["scan_t0.json"]);
    let t = read_table(&cfg, "scan_t0.json");
    assert_eq!(t.page_id, "scan");
    assert_eq!(t.config_hash, m.config_hash);
    assert_eq!(t.structure.region, region);
    assert_eq!((t.structure.n_rows, t.structure.n_cols), (2, 3));
    for (c, g) in t.structure.cells.iter().zip(&truth) {
        assert!(iou(&c.bbox, g) >= 0.9, "{c:?} vs {g:?}");
    }
}

#[test]
fn corrupt_page_is_recorded_without_stopping_the_batch() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, _, _) = page_with_table((10, 10));
    let (b, _, _) = page_with_table((100, 50));
    let bad = tmp.path().join("broken.pgm");
    std::fs::write(&bad, b"P5\n10 10\n255\nshort").unwrap();
    let pages = vec![write(tmp.path(), "a.pgm", &a), bad, write(tmp.path(), "b.pgm", &b)];
    let cfg = config(tmp.path().join("out"));
    let m = run_pipeline(&pages, &cfg).unwrap();
    assert!(!m.success());
    assert_eq!(m.n_failed, 1);
    let statuses: Vec<PageStatus> = m.pages.iter().map(|p| p.status).collect();
    assert_eq!(statuses, [PageStatus::Ok, PageStatus::Failed, PageStatus::Ok]);
    assert!(m.pages[1].error.as_deref().unwrap().contains("parse error"));
    let written: usize = m.pages.iter().map(|p| p.outputs.len()).sum();
    assert_eq!(written, 2);
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cfg.output_dir.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(on_disk["n_failed"], 1);
    assert_eq!(on_disk["pages"][1]["status"], "failed");
}

#[test]
fn blank_page_emits_no_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write(tmp.path(), "blank.pgm", &GrayImage::new(120, 80, 255));
    let m = run_pipeline(&[path], &config(tmp.path().join("out"))).unwrap();
    assert!(m.success());
    assert!(m.pages[0].outputs.is_empty());
    assert!(m.pages[0].warnings.iter().any(|w| w.contains("NoCellsFound")));
}

#[test]
fn page_missing_from_detections_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, _, _) = page_with_table((10, 10));
    let path = write(tmp.path(), "other.pgm", &a);
    let det = tmp.path().join("det.json");
    std::fs::write(&det, r#"{"pages":[{"page_id":"scan","width":400,"height":300,"tables":[]}]}"#).unwrap();
    let cfg = PipelineConfig {
        detections_path: Some(det),
        ..config(tmp.path().join("out"))
    };
    let m = run_pipeline(&[path], &cfg).unwrap();
    assert_eq!(m.n_failed, 1);
    assert!(m.pages[0].error.as_deref().unwrap().contains("unknown page"));
}

#[test]
fn malformed_detections_abort_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let det = tmp.path().join("det.json");
    std::fs::write(&det, r#"{"pages":[{"page_id":"p","width":10,"height":10,"tables":[{"x":0}]}]}"#).unwrap();
    let cfg = PipelineConfig {
        detections_path: Some(det),
        ..config(tmp.path().join("out"))
    };
    assert!(matches!(run_pipeline(&[], &cfg), Err(Error::Parse { .. })));
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let pages: Vec<PathBuf> = [(5, 5), (60, 30), (150, 100)]
        .iter()
        .enumerate()
        .map(|(i, &at)| write(tmp.path(), &format!("p{i}.pgm"), &page_with_table(at).0))
        .collect();
    let read = |cfg: &PipelineConfig| {
        run_pipeline(&pages, cfg).unwrap();
        (0..3)
            .map(|i| std::fs::read(cfg.output_dir.join(format!("p{i}_t0.json"))).unwrap())
            .collect::<Vec<_>>()
    };
    let a = read(&config(tmp.path().join("a")));
    let b = read(&PipelineConfig {
        jobs: 1,
        ..config(tmp.path().join("b"))
    });
    assert_eq!(a, b);
}
