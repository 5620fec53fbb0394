//! Cell-level scoring in the cTDaR style.
//!
//! Predicted and ground-truth cells are matched one-to-one at several IoU
//! thresholds; each threshold yields precision, recall and F1, and the
//! thresholds are folded into one weighted average.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::tsr::TableStructure;
use crate::{BBox, Error, Result};

pub const IOU_THRESHOLDS: [f64; 4] = [0.6, 0.7, 0.8, 0.9];

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection(b).map_or(0, |i| i.area());
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return 0.0;
    }
    inter as f64 / union as f64
}

fn scanline_key(b: &BBox) -> (usize, usize) {
    (b.y, b.x)
}

/// Greedy one-to-one matching at threshold `t`.
///
/// Every pair with IoU >= `t` is a candidate. Candidates are visited by IoU
/// descending, ties by ground-truth then prediction scanline order, and a
/// pair is accepted when neither side is taken. Returns `(pred, gt)` index
/// pairs in acceptance order.
pub fn match_cells(pred: &[BBox], gt: &[BBox], t: f64) -> Vec<(usize, usize)> {
    let mut candidates = Vec::new();
    for (pi, p) in pred.iter().enumerate() {
        for (gi, g) in gt.iter().enumerate() {
            let v = iou(p, g);
            if v >= t && v > 0.0 {
                candidates.push((v, gi, pi));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| (scanline_key(&gt[a.1]), a.1).cmp(&(scanline_key(&gt[b.1]), b.1)))
            .then_with(|| (scanline_key(&pred[a.2]), a.2).cmp(&(scanline_key(&pred[b.2]), b.2)))
    });
    let mut pred_used = vec![false; pred.len()];
    let mut gt_used = vec![false; gt.len()];
    let mut out = Vec::new();
    for (_, gi, pi) in candidates {
        if !pred_used[pi] && !gt_used[gi] {
            pred_used[pi] = true;
            gt_used[gi] = true;
            out.push((pi, gi));
        }
    }
    out
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// `sum(t * F1_t) / sum(t)` over [`IOU_THRESHOLDS`].
pub fn weighted_average(f1s: &[f64; 4]) -> f64 {
    let num: f64 = IOU_THRESHOLDS.iter().zip(f1s).map(|(t, f)| t * f).sum();
    num / IOU_THRESHOLDS.iter().sum::<f64>()
}

/// Raw counts behind a report; merging documents adds them up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub pred: usize,
    pub gt: usize,
    /// Matches at each of [`IOU_THRESHOLDS`].
    pub matched: [usize; 4],
}

impl EvalCounts {
    pub fn from_boxes(pred: &[BBox], gt: &[BBox]) -> Self {
        let mut matched = [0; 4];
        for (m, &t) in matched.iter_mut().zip(&IOU_THRESHOLDS) {
            *m = match_cells(pred, gt, t).len();
        }
        Self {
            pred: pred.len(),
            gt: gt.len(),
            matched,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let mut matched = self.matched;
        for (m, o) in matched.iter_mut().zip(other.matched) {
            *m += o;
        }
        Self {
            pred: self.pred + other.pred,
            gt: self.gt + other.gt,
            matched,
        }
    }

    pub fn report(&self) -> EvalReport {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let per_threshold: Vec<ThresholdScore> = IOU_THRESHOLDS
            .iter()
            .zip(self.matched)
            .map(|(&iou_t, m)| {
                let precision = ratio(m, self.pred);
                let recall = ratio(m, self.gt);
                ThresholdScore {
                    iou_t,
                    precision,
                    recall,
                    f1: f1(precision, recall),
                }
            })
            .collect();
        let f1s = [0, 1, 2, 3].map(|i| per_threshold[i].f1);
        EvalReport {
            per_threshold,
            weighted_average: weighted_average(&f1s),
            counts: *self,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScore {
    pub iou_t: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_threshold: Vec<ThresholdScore>,
    pub weighted_average: f64,
    pub counts: EvalCounts,
}

impl EvalReport {
    pub fn f1_at(&self, t: f64) -> Option<f64> {
        self.per_threshold.iter().find(|s| s.iou_t == t).map(|s| s.f1)
    }

    /// Fixed-width table: one row per named report, F1 per threshold and the
    /// weighted average.
    pub fn table<'a>(rows: impl IntoIterator<Item = (&'a str, &'a EvalReport)>) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<20}", "Team");
        for t in IOU_THRESHOLDS {
            let _ = write!(out, " | IoU {t:.1}");
        }
        let _ = writeln!(out, " | Weighted Average");
        for (name, r) in rows {
            let _ = write!(out, "{name:<20}");
            for s in &r.per_threshold {
                let _ = write!(out, " | {:>7.3}", s.f1);
            }
            let _ = writeln!(out, " | {:>16.3}", r.weighted_average);
        }
        out
    }
}

pub fn f1_report(pred: &[BBox], gt: &[BBox]) -> EvalReport {
    EvalCounts::from_boxes(pred, gt).report()
}

fn is_table_file(name: &str) -> bool {
    name.strip_suffix(".json")
        .and_then(|stem| stem.rsplit_once("_t"))
        .is_some_and(|(_, k)| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
}

fn table_files(dir: &Path) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let name = entry.map_err(|e| Error::io(dir, e))?.file_name().to_string_lossy().into_owned();
        if is_table_file(&name) {
            out.insert(name);
        }
    }
    Ok(out)
}

pub fn load_structure(path: &Path) -> Result<TableStructure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        context: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Scores every `<page>_t<k>.json` table in `gt_dir` against the file of
/// the same name in `pred_dir`. A missing prediction counts as no cells;
/// a prediction without ground truth counts its cells as false positives.
/// Counts are pooled over all tables before scoring.
pub fn evaluate_dirs(pred_dir: &Path, gt_dir: &Path) -> Result<(EvalReport, Vec<String>)> {
    let preds = table_files(pred_dir)?;
    let gts = table_files(gt_dir)?;
    let mut counts = EvalCounts::default();
    let mut notes = Vec::new();
    for name in gts.union(&preds) {
        let gt = if gts.contains(name) {
            load_structure(&gt_dir.join(name))?.boxes()
        } else {
            notes.push(format!("{name}: no ground truth"));
            Vec::new()
        };
        let pred = if preds.contains(name) {
            load_structure(&pred_dir.join(name))?.boxes()
        } else {
            notes.push(format!("{name}: no prediction"));
            Vec::new()
        };
        counts = counts.merge(EvalCounts::from_boxes(&pred, &gt));
    }
    Ok((counts.report(), notes))
}
