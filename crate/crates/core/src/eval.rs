//! Scoring extractions against ground truth: IoU box matching and
//! per-component accuracy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pipeline::Extraction;
use crate::raster::BBox;
use crate::synthgen::{GroundTruth, TruthTick};
use crate::ticklabel::TickSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("predictions and ground truth disagree on image ids (missing: {missing:?}, unexpected: {unexpected:?})")]
    CorpusMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("nothing to evaluate")]
    EmptyCorpus,
}

/// Pass/fail criteria for a single chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub axis_px: u32,
    pub color_delta: u8,
    pub relative_error: f64,
    /// Absolute value slack in multiples of the chart's α.
    pub alpha_multiple: f64,
    pub iou: f64,
}

impl Default for Criteria {
    fn default() -> Self {
        Criteria {
            axis_px: 2,
            color_delta: 5,
            relative_error: 0.02,
            alpha_multiple: 2.0,
            iou: crate::pipeline::DEFAULT_IOU,
        }
    }
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection(b).map_or(0, |i| i.area());
    let union = a.area() + b.area() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub matches: usize,
    pub predicted: usize,
    pub truth: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MatchScore {
    pub fn from_counts(matches: usize, predicted: usize, truth: usize) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let precision = ratio(matches, predicted);
        let recall = ratio(matches, truth);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        MatchScore {
            matches,
            predicted,
            truth,
            precision,
            recall,
            f1,
        }
    }
}

/// One-to-one greedy matching by descending IoU (ties by prediction index,
/// then truth index). Returns the matched `(pred, truth)` index pairs.
pub fn greedy_match(pred: &[BBox], truth: &[BBox], threshold: f64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in pred.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            let v = iou(p, t);
            if v > threshold {
                pairs.push((v, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; pred.len()];
    let mut used_t = vec![false; truth.len()];
    let mut out = Vec::new();
    for (_, i, j) in pairs {
        if !used_p[i] && !used_t[j] {
            used_p[i] = true;
            used_t[j] = true;
            out.push((i, j));
        }
    }
    out
}

pub fn match_f1(pred: &[BBox], truth: &[BBox], threshold: f64) -> MatchScore {
    MatchScore::from_counts(greedy_match(pred, truth, threshold).len(), pred.len(), truth.len())
}

/// Pass/fail of every component for one chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartScore {
    pub image_id: String,
    pub x_axis: bool,
    pub y_axis: bool,
    pub x_label: bool,
    pub y_label: bool,
    pub x_ticks: bool,
    pub y_ticks: bool,
    pub legend: bool,
    pub legend_color: bool,
    pub data_association: bool,
}

impl ChartScore {
    fn flags(&self) -> [bool; 9] {
        [
            self.x_axis,
            self.y_axis,
            self.x_label,
            self.y_label,
            self.x_ticks,
            self.y_ticks,
            self.legend,
            self.legend_color,
            self.data_association,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentAccuracy {
    pub x_axis: f64,
    pub y_axis: f64,
    pub x_label: f64,
    pub y_label: f64,
    pub x_ticks: f64,
    pub y_ticks: f64,
    pub legend: f64,
    pub legend_color: f64,
    pub data_association: f64,
}

impl ComponentAccuracy {
    /// Rows in the order of the published accuracy table.
    pub fn rows(&self) -> [(&'static str, f64); 9] {
        [
            ("X-axis", self.x_axis),
            ("Y-axis", self.y_axis),
            ("X-axis label", self.x_label),
            ("Y-axis label", self.y_label),
            ("X-axis ticks", self.x_ticks),
            ("Y-axis ticks", self.y_ticks),
            ("Legend", self.legend),
            ("Legend color", self.legend_color),
            ("Data association", self.data_association),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub corpus_size: usize,
    pub accuracy: ComponentAccuracy,
    pub text_detection: MatchScore,
    pub iou_threshold: f64,
    pub charts: Vec<ChartScore>,
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<18} {:>12}", "Component", "Accuracy (%)");
        for (name, v) in self.accuracy.rows() {
            let _ = writeln!(s, "{:<18} {:>12.1}", name, v * 100.0);
        }
        let t = &self.text_detection;
        let _ = writeln!(
            s,
            "Text detection @ IoU {:.2}: P={:.3} R={:.3} F1={:.3}",
            self.iou_threshold, t.precision, t.recall, t.f1
        );
        let _ = writeln!(s, "Charts: {}", self.corpus_size);
        s
    }
}

fn normalize(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn ticks_correct(pred: Option<&TickSet>, truth: &[TruthTick], threshold: f64) -> bool {
    let pred: Vec<(BBox, Option<f64>)> = pred
        .map(|t| t.ticks.iter().map(|k| (k.text_box.bbox, k.value)).collect())
        .unwrap_or_default();
    if pred.is_empty() && truth.is_empty() {
        return true;
    }
    let pb: Vec<BBox> = pred.iter().map(|p| p.0).collect();
    let tb: Vec<BBox> = truth.iter().map(|t| t.bbox).collect();
    let matched = greedy_match(&pb, &tb, threshold);
    let score = MatchScore::from_counts(matched.len(), pb.len(), tb.len());
    score.f1 == 1.0 && matched.iter().all(|&(i, j)| pred[i].1 == truth[j].value)
}

/// Scores one extraction against its ground truth.
pub fn score_chart(pred: &Extraction, truth: &GroundTruth, c: &Criteria) -> ChartScore {
    let within = |a: u32, b: u32| a.abs_diff(b) <= c.axis_px;
    let (x_axis, y_axis) = match pred.axes {
        Some(a) => (
            within(a.x_axis_row, truth.axes.x_axis_row),
            within(a.y_axis_col, truth.axes.y_axis_col),
        ),
        None => (false, false),
    };
    let label = |p: Option<&crate::ticklabel::AxisLabel>, t: Option<&crate::synthgen::TruthLabel>| {
        normalize(p.map_or("", |l| l.text.as_str())) == normalize(t.map_or("", |l| l.text.as_str()))
    };

    let pred_names: BTreeSet<String> = pred.legend.entries.iter().map(|e| normalize(&e.name)).collect();
    let truth_names: BTreeSet<String> = truth.legend.iter().map(|e| normalize(&e.name)).collect();
    let legend = pred_names == truth_names;
    let legend_color = truth.legend.iter().all(|t| {
        pred.legend
            .entries
            .iter()
            .find(|p| normalize(&p.name) == normalize(&t.name))
            .is_some_and(|p| (0..3).all(|k| p.color[k].abs_diff(t.color[k]) <= c.color_delta))
    }) && pred.legend.entries.len() == truth.legend.len();

    ChartScore {
        image_id: truth.image_id.clone(),
        x_axis,
        y_axis,
        x_label: label(pred.x_label.as_ref(), truth.x_label.as_ref()),
        y_label: label(pred.y_label.as_ref(), truth.y_label.as_ref()),
        x_ticks: ticks_correct(pred.x_ticks.as_ref(), &truth.x_ticks, c.iou),
        y_ticks: ticks_correct(pred.y_ticks.as_ref(), &truth.y_ticks, c.iou),
        legend,
        legend_color,
        data_association: data_correct(pred, truth, c),
    }
}

fn data_correct(pred: &Extraction, truth: &GroundTruth, c: &Criteria) -> bool {
    let Some(table) = &pred.table else {
        return false;
    };
    let categories: BTreeMap<String, usize> = table
        .categories
        .iter()
        .enumerate()
        .map(|(i, n)| (normalize(n), i))
        .collect();
    let abs_slack = truth.alpha * c.alpha_multiple;
    truth.table.series.iter().all(|ts| {
        let Some(ps) = table.series.iter().find(|p| normalize(&p.name) == normalize(&ts.name)) else {
            return false;
        };
        truth.table.categories.iter().zip(&ts.values).all(|(cat, tv)| {
            let pv = categories
                .get(&normalize(cat))
                .and_then(|&i| ps.values.get(i).copied().flatten());
            match (tv, pv) {
                (None, None) => true,
                (Some(t), Some(p)) => (p - t).abs() <= (c.relative_error * t.abs()).max(abs_slack),
                _ => false,
            }
        })
    })
}

/// Aligns predictions with ground truth by image id and averages every
/// component over the corpus. Text detection is micro-averaged over all
/// boxes.
pub fn component_accuracy(
    preds: &[Extraction],
    truths: &[GroundTruth],
    criteria: &Criteria,
) -> Result<EvalReport, EvalError> {
    if truths.is_empty() && preds.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let by_id: BTreeMap<&str, &Extraction> = preds.iter().map(|p| (p.image_id.as_str(), p)).collect();
    let truth_ids: BTreeSet<&str> = truths.iter().map(|t| t.image_id.as_str()).collect();
    let missing: Vec<String> = truth_ids
        .iter()
        .filter(|id| !by_id.contains_key(*id))
        .map(|s| s.to_string())
        .collect();
    let unexpected: Vec<String> = by_id
        .keys()
        .filter(|id| !truth_ids.contains(*id))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() || !unexpected.is_empty() || by_id.len() != preds.len() {
        return Err(EvalError::CorpusMismatch { missing, unexpected });
    }

    let mut sorted: Vec<&GroundTruth> = truths.iter().collect();
    sorted.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let mut charts = Vec::new();
    let (mut m, mut np, mut nt) = (0, 0, 0);
    for t in sorted {
        let p = by_id[t.image_id.as_str()];
        charts.push(score_chart(p, t, criteria));
        let pb: Vec<BBox> = p.ocr_boxes.iter().map(|b| b.bbox).collect();
        let tb: Vec<BBox> = t.text_boxes.iter().map(|b| b.bbox).collect();
        m += greedy_match(&pb, &tb, criteria.iou).len();
        np += pb.len();
        nt += tb.len();
    }
    let n = charts.len();
    let frac = |k: usize| charts.iter().filter(|c| c.flags()[k]).count() as f64 / n as f64;
    let accuracy = ComponentAccuracy {
        x_axis: frac(0),
        y_axis: frac(1),
        x_label: frac(2),
        y_label: frac(3),
        x_ticks: frac(4),
        y_ticks: frac(5),
        legend: frac(6),
        legend_color: frac(7),
        data_association: frac(8),
    };
    Ok(EvalReport {
        corpus_size: n,
        accuracy,
        text_detection: MatchScore::from_counts(m, np, nt),
        iou_threshold: criteria.iou,
        charts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{extract, Thresholds};
    use crate::synthgen::corpus;
    use proptest::prelude::*;

    fn b(x: u32, y: u32, w: u32, h: u32) -> BBox {
        BBox::new(x, y, w, h)
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&b(0, 0, 10, 10), &b(0, 0, 10, 10)), 1.0);
        assert_eq!(iou(&b(0, 0, 10, 10), &b(20, 0, 10, 10)), 0.0);
        assert!((iou(&b(0, 0, 10, 10), &b(5, 0, 10, 10)) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn f1_examples() {
        let truth = [b(0, 0, 10, 10), b(20, 0, 10, 10)];
        let s = match_f1(&truth, &truth, 0.5);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
        let s = match_f1(&[b(0, 0, 10, 10), b(50, 50, 5, 5)], &[b(0, 0, 10, 10)], 0.5);
        assert_eq!((s.precision, s.recall), (0.5, 1.0));
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
        // exactly at the threshold does not count
        let s = match_f1(&[b(0, 0, 10, 10)], &[b(0, 0, 20, 10)], 0.5);
        assert_eq!(s.matches, 0);
    }

    #[test]
    fn greedy_prefers_best_overlap() {
        let truth = [b(0, 0, 10, 10)];
        let pred = [b(1, 0, 10, 10), b(0, 0, 10, 10)];
        assert_eq!(greedy_match(&pred, &truth, 0.5), vec![(1, 0)]);
    }

    fn scored(n: usize) -> (Vec<Extraction>, Vec<GroundTruth>) {
        let charts = corpus(n, 11);
        let preds = charts
            .iter()
            .map(|c| {
                extract(
                    &c.raster,
                    c.image_id(),
                    c.truth.text_boxes.clone(),
                    &Thresholds::default(),
                )
            })
            .collect();
        (preds, charts.into_iter().map(|c| c.truth).collect())
    }

    #[test]
    fn perfect_predictions_score_one() {
        let (preds, truths) = scored(10);
        let r = component_accuracy(&preds, &truths, &Criteria::default()).unwrap();
        for (name, v) in r.accuracy.rows() {
            assert_eq!(v, 1.0, "{name}");
        }
        assert_eq!(r.text_detection.f1, 1.0);
        assert!(r.to_text().starts_with("Component"));
    }

    #[test]
    fn one_wrong_axis_in_ten() {
        let (mut preds, truths) = scored(10);
        let a = preds[3].axes.as_mut().unwrap();
        a.y_axis_col += 3;
        let r = component_accuracy(&preds, &truths, &Criteria::default()).unwrap();
        assert!((r.accuracy.y_axis - 0.9).abs() < 1e-12);
        assert_eq!(r.accuracy.x_axis, 1.0);
    }

    #[test]
    fn color_off_by_six_fails() {
        let (mut preds, truths) = scored(8);
        let i = preds.iter().position(|p| !p.legend.entries.is_empty()).unwrap();
        let before = score_chart(&preds[i], &truths[i], &Criteria::default());
        assert!(before.legend_color);
        let c = &mut preds[i].legend.entries[0].color;
        c[1] = if c[1] >= 6 { c[1] - 6 } else { c[1] + 6 };
        let after = score_chart(&preds[i], &truths[i], &Criteria::default());
        assert!(!after.legend_color);
        assert!(after.legend);
    }

    #[test]
    fn mismatched_ids_are_rejected() {
        let (mut preds, truths) = scored(3);
        preds[0].image_id = "other".into();
        let err = component_accuracy(&preds, &truths, &Criteria::default()).unwrap_err();
        assert!(matches!(err, EvalError::CorpusMismatch { .. }));
        assert_eq!(
            component_accuracy(&[], &[], &Criteria::default()),
            Err(EvalError::EmptyCorpus)
        );
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0u32..50, 0u32..50, 1u32..30, 1u32..30).prop_map(|(x, y, w, h)| BBox::new(x, y, w, h))
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(a in arb_box(), c in arb_box()) {
            let v = iou(&a, &c);
            prop_assert_eq!(v, iou(&c, &a));
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn f1_permutation_invariant(
            pred in prop::collection::vec(arb_box(), 0..8),
            truth in prop::collection::vec(arb_box(), 0..8),
            seed in any::<u64>(),
        ) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let base = match_f1(&pred, &truth, 0.5);
            let (mut p2, mut t2) = (pred.clone(), truth.clone());
            p2.shuffle(&mut rng);
            t2.shuffle(&mut rng);
            prop_assert_eq!(match_f1(&p2, &t2, 0.5).matches, base.matches);
        }

        #[test]
        fn stricter_threshold_never_raises_f1(
            pred in prop::collection::vec(arb_box(), 0..8),
            truth in prop::collection::vec(arb_box(), 0..8),
        ) {
            prop_assert!(match_f1(&pred, &truth, 0.75).f1 <= match_f1(&pred, &truth, 0.5).f1);
        }
    }
}
