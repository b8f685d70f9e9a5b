//! End-to-end extraction: axes, ticks, labels, legend, bars, table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axes::{detect_axes, plot_region, AxesError, AxesGeometry, DEFAULT_AXIS_BAND};
use crate::bars::{
    assemble_table, associate_categories, bar_value, cluster_pixels, detect_orientation, dominant_color, extract_bars,
    infer_categories, value_tick_ratio, whiten_legend, BarRect, BarsError, ChartTable, Orientation, ValueMap,
    DEFAULT_SERIES,
};
use crate::legend::{
    detect_legend, prune_non_legend, LegendError, LegendSet, DEFAULT_COLOR_TOLERANCE, DEFAULT_MERGE_GAP,
};
use crate::ocr::{recognize, OcrError, OcrProvider, TextBox};
use crate::raster::{binarize, run_profiles, Raster, RasterError, DEFAULT_BINARIZE_THRESHOLD};
use crate::ticklabel::{detect_axis_labels, detect_ticks, join_tick_words, AxisLabel, TickError, TickSet};

pub const DEFAULT_IOU: f64 = 0.5;

/// Every tunable of the pipeline and of scoring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub binarize: u8,
    pub axis_band: u32,
    pub merge_gap: u32,
    pub color_tolerance: u8,
    pub iou: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            binarize: DEFAULT_BINARIZE_THRESHOLD,
            axis_band: DEFAULT_AXIS_BAND,
            merge_gap: DEFAULT_MERGE_GAP,
            color_tolerance: DEFAULT_COLOR_TOLERANCE,
            iou: DEFAULT_IOU,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Axes(#[from] AxesError),
    #[error(transparent)]
    Ticks(#[from] TickError),
    #[error(transparent)]
    Legend(#[from] LegendError),
    #[error(transparent)]
    Bars(#[from] BarsError),
}

impl PipelineError {
    /// Short machine-readable name of the failure, e.g. `NoAxisFound`.
    pub fn code(&self) -> String {
        let debug = match self {
            PipelineError::Raster(e) => format!("{e:?}"),
            PipelineError::Ocr(e) => format!("{e:?}"),
            PipelineError::Axes(e) => format!("{e:?}"),
            PipelineError::Ticks(e) => format!("{e:?}"),
            PipelineError::Legend(e) => format!("{e:?}"),
            PipelineError::Bars(e) => format!("{e:?}"),
        };
        debug.chars().take_while(|c| c.is_ascii_alphanumeric()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub detail: String,
}

impl From<&PipelineError> for Diagnostic {
    fn from(e: &PipelineError) -> Self {
        Diagnostic {
            code: e.code(),
            detail: e.to_string(),
        }
    }
}

/// Everything the pipeline found for one image, kept even when a later
/// stage fails so partial results can still be scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub axes: Option<AxesGeometry>,
    pub x_ticks: Option<TickSet>,
    pub y_ticks: Option<TickSet>,
    pub x_label: Option<AxisLabel>,
    pub y_label: Option<AxisLabel>,
    pub legend: LegendSet,
    pub orientation: Option<Orientation>,
    pub value_map: Option<ValueMap>,
    pub bars: Vec<BarRect>,
    pub table: Option<ChartTable>,
    pub ocr_boxes: Vec<TextBox>,
    pub warnings: Vec<Diagnostic>,
    pub error: Option<Diagnostic>,
}

impl Extraction {
    fn new(image_id: &str, img: &Raster) -> Self {
        Extraction {
            image_id: image_id.to_string(),
            width: img.width(),
            height: img.height(),
            axes: None,
            x_ticks: None,
            y_ticks: None,
            x_label: None,
            y_label: None,
            legend: LegendSet::empty(),
            orientation: None,
            value_map: None,
            bars: Vec::new(),
            table: None,
            ocr_boxes: Vec::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    /// An extraction that failed before any stage ran, e.g. because the
    /// image could not be decoded.
    pub fn failed(image_id: &str, code: &str, detail: &str) -> Self {
        let mut out = Extraction::new(image_id, &Raster::filled(0, 0, crate::raster::WHITE));
        out.error = Some(Diagnostic {
            code: code.into(),
            detail: detail.into(),
        });
        out
    }

    pub fn is_success(&self) -> bool {
        self.error.is_none() && self.table.is_some()
    }
}

/// Runs OCR through `provider`, then [`extract`].
pub fn run(img: &Raster, image_id: &str, provider: &dyn OcrProvider, th: &Thresholds) -> Extraction {
    match recognize(provider, image_id, img) {
        Ok(ocr) => extract(img, image_id, ocr.boxes, th),
        Err(e) => {
            let mut out = Extraction::new(image_id, img);
            out.error = Some(Diagnostic::from(&PipelineError::from(e)));
            out
        }
    }
}

/// Runs every stage on an image whose text boxes are already known.
pub fn extract(img: &Raster, image_id: &str, boxes: Vec<TextBox>, th: &Thresholds) -> Extraction {
    let mut out = Extraction::new(image_id, img);
    out.ocr_boxes = boxes;
    if let Err(e) = stages(img, th, &mut out) {
        out.error = Some(Diagnostic::from(&e));
    }
    out
}

fn stages(img: &Raster, th: &Thresholds, out: &mut Extraction) -> Result<(), PipelineError> {
    let dims = img.dims();
    let profile = run_profiles(&binarize(img, th.binarize));
    let axes = detect_axes(&profile, th.axis_band)?;
    out.axes = Some(axes);
    let plot = plot_region(&axes, dims)?;

    let (x_ticks, y_ticks) = detect_ticks(&out.ocr_boxes, &axes, dims)?;
    let x_ticks = join_tick_words(x_ticks, &out.ocr_boxes, &axes, th.merge_gap)?;
    let y_ticks = join_tick_words(y_ticks, &out.ocr_boxes, &axes, th.merge_gap)?;
    out.x_ticks = Some(x_ticks.clone());
    out.y_ticks = Some(y_ticks.clone());
    let (x_label, y_label) = detect_axis_labels(&out.ocr_boxes, (&x_ticks, &y_ticks), dims);
    out.x_label = x_label.clone();
    out.y_label = y_label.clone();

    let candidates = prune_non_legend(
        &out.ocr_boxes,
        &plot,
        (&x_ticks, &y_ticks),
        (x_label.as_ref(), y_label.as_ref()),
        th.merge_gap,
    );
    match detect_legend(img, &candidates, &plot, th.merge_gap, th.color_tolerance) {
        Ok(legend) => out.legend = legend,
        Err(e) => out.warnings.push(Diagnostic::from(&PipelineError::from(e))),
    }

    let clean = whiten_legend(img, &out.legend);
    let series: Vec<(String, [u8; 3])> = if out.legend.is_empty() {
        match dominant_color(&clean, &plot) {
            Some(c) => vec![(DEFAULT_SERIES.to_string(), c)],
            None => return Err(BarsError::EmptyChart.into()),
        }
    } else {
        out.legend.entries.iter().map(|e| (e.name.clone(), e.color)).collect()
    };
    let seeds: Vec<[u8; 3]> = series.iter().map(|s| s.1).collect();
    let masks = cluster_pixels(&clean, &seeds, &plot);
    let per_series: Vec<Vec<BarRect>> = masks
        .iter()
        .zip(&series)
        .map(|(m, (name, _))| extract_bars(&m.open3(), name, Orientation::Vertical))
        .collect();
    let all: Vec<BarRect> = per_series.iter().flatten().cloned().collect();
    if all.is_empty() {
        return Err(BarsError::EmptyChart.into());
    }
    let orientation = detect_orientation(&all, &x_ticks, &y_ticks)?;
    out.orientation = Some(orientation);

    let (value_ticks, category_ticks, axis_line) = match orientation {
        Orientation::Vertical => (&y_ticks, &x_ticks, axes.x_axis_row as f64),
        Orientation::Horizontal => (&x_ticks, &y_ticks, axes.y_axis_col as f64),
    };
    let vmap = value_tick_ratio(value_ticks, axis_line)?;
    out.value_map = Some(vmap);

    let mut valued: Vec<Vec<(BarRect, f64)>> = Vec::new();
    for bars in per_series {
        let mut row = Vec::new();
        for mut b in bars {
            b.reanchor(orientation);
            let v = bar_value(&b, &vmap, &axes, orientation);
            out.bars.push(b.clone());
            row.push((b, v));
        }
        valued.push(row);
    }

    let (anchors, names): (Vec<f64>, Vec<String>) = if category_ticks.is_empty() {
        out.warnings.push(Diagnostic {
            code: "NoCategoryTicks".into(),
            detail: "categories inferred from bar positions".into(),
        });
        let a = infer_categories(&out.bars, orientation);
        let n = (1..=a.len()).map(|i| i.to_string()).collect();
        (a, n)
    } else {
        (
            category_ticks.positions(),
            category_ticks.boxes().map(|b| b.text.trim().to_string()).collect(),
        )
    };
    let rows = associate_categories(&valued, &anchors);
    let table = assemble_table((x_label.as_ref(), y_label.as_ref()), names, series, rows)?;
    out.table = Some(table);
    Ok(())
}
