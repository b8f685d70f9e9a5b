//! Browser bindings: generate a synthetic chart, look at its binarized
//! form, and run the extraction pipeline on it.

use chartparser::output::{default_caption, to_html};
use chartparser::pipeline::{extract, Thresholds};
use chartparser::raster::{binarize, Raster};
use chartparser::synthgen::{corpus_chart, perturb, GroundTruth, Perturbation};
use serde_json::json;
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct DemoChart {
    raster: Raster,
    truth: GroundTruth,
}

#[wasm_bindgen]
impl DemoChart {
    /// Chart `index` of the corpus seeded with `seed`; the variant cycles
    /// with the index. `jitter` adds per-channel noise (0 keeps it crisp).
    pub fn generate(seed: u32, index: u32, jitter: u8, antialias: bool) -> DemoChart {
        let chart = corpus_chart(seed as u64, index as usize);
        let raster = if jitter > 0 || antialias {
            let p = Perturbation {
                jitter: jitter.min(10),
                antialias,
                seed: ((seed as u64) << 32) | index as u64,
            };
            perturb(&chart.raster, &p)
        } else {
            chart.raster
        };
        DemoChart {
            raster,
            truth: chart.truth,
        }
    }

    pub fn width(&self) -> u32 {
        self.raster.width()
    }

    pub fn height(&self) -> u32 {
        self.raster.height()
    }

    /// Pixels as RGBA bytes, ready for `ImageData`.
    pub fn rgba(&self) -> Vec<u8> {
        self.raster.to_rgba()
    }

    /// Ink mask at `threshold` as black-on-white RGBA.
    pub fn binary_rgba(&self, threshold: u8) -> Vec<u8> {
        binarize(&self.raster, threshold).render().to_rgba()
    }

    pub fn variant(&self) -> String {
        serde_json::to_value(self.truth.variant)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    }

    pub fn truth_json(&self) -> String {
        serde_json::to_string(&self.truth.table).unwrap_or_default()
    }

    /// Runs the pipeline with the chart's own text boxes standing in for OCR.
    /// Returns JSON with the table, its HTML rendering, detected geometry,
    /// warnings and the error if a stage failed.
    pub fn parse(&self, binarize_threshold: u8, axis_band: u32, merge_gap: u32, color_tolerance: u8) -> String {
        let th = Thresholds {
            binarize: binarize_threshold,
            axis_band,
            merge_gap,
            color_tolerance,
            ..Thresholds::default()
        };
        let ex = extract(&self.raster, &self.truth.image_id, self.truth.text_boxes.clone(), &th);
        let html = ex
            .table
            .as_ref()
            .map(|t| to_html(t, &default_caption(t)).as_str().to_string());
        json!({
            "table": ex.table,
            "html": html,
            "axes": ex.axes,
            "legend": ex.legend.entries,
            "bars": ex.bars,
            "warnings": ex.warnings,
            "error": ex.error,
        })
        .to_string()
    }
}
