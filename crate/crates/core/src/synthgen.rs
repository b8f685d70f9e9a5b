//! Synthetic bar charts with exact ground truth and OCR fixtures.
//!
//! Layout constants (all in pixels):
//!
//! * text: every character is a solid `GLYPH_W × LINE_H` block on a
//!   `ADVANCE` pitch, so a word of `n` characters is `6n − 2` wide and
//!   words are separated by 8px; rotated y-label words swap the axes and
//!   stack top to bottom
//! * axes are 1px black lines; tick marks are 4px long
//! * y tick labels end 6px left of the y-axis and are centered on their
//!   tick row; x tick labels start 6px below the x-axis, centered on their
//!   tick column; the x label sits 24px below the x-axis
//! * the top tick leaves at least 24px of axis above it
//! * bars fill 60% of a category slot, split evenly between series when
//!   grouped; a value `v` spans `round(v / α)` pixels
//! * legend swatches are 12×12 with the name 16px to the right; a right
//!   legend stacks entries every 20px, a top legend leaves 24px between a
//!   name and the next swatch

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axes::AxesGeometry;
use crate::bars::{ChartTable, Series, ASSIGN_CAP};
use crate::legend::LegendEntry;
use crate::ocr::{RawTextBox, TextBox};
use crate::output::format_number;
use crate::raster::{BBox, Raster, Rgb, BLACK, WHITE};

pub const MARGIN: u32 = 8;
pub const TICK_LEN: u32 = 4;
pub const TICK_LABEL_GAP: u32 = 6;
pub const AXIS_LABEL_OFFSET: u32 = 24;
pub const HEADROOM: u32 = 24;
pub const SWATCH: u32 = 12;
pub const TEXT_INK: Rgb = [40, 40, 40];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("layout does not fit the canvas: {0}")]
    SpecTooLarge(String),
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Vertical,
    Horizontal,
    StackedVertical,
    StackedHorizontal,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Vertical,
        Variant::Horizontal,
        Variant::StackedVertical,
        Variant::StackedHorizontal,
    ];

    pub fn is_stacked(&self) -> bool {
        matches!(self, Variant::StackedVertical | Variant::StackedHorizontal)
    }

    pub fn is_horizontal(&self) -> bool {
        matches!(self, Variant::Horizontal | Variant::StackedHorizontal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendPlacement {
    Right,
    Top,
    /// Only valid for a single series; the truth table names it "value".
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FontMetrics {
    pub advance: u32,
    pub glyph_width: u32,
    pub line_height: u32,
}

impl Default for FontMetrics {
    fn default() -> Self {
        FontMetrics {
            advance: 6,
            glyph_width: 4,
            line_height: 10,
        }
    }
}

impl FontMetrics {
    pub fn word_len(&self, word: &str) -> u32 {
        let n = word.chars().count() as u32;
        if n == 0 {
            0
        } else {
            self.advance * n - (self.advance - self.glyph_width)
        }
    }

    /// Extent of a space-separated phrase laid out on one line.
    pub fn text_len(&self, text: &str) -> u32 {
        let words: Vec<&str> = text.split_whitespace().collect();
        let mut len = 0;
        for (i, w) in words.iter().enumerate() {
            if i > 0 {
                len += self.advance + (self.advance - self.glyph_width);
            }
            len += self.word_len(w);
        }
        len
    }

    fn word_gap(&self) -> u32 {
        2 * self.advance - self.glyph_width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub name: String,
    pub color: Rgb,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub variant: Variant,
    pub categories: Vec<String>,
    pub series: Vec<SeriesSpec>,
    pub canvas: (u32, u32),
    pub tick_step: f64,
    pub font: FontMetrics,
    pub legend: LegendPlacement,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTick {
    pub text: String,
    pub bbox: BBox,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLabel {
    pub text: String,
    pub boxes: Vec<BBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthBar {
    pub series: String,
    pub category: String,
    pub value: f64,
    pub rect: BBox,
}

/// Annotation of one chart. Hand-annotated real charts use the same schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub image_id: String,
    pub variant: Variant,
    pub width: u32,
    pub height: u32,
    pub axes: AxesGeometry,
    pub alpha: f64,
    pub x_ticks: Vec<TruthTick>,
    pub y_ticks: Vec<TruthTick>,
    pub x_label: Option<TruthLabel>,
    pub y_label: Option<TruthLabel>,
    pub legend: Vec<LegendEntry>,
    pub bars: Vec<TruthBar>,
    pub text_boxes: Vec<TextBox>,
    pub table: ChartTable,
}

impl GroundTruth {
    pub fn fixture_entry(&self) -> Vec<RawTextBox> {
        self.text_boxes.iter().map(RawTextBox::from).collect()
    }

    /// Checks internal consistency; returns the first violation found.
    pub fn validate(&self) -> Result<(), String> {
        let bounds = BBox::new(0, 0, self.width, self.height);
        for t in &self.text_boxes {
            if t.text.trim().is_empty() || !bounds.contains(&t.bbox) || t.bbox.is_empty() {
                return Err(format!("bad text box {t:?}"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(format!("bad alpha {}", self.alpha));
        }
        if self.axes.y_axis_col >= self.width || self.axes.x_axis_row >= self.height {
            return Err("axes out of bounds".into());
        }
        for b in &self.bars {
            if !bounds.contains(&b.rect) {
                return Err(format!("bar outside canvas {b:?}"));
            }
            let extent = match self.variant.is_horizontal() {
                true => b.rect.w,
                false => b.rect.h,
            };
            if extent as f64 != (b.value / self.alpha).round() {
                return Err(format!("bar extent {extent} does not encode {}", b.value));
            }
        }
        for s in &self.table.series {
            if s.values.len() != self.table.categories.len() {
                return Err(format!("series {} has wrong length", s.name));
            }
        }
        Ok(())
    }
}

/// Text in the style of an axis tick: plain decimal, thousands grouped.
pub fn tick_text(v: f64) -> String {
    let s = format_number(v);
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i.to_string(), Some(f.to_string())),
        None => (s.clone(), None),
    };
    let (sign, digits) = match int.strip_prefix('-') {
        Some(d) => ("-", d.to_string()),
        None => ("", int),
    };
    if digits.len() < 4 {
        return s;
    }
    let mut grouped = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(c);
    }
    match frac {
        Some(f) => format!("{sign}{grouped}.{f}"),
        None => format!("{sign}{grouped}"),
    }
}

struct Canvas {
    img: Raster,
    font: FontMetrics,
    text: Vec<TextBox>,
}

impl Canvas {
    fn word_box(&self, word: &str, x: u32, y: u32, rotated: bool) -> BBox {
        let len = self.font.word_len(word);
        if rotated {
            BBox::new(x, y, self.font.line_height, len)
        } else {
            BBox::new(x, y, len, self.font.line_height)
        }
    }

    fn draw_word(&mut self, word: &str, x: u32, y: u32, rotated: bool) -> BBox {
        let f = self.font;
        for i in 0..word.chars().count() as u32 {
            let cell = if rotated {
                BBox::new(x, y + i * f.advance, f.line_height, f.glyph_width)
            } else {
                BBox::new(x + i * f.advance, y, f.glyph_width, f.line_height)
            };
            self.img.fill_rect(cell, TEXT_INK);
        }
        let b = self.word_box(word, x, y, rotated);
        self.text.push(TextBox::new(word, b));
        b
    }

    /// Draws a phrase word by word, returning the word boxes.
    fn draw_text(&mut self, text: &str, x: u32, y: u32, rotated: bool) -> Vec<BBox> {
        let mut boxes = Vec::new();
        let (mut cx, mut cy) = (x, y);
        for w in text.split_whitespace() {
            let b = self.draw_word(w, cx, cy, rotated);
            let step = self.font.word_len(w) + self.font.word_gap();
            if rotated {
                cy += step;
            } else {
                cx += step;
            }
            boxes.push(b);
        }
        boxes
    }
}

fn too_large(what: impl Into<String>) -> SynthError {
    SynthError::SpecTooLarge(what.into())
}

fn check_spec(spec: &ChartSpec) -> Result<(), SynthError> {
    let invalid = |m: &str| Err(SynthError::InvalidSpec(m.to_string()));
    if spec.categories.is_empty() || spec.series.is_empty() {
        return invalid("need at least one category and one series");
    }
    if !(spec.tick_step.is_finite() && spec.tick_step > 0.0) {
        return invalid("tick step must be positive");
    }
    if spec.legend == LegendPlacement::Hidden && spec.series.len() != 1 {
        return invalid("a hidden legend needs exactly one series");
    }
    for s in &spec.series {
        if s.values.len() != spec.categories.len() {
            return invalid("every series needs one value per category");
        }
        if s.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return invalid("values must be finite and non-negative");
        }
        if s.color.iter().all(|&c| c >= 250) {
            return invalid("series color is indistinguishable from background");
        }
    }
    for (i, a) in spec.series.iter().enumerate() {
        for b in &spec.series[i + 1..] {
            if crate::bars::color_distance_sq(a.color, b.color) <= ASSIGN_CAP {
                return invalid("series colors are too close to separate");
            }
        }
    }
    Ok(())
}

/// Renders a crisp chart together with its ground truth.
pub fn render(spec: &ChartSpec, image_id: &str) -> Result<(Raster, GroundTruth), SynthError> {
    check_spec(spec)?;
    let font = spec.font;
    let (width, height) = spec.canvas;
    let lh = font.line_height;
    let horizontal = spec.variant.is_horizontal();
    let stacked = spec.variant.is_stacked();
    let ns = spec.series.len();
    let nc = spec.categories.len();

    let top_value = if stacked {
        (0..nc)
            .map(|c| spec.series.iter().map(|s| s.values[c]).sum::<f64>())
            .fold(0.0, f64::max)
    } else {
        spec.series
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .fold(0.0, f64::max)
    };
    let nsteps = ((top_value / spec.tick_step).ceil() as u32).max(2);
    let tick_values: Vec<f64> = (0..=nsteps).map(|k| k as f64 * spec.tick_step).collect();
    let tick_texts: Vec<String> = tick_values.iter().map(|&v| tick_text(v)).collect();

    let legend_names: Vec<&str> = match spec.legend {
        LegendPlacement::Hidden => Vec::new(),
        _ => spec.series.iter().map(|s| s.name.as_str()).collect(),
    };
    let max_name = legend_names.iter().map(|n| font.text_len(n)).max().unwrap_or(0);

    // labels next to the y-axis: numbers for vertical charts, categories otherwise
    let y_tick_texts: Vec<String> = if horizontal {
        spec.categories.clone()
    } else {
        tick_texts.clone()
    };
    let y_tick_w = y_tick_texts.iter().map(|t| font.text_len(t)).max().unwrap_or(0);
    let y_label_w = if spec.y_label.is_some() { lh + 8 } else { 0 };
    let col = MARGIN + y_label_w + y_tick_w + TICK_LABEL_GAP;

    let plot_top = match spec.legend {
        LegendPlacement::Top => MARGIN + SWATCH + 12,
        _ => MARGIN,
    };
    let below = TICK_LABEL_GAP
        + lh
        + if spec.x_label.is_some() {
            AXIS_LABEL_OFFSET - TICK_LABEL_GAP
        } else {
            0
        };
    let row = height
        .checked_sub(1 + MARGIN + below)
        .ok_or_else(|| too_large("canvas too short"))?;
    let right_end = match spec.legend {
        LegendPlacement::Right => width.checked_sub(MARGIN + max_name + 2 * 16 + 1),
        _ => width.checked_sub(MARGIN + 1),
    }
    .ok_or_else(|| too_large("canvas too narrow"))?;
    if row <= plot_top + HEADROOM || right_end <= col + HEADROOM {
        return Err(too_large("no room for the plot"));
    }

    let mut cv = Canvas {
        img: Raster::filled(width, height, WHITE),
        font,
        text: Vec::new(),
    };

    // axes
    cv.img.fill_rect(BBox::new(col, plot_top, 1, row - plot_top + 1), BLACK);
    cv.img.fill_rect(BBox::new(col, row, right_end - col + 1, 1), BLACK);

    // value axis geometry
    let value_span = if horizontal { right_end - col } else { row - plot_top };
    let px_per_step = (value_span - HEADROOM) / nsteps;
    if px_per_step < 2 * lh.max(8) {
        return Err(too_large("ticks too dense"));
    }
    let alpha = spec.tick_step / px_per_step as f64;

    // category slots along the category axis
    let (slot_lo, slot_span) = if horizontal {
        (plot_top, row - plot_top)
    } else {
        (col + 1, right_end - col)
    };
    let slot = slot_span / nc as u32;
    let slot_start = slot_lo + (slot_span - slot * nc as u32) / 2;
    let centers: Vec<u32> = (0..nc as u32).map(|i| slot_start + slot * i + slot / 2).collect();
    if horizontal && slot < lh + 6 {
        return Err(too_large("category slots too short"));
    }

    let mut x_ticks = Vec::new();
    let mut y_ticks = Vec::new();

    // y ticks: right-aligned, centered on their row
    for (k, text) in y_tick_texts.iter().enumerate() {
        let tick_row = if horizontal {
            centers[k]
        } else {
            row - k as u32 * px_per_step
        };
        let w = font.text_len(text);
        let x = col - TICK_LABEL_GAP - w;
        let y = tick_row
            .checked_sub(lh / 2)
            .ok_or_else(|| too_large("tick label above canvas"))?;
        cv.img
            .fill_rect(BBox::new(col - TICK_LEN, tick_row, TICK_LEN, 1), BLACK);
        let boxes = cv.draw_text(text, x, y, false);
        let bbox = boxes.iter().skip(1).fold(boxes[0], |a, b| a.union(b));
        y_ticks.push(TruthTick {
            text: text.clone(),
            bbox,
            value: if horizontal { None } else { Some(tick_values[k]) },
        });
    }

    // x ticks: centered on their column
    let x_tick_texts: Vec<String> = if horizontal {
        tick_texts.clone()
    } else {
        spec.categories.clone()
    };
    for (k, text) in x_tick_texts.iter().enumerate() {
        let tick_col = if horizontal {
            col + k as u32 * px_per_step
        } else {
            centers[k]
        };
        let w = font.text_len(text);
        if !horizontal && w + 6 > slot {
            return Err(too_large(format!("category '{text}' wider than its slot")));
        }
        let x = tick_col
            .checked_sub(w / 2)
            .filter(|x| x + w < width)
            .ok_or_else(|| too_large("x tick label off canvas"))?;
        cv.img.fill_rect(BBox::new(tick_col, row + 1, 1, TICK_LEN), BLACK);
        let boxes = cv.draw_text(text, x, row + TICK_LABEL_GAP, false);
        let bbox = boxes.iter().skip(1).fold(boxes[0], |a, b| a.union(b));
        x_ticks.push(TruthTick {
            text: text.clone(),
            bbox,
            value: if horizontal { Some(tick_values[k]) } else { None },
        });
    }

    // axis titles
    let x_label = match &spec.x_label {
        Some(text) => {
            if text.split_whitespace().count() > x_ticks.len() {
                return Err(SynthError::InvalidSpec("x label has more words than ticks".into()));
            }
            let w = font.text_len(text);
            let plot_w = right_end - col;
            if w + 2 > plot_w {
                return Err(too_large("x label wider than plot"));
            }
            let x = col + 1 + (plot_w - w) / 2;
            let boxes = cv.draw_text(text, x, row + AXIS_LABEL_OFFSET, false);
            Some(TruthLabel {
                text: text.split_whitespace().collect::<Vec<_>>().join(" "),
                boxes,
            })
        }
        None => None,
    };
    let y_label = match &spec.y_label {
        Some(text) => {
            if text.split_whitespace().count() > y_ticks.len() {
                return Err(SynthError::InvalidSpec("y label has more words than ticks".into()));
            }
            let h = font.text_len(text);
            let plot_h = row - plot_top;
            if h + 2 > plot_h {
                return Err(too_large("y label taller than plot"));
            }
            let y = plot_top + (plot_h - h) / 2;
            let boxes = cv.draw_text(text, MARGIN, y, true);
            Some(TruthLabel {
                text: text.split_whitespace().collect::<Vec<_>>().join(" "),
                boxes,
            })
        }
        None => None,
    };

    // bars
    let thickness = slot * 6 / 10;
    let bar_w = if stacked { thickness } else { thickness / ns as u32 };
    if bar_w < 3 {
        return Err(too_large("bars too thin"));
    }
    let mut bars = Vec::new();
    for (c, &center) in centers.iter().enumerate() {
        let mut stack = 0u32;
        for (j, s) in spec.series.iter().enumerate() {
            let v = s.values[c];
            let len = (v / alpha).round() as u32;
            if len < 3 || len * bar_w < 30 {
                return Err(too_large(format!("value {v} too small to draw")));
            }
            let lo = if stacked {
                center - bar_w / 2
            } else {
                center - bar_w * ns as u32 / 2 + j as u32 * bar_w
            };
            let rect = if horizontal {
                BBox::new(col + 1 + stack, lo, len, bar_w)
            } else {
                let top = row
                    .checked_sub(stack + len)
                    .filter(|t| *t > plot_top)
                    .ok_or_else(|| too_large("bar above the plot"))?;
                BBox::new(lo, top, bar_w, len)
            };
            if horizontal && rect.right() > right_end {
                return Err(too_large("bar past the x-axis end"));
            }
            if stacked {
                stack += len;
            }
            cv.img.fill_rect(rect, s.color);
            bars.push(TruthBar {
                series: series_name(spec, j),
                category: spec.categories[c].clone(),
                value: v,
                rect,
            });
        }
    }

    // legend
    let mut legend = Vec::new();
    match spec.legend {
        LegendPlacement::Hidden => {}
        LegendPlacement::Right => {
            for (i, s) in spec.series.iter().enumerate() {
                let sy = plot_top + 20 * i as u32;
                if sy + SWATCH + 2 >= row {
                    return Err(too_large("legend taller than plot"));
                }
                let swatch = BBox::new(right_end + 16, sy, SWATCH, SWATCH);
                cv.img.fill_rect(swatch, s.color);
                let boxes = cv.draw_text(&s.name, swatch.x + 16, sy + 1, false);
                legend.push(legend_entry(s, &boxes, swatch));
            }
        }
        LegendPlacement::Top => {
            let mut x = col + 10;
            for s in &spec.series {
                let swatch = BBox::new(x, MARGIN, SWATCH, SWATCH);
                let text_end = x + 16 + font.text_len(&s.name);
                if text_end + MARGIN > width {
                    return Err(too_large("legend wider than canvas"));
                }
                cv.img.fill_rect(swatch, s.color);
                let boxes = cv.draw_text(&s.name, x + 16, MARGIN + 1, false);
                legend.push(legend_entry(s, &boxes, swatch));
                x = text_end + 24;
            }
        }
    }

    let zero_tick = TICK_LEN;
    let axes = if horizontal {
        AxesGeometry {
            y_axis_col: col,
            x_axis_row: row,
            y_axis_extent: (plot_top, row + zero_tick),
            x_axis_extent: (col, right_end),
        }
    } else {
        AxesGeometry {
            y_axis_col: col,
            x_axis_row: row,
            y_axis_extent: (plot_top, row),
            x_axis_extent: (col - zero_tick, right_end),
        }
    };

    let table = ChartTable {
        x_label: x_label.as_ref().map(|l| l.text.clone()).unwrap_or_default(),
        y_label: y_label.as_ref().map(|l| l.text.clone()).unwrap_or_default(),
        categories: spec.categories.clone(),
        series: spec
            .series
            .iter()
            .enumerate()
            .map(|(j, s)| Series {
                name: series_name(spec, j),
                color: s.color,
                values: s.values.iter().map(|&v| Some(v)).collect(),
            })
            .collect(),
    };

    let truth = GroundTruth {
        image_id: image_id.to_string(),
        variant: spec.variant,
        width,
        height,
        axes,
        alpha,
        x_ticks,
        y_ticks,
        x_label,
        y_label,
        legend,
        bars,
        text_boxes: cv.text,
        table,
    };
    Ok((cv.img, truth))
}

fn series_name(spec: &ChartSpec, j: usize) -> String {
    match spec.legend {
        LegendPlacement::Hidden => crate::bars::DEFAULT_SERIES.to_string(),
        _ => spec.series[j].name.split_whitespace().collect::<Vec<_>>().join(" "),
    }
}

fn legend_entry(s: &SeriesSpec, boxes: &[BBox], swatch: BBox) -> LegendEntry {
    LegendEntry {
        name: s.name.split_whitespace().collect::<Vec<_>>().join(" "),
        name_box: boxes.iter().skip(1).fold(boxes[0], |a, b| a.union(b)),
        swatch_box: swatch,
        color: s.color,
    }
}

/// Noise applied on top of a crisp render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Perturbation {
    /// Per-channel uniform jitter in `[-jitter, jitter]`, at most 10.
    pub jitter: u8,
    /// Blend background pixels bordering ink halfway toward that ink.
    pub antialias: bool,
    pub seed: u64,
}

pub fn perturb(img: &Raster, p: &Perturbation) -> Raster {
    let mut out = img.clone();
    if p.antialias {
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(x, y) != WHITE {
                    continue;
                }
                let neighbors = [
                    (x as i64, y as i64 - 1),
                    (x as i64, y as i64 + 1),
                    (x as i64 - 1, y as i64),
                    (x as i64 + 1, y as i64),
                ];
                let ink = neighbors
                    .iter()
                    .filter(|(nx, ny)| *nx >= 0 && *ny >= 0 && *nx < img.width() as i64 && *ny < img.height() as i64)
                    .map(|&(nx, ny)| img.get(nx as u32, ny as u32))
                    .find(|&c| c != WHITE);
                if let Some(c) = ink {
                    out.set(x, y, c.map(|v| ((v as u16 + 255) / 2) as u8));
                }
            }
        }
    }
    let k = p.jitter.min(10) as i16;
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        for y in 0..out.height() {
            for x in 0..out.width() {
                let c = out.get(x, y);
                let j = c.map(|v| (v as i16 + rng.gen_range(-k..=k)).clamp(0, 255) as u8);
                out.set(x, y, j);
            }
        }
    }
    out
}

/// Tableau-10 colors. Some pairs are too close for clustering and are never
/// used together.
pub const PALETTE: [Rgb; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];

const CATEGORY_WORDS: &[&str] = &[
    "Alpha", "Beta", "Gamma", "Delta", "North", "South", "East", "West", "Rice", "Corn", "Wheat", "Oats", "Mon", "Tue",
    "Wed", "Thu", "Fri", "Iron", "Gold", "Zinc", "Lead", "Cats", "Dogs", "Cars", "Bus", "Rail", "Ship", "Q1", "Q2",
    "Q3", "Q4", "Oslo", "Rome", "Lima", "Kyiv",
];
const SERIES_ADJ: &[&str] = &[
    "Base", "Full", "Small", "Large", "Fast", "Deep", "Wide", "Old", "New", "Mixed", "Local",
];
const SERIES_NOUN: &[&str] = &[
    "model", "plan", "group", "set", "run", "net", "crop", "team", "fleet", "method",
];
const LABEL_WORDS: &[&str] = &[
    "Score", "Count", "Total", "Rate", "Year", "Region", "Sales", "Yield", "Mean", "Papers", "Share", "Units",
    "Method", "Dataset", "Number", "of", "per", "Site",
];
const STEPS: &[f64] = &[
    1.0, 2.0, 2.5, 5.0, 10.0, 20.0, 25.0, 50.0, 100.0, 200.0, 250.0, 500.0, 1000.0, 2500.0,
];

fn pick_colors(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rgb> {
    loop {
        let mut order: Vec<usize> = (0..PALETTE.len()).collect();
        order.shuffle(rng);
        let mut chosen: Vec<Rgb> = Vec::new();
        for i in order {
            let c = PALETTE[i];
            if chosen
                .iter()
                .all(|&o| crate::bars::color_distance_sq(o, c) > ASSIGN_CAP)
            {
                chosen.push(c);
            }
            if chosen.len() == n {
                return chosen;
            }
        }
    }
}

fn pick_words(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> Vec<String> {
    let mut v: Vec<&str> = pool.to_vec();
    v.shuffle(rng);
    v.into_iter().take(n).map(String::from).collect()
}

fn random_label(rng: &mut ChaCha8Rng, max_words: usize) -> Option<String> {
    if rng.gen_bool(0.1) {
        return None;
    }
    let n = rng.gen_range(1..=max_words.clamp(1, 3));
    Some(pick_words(rng, LABEL_WORDS, n).join(" "))
}

/// Draws one random spec of the given variant. The spec may still fail to
/// render; callers retry with the same generator.
pub fn random_spec(rng: &mut ChaCha8Rng, variant: Variant) -> ChartSpec {
    let ns = if variant.is_stacked() {
        rng.gen_range(2..=5)
    } else {
        rng.gen_range(1..=5)
    };
    let nc = rng.gen_range(2..=8);
    let categories = pick_words(rng, CATEGORY_WORDS, nc);
    let colors = pick_colors(rng, ns);
    let mut names: Vec<String> = Vec::new();
    while names.len() < ns {
        let name = if rng.gen_bool(0.7) {
            format!(
                "{} {}",
                SERIES_ADJ[rng.gen_range(0..SERIES_ADJ.len())],
                SERIES_NOUN[rng.gen_range(0..SERIES_NOUN.len())]
            )
        } else {
            SERIES_ADJ[rng.gen_range(0..SERIES_ADJ.len())].to_string()
        };
        if !names.contains(&name) {
            names.push(name);
        }
    }
    let step = STEPS[rng.gen_range(0..STEPS.len())];
    let nsteps = rng.gen_range(3..=6) as f64;
    let top = step * nsteps;
    let grain = step / 10.0;
    let per_bar_max = if variant.is_stacked() {
        top * 0.95 / ns as f64
    } else {
        top * 0.95
    };
    let per_bar_min = top * 0.12 / if variant.is_stacked() { ns as f64 } else { 1.0 };
    let series = names
        .into_iter()
        .zip(colors)
        .map(|(name, color)| SeriesSpec {
            name,
            color,
            values: (0..nc)
                .map(|_| {
                    let v = rng.gen_range(per_bar_min..=per_bar_max);
                    ((v / grain).round() * grain).max(grain)
                })
                .collect(),
        })
        .collect();
    let legend = match (ns, rng.gen_range(0..3)) {
        (1, 0) => LegendPlacement::Hidden,
        (_, 1) => LegendPlacement::Top,
        _ => LegendPlacement::Right,
    };
    let value_ticks = nsteps as usize + 1;
    let (x_words, y_words) = if variant.is_horizontal() {
        (value_ticks, nc)
    } else {
        (nc, value_ticks)
    };
    let x_label = random_label(rng, x_words);
    let y_label = random_label(rng, y_words);
    let wide = nc as u32 * if variant.is_horizontal() { 20 } else { 70 };
    let canvas = (
        rng.gen_range(360..=480) + if variant.is_horizontal() { 0 } else { wide },
        rng.gen_range(280..=360) + if variant.is_horizontal() { wide } else { 0 },
    );
    ChartSpec {
        variant,
        categories,
        series,
        canvas,
        tick_step: step,
        font: FontMetrics::default(),
        legend,
        x_label,
        y_label,
        rng_seed: rng.gen(),
    }
}

/// One generated chart.
#[derive(Debug, Clone)]
pub struct GeneratedChart {
    pub spec: ChartSpec,
    pub raster: Raster,
    pub truth: GroundTruth,
}

impl GeneratedChart {
    pub fn image_id(&self) -> &str {
        &self.truth.image_id
    }

    pub fn fixture_entry(&self) -> Vec<RawTextBox> {
        self.truth.fixture_entry()
    }
}

pub fn chart_id(index: usize) -> String {
    format!("chart_{index:04}")
}

/// Generates chart `index` of the corpus seeded by `seed`. Variants rotate
/// with the index so every variant gets a quarter of the corpus.
pub fn corpus_chart(seed: u64, index: usize) -> GeneratedChart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let variant = Variant::ALL[index % 4];
    let id = chart_id(index);
    loop {
        let spec = random_spec(&mut rng, variant);
        if let Ok((raster, truth)) = render(&spec, &id) {
            return GeneratedChart { spec, raster, truth };
        }
    }
}

pub fn corpus(count: usize, seed: u64) -> Vec<GeneratedChart> {
    (0..count).map(|i| corpus_chart(seed, i)).collect()
}
