//! Bar extraction and pixel-to-value mapping.
//!
//! After the legend is painted out, plot pixels are assigned to the nearest
//! legend color, giving one mask per series (a stacked chart becomes several
//! plain ones). Connected components of a mask are the bars. Heights are
//! converted with the value-tick ratio: data units per pixel, i.e. the mean
//! spacing of tick values over the mean pixel spacing of the ticks.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axes::AxesGeometry;
use crate::legend::{LegendSet, BACKGROUND_LEVEL};
use crate::raster::{BBox, BinaryImage, Raster, Rgb, WHITE};
use crate::ticklabel::{AxisLabel, TickSet};

/// Squared RGB distance beyond which a pixel joins no series.
pub const ASSIGN_CAP: u32 = 3 * 60 * 60;
pub const MIN_BAR_AREA: u64 = 25;
/// Name of the lone series when a chart has no legend.
pub const DEFAULT_SERIES: &str = "value";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BarsError {
    #[error("cannot tell bar orientation: no numeric ticks on either axis")]
    AmbiguousOrientation,
    #[error("tick values are not strictly monotonic")]
    NonMonotonicTicks,
    #[error("ticks span zero pixels")]
    ZeroPixelSpan,
    #[error("need at least two numeric ticks, got {0}")]
    TooFewTicks(usize),
    #[error("no bars found")]
    EmptyChart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarRect {
    pub series: String,
    pub rect: BBox,
    /// Center along the category axis.
    pub category_anchor: f64,
}

impl BarRect {
    pub fn new(series: impl Into<String>, rect: BBox, orientation: Orientation) -> Self {
        let category_anchor = match orientation {
            Orientation::Vertical => rect.center_x(),
            Orientation::Horizontal => rect.center_y(),
        };
        BarRect {
            series: series.into(),
            rect,
            category_anchor,
        }
    }

    pub fn reanchor(&mut self, orientation: Orientation) {
        *self = BarRect::new(std::mem::take(&mut self.series), self.rect, orientation);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueMap {
    /// Value units per pixel.
    pub alpha: f64,
    /// Value at the axis line the bars grow from.
    pub axis_value_at_origin: f64,
    pub tick_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub color: Rgb,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartTable {
    pub x_label: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
}

/// Paints every legend name and swatch box white.
pub fn whiten_legend(img: &Raster, legend: &LegendSet) -> Raster {
    let mut out = img.clone();
    for e in &legend.entries {
        out.fill_rect(e.name_box, WHITE);
        out.fill_rect(e.swatch_box, WHITE);
    }
    out
}

fn is_white(p: Rgb) -> bool {
    p.iter().all(|&c| c as f64 >= BACKGROUND_LEVEL)
}

pub fn color_distance_sq(a: Rgb, b: Rgb) -> u32 {
    (0..3)
        .map(|c| {
            let d = a[c] as i32 - b[c] as i32;
            (d * d) as u32
        })
        .sum()
}

/// Splits plot pixels into one mask per seed color. A pixel goes to the
/// nearest seed (first on ties) if within [`ASSIGN_CAP`]; white pixels and
/// pixels far from every seed stay unassigned.
pub fn cluster_pixels(img: &Raster, seeds: &[Rgb], region: &BBox) -> Vec<BinaryImage> {
    let mut masks: Vec<BinaryImage> = seeds
        .iter()
        .map(|_| BinaryImage::new(img.width(), img.height()))
        .collect();
    let x1 = region.right().min(img.width());
    let y1 = region.bottom().min(img.height());
    for y in region.y..y1 {
        for x in region.x..x1 {
            let p = img.get(x, y);
            if is_white(p) {
                continue;
            }
            let nearest = seeds
                .iter()
                .enumerate()
                .map(|(i, &s)| (color_distance_sq(p, s), i))
                .min();
            if let Some((d, i)) = nearest {
                if d <= ASSIGN_CAP {
                    masks[i].set(x, y, true);
                }
            }
        }
    }
    masks
}

/// Most common color among non-white plot pixels, quantized to 8 levels per
/// channel and averaged within the winning bin. Used as the seed when the
/// chart has no legend.
pub fn dominant_color(img: &Raster, region: &BBox) -> Option<Rgb> {
    let mut bins: HashMap<[u8; 3], (u64, [u64; 3])> = HashMap::new();
    let x1 = region.right().min(img.width());
    let y1 = region.bottom().min(img.height());
    for y in region.y..y1 {
        for x in region.x..x1 {
            let p = img.get(x, y);
            // axis ink and text are near-black; skip them with the background
            if is_white(p) || color_distance_sq(p, [0, 0, 0]) <= ASSIGN_CAP {
                continue;
            }
            let e = bins.entry(p.map(|c| c >> 5)).or_insert((0, [0; 3]));
            e.0 += 1;
            for (sum, v) in e.1.iter_mut().zip(p) {
                *sum += v as u64;
            }
        }
    }
    bins.into_iter()
        .max_by_key(|(k, (n, _))| (*n, std::cmp::Reverse(*k)))
        .map(|(_, (n, sum))| sum.map(|s| ((s as f64) / n as f64).round() as u8))
}

/// 8-connected components of `mask`; each bounding rectangle of area at
/// least [`MIN_BAR_AREA`] becomes a bar. Output is in raster order of each
/// component's first pixel.
pub fn extract_bars(mask: &BinaryImage, series: &str, orientation: Orientation) -> Vec<BarRect> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w as usize * h as usize];
    let mut bars = Vec::new();
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            if seen[i] || !mask.get(x, y) {
                continue;
            }
            seen[i] = true;
            stack.push((x, y));
            let (mut x0, mut y0, mut x1, mut y1) = (x, y, x, y);
            while let Some((cx, cy)) = stack.pop() {
                x0 = x0.min(cx);
                y0 = y0.min(cy);
                x1 = x1.max(cx);
                y1 = y1.max(cy);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as u32, ny as u32);
                        let j = (ny * w + nx) as usize;
                        if !seen[j] && mask.get(nx, ny) {
                            seen[j] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            let rect = BBox::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1);
            if rect.area() >= MIN_BAR_AREA {
                bars.push(BarRect::new(series, rect, orientation));
            }
        }
    }
    bars
}

fn median(mut v: Vec<u32>) -> f64 {
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] as f64 + v[n / 2] as f64) / 2.0
    }
}

/// Vertical when the y ticks carry the numbers and x ticks the categories,
/// horizontal for the mirror case; with numbers on both, taller-than-wide
/// median bars mean vertical.
pub fn detect_orientation(bars: &[BarRect], x_ticks: &TickSet, y_ticks: &TickSet) -> Result<Orientation, BarsError> {
    match (x_ticks.is_numeric(), y_ticks.is_numeric()) {
        (false, true) => Ok(Orientation::Vertical),
        (true, false) => Ok(Orientation::Horizontal),
        (false, false) => Err(BarsError::AmbiguousOrientation),
        (true, true) => {
            if bars.is_empty() {
                return Err(BarsError::EmptyChart);
            }
            let hs = median(bars.iter().map(|b| b.rect.h).collect());
            let ws = median(bars.iter().map(|b| b.rect.w).collect());
            Ok(if hs > ws {
                Orientation::Vertical
            } else {
                Orientation::Horizontal
            })
        }
    }
}

/// Value-tick ratio from a numeric tick set: the mean step between tick
/// values divided by the mean pixel step between tick anchors. The value at
/// `axis_line` is extrapolated from the tick nearest to it.
pub fn value_tick_ratio(ticks: &TickSet, axis_line: f64) -> Result<ValueMap, BarsError> {
    let values: Vec<f64> = ticks.ticks.iter().filter_map(|t| t.value).collect();
    if values.len() < 2 || values.len() != ticks.len() {
        return Err(BarsError::TooFewTicks(values.len()));
    }
    let positions = ticks.positions();
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(BarsError::NonMonotonicTicks);
    }
    let steps = (values.len() - 1) as f64;
    let mean_value_step = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / steps;
    let mean_pixel_step = positions.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / steps;
    if mean_pixel_step == 0.0 {
        return Err(BarsError::ZeroPixelSpan);
    }
    let alpha = mean_value_step / mean_pixel_step;
    let slope = if increasing { alpha } else { -alpha };
    let nearest = positions
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - axis_line).abs().total_cmp(&(b.1 - axis_line).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let axis_value_at_origin = values[nearest] + slope * (axis_line - positions[nearest]);
    Ok(ValueMap {
        alpha,
        axis_value_at_origin,
        tick_count: values.len(),
    })
}

/// Data value of one bar. A bar resting on the axis measures from the
/// axis; a stacked segment floating above it measures its own extent.
pub fn bar_value(bar: &BarRect, vmap: &ValueMap, axes: &AxesGeometry, orientation: Orientation) -> f64 {
    let r = &bar.rect;
    match orientation {
        Orientation::Vertical => {
            if r.bottom() + 1 >= axes.x_axis_row {
                vmap.axis_value_at_origin + vmap.alpha * (axes.x_axis_row as f64 - r.y as f64)
            } else {
                vmap.alpha * r.h as f64
            }
        }
        Orientation::Horizontal => {
            if r.x <= axes.y_axis_col + 2 {
                let last_col = r.right() as f64 - 1.0;
                vmap.axis_value_at_origin + vmap.alpha * (last_col - axes.y_axis_col as f64)
            } else {
                vmap.alpha * r.w as f64
            }
        }
    }
}

fn nearest_index(anchors: &[f64], at: f64) -> Option<usize> {
    anchors
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - at).abs().total_cmp(&(b.1 - at).abs()))
        .map(|(i, _)| i)
}

/// Assigns every valued bar to the category with the nearest anchor.
/// Segments of one series landing in one category are summed.
pub fn associate_categories(series_bars: &[Vec<(BarRect, f64)>], category_anchors: &[f64]) -> Vec<Vec<Option<f64>>> {
    series_bars
        .iter()
        .map(|bars| {
            let mut row = vec![None; category_anchors.len()];
            for (bar, value) in bars {
                if let Some(i) = nearest_index(category_anchors, bar.category_anchor) {
                    row[i] = Some(row[i].unwrap_or(0.0) + value);
                }
            }
            row
        })
        .collect()
}

/// Category anchors from bar positions alone, for charts whose category
/// ticks were not found: neighbouring anchors at most 1.5 median bar
/// thicknesses apart (side-by-side bars of one group) share a category.
pub fn infer_categories(bars: &[BarRect], orientation: Orientation) -> Vec<f64> {
    if bars.is_empty() {
        return Vec::new();
    }
    let thickness = median(
        bars.iter()
            .map(|b| match orientation {
                Orientation::Vertical => b.rect.w,
                Orientation::Horizontal => b.rect.h,
            })
            .collect(),
    );
    let mut anchors: Vec<f64> = bars.iter().map(|b| b.category_anchor).collect();
    anchors.sort_by(f64::total_cmp);
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for a in anchors {
        match groups.last_mut() {
            Some(g) if a - g[g.len() - 1] <= 1.5 * thickness => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    groups
        .into_iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect()
}

/// Builds the final table. `series` pairs each legend name with its color,
/// in legend order; `rows[i]` holds that series' per-category values.
pub fn assemble_table(
    labels: (Option<&AxisLabel>, Option<&AxisLabel>),
    categories: Vec<String>,
    series: Vec<(String, Rgb)>,
    rows: Vec<Vec<Option<f64>>>,
) -> Result<ChartTable, BarsError> {
    if rows.iter().flatten().all(Option::is_none) {
        return Err(BarsError::EmptyChart);
    }
    let series = series
        .into_iter()
        .zip(rows)
        .map(|((name, color), values)| Series { name, color, values })
        .collect();
    Ok(ChartTable {
        x_label: labels.0.map(|l| l.text.clone()).unwrap_or_default(),
        y_label: labels.1.map(|l| l.text.clone()).unwrap_or_default(),
        categories,
        series,
    })
}
