//! Legend detection and swatch color estimation.
//!
//! Everything that is not a tick, an axis title, an error bar glyph or an
//! in-plot number is assumed to be legend text. Words closer than the merge
//! gap are joined into names, names are grouped by alignment and the largest
//! group wins. Each name's color comes from region growing over a strip to
//! its left and right.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ocr::TextBox;
use crate::raster::{BBox, Raster, Rgb};
use crate::ticklabel::{parse_tick_value, AxisLabel, TickSet};

pub const DEFAULT_MERGE_GAP: u32 = 10;
pub const DEFAULT_COLOR_TOLERANCE: u8 = 5;
/// Center / left-edge alignment tolerance for grouping, in pixels.
pub const ALIGN_TOLERANCE: f64 = 5.0;
/// Groups averaging at or above this on every channel are background.
pub const BACKGROUND_LEVEL: f64 = 250.0;
pub const MIN_SWATCH_PIXELS: usize = 9;
const SWATCH_MAX_OFFSET: u32 = 30;

const ERROR_BAR_GLYPHS: [&str; 3] = ["I", "l", "|"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LegendError {
    #[error("no legend text found")]
    NoLegendFound,
    #[error("no color swatch next to '{0}'")]
    NoSwatchFound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LegendOrientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub name: String,
    pub name_box: BBox,
    pub swatch_box: BBox,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendSet {
    pub entries: Vec<LegendEntry>,
    pub orientation: LegendOrientation,
}

impl LegendSet {
    pub fn empty() -> Self {
        LegendSet {
            entries: Vec::new(),
            orientation: LegendOrientation::Vertical,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn is_numeric_text(text: &str) -> bool {
    parse_tick_value(text).is_some()
}

/// Drops tick and axis-label boxes, OCR-read error bars and numeric value
/// annotations lying inside the plot region. A number within `merge_gap`
/// of a non-numeric word is part of a name such as "2019 sales" and stays.
pub fn prune_non_legend(
    boxes: &[TextBox],
    plot: &BBox,
    ticks: (&TickSet, &TickSet),
    labels: (Option<&AxisLabel>, Option<&AxisLabel>),
    merge_gap: u32,
) -> Vec<TextBox> {
    let mut known: Vec<&TextBox> = ticks.0.boxes().chain(ticks.1.boxes()).collect();
    for label in [labels.0, labels.1].into_iter().flatten() {
        known.extend(label.boxes.iter());
    }
    let rest: Vec<&TextBox> = boxes
        .iter()
        .filter(|b| !known.iter().any(|k| k.bbox.contains(&b.bbox)))
        .filter(|b| !ERROR_BAR_GLYPHS.contains(&b.text.trim()))
        .collect();
    let words: Vec<&TextBox> = rest.iter().copied().filter(|b| !is_numeric_text(&b.text)).collect();
    rest.iter()
        .copied()
        .filter(|b| {
            !is_numeric_text(&b.text)
                || !plot.contains(&b.bbox)
                || words.iter().any(|w| words_adjacent(&w.bbox, &b.bbox, merge_gap))
        })
        .cloned()
        .collect()
}

fn horizontal_gap(a: &BBox, b: &BBox) -> i64 {
    (b.x as i64 - a.right() as i64).max(a.x as i64 - b.right() as i64)
}

pub(crate) fn words_adjacent(a: &BBox, b: &BBox, gap: u32) -> bool {
    let dy = (a.center_y() - b.center_y()).abs();
    horizontal_gap(a, b) < gap as i64 && dy <= a.h.min(b.h) as f64 / 2.0
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of `related` over `0..n`, each sorted, in order of
/// their smallest member.
fn components(n: usize, related: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if related(i, j) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let k = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[k].push(i);
    }
    groups
}

/// Joins words into multi-word names. Output is sorted by position, so it
/// does not depend on input order.
pub fn merge_words(boxes: &[TextBox], gap: u32) -> Vec<TextBox> {
    let groups = components(boxes.len(), |i, j| words_adjacent(&boxes[i].bbox, &boxes[j].bbox, gap));
    let mut merged: Vec<TextBox> = groups
        .into_iter()
        .map(|g| {
            let mut words: Vec<&TextBox> = g.iter().map(|&i| &boxes[i]).collect();
            words.sort_by(|a, b| (a.bbox.x, a.bbox.y, &a.text).cmp(&(b.bbox.x, b.bbox.y, &b.text)));
            let bbox = words.iter().skip(1).fold(words[0].bbox, |acc, w| acc.union(&w.bbox));
            let text = words.iter().map(|w| w.text.trim()).collect::<Vec<_>>().join(" ");
            let confidence = words.iter().map(|w| w.confidence).fold(1.0, f64::min);
            TextBox { text, bbox, confidence }
        })
        .collect();
    merged.sort_by(|a, b| (a.bbox.y, a.bbox.x, &a.text).cmp(&(b.bbox.y, b.bbox.x, &b.text)));
    merged
}

fn aligned(a: &BBox, b: &BBox) -> bool {
    (a.center_y() - b.center_y()).abs() <= ALIGN_TOLERANCE || (a.x as f64 - b.x as f64).abs() <= ALIGN_TOLERANCE
}

/// Partitions names into alignment components (rows share a vertical center,
/// columns share a left edge).
pub fn alignment_groups(merged: &[TextBox]) -> Vec<Vec<TextBox>> {
    components(merged.len(), |i, j| aligned(&merged[i].bbox, &merged[j].bbox))
        .into_iter()
        .map(|g| g.into_iter().map(|i| merged[i].clone()).collect())
        .collect()
}

/// Picks the largest alignment group; ties go to the group closest to the
/// plot region's top-right corner. Members come back in reading order.
pub fn group_aligned(merged: &[TextBox], plot: &BBox) -> Result<(Vec<TextBox>, LegendOrientation), LegendError> {
    let corner = (plot.right() as f64, plot.y as f64);
    let dist = |g: &[TextBox]| {
        let n = g.len() as f64;
        let cx = g.iter().map(|b| b.bbox.center_x()).sum::<f64>() / n;
        let cy = g.iter().map(|b| b.bbox.center_y()).sum::<f64>() / n;
        (cx - corner.0).hypot(cy - corner.1)
    };
    let mut best: Option<Vec<TextBox>> = None;
    for g in alignment_groups(merged) {
        let better = match &best {
            None => true,
            Some(b) => g.len() > b.len() || (g.len() == b.len() && dist(&g) < dist(b)),
        };
        if better {
            best = Some(g);
        }
    }
    let mut group = best.ok_or(LegendError::NoLegendFound)?;
    let spread = |f: fn(&BBox) -> f64| {
        let vals: Vec<f64> = group.iter().map(|b| f(&b.bbox)).collect();
        vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min)
    };
    let orientation = if group.len() > 1 && spread(BBox::center_x) > spread(BBox::center_y) {
        LegendOrientation::Horizontal
    } else {
        LegendOrientation::Vertical
    };
    match orientation {
        LegendOrientation::Horizontal => group.sort_by_key(|b| (b.bbox.x, b.bbox.y)),
        LegendOrientation::Vertical => group.sort_by_key(|b| (b.bbox.y, b.bbox.x)),
    }
    Ok((group, orientation))
}

struct Group {
    pixels: Vec<(u32, u32)>,
    sum: [u64; 3],
}

impl Group {
    fn mean(&self) -> [f64; 3] {
        let n = self.pixels.len() as f64;
        self.sum.map(|s| s as f64 / n)
    }

    fn accepts(&self, p: Rgb, tolerance: u8) -> bool {
        let m = self.mean();
        (0..3).all(|c| (p[c] as f64 - m[c]).abs() <= tolerance as f64)
    }

    fn add(&mut self, x: u32, y: u32, p: Rgb) {
        self.pixels.push((x, y));
        for (sum, v) in self.sum.iter_mut().zip(p) {
            *sum += v as u64;
        }
    }

    fn is_background(&self) -> bool {
        self.mean().iter().all(|&c| c >= BACKGROUND_LEVEL)
    }

    fn color(&self) -> Rgb {
        self.mean().map(|c| c.round().clamp(0.0, 255.0) as u8)
    }
}

/// Region growing over the pixels of `strip`. Seeds are taken in raster
/// order; each group repeatedly absorbs any free strip pixel within
/// `tolerance` of its running mean on all channels until it stops growing.
fn grow_groups(img: &Raster, strip: &BBox, tolerance: u8) -> Vec<Group> {
    let idx = |x: u32, y: u32| ((y - strip.y) * strip.w + (x - strip.x)) as usize;
    let mut taken = vec![false; strip.area() as usize];
    let mut groups = Vec::new();
    for sy in strip.y..strip.bottom() {
        for sx in strip.x..strip.right() {
            if taken[idx(sx, sy)] {
                continue;
            }
            taken[idx(sx, sy)] = true;
            let mut g = Group {
                pixels: Vec::new(),
                sum: [0; 3],
            };
            g.add(sx, sy, img.get(sx, sy));
            loop {
                let mut grew = false;
                for y in strip.y..strip.bottom() {
                    for x in strip.x..strip.right() {
                        let p = img.get(x, y);
                        if !taken[idx(x, y)] && g.accepts(p, tolerance) {
                            taken[idx(x, y)] = true;
                            g.add(x, y, p);
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            groups.push(g);
        }
    }
    groups
}

/// Search strips left and right of a name box: same rows, width three times
/// the box height, capped by the maximum swatch offset.
fn swatch_strips(img: &Raster, name_box: &BBox) -> [Option<BBox>; 2] {
    let width = (3 * name_box.h).min(SWATCH_MAX_OFFSET);
    let h = name_box.h.min(img.height().saturating_sub(name_box.y));
    let left = {
        let x0 = name_box.x.saturating_sub(width);
        (name_box.x > x0 && h > 0).then(|| BBox::new(x0, name_box.y, name_box.x - x0, h))
    };
    let right = {
        let x0 = name_box.right();
        let x1 = (x0 + width).min(img.width());
        (x1 > x0 && h > 0).then(|| BBox::new(x0, name_box.y, x1 - x0, h))
    };
    [left, right]
}

/// Extends the grown group to the full swatch: 4-connected pixels within
/// `tolerance` of `color`, confined to the strip widened by its own height
/// above and below and by its own width on either side.
fn swatch_extent(img: &Raster, strip: &BBox, seed: &[(u32, u32)], color: Rgb, tolerance: u8) -> BBox {
    let y0 = strip.y.saturating_sub(strip.h);
    let y1 = (strip.bottom() + strip.h).min(img.height());
    let x0 = strip.x.saturating_sub(strip.w);
    let x1 = (strip.right() + strip.w).min(img.width());
    let window = BBox::new(x0, y0, x1 - x0, y1 - y0);
    let close = |p: Rgb| (0..3).all(|c| (p[c] as i32 - color[c] as i32).abs() <= tolerance as i32);
    let mut seen = vec![false; window.area() as usize];
    let idx = |x: u32, y: u32| ((y - window.y) * window.w + (x - window.x)) as usize;
    let mut stack: Vec<(u32, u32)> = seed.to_vec();
    for &(x, y) in seed {
        seen[idx(x, y)] = true;
    }
    let (mut x_min, mut y_min, mut x_max, mut y_max) = (u32::MAX, u32::MAX, 0, 0);
    while let Some((x, y)) = stack.pop() {
        x_min = x_min.min(x);
        y_min = y_min.min(y);
        x_max = x_max.max(x);
        y_max = y_max.max(y);
        let neighbors = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
        for (nx, ny) in neighbors {
            if window.contains_point(nx, ny) && !seen[idx(nx, ny)] && close(img.get(nx, ny)) {
                seen[idx(nx, ny)] = true;
                stack.push((nx, ny));
            }
        }
    }
    BBox::new(x_min, y_min, x_max - x_min + 1, y_max - y_min + 1)
}

/// Finds the color swatch beside a legend name and its average color.
pub fn estimate_swatch_color(img: &Raster, name_box: &BBox, tolerance: u8) -> Result<(BBox, Rgb), LegendError> {
    let mut best: Option<(BBox, Group)> = None;
    for strip in swatch_strips(img, name_box).into_iter().flatten() {
        for g in grow_groups(img, &strip, tolerance) {
            if g.is_background() {
                continue;
            }
            // left strip first, so equal sizes keep the left candidate
            if best.as_ref().is_none_or(|(_, b)| g.pixels.len() > b.pixels.len()) {
                best = Some((strip, g));
            }
        }
    }
    let Some((strip, group)) = best.filter(|(_, g)| g.pixels.len() >= MIN_SWATCH_PIXELS) else {
        return Err(LegendError::NoSwatchFound(format!("{name_box:?}")));
    };
    let color = group.color();
    let swatch = swatch_extent(img, &strip, &group.pixels, color, tolerance);
    Ok((swatch, color))
}

/// Size of the largest non-background group in `region`. Exposed for the
/// tolerance monotonicity checks.
pub fn largest_group_size(img: &Raster, region: &BBox, tolerance: u8) -> usize {
    grow_groups(img, region, tolerance)
        .into_iter()
        .filter(|g| !g.is_background())
        .map(|g| g.pixels.len())
        .max()
        .unwrap_or(0)
}

/// Appends " (2)", " (3)", ... to repeated names.
fn dedupe_names(entries: &mut [LegendEntry]) {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for e in entries.iter_mut() {
        let n = counts.entry(e.name.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            e.name = format!("{} ({})", e.name, n);
        }
    }
}

/// Full legend stage: merge, group, then color every name. Names without a
/// swatch are dropped; if none survive the chart has no legend.
pub fn detect_legend(
    img: &Raster,
    candidates: &[TextBox],
    plot: &BBox,
    merge_gap: u32,
    tolerance: u8,
) -> Result<LegendSet, LegendError> {
    let merged = merge_words(candidates, merge_gap);
    let (group, orientation) = group_aligned(&merged, plot)?;
    let mut entries: Vec<LegendEntry> = group
        .into_iter()
        .filter_map(|b| {
            estimate_swatch_color(img, &b.bbox, tolerance)
                .ok()
                .map(|(swatch_box, color)| LegendEntry {
                    name: b.text,
                    name_box: b.bbox,
                    swatch_box,
                    color,
                })
        })
        .collect();
    if entries.is_empty() {
        return Err(LegendError::NoLegendFound);
    }
    dedupe_names(&mut entries);
    Ok(LegendSet { entries, orientation })
}
