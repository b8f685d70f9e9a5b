//! Tick and axis-label localization with sweeping lines.
//!
//! A horizontal line is swept downward from the x-axis (a vertical one
//! leftward from the y-axis). The position crossing the most candidate text
//! boxes identifies the tick band; the same sweep over what lies beyond the
//! ticks finds the axis label.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::axes::AxesGeometry;
use crate::ocr::TextBox;
use crate::raster::BBox;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TickError {
    #[error("no candidate boxes to sweep")]
    EmptyCandidates,
    #[error("fewer than two numeric ticks on the value axis")]
    TooFewTicks,
    #[error("tick positions on the {0:?} axis are not strictly monotonic")]
    NonMonotonicPositions(Axis),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepDirection {
    /// Horizontal line moving toward larger rows.
    Down,
    /// Vertical line moving toward smaller columns.
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub text_box: TextBox,
    pub value: Option<f64>,
}

/// Ticks of one axis, sorted by pixel anchor (x-center for X, y-center for Y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickSet {
    pub axis: Axis,
    pub ticks: Vec<Tick>,
}

impl TickSet {
    /// Sorts the boxes along `axis` and parses their values. Two boxes with
    /// the same anchor are rejected.
    pub fn new(axis: Axis, boxes: Vec<TextBox>) -> Result<Self, TickError> {
        let mut ticks: Vec<Tick> = boxes
            .into_iter()
            .map(|b| Tick {
                value: parse_tick_value(&b.text),
                text_box: b,
            })
            .collect();
        ticks.sort_by(|a, b| anchor(axis, &a.text_box).total_cmp(&anchor(axis, &b.text_box)));
        let set = TickSet { axis, ticks };
        if set.positions().windows(2).any(|w| w[0] >= w[1]) {
            return Err(TickError::NonMonotonicPositions(axis));
        }
        Ok(set)
    }

    pub fn empty(axis: Axis) -> Self {
        TickSet {
            axis,
            ticks: Vec::new(),
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        self.ticks.iter().map(|t| anchor(self.axis, &t.text_box)).collect()
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    /// At least two ticks and every one of them parsed as a number.
    pub fn is_numeric(&self) -> bool {
        self.ticks.len() >= 2 && self.ticks.iter().all(|t| t.value.is_some())
    }

    pub fn boxes(&self) -> impl Iterator<Item = &TextBox> {
        self.ticks.iter().map(|t| &t.text_box)
    }
}

fn anchor(axis: Axis, b: &TextBox) -> f64 {
    match axis {
        Axis::X => b.bbox.center_x(),
        Axis::Y => b.bbox.center_y(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisLabel {
    pub axis: Axis,
    pub text: String,
    pub boxes: Vec<TextBox>,
}

impl AxisLabel {
    /// Orders the words for reading (left-to-right for X, top-to-bottom for Y)
    /// and joins them with single spaces.
    pub fn new(axis: Axis, mut boxes: Vec<TextBox>) -> Self {
        match axis {
            Axis::X => boxes.sort_by_key(|b| (b.bbox.x, b.bbox.y)),
            Axis::Y => boxes.sort_by_key(|b| (b.bbox.y, b.bbox.x)),
        }
        let text = boxes.iter().map(|b| b.text.trim()).collect::<Vec<_>>().join(" ");
        AxisLabel { axis, text, boxes }
    }
}

/// Splits boxes into x-tick candidates (center strictly below the x-axis)
/// and y-tick candidates (center strictly left of the y-axis).
pub fn filter_candidates(boxes: &[TextBox], axes: &AxesGeometry) -> (Vec<TextBox>, Vec<TextBox>) {
    let below = boxes
        .iter()
        .filter(|b| b.bbox.center_y() > axes.x_axis_row as f64)
        .cloned()
        .collect();
    let left = boxes
        .iter()
        .filter(|b| b.bbox.center_x() < axes.y_axis_col as f64)
        .cloned()
        .collect();
    (below, left)
}

fn crosses(b: &TextBox, pos: i64, dir: SweepDirection) -> bool {
    let (lo, len) = match dir {
        SweepDirection::Down => (b.bbox.y as i64, b.bbox.h as i64),
        SweepDirection::Left => (b.bbox.x as i64, b.bbox.w as i64),
    };
    pos >= lo && pos < lo + len
}

/// Sweeps a line over integer positions `start..=end` (moving down or left)
/// and returns the boxes crossed where the count peaks. Ties go to the
/// position nearest `start`.
pub fn sweep_detect(
    candidates: &[TextBox],
    start: i64,
    end: i64,
    dir: SweepDirection,
) -> Result<Vec<TextBox>, TickError> {
    if candidates.is_empty() {
        return Err(TickError::EmptyCandidates);
    }
    let positions: Box<dyn Iterator<Item = i64>> = match dir {
        SweepDirection::Down => Box::new(start..=end),
        SweepDirection::Left => Box::new((end..=start).rev()),
    };
    let mut best: Option<(usize, i64)> = None;
    for pos in positions {
        let count = candidates.iter().filter(|b| crosses(b, pos, dir)).count();
        if count > best.map_or(0, |(c, _)| c) {
            best = Some((count, pos));
        }
    }
    Ok(match best {
        Some((_, pos)) => candidates.iter().filter(|b| crosses(b, pos, dir)).cloned().collect(),
        None => Vec::new(),
    })
}

/// Locates the tick boxes of both axes. Fails unless at least one axis
/// carries two or more numeric ticks.
pub fn detect_ticks(
    boxes: &[TextBox],
    axes: &AxesGeometry,
    (_, height): (u32, u32),
) -> Result<(TickSet, TickSet), TickError> {
    let (below, left) = filter_candidates(boxes, axes);
    let x_boxes = match sweep_detect(
        &below,
        axes.x_axis_row as i64 + 1,
        height as i64 - 1,
        SweepDirection::Down,
    ) {
        Ok(found) => found,
        Err(TickError::EmptyCandidates) => Vec::new(),
        Err(e) => return Err(e),
    };
    let y_boxes = match sweep_detect(&left, axes.y_axis_col as i64 - 1, 0, SweepDirection::Left) {
        Ok(found) => found,
        Err(TickError::EmptyCandidates) => Vec::new(),
        Err(e) => return Err(e),
    };
    let x = TickSet::new(Axis::X, x_boxes)?;
    let y = TickSet::new(Axis::Y, y_boxes)?;
    if !x.is_numeric() && !y.is_numeric() {
        return Err(TickError::TooFewTicks);
    }
    Ok((x, y))
}

/// Joins multi-word category ticks such as "New York". Starting from the
/// swept ticks, words on the tick side of the axis within `gap` of a tick
/// word and on the same text line are absorbed as long as one of the two is
/// non-numeric. Words stacked in a column with other words, as in a rotated
/// axis title, are never absorbed. Numeric tick sets are returned unchanged.
pub fn join_tick_words(ticks: TickSet, boxes: &[TextBox], axes: &AxesGeometry, gap: u32) -> Result<TickSet, TickError> {
    if ticks.is_numeric() {
        return Ok(ticks);
    }
    let (below, left) = filter_candidates(boxes, axes);
    let pool = match ticks.axis {
        Axis::X => below,
        Axis::Y => left,
    };
    let numeric = |b: &TextBox| parse_tick_value(&b.text).is_some();
    let joins = |a: &TextBox, b: &TextBox| {
        !(numeric(a) && numeric(b))
            && same_line(&a.bbox, &b.bbox)
            && crate::legend::words_adjacent(&a.bbox, &b.bbox, gap)
    };
    let stacked = |c: &TextBox| {
        pool.iter().any(|o| {
            o != c
                && o.bbox.x < c.bbox.right()
                && c.bbox.x < o.bbox.right()
                && (o.bbox.y as i64 - c.bbox.bottom() as i64).max(c.bbox.y as i64 - o.bbox.bottom() as i64) < gap as i64
        })
    };
    let mut words: Vec<TextBox> = ticks.ticks.into_iter().map(|t| t.text_box).collect();
    let mut grew = true;
    while grew {
        grew = false;
        for c in &pool {
            if !words.contains(c) && !stacked(c) && words.iter().any(|w| joins(w, c)) {
                words.push(c.clone());
                grew = true;
            }
        }
    }
    let mut group: Vec<usize> = (0..words.len()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..words.len() {
            for j in 0..words.len() {
                if group[j] < group[i] && joins(&words[i], &words[j]) {
                    group[i] = group[j];
                    changed = true;
                }
            }
        }
    }
    let mut merged = Vec::new();
    for g in 0..words.len() {
        let mut members: Vec<&TextBox> = (0..words.len()).filter(|&i| group[i] == g).map(|i| &words[i]).collect();
        if members.is_empty() {
            continue;
        }
        members.sort_by_key(|b| (b.bbox.x, b.bbox.y));
        let bbox = members
            .iter()
            .skip(1)
            .fold(members[0].bbox, |acc, b| acc.union(&b.bbox));
        let text = members.iter().map(|b| b.text.trim()).collect::<Vec<_>>().join(" ");
        let confidence = members.iter().map(|b| b.confidence).fold(1.0, f64::min);
        merged.push(TextBox { text, bbox, confidence });
    }
    TickSet::new(ticks.axis, merged)
}

fn same_line(a: &BBox, b: &BBox) -> bool {
    let (short, tall) = (a.h.min(b.h), a.h.max(b.h));
    2 * tall <= 3 * short && (a.center_y() - b.center_y()).abs() <= short as f64 / 4.0
}

/// Sweeps beyond the tick bands for the axis titles. Either may be absent.
pub fn detect_axis_labels(
    boxes: &[TextBox],
    ticks: (&TickSet, &TickSet),
    (_, height): (u32, u32),
) -> (Option<AxisLabel>, Option<AxisLabel>) {
    let (x_ticks, y_ticks) = ticks;

    let x_label = x_ticks.boxes().map(|b| b.bbox.bottom()).max().and_then(|lowest| {
        let below: Vec<TextBox> = boxes.iter().filter(|b| b.bbox.y >= lowest).cloned().collect();
        sweep_detect(&below, lowest as i64, height as i64 - 1, SweepDirection::Down)
            .ok()
            .filter(|found| !found.is_empty())
            .map(|found| AxisLabel::new(Axis::X, found))
    });

    let y_label = y_ticks.boxes().map(|b| b.bbox.x).min().and_then(|leftmost| {
        let beyond: Vec<TextBox> = boxes.iter().filter(|b| b.bbox.right() <= leftmost).cloned().collect();
        sweep_detect(&beyond, leftmost as i64 - 1, 0, SweepDirection::Left)
            .ok()
            .filter(|found| !found.is_empty())
            .map(|found| AxisLabel::new(Axis::Y, found))
    });

    (x_label, y_label)
}

/// Parses a tick string: surrounding whitespace, thousands separators and
/// percent signs are ignored; scientific notation is accepted.
pub fn parse_tick_value(text: &str) -> Option<f64> {
    let cleaned: String = text
        .trim()
        .chars()
        .filter(|c| !matches!(c, ',' | '%' | ' ' | '\u{2009}' | '\u{202f}'))
        .map(|c| if c == '\u{2212}' { '-' } else { c })
        .collect();
    if cleaned.is_empty()
        || !cleaned
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        || !cleaned.chars().any(|c| c.is_ascii_digit())
    {
        return None;
    }
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Fills in `value` for every tick from its text.
pub fn parse_tick_values(mut ticks: TickSet) -> TickSet {
    for t in &mut ticks.ticks {
        t.value = parse_tick_value(&t.text_box.text);
    }
    ticks
}
