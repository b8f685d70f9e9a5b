//! Axis detection from max-run profiles.
//!
//! The y-axis is the first column whose longest ink run lies within `band`
//! pixels of the longest column run anywhere in the image; the x-axis is the
//! last row satisfying the same condition over row runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{BBox, RunProfile};

/// Default tolerance band around the maximal run, in pixels.
pub const DEFAULT_AXIS_BAND: u32 = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AxesError {
    #[error("no axis found: image has no ink runs")]
    NoAxisFound,
    #[error("degenerate axes: y-axis at column {y_axis_col}, x-axis at row {x_axis_row} leave no plot interior")]
    DegenerateAxes { y_axis_col: u32, x_axis_row: u32 },
    #[error("plot region is empty")]
    EmptyPlotRegion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxesGeometry {
    pub y_axis_col: u32,
    pub x_axis_row: u32,
    /// First and last row of the run that selected the y-axis.
    pub y_axis_extent: (u32, u32),
    /// First and last column of the run that selected the x-axis.
    pub x_axis_extent: (u32, u32),
}

fn in_band(run: u32, max: u32, band: u32) -> bool {
    run >= max.saturating_sub(band) && run <= max + band
}

pub fn detect_axes(profile: &RunProfile, band: u32) -> Result<AxesGeometry, AxesError> {
    let max_col = profile.cols.iter().copied().max().unwrap_or(0);
    let max_row = profile.rows.iter().copied().max().unwrap_or(0);
    if max_col == 0 || max_row == 0 {
        return Err(AxesError::NoAxisFound);
    }
    // `max_col > 0` guarantees a match exists for both scans
    let y_axis_col = profile
        .cols
        .iter()
        .position(|&r| in_band(r, max_col, band))
        .ok_or(AxesError::NoAxisFound)? as u32;
    let x_axis_row = profile
        .rows
        .iter()
        .rposition(|&r| in_band(r, max_row, band))
        .ok_or(AxesError::NoAxisFound)? as u32;

    if y_axis_col + 1 >= profile.width() || x_axis_row == 0 {
        return Err(AxesError::DegenerateAxes { y_axis_col, x_axis_row });
    }

    let col_run = profile.cols[y_axis_col as usize];
    let col_start = profile.col_starts[y_axis_col as usize];
    let row_run = profile.rows[x_axis_row as usize];
    let row_start = profile.row_starts[x_axis_row as usize];
    Ok(AxesGeometry {
        y_axis_col,
        x_axis_row,
        y_axis_extent: (col_start, col_start + col_run - 1),
        x_axis_extent: (row_start, row_start + row_run - 1),
    })
}

/// Interior strictly right of the y-axis and strictly above the x-axis.
pub fn plot_region(axes: &AxesGeometry, (width, height): (u32, u32)) -> Result<BBox, AxesError> {
    let x = axes.y_axis_col + 1;
    let w = width.saturating_sub(x);
    let h = axes.x_axis_row.min(height);
    if w == 0 || h == 0 {
        return Err(AxesError::EmptyPlotRegion);
    }
    Ok(BBox::new(x, 0, w, h))
}
