//! Pixel containers and the binary run-length primitives used by axis detection.
//!
//! Coordinates follow the usual raster convention: origin at the top-left,
//! `x` grows to the right and `y` grows downward.

use std::io::Cursor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One RGB pixel.
pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

/// Default luminance threshold below which a pixel counts as ink.
pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 128;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("could not decode image: {0}")]
    Decode(String),
    #[error("could not encode image: {0}")]
    Encode(String),
    #[error("invalid raster dimensions {width}x{height} for {len} pixels")]
    Dimensions { width: u32, height: u32, len: usize },
}

/// Axis-aligned box in pixel units. `x`/`y` address the top-left pixel,
/// `w`/`h` are the number of covered columns and rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl From<[u32; 4]> for BBox {
    fn from([x, y, w, h]: [u32; 4]) -> Self {
        BBox { x, y, w, h }
    }
}

impl From<BBox> for [u32; 4] {
    fn from(b: BBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

impl BBox {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        BBox { x, y, w, h }
    }

    /// Exclusive right edge.
    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    /// Exclusive bottom edge.
    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn center_x(&self) -> f64 {
        self.x as f64 + self.w as f64 / 2.0
    }

    pub fn center_y(&self) -> f64 {
        self.y as f64 + self.h as f64 / 2.0
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    pub fn contains_point(&self, x: u32, y: u32) -> bool {
        x >= self.x && x < self.right() && y >= self.y && y < self.bottom()
    }

    pub fn contains(&self, other: &BBox) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x1 > x0 && y1 > y0).then(|| BBox::new(x0, y0, x1 - x0, y1 - y0))
    }

    /// Smallest box covering both.
    pub fn union(&self, other: &BBox) -> BBox {
        let x0 = self.x.min(other.x);
        let y0 = self.y.min(other.y);
        let x1 = self.right().max(other.right());
        let y1 = self.bottom().max(other.bottom());
        BBox::new(x0, y0, x1 - x0, y1 - y0)
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() <= width && self.bottom() <= height
    }
}

/// Decoded RGB image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<Rgb>,
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<Rgb>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(RasterError::Dimensions {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Raster { width, height, pixels })
    }

    /// A raster filled with a single color.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: u32, height: u32, color: Rgb) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        Raster {
            width,
            height,
            pixels: vec![color; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        self.pixels[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, color: Rgb) {
        let i = self.index(x, y);
        self.pixels[i] = color;
    }

    /// Paints `rect` (clipped to the image) with `color`.
    pub fn fill_rect(&mut self, rect: BBox, color: Rgb) {
        let x1 = rect.right().min(self.width);
        let y1 = rect.bottom().min(self.height);
        for y in rect.y.min(y1)..y1 {
            for x in rect.x.min(x1)..x1 {
                self.set(x, y, color);
            }
        }
    }

    pub fn bounds(&self) -> BBox {
        BBox::new(0, 0, self.width, self.height)
    }

    /// Interleaved RGBA bytes, handy for canvas upload.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|&[r, g, b]| [r, g, b, 255]).collect()
    }
}

/// Ink/background bitmap. `true` marks ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32) -> Self {
        BinaryImage {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self, RasterError> {
        if bits.len() != width as usize * height as usize {
            return Err(RasterError::Dimensions {
                width,
                height,
                len: bits.len(),
            });
        }
        Ok(BinaryImage { width, height, bits })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, on: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = on;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Morphological opening with a 3x3 square: erosion then dilation.
    /// Strokes thinner than 3 px vanish; any union of 3x3-or-larger
    /// rectangles survives unchanged.
    pub fn open3(&self) -> BinaryImage {
        self.erode3().dilate3()
    }

    fn neighborhood(&self, x: u32, y: u32, all: bool) -> bool {
        let (w, h) = (self.width as i64, self.height as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                let on = nx >= 0 && ny >= 0 && nx < w && ny < h && self.get(nx as u32, ny as u32);
                if on != all {
                    return !all;
                }
            }
        }
        all
    }

    fn erode3(&self) -> BinaryImage {
        self.map_neighborhood(true)
    }

    fn dilate3(&self) -> BinaryImage {
        self.map_neighborhood(false)
    }

    fn map_neighborhood(&self, all: bool) -> BinaryImage {
        let mut out = BinaryImage::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.neighborhood(x, y, all) {
                    out.set(x, y, true);
                }
            }
        }
        out
    }

    /// Black ink on white.
    pub fn render(&self) -> Raster {
        let pixels = self.bits.iter().map(|&b| if b { BLACK } else { WHITE }).collect();
        Raster {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Longest run of ink along every row and column.
///
/// `row_starts[y]` / `col_starts[x]` record where the first longest run
/// begins, so a detected axis can report its extent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunProfile {
    pub rows: Vec<u32>,
    pub row_starts: Vec<u32>,
    pub cols: Vec<u32>,
    pub col_starts: Vec<u32>,
}

impl RunProfile {
    pub fn width(&self) -> u32 {
        self.cols.len() as u32
    }

    pub fn height(&self) -> u32 {
        self.rows.len() as u32
    }
}

/// Decodes a PNG or JPEG stream. Any alpha channel is composited over white.
pub fn decode_image(bytes: &[u8]) -> Result<Raster, RasterError> {
    let img = image::load_from_memory(bytes).map_err(|e| RasterError::Decode(e.to_string()))?;
    let rgba = img.to_rgba8();
    let (width, height) = rgba.dimensions();
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            [over_white(r, a), over_white(g, a), over_white(b, a)]
        })
        .collect();
    Raster::new(width, height, pixels)
}

fn over_white(c: u8, a: u8) -> u8 {
    let (c, a) = (c as u32, a as u32);
    ((c * a + 255 * (255 - a) + 127) / 255) as u8
}

/// Lossless PNG encoding of an RGB raster.
pub fn encode_png(img: &Raster) -> Result<Vec<u8>, RasterError> {
    let flat: Vec<u8> = img.pixels.iter().flatten().copied().collect();
    let buf = image::RgbImage::from_raw(img.width, img.height, flat)
        .ok_or_else(|| RasterError::Encode("buffer size mismatch".into()))?;
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| RasterError::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

/// `round(0.299 R + 0.587 G + 0.114 B)`, halves rounded up.
pub fn luminance([r, g, b]: Rgb) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn binarize(img: &Raster, threshold: u8) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        bits: img.pixels.iter().map(|&p| luminance(p) < threshold).collect(),
    }
}

/// Longest run of `true` in `iter`, with the index where it starts.
fn longest_run(iter: impl Iterator<Item = bool>) -> (u32, u32) {
    let (mut best, mut best_start) = (0u32, 0u32);
    let (mut cur, mut cur_start) = (0u32, 0u32);
    for (i, on) in iter.enumerate() {
        if on {
            if cur == 0 {
                cur_start = i as u32;
            }
            cur += 1;
            if cur > best {
                best = cur;
                best_start = cur_start;
            }
        } else {
            cur = 0;
        }
    }
    (best, best_start)
}

pub fn run_profiles(bin: &BinaryImage) -> RunProfile {
    let (w, h) = (bin.width as usize, bin.height as usize);
    let (rows, row_starts) = (0..h)
        .map(|y| longest_run(bin.bits[y * w..(y + 1) * w].iter().copied()))
        .unzip();
    let (cols, col_starts) = (0..w).map(|x| longest_run((0..h).map(|y| bin.bits[y * w + x]))).unzip();
    RunProfile {
        rows,
        row_starts,
        cols,
        col_starts,
    }
}
