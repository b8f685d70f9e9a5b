//! Text detection providers.
//!
//! The pipeline consumes word-level [`TextBox`]es from an [`OcrProvider`].
//! Two backends ship here: a JSON fixture file (deterministic, used by tests
//! and the synthetic corpus) and, behind the `http` feature, a generic HTTP
//! endpoint that accepts image bytes and answers with the same box list.
//!
//! Fixture schema:
//!
//! ```json
//! {"images": {"chart_0001": [{"text": "10", "bbox": [x, y, w, h], "confidence": 0.99}]}}
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{BBox, Raster};

#[derive(Debug, Error)]
pub enum OcrError {
    #[error("OCR provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("malformed OCR response: {0}")]
    MalformedResponse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBox {
    pub text: String,
    pub bbox: BBox,
    #[serde(default = "full_confidence")]
    pub confidence: f64,
}

fn full_confidence() -> f64 {
    1.0
}

impl TextBox {
    pub fn new(text: impl Into<String>, bbox: BBox) -> Self {
        TextBox {
            text: text.into(),
            bbox,
            confidence: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrResult {
    pub image_id: String,
    pub boxes: Vec<TextBox>,
}

/// A box as reported by a provider, before validation and clipping.
/// Coordinates may be fractional or fall outside the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTextBox {
    pub text: String,
    pub bbox: [f64; 4],
    #[serde(default)]
    pub confidence: Option<f64>,
}

impl From<&TextBox> for RawTextBox {
    fn from(b: &TextBox) -> Self {
        RawTextBox {
            text: b.text.clone(),
            bbox: [b.bbox.x as f64, b.bbox.y as f64, b.bbox.w as f64, b.bbox.h as f64],
            confidence: Some(b.confidence),
        }
    }
}

pub trait OcrProvider: Send + Sync {
    /// Returns the unprocessed boxes for one image.
    fn fetch(&self, image_id: &str, img: &Raster) -> Result<Vec<RawTextBox>, OcrError>;
}

/// Runs `provider` and normalizes its answer: boxes are clipped to the
/// image, missing confidences become 1.0, exact duplicates are dropped.
pub fn recognize(provider: &dyn OcrProvider, image_id: &str, img: &Raster) -> Result<OcrResult, OcrError> {
    let raw = provider.fetch(image_id, img)?;
    let mut seen = HashSet::new();
    let mut boxes = Vec::with_capacity(raw.len());
    for r in raw {
        validate_raw(&r)?;
        let Some(bbox) = clip(r.bbox, img.width(), img.height()) else {
            continue;
        };
        let tb = TextBox {
            text: r.text,
            bbox,
            confidence: r.confidence.unwrap_or(1.0),
        };
        if seen.insert((tb.text.clone(), tb.bbox)) {
            boxes.push(tb);
        }
    }
    Ok(OcrResult {
        image_id: image_id.to_string(),
        boxes,
    })
}

fn validate_raw(r: &RawTextBox) -> Result<(), OcrError> {
    if r.text.trim().is_empty() {
        return Err(OcrError::MalformedResponse("empty text".into()));
    }
    if r.bbox.iter().any(|v| !v.is_finite()) {
        return Err(OcrError::MalformedResponse(format!("non-finite bbox {:?}", r.bbox)));
    }
    if r.bbox[2] <= 0.0 || r.bbox[3] <= 0.0 {
        return Err(OcrError::MalformedResponse(format!(
            "box '{}' has non-positive size {:?}",
            r.text, r.bbox
        )));
    }
    if let Some(c) = r.confidence {
        if !(0.0..=1.0).contains(&c) {
            return Err(OcrError::MalformedResponse(format!("confidence {c} outside [0, 1]")));
        }
    }
    Ok(())
}

/// Snaps a fractional box outward to whole pixels and clips it to the image.
/// Returns `None` when nothing of the box remains.
fn clip([x, y, w, h]: [f64; 4], width: u32, height: u32) -> Option<BBox> {
    let x0 = x.floor().max(0.0);
    let y0 = y.floor().max(0.0);
    let x1 = (x + w).ceil().min(width as f64);
    let y1 = (y + h).ceil().min(height as f64);
    (x1 > x0 && y1 > y0).then(|| BBox::new(x0 as u32, y0 as u32, (x1 - x0) as u32, (y1 - y0) as u32))
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct FixtureFile {
    pub images: BTreeMap<String, Vec<RawTextBox>>,
}

/// Answers from a preloaded fixture file; no I/O after construction.
#[derive(Debug, Clone, Default)]
pub struct FixtureProvider {
    images: BTreeMap<String, Vec<RawTextBox>>,
}

impl FixtureProvider {
    pub fn from_json(json: &str) -> Result<Self, OcrError> {
        let file: FixtureFile = serde_json::from_str(json).map_err(|e| OcrError::MalformedResponse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_file(file: FixtureFile) -> Result<Self, OcrError> {
        for (id, boxes) in &file.images {
            for b in boxes {
                validate_raw(b).map_err(|e| OcrError::MalformedResponse(format!("{id}: {e}")))?;
            }
        }
        Ok(FixtureProvider { images: file.images })
    }

    pub fn insert(&mut self, image_id: impl Into<String>, boxes: Vec<RawTextBox>) {
        self.images.insert(image_id.into(), boxes);
    }

    pub fn image_ids(&self) -> impl Iterator<Item = &str> {
        self.images.keys().map(String::as_str)
    }
}

impl OcrProvider for FixtureProvider {
    fn fetch(&self, image_id: &str, _img: &Raster) -> Result<Vec<RawTextBox>, OcrError> {
        self.images
            .get(image_id)
            .cloned()
            .ok_or_else(|| OcrError::ProviderUnavailable(format!("no fixture entry for '{image_id}'")))
    }
}

/// Reads and validates a fixture file.
pub fn load_fixture(path: impl AsRef<Path>) -> Result<FixtureProvider, OcrError> {
    let path = path.as_ref();
    let json =
        std::fs::read_to_string(path).map_err(|e| OcrError::ProviderUnavailable(format!("{}: {e}", path.display())))?;
    FixtureProvider::from_json(&json)
}

#[cfg(feature = "http")]
pub use http::HttpProvider;

#[cfg(feature = "http")]
mod http {
    use std::time::Duration;

    use super::{OcrError, OcrProvider, RawTextBox};
    use crate::raster::{encode_png, Raster};

    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

    /// POSTs PNG-encoded images to a URL and reads back a JSON box list.
    pub struct HttpProvider {
        url: String,
        agent: ureq::Agent,
    }

    impl HttpProvider {
        pub fn new(url: impl Into<String>) -> Self {
            Self::with_timeout(url, DEFAULT_TIMEOUT)
        }

        pub fn with_timeout(url: impl Into<String>, timeout: Duration) -> Self {
            let agent = ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .http_status_as_error(true)
                .build()
                .into();
            HttpProvider { url: url.into(), agent }
        }
    }

    impl OcrProvider for HttpProvider {
        fn fetch(&self, _image_id: &str, img: &Raster) -> Result<Vec<RawTextBox>, OcrError> {
            let body = encode_png(img).map_err(|e| OcrError::ProviderUnavailable(e.to_string()))?;
            let mut resp = self
                .agent
                .post(&self.url)
                .header("Content-Type", "image/png")
                .send(&body[..])
                .map_err(|e| OcrError::ProviderUnavailable(e.to_string()))?;
            let text = resp
                .body_mut()
                .read_to_string()
                .map_err(|e| OcrError::ProviderUnavailable(e.to_string()))?;
            serde_json::from_str(&text).map_err(|e| OcrError::MalformedResponse(e.to_string()))
        }
    }
}
