pub mod axes;
pub mod bars;
pub mod eval;
pub mod legend;
pub mod ocr;
pub mod output;
pub mod pipeline;
pub mod raster;
pub mod synthgen;
pub mod ticklabel;
