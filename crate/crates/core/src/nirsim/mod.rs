//! Near-infrared raster scans of a printed design and the spectra cube file
//! format.

mod cube;
mod optics;
mod scan;

pub use cube::{read_cube, write_cube, SpectraCube, MAGIC};
pub use optics::{ColorOptics, NirModelConfig, OpticsParams};
pub use scan::{simulate_scan, ScanParams};

use crate::geometry::Color;

#[derive(Debug, thiserror::Error)]
pub enum NirError {
    #[error("scan window {window_mm:?} mm does not fit the object footprint {footprint_mm:?} mm")]
    WindowOutOfBounds { window_mm: [f64; 2], footprint_mm: [f64; 2] },
    #[error("not a spectra cube (bad magic)")]
    BadMagic,
    #[error("spectra cube length mismatch: expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid optics for {0:?}")]
    BadOptics(Color),
    #[error("invalid cube: {0}")]
    Invalid(String),
    #[error("I/O error on {0}: {1}")]
    Io(String, #[source] std::io::Error),
}
