//! Decoders for thermal recordings and NIR spectra cubes, plus accuracy
//! series and reading-window metrics.

mod grid;
mod nir;
mod series;
mod thermal;

pub use grid::{candidate_contours, sample_lattice, top_left, GridGeometry, Polarity};
pub use nir::{decode_nir_cube, decode_nir_stages, nir_spacing, NirStages, NIR_THRESHOLD};
pub use series::{quantile, reading_window, AccuracyPoint, AccuracySeries, OUTLIER_QUANTILE};
pub use thermal::{
    decode_thermal_frame, decode_thermal_recording, decode_thermal_stages, thermal_spacing, ThermalStages, CROP_INSET,
};

use crate::imaging::ImagingError;
use crate::payload::PayloadError;

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("no object contour in the frame")]
    NoObjectContour,
    #[error("no anchor contour inside the object")]
    NoAnchorContour,
    #[error("recording has no frames")]
    EmptyRecording,
    #[error("bad lattice geometry: {0}")]
    BadGeometry(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Payload(#[from] PayloadError),
}
