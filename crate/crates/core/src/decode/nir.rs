use crate::imaging::{fixed_threshold, normalize_u8, upsample4, BinaryImage, GrayImage};
use crate::nirsim::SpectraCube;
use crate::payload::BitMatrix;

use super::{sample_lattice, DecodeError, GridGeometry, Polarity};

/// Fraction of the normalized range above which an upsampled pixel is foreground.
pub const NIR_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone)]
pub struct NirStages {
    /// Spectral mean scaled to [0, 1].
    pub normalized: GrayImage,
    pub upsampled: GrayImage,
    pub bits_mask: BinaryImage,
    pub matrix: BitMatrix,
}

/// Spectral mean, normalize, 4× upsample, fixed threshold, then sample the
/// anchored lattice. `geom.sample_spacing` is in upsampled pixels.
pub fn decode_nir_stages(cube: &SpectraCube, geom: &GridGeometry) -> Result<NirStages, DecodeError> {
    let mean = cube.mean_image();
    let normalized = normalize_u8(&mean).map(|v| v as f64 / 255.0);
    let upsampled = upsample4(&normalized);
    let fg = fixed_threshold(&upsampled, NIR_THRESHOLD)?;
    let bits_mask = match geom.polarity {
        Polarity::Auto | Polarity::Bright => fg,
        Polarity::Dark => fg.map(|b| !b),
    };
    let matrix = sample_lattice(&bits_mask, geom)?;
    Ok(NirStages {
        normalized,
        upsampled,
        bits_mask,
        matrix,
    })
}

pub fn decode_nir_cube(cube: &SpectraCube, geom: &GridGeometry) -> Result<BitMatrix, DecodeError> {
    decode_nir_stages(cube, geom).map(|s| s.matrix)
}

/// Upsampled pixels per bit for a density of `density_x` mm scanned at `step_mm`.
pub fn nir_spacing(density_x: f64, step_mm: f64) -> f64 {
    4.0 * density_x / step_mm
}
