//! Spectra cube and its binary file format:
//!
//! `"NIRC"`, u32 width, u32 height, u32 bands, f32 step_mm, bands × f32
//! wavelengths, then width·height·bands × f32 reflectance in (row, col, band)
//! order; all little-endian.

use std::fs;
use std::path::Path;

use crate::imaging::GrayImage;

use super::NirError;

pub const MAGIC: &[u8; 4] = b"NIRC";

#[derive(Debug, Clone, PartialEq)]
pub struct SpectraCube {
    pub width: usize,
    pub height: usize,
    /// nm, strictly increasing within [900, 1700].
    pub wavelengths: Vec<f32>,
    /// (row, col, band) order, values in [0, 1].
    pub data: Vec<f32>,
    /// mm per raster pixel.
    pub step_mm: f32,
}

impl SpectraCube {
    pub fn new(width: usize, height: usize, wavelengths: Vec<f32>, data: Vec<f32>, step_mm: f32) -> Result<Self, NirError> {
        let cube = Self {
            width,
            height,
            wavelengths,
            data,
            step_mm,
        };
        cube.validate()?;
        Ok(cube)
    }

    pub fn validate(&self) -> Result<(), NirError> {
        let nb = self.wavelengths.len();
        if self.width == 0 || self.height == 0 || nb == 0 {
            return Err(NirError::Invalid("empty cube".into()));
        }
        if self.data.len() != self.width * self.height * nb {
            return Err(NirError::LengthMismatch {
                expected: self.width * self.height * nb * 4,
                actual: self.data.len() * 4,
            });
        }
        if self.wavelengths.windows(2).any(|w| !(w[1] > w[0]))
            || self.wavelengths.iter().any(|&l| !(900.0..=1700.0).contains(&l))
        {
            return Err(NirError::Invalid("wavelengths must increase within 900-1700 nm".into()));
        }
        if self.data.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(NirError::Invalid("reflectance outside [0, 1]".into()));
        }
        if !(self.step_mm > 0.0 && self.step_mm.is_finite()) {
            return Err(NirError::Invalid(format!("step_mm must be > 0, got {}", self.step_mm)));
        }
        Ok(())
    }

    pub fn bands(&self) -> usize {
        self.wavelengths.len()
    }

    pub fn spectrum(&self, row: usize, col: usize) -> &[f32] {
        let nb = self.bands();
        let start = (row * self.width + col) * nb;
        &self.data[start..start + nb]
    }

    /// Mean across wavelengths per pixel.
    pub fn mean_image(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| {
            let s = self.spectrum(y, x);
            s.iter().map(|&v| v as f64).sum::<f64>() / s.len() as f64
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + 4 * (self.wavelengths.len() + self.data.len()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.wavelengths.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.step_mm.to_le_bytes());
        for v in self.wavelengths.iter().chain(&self.data) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NirError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(NirError::BadMagic);
        }
        if bytes.len() < 20 {
            return Err(NirError::LengthMismatch {
                expected: 20,
                actual: bytes.len(),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let (w, h, nb) = (u32_at(4), u32_at(8), u32_at(12));
        let step = f32::from_le_bytes(bytes[16..20].try_into().unwrap());
        let expected = w
            .checked_mul(h)
            .and_then(|n| n.checked_mul(nb))
            .and_then(|n| n.checked_add(nb))
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(20))
            .ok_or(NirError::LengthMismatch {
                expected: usize::MAX,
                actual: bytes.len(),
            })?;
        if bytes.len() != expected {
            return Err(NirError::LengthMismatch {
                expected,
                actual: bytes.len(),
            });
        }
        let floats: Vec<f32> = bytes[20..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let (wl, data) = floats.split_at(nb);
        Self::new(w, h, wl.to_vec(), data.to_vec(), step)
    }
}

pub fn write_cube(cube: &SpectraCube, path: &Path) -> Result<(), NirError> {
    fs::write(path, cube.to_bytes()).map_err(|e| NirError::Io(path.display().to_string(), e))
}

pub fn read_cube(path: &Path) -> Result<SpectraCube, NirError> {
    let bytes = fs::read(path).map_err(|e| NirError::Io(path.display().to_string(), e))?;
    SpectraCube::from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> SpectraCube {
        let wl: Vec<f32> = (0..5).map(|i| 900.0 + 200.0 * i as f32).collect();
        let data = (0..3 * 2 * 5).map(|i| (i as f32 * 0.37).fract()).collect();
        SpectraCube::new(3, 2, wl, data, 1.0).unwrap()
    }

    #[test]
    fn roundtrip_bit_exact() {
        let c = cube();
        let bytes = c.to_bytes();
        assert_eq!(bytes.len(), 20 + 4 * (5 + 30));
        assert_eq!(SpectraCube::from_bytes(&bytes).unwrap(), c);
    }

    #[test]
    fn truncated_payload() {
        let bytes = cube().to_bytes();
        assert!(matches!(
            SpectraCube::from_bytes(&bytes[..bytes.len() - 4]),
            Err(NirError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn full_size_length() {
        let mut header = MAGIC.to_vec();
        for v in [24u32, 24, 228] {
            header.extend_from_slice(&v.to_le_bytes());
        }
        header.extend_from_slice(&1.0f32.to_le_bytes());
        match SpectraCube::from_bytes(&header) {
            Err(NirError::LengthMismatch { expected, .. }) => assert_eq!(expected, 20 + 228 * 4 + 24 * 24 * 228 * 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_magic() {
        assert!(matches!(SpectraCube::from_bytes(b"NIRX\0\0\0\0"), Err(NirError::BadMagic)));
    }
}
