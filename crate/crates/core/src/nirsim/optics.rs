use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Color;

use super::NirError;

/// Absorption and diffuse reflectance of a filament colour across the band.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorOptics {
    pub color: Color,
    /// 1/mm per wavelength.
    pub mu: Vec<f64>,
    /// Reflectance of a thick slab per wavelength.
    pub base_reflectance: Vec<f64>,
}

impl ColorOptics {
    pub fn new(color: Color, mu: Vec<f64>, base_reflectance: Vec<f64>) -> Result<Self, NirError> {
        if mu.len() != base_reflectance.len()
            || mu.iter().any(|&m| !(m >= 0.0 && m.is_finite()))
            || base_reflectance.iter().any(|&r| !(0.0..=1.0).contains(&r))
        {
            return Err(NirError::BadOptics(color));
        }
        Ok(Self {
            color,
            mu,
            base_reflectance,
        })
    }
}

/// Band-edge parameters, linearly interpolated across the wavelength grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticsParams {
    /// Absorption at the short and long band edges, 1/mm.
    pub mu: [f64; 2],
    /// Slab reflectance at the short and long band edges.
    pub reflectance: [f64; 2],
}

impl OpticsParams {
    pub fn sample(&self, color: Color, wavelengths: &[f64]) -> Result<ColorOptics, NirError> {
        let (lo, hi) = (wavelengths[0], wavelengths[wavelengths.len() - 1]);
        let lerp = |v: [f64; 2], l: f64| {
            let t = if hi > lo { (l - lo) / (hi - lo) } else { 0.0 };
            v[0] + t * (v[1] - v[0])
        };
        ColorOptics::new(
            color,
            wavelengths.iter().map(|&l| lerp(self.mu, l)).collect(),
            wavelengths.iter().map(|&l| lerp(self.reflectance, l)).collect(),
        )
    }
}

/// Reflectance model and scanner constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NirModelConfig {
    pub optics: BTreeMap<Color, OpticsParams>,
    /// Reflectance of the embedded (white) information body.
    pub info_reflectance: f64,
    /// Lateral spread of the probe light at the surface, mm.
    pub spot_sigma_mm: f64,
    /// Growth of the lateral spread per mm of depth.
    pub spread_per_mm: f64,
    /// Per-band additive noise.
    pub band_noise_sigma: f64,
    /// Additive noise shared by all bands of a pixel (illumination jitter).
    pub pixel_noise_sigma: f64,
    pub bands: usize,
    pub min_nm: f64,
    pub max_nm: f64,
    /// Voxel pitch used to resample designs, mm.
    pub pitch_mm: f64,
}

impl Default for NirModelConfig {
    fn default() -> Self {
        let p = |mu: [f64; 2], reflectance: [f64; 2]| OpticsParams { mu, reflectance };
        let optics = BTreeMap::from([
            // Pigmented PLA: readable through 3 mm, lost at 4 mm.
            (Color::Blue, p([0.465, 0.39], [0.16, 0.14])),
            (Color::Gray, p([0.48, 0.42], [0.15, 0.15])),
            (Color::Orange, p([0.435, 0.375], [0.17, 0.15])),
            (Color::Red, p([0.45, 0.39], [0.16, 0.15])),
            // Carbon black absorbs within a fraction of a millimetre.
            (Color::Black, p([6.0, 5.5], [0.03, 0.03])),
            (Color::White, p([0.34, 0.30], [0.60, 0.55])),
        ]);
        Self {
            optics,
            info_reflectance: 0.9,
            spot_sigma_mm: 0.5,
            spread_per_mm: 0.15,
            band_noise_sigma: 0.01,
            pixel_noise_sigma: 0.004,
            bands: 228,
            min_nm: 900.0,
            max_nm: 1700.0,
            pitch_mm: 0.5,
        }
    }
}

impl NirModelConfig {
    /// Evenly spaced wavelength grid, nm.
    pub fn wavelengths(&self) -> Vec<f64> {
        let n = self.bands.max(1);
        if n == 1 {
            return vec![self.min_nm];
        }
        (0..n)
            .map(|i| self.min_nm + (self.max_nm - self.min_nm) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn color_optics(&self, color: Color) -> Result<ColorOptics, NirError> {
        let params = self.optics.get(&color).ok_or(NirError::BadOptics(color))?;
        params.sample(color, &self.wavelengths())
    }
}
