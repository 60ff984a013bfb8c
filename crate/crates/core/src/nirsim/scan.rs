//! Raster scan of the top face: each pixel probes a small spot, light
//! penetrates the object body, reflects off the information body and is
//! attenuated on the way down and back.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, EmbedSpec, FabricationMode, VoxelGrid};

use super::{NirError, NirModelConfig, SpectraCube};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub width: usize,
    pub height: usize,
    /// Raster step, mm per pixel.
    pub step_mm: f64,
    pub seed: u64,
    /// Per-band reflectance noise.
    pub noise_sigma: f64,
}

impl ScanParams {
    /// The 24×24 raster at 1 mm.
    pub fn standard(seed: u64, noise_sigma: f64) -> Self {
        Self {
            width: 24,
            height: 24,
            step_mm: 1.0,
            seed,
            noise_sigma,
        }
    }
}

/// Per column: depth (in voxel layers) from the top surface to the top of the
/// highest info voxel, `None` where no info lies below.
struct DepthMap {
    nx: usize,
    ny: usize,
    layers: Vec<Option<u32>>,
    /// x/y extent of the non-empty columns, mm.
    footprint: [f64; 4],
}

impl DepthMap {
    fn new(grid: &VoxelGrid) -> Result<Self, NirError> {
        let [nx, ny, nz] = grid.dims();
        let f = grid.frame;
        let mut layers = vec![None; nx * ny];
        let (mut lo, mut hi) = ([usize::MAX; 2], [0usize; 2]);
        for j in 0..ny {
            for i in 0..nx {
                let Some(top) = (0..nz).rev().find(|&k| grid.get(i, j, k) != Cell::Empty) else {
                    continue;
                };
                lo = [lo[0].min(i), lo[1].min(j)];
                hi = [hi[0].max(i), hi[1].max(j)];
                if let Some(k) = (0..=top).rev().find(|&k| grid.get(i, j, k) == Cell::Info) {
                    layers[i + nx * j] = Some((top - k) as u32);
                }
            }
        }
        if lo[0] == usize::MAX {
            return Err(NirError::Invalid("grid has no solid voxels".into()));
        }
        let p = f.pitch;
        let footprint = [
            f.origin[0] + lo[0] as f64 * p,
            f.origin[1] + lo[1] as f64 * p,
            f.origin[0] + (hi[0] + 1) as f64 * p,
            f.origin[1] + (hi[1] + 1) as f64 * p,
        ];
        Ok(Self {
            nx,
            ny,
            layers,
            footprint,
        })
    }
}

/// Simulates a raster scan centred on the object's top face.
///
/// Reflectance per band is `r_obj + (r_info - r_obj)·K`, where `K` sums
/// `exp(-2·μ·z)` over the info columns under the probe spot, weighted by a
/// Gaussian of width `spot + spread·z`. Columns without info return `r_obj`.
/// Noise is a per-pixel offset shared by all bands plus per-band noise, and
/// depends only on the seed and pixel index.
pub fn simulate_scan(
    grid: &VoxelGrid,
    spec: &EmbedSpec,
    config: &NirModelConfig,
    scan: &ScanParams,
) -> Result<SpectraCube, NirError> {
    if spec.mode == FabricationMode::SurfaceJoin {
        tracing::warn!("NIR scan of a surface-join design: the model ignores the infill above the info body");
    }
    if scan.width == 0 || scan.height == 0 || !(scan.step_mm > 0.0 && scan.step_mm.is_finite()) {
        return Err(NirError::Invalid(format!(
            "{}x{} raster at {} mm",
            scan.width, scan.height, scan.step_mm
        )));
    }
    if !(scan.noise_sigma >= 0.0 && config.pixel_noise_sigma >= 0.0) {
        return Err(NirError::Invalid("noise sigma must be >= 0".into()));
    }
    let obj = config.color_optics(spec.object_color)?;
    let wavelengths = config.wavelengths();
    let depth = DepthMap::new(grid)?;
    let [x0, y0, x1, y1] = depth.footprint;
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (half_w, half_h) = (0.5 * scan.width as f64 * scan.step_mm, 0.5 * scan.height as f64 * scan.step_mm);
    let eps = 1e-9;
    if cx - half_w < x0 - eps || cx + half_w > x1 + eps || cy - half_h < y0 - eps || cy + half_h > y1 + eps {
        return Err(NirError::WindowOutOfBounds {
            window_mm: [2.0 * half_w, 2.0 * half_h],
            footprint_mm: [x1 - x0, y1 - y0],
        });
    }

    let p = grid.pitch();
    let origin = grid.frame.origin;
    let max_layers = depth.layers.iter().flatten().copied().max().unwrap_or(0);
    let max_sigma = config.spot_sigma_mm + config.spread_per_mm * max_layers as f64 * p;
    let reach = (4.0 * max_sigma / p).ceil() as isize + 1;
    let nb = wavelengths.len();
    let r_info = config.info_reflectance;
    let pixel_noise = Normal::new(0.0, config.pixel_noise_sigma).expect("finite sigma");
    let band_noise = Normal::new(0.0, scan.noise_sigma).expect("finite sigma");

    let data: Vec<f32> = (0..scan.width * scan.height)
        .into_par_iter()
        .flat_map_iter(|pix| {
            let (r, c) = (pix / scan.width, pix % scan.width);
            // Row 0 is the northern (max y) edge.
            let px = cx - half_w + (c as f64 + 0.5) * scan.step_mm;
            let py = cy + half_h - (r as f64 + 0.5) * scan.step_mm;
            let ci = ((px - origin[0]) / p).floor() as isize;
            let cj = ((py - origin[1]) / p).floor() as isize;

            // Spot weight per distinct info depth.
            let mut weights: BTreeMap<u32, f64> = BTreeMap::new();
            for j in (cj - reach).max(0)..=(cj + reach).min(depth.ny as isize - 1) {
                for i in (ci - reach).max(0)..=(ci + reach).min(depth.nx as isize - 1) {
                    let Some(l) = depth.layers[i as usize + depth.nx * j as usize] else {
                        continue;
                    };
                    let z = l as f64 * p;
                    let sigma = config.spot_sigma_mm + config.spread_per_mm * z;
                    let dx = origin[0] + (i as f64 + 0.5) * p - px;
                    let dy = origin[1] + (j as f64 + 0.5) * p - py;
                    let w = p * p / (2.0 * std::f64::consts::PI * sigma * sigma)
                        * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
                    *weights.entry(l).or_default() += w;
                }
            }

            let mut rng = ChaCha8Rng::seed_from_u64(scan.seed);
            rng.set_stream(pix as u64);
            let offset = pixel_noise.sample(&mut rng);
            let mut spectrum = Vec::with_capacity(nb);
            for b in 0..nb {
                let mu = obj.mu[b];
                let k: f64 = weights
                    .iter()
                    .map(|(&l, &w)| w * (-2.0 * mu * l as f64 * p).exp())
                    .sum();
                let r0 = obj.base_reflectance[b];
                let v = r0 + (r_info - r0) * k.min(1.0) + offset + band_noise.sample(&mut rng);
                spectrum.push(v.clamp(0.0, 1.0) as f32);
            }
            spectrum
        })
        .collect();

    SpectraCube::new(
        scan.width,
        scan.height,
        wavelengths.iter().map(|&l| l as f32).collect(),
        data,
        scan.step_mm as f32,
    )
}
