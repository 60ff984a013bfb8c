//! The contact-then-record reading process and the thermal camera model.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, EmbedSpec, FabricationMode, VoxelGrid};
use crate::imaging::GrayImage;

use super::{material_grid, Convection, Environment, HeatModel, ThermalError, ThermalMaterials};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalScenario {
    /// °C
    pub contact_temp: f64,
    /// s
    pub contact_duration: f64,
    /// °C
    pub ambient_temp: f64,
    /// s, after contact ends
    pub record_duration: f64,
    /// frames per second
    pub frame_rate: f64,
    /// °C, per-pixel camera noise
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for ThermalScenario {
    fn default() -> Self {
        Self {
            contact_temp: 35.0,
            contact_duration: 3.0,
            ambient_temp: 27.0,
            record_duration: 60.0,
            frame_rate: 6.0,
            noise_sigma: 0.02,
            seed: 0,
        }
    }
}

impl ThermalScenario {
    pub fn validate(&self) -> Result<(), ThermalError> {
        let bad = |m: String| Err(ThermalError::SpecViolation(m));
        if !(self.record_duration > 0.0 && self.record_duration.is_finite()) {
            return bad(format!("record_duration must be > 0, got {}", self.record_duration));
        }
        if !(self.frame_rate > 0.0 && self.frame_rate.is_finite()) {
            return bad(format!("frame_rate must be > 0, got {}", self.frame_rate));
        }
        if !(self.contact_duration >= 0.0 && self.contact_duration.is_finite()) {
            return bad(format!("contact_duration must be >= 0, got {}", self.contact_duration));
        }
        if !(self.noise_sigma >= 0.0) || !self.contact_temp.is_finite() || !self.ambient_temp.is_finite() {
            return bad("temperatures must be finite and noise_sigma >= 0".into());
        }
        Ok(())
    }

    /// Frame timestamps `k / fps` for `k = 0..=round(fps·(contact + record))`.
    pub fn frame_times(&self) -> Vec<f64> {
        let n = (self.frame_rate * (self.contact_duration + self.record_duration)).round() as usize;
        (0..=n).map(|k| k as f64 / self.frame_rate).collect()
    }
}

/// Top-down thermal camera: Gaussian optical blur followed by pixel sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalCamera {
    /// Footprint of one camera pixel on the object face, mm.
    pub pixel_mm: f64,
    /// Standard deviation of the optical blur on the object face, mm.
    pub psf_sigma_mm: f64,
    /// Background border imaged around the object, mm.
    pub margin_mm: f64,
}

impl Default for ThermalCamera {
    fn default() -> Self {
        Self {
            pixel_mm: 1.0,
            psf_sigma_mm: 1.25,
            margin_mm: 5.0,
        }
    }
}

/// Everything besides the design and scenario that shapes a recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalModelConfig {
    pub materials: ThermalMaterials,
    /// Exposed-face heat transfer law.
    pub convection: Convection,
    pub camera: ThermalCamera,
    /// Fraction of the stability bound used for internal steps.
    pub dt_safety: f64,
}

impl Default for ThermalModelConfig {
    fn default() -> Self {
        Self {
            materials: ThermalMaterials::default(),
            convection: Convection {
                h_ref: 10.0,
                exponent: 0.25,
                h_max: 40.0,
            },
            camera: ThermalCamera::default(),
            dt_safety: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalFrame {
    /// s
    pub t: f64,
    /// °C, row 0 is the far (max y) edge of the face.
    pub image: GrayImage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalRecording {
    pub frames: Vec<ThermalFrame>,
}

impl ThermalRecording {
    pub fn new(frames: Vec<ThermalFrame>) -> Result<Self, ThermalError> {
        let rec = Self { frames };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        let Some(first) = self.frames.first() else {
            return Err(ThermalError::SpecViolation("recording has no frames".into()));
        };
        let (w, h) = (first.image.width, first.image.height);
        for pair in self.frames.windows(2) {
            if !(pair[1].t > pair[0].t) {
                return Err(ThermalError::SpecViolation(format!(
                    "timestamps must increase: {} then {}",
                    pair[0].t, pair[1].t
                )));
            }
        }
        for f in &self.frames {
            if f.image.width != w || f.image.height != h {
                return Err(ThermalError::SpecViolation("frames differ in size".into()));
            }
            if !f.t.is_finite() || f.image.data.iter().any(|v| !v.is_finite()) {
                return Err(ThermalError::SpecViolation("non-finite value in recording".into()));
            }
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.frames.first().map_or(0, |f| f.image.height)
    }

    pub fn cols(&self) -> usize {
        self.frames.first().map_or(0, |f| f.image.width)
    }

    /// Index of the first frame strictly after `t`.
    pub fn first_after(&self, t: f64) -> Option<usize> {
        self.frames.iter().position(|f| f.t > t + 1e-9)
    }
}

/// Simulates pressing a body at `contact_temp` onto the top face, releasing
/// it, and filming the face from above.
pub fn simulate_reading(
    grid: &VoxelGrid,
    spec: &EmbedSpec,
    scenario: &ThermalScenario,
    config: &ThermalModelConfig,
) -> Result<ThermalRecording, ThermalError> {
    scenario.validate()?;
    spec.validate().map_err(|e| ThermalError::SpecViolation(e.to_string()))?;
    if spec.mode == FabricationMode::SurfaceFill {
        tracing::warn!("thermal reading of a surface-fill design; surface-join is the intended mode");
    }
    let props = material_grid(grid, spec, &config.materials);
    let model = HeatModel::with_convection(grid, &props, config.convection)?;
    let surface = SurfaceMap::new(grid, &model);
    let camera = CameraRaster::new(grid, &surface, &config.camera);

    let times = scenario.frame_times();
    let interval = 1.0 / scenario.frame_rate;
    let bound = model.stability_bound(true).min(model.stability_bound(false));
    let safety = if config.dt_safety > 0.0 { config.dt_safety } else { 0.8 };
    let substeps = (interval / (safety * bound)).ceil().max(1.0) as usize;
    let dt_max = interval / substeps as f64;

    let ambient = scenario.ambient_temp;
    let contact_end = scenario.contact_duration;
    let env_at = |t: f64| Environment {
        ambient,
        contact: (t < contact_end - 1e-12).then_some(scenario.contact_temp),
    };

    let mut state = model.uniform(ambient);
    let mut scratch = state.clone();
    let mut now = 0.0;
    let mut frames = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        // Advance to t, splitting the segment at the end of contact.
        while now < t - 1e-12 {
            let seg_end = if now < contact_end - 1e-12 { t.min(contact_end) } else { t };
            let env = env_at(now);
            let span = seg_end - now;
            let n = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
            let dt = span / n as f64;
            for _ in 0..n {
                model.step_into(&state, &mut scratch, dt, env);
                std::mem::swap(&mut state, &mut scratch);
            }
            now = seg_end;
        }
        let env = Environment {
            ambient,
            contact: (t < contact_end - 1e-12).then_some(scenario.contact_temp),
        };
        let field = surface.temperatures(&model, &state, env, ambient);
        let mut image = camera.render(&field, ambient);
        add_noise(&mut image, scenario.noise_sigma, scenario.seed, k as u64);
        frames.push(ThermalFrame { t, image });
    }
    ThermalRecording::new(frames)
}

/// Counter-based noise: the stream is selected by frame index, so each frame's
/// noise is independent of how many frames were rendered before it.
fn add_noise(img: &mut GrayImage, sigma: f64, seed: u64, frame: u64) {
    if sigma <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    for v in &mut img.data {
        *v += normal.sample(&mut rng);
    }
}

/// Maps each (i, j) column of the grid to its topmost active voxel.
struct SurfaceMap {
    nx: usize,
    ny: usize,
    /// Model slot of the top voxel per column, `usize::MAX` when empty.
    top: Vec<usize>,
}

impl SurfaceMap {
    fn new(grid: &VoxelGrid, model: &HeatModel) -> Self {
        let [nx, ny, _] = grid.dims();
        let mut top = vec![usize::MAX; nx * ny];
        let mut best = vec![0usize; nx * ny];
        for (s, &idx) in model.voxels.iter().enumerate() {
            let [i, j, k] = grid.frame.coords(idx);
            let c = j * nx + i;
            if top[c] == usize::MAX || k > best[c] {
                top[c] = s;
                best[c] = k;
            }
        }
        debug_assert!(grid.cells.iter().any(|&c| c != Cell::Empty));
        Self { nx, ny, top }
    }

    /// Surface temperature per column, ambient where nothing is printed.
    fn temperatures(&self, model: &HeatModel, state: &[f64], env: Environment, ambient: f64) -> Vec<f64> {
        self.top
            .iter()
            .map(|&s| {
                if s == usize::MAX {
                    ambient
                } else {
                    model.surface_temp(s, state[s], env)
                }
            })
            .collect()
    }
}

/// Precomputed resampling from grid columns to camera pixels.
struct CameraRaster {
    width: usize,
    height: usize,
    /// Per output pixel: (column index or usize::MAX for outside, weight).
    taps: Vec<Vec<(usize, f64)>>,
}

impl CameraRaster {
    fn new(grid: &VoxelGrid, surface: &SurfaceMap, cam: &ThermalCamera) -> Self {
        let p = grid.pitch();
        let frame = grid.frame;
        // Object footprint from the printed columns.
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..surface.ny {
            for i in 0..surface.nx {
                if surface.top[j * surface.nx + i] != usize::MAX {
                    let c = frame.center(i, j, 0);
                    x0 = x0.min(c[0] - p / 2.0);
                    x1 = x1.max(c[0] + p / 2.0);
                    y0 = y0.min(c[1] - p / 2.0);
                    y1 = y1.max(c[1] + p / 2.0);
                }
            }
        }
        let m = cam.margin_mm.max(0.0);
        let px = cam.pixel_mm;
        let width = ((x1 - x0 + 2.0 * m) / px).round().max(1.0) as usize;
        let height = ((y1 - y0 + 2.0 * m) / px).round().max(1.0) as usize;
        let left = 0.5 * (x0 + x1) - 0.5 * width as f64 * px;
        let top = 0.5 * (y0 + y1) + 0.5 * height as f64 * px;

        // Each pixel integrates the Gaussian-blurred surface over its area:
        // sub-sample the pixel and spread each sample with the PSF.
        let sigma = cam.psf_sigma_mm.max(0.0);
        let reach = (3.0 * sigma / p).ceil() as isize + (px / p).ceil() as isize;
        let sub = ((px / p).round() as usize).max(1);
        let mut taps = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                let mut acc: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
                let mut total = 0.0;
                for sy in 0..sub {
                    for sx in 0..sub {
                        let x = left + (c as f64 + (sx as f64 + 0.5) / sub as f64) * px;
                        let y = top - (r as f64 + (sy as f64 + 0.5) / sub as f64) * px;
                        let fi = ((x - frame.origin[0]) / p - 0.5).round() as isize;
                        let fj = ((y - frame.origin[1]) / p - 0.5).round() as isize;
                        for dj in -reach..=reach {
                            for di in -reach..=reach {
                                let (i, j) = (fi + di, fj + dj);
                                let cx = frame.origin[0] + (i as f64 + 0.5) * p;
                                let cy = frame.origin[1] + (j as f64 + 0.5) * p;
                                let d2 = (cx - x).powi(2) + (cy - y).powi(2);
                                let w = if sigma > 0.0 {
                                    (-d2 / (2.0 * sigma * sigma)).exp()
                                } else if di == 0 && dj == 0 {
                                    1.0
                                } else {
                                    0.0
                                };
                                if w < 1e-6 {
                                    continue;
                                }
                                total += w;
                                let key = if i >= 0 && j >= 0 && (i as usize) < surface.nx && (j as usize) < surface.ny {
                                    j as usize * surface.nx + i as usize
                                } else {
                                    usize::MAX
                                };
                                *acc.entry(key).or_insert(0.0) += w;
                            }
                        }
                    }
                }
                taps.push(acc.into_iter().map(|(k, w)| (k, w / total)).collect());
            }
        }
        Self { width, height, taps }
    }

    fn render(&self, field: &[f64], ambient: f64) -> GrayImage {
        let data = self
            .taps
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&(col, w)| w * if col == usize::MAX { ambient } else { field[col] })
                    .sum()
            })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            data,
        }
    }
}
