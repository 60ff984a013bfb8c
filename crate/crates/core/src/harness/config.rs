use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::{Color, EmbedSpec, FabricationMode};
use crate::nirsim::{NirModelConfig, ScanParams};
use crate::thermsim::{ThermalModelConfig, ThermalScenario};

use super::HarnessError;

/// Random payloads drawn per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayloadShape {
    pub rows: usize,
    pub cols: usize,
    pub ones: usize,
}

impl Default for PayloadShape {
    fn default() -> Self {
        Self { rows: 4, cols: 4, ones: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalSetup {
    /// Design every thermal sweep point starts from.
    pub base: EmbedSpec,
    pub scenario: ThermalScenario,
    pub model: ThermalModelConfig,
    /// Voxel pitch of the heat solver, mm.
    pub pitch_mm: f64,
}

impl Default for ThermalSetup {
    fn default() -> Self {
        Self {
            base: EmbedSpec {
                mode: FabricationMode::SurfaceJoin,
                object_color: Color::Blue,
                ..EmbedSpec::default()
            },
            scenario: ThermalScenario::default(),
            model: ThermalModelConfig::default(),
            pitch_mm: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NirSetup {
    pub base: EmbedSpec,
    pub model: NirModelConfig,
    pub width: usize,
    pub height: usize,
    pub step_mm: f64,
}

impl Default for NirSetup {
    fn default() -> Self {
        Self {
            base: EmbedSpec {
                depth_d: 2.0,
                mode: FabricationMode::SurfaceFill,
                object_color: Color::Blue,
                ..EmbedSpec::default()
            },
            model: NirModelConfig::default(),
            width: 24,
            height: 24,
            step_mm: 1.0,
        }
    }
}

impl NirSetup {
    pub fn scan(&self, seed: u64) -> ScanParams {
        ScanParams {
            width: self.width,
            height: self.height,
            step_mm: self.step_mm,
            seed,
            noise_sigma: self.model.band_noise_sigma,
        }
    }
}

/// Everything a sweep depends on besides the axis and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarnessConfig {
    /// Seeds per sweep point; seed `s` draws the payload and all noise.
    pub seeds: u64,
    pub payload: PayloadShape,
    pub thermal: ThermalSetup,
    pub nir: NirSetup,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            seeds: 10,
            payload: PayloadShape::default(),
            thermal: ThermalSetup::default(),
            nir: NirSetup::default(),
        }
    }
}

impl HarnessConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.seeds == 0 {
            return Err(HarnessError::Config("seeds must be >= 1".into()));
        }
        if !(self.thermal.pitch_mm > 0.0 && self.nir.model.pitch_mm > 0.0) {
            return Err(HarnessError::Config("voxel pitches must be > 0".into()));
        }
        Ok(())
    }

    /// Pretty JSON of the fully resolved configuration.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the compact resolved JSON, lowercase hex.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(compact.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
