//! Sweeps over design parameters, the guideline check and the visibility table.

mod config;
mod guidelines;
mod sweep;
mod visibility;

pub use config::{HarnessConfig, NirSetup, PayloadShape, ThermalSetup};
pub use guidelines::{check_guidelines, ColorConstraint, GuidelineCheck, GuidelineReport, GuidelineRow};
pub use sweep::{load_results, run_point, run_sweep, Axis, AxisValue, Method, RunRecord, SweepResult, SweepSpec, CSV_HEADER};
pub use visibility::{visibility_lookup, Visibility};

use std::path::Path;

use crate::geometry::{apply_mode, compose, load_bodies, EmbedSpec, GeometryError, GridFrame, VoxelGrid};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid sweep value: {0}")]
    BadValue(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}: {1}")]
    InFile(String, #[source] Box<HarnessError>),
    #[error("{0} was produced with a different config than the other results")]
    ConfigMismatch(String),
    #[error("results do not cover the {axis} axis for {method}")]
    IncompleteCoverage { method: Method, axis: Axis },
    #[error("not in the visibility table: {0}")]
    OutOfTable(String),
    #[error("run {context}: {source}")]
    Run {
        context: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("I/O error on {0}: {1}")]
    Io(String, #[source] std::io::Error),
}

/// Re-voxelizes an exported design at `pitch` (the manifest pitch when
/// `None`) and applies its fabrication mode.
pub fn load_design(dir: &Path, pitch: Option<f64>) -> Result<(VoxelGrid, EmbedSpec), HarnessError> {
    let bodies = load_bodies(dir)?;
    let spec = bodies.manifest.embed_spec();
    let pitch = pitch.unwrap_or(bodies.manifest.pitch_mm);
    let frame = GridFrame::around(&bodies.object_body, pitch)?;
    let grid = compose(&bodies.object_body, &bodies.info_body, &frame)?;
    Ok((apply_mode(&grid, &spec)?, spec))
}
