//! "One file per body" export: `object.stl`, `info.stl` and `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use super::spec::{Color, EmbedSpec, FabricationMode};
use super::stl::{parse_stl, write_stl, StlFormat};
use super::GeometryError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const OBJECT_FILE: &str = "object.stl";
pub const INFO_FILE: &str = "info.stl";
pub const SCHEMA_VERSION: u32 = 1;

/// Flat parameter record shared by the slicer-facing export and both simulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub object_file: String,
    pub info_file: String,
    pub depth_d_mm: f64,
    #[serde(rename = "density_X_mm_per_px")]
    pub density_x_mm_per_px: f64,
    pub info_height_mm: f64,
    pub mode: FabricationMode,
    pub infill_fraction: f64,
    pub object_dims_mm: [f64; 3],
    pub object_color: Color,
    pub info_color: Color,
    pub pitch_mm: f64,
}

impl Manifest {
    pub fn new(spec: &EmbedSpec, pitch: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            object_file: OBJECT_FILE.into(),
            info_file: INFO_FILE.into(),
            depth_d_mm: spec.depth_d,
            density_x_mm_per_px: spec.density_x,
            info_height_mm: spec.info_height,
            mode: spec.mode,
            infill_fraction: spec.infill_fraction,
            object_dims_mm: spec.object_dims,
            object_color: spec.object_color,
            info_color: spec.info_color,
            pitch_mm: pitch,
        }
    }

    pub fn embed_spec(&self) -> EmbedSpec {
        EmbedSpec {
            depth_d: self.depth_d_mm,
            density_x: self.density_x_mm_per_px,
            info_height: self.info_height_mm,
            mode: self.mode,
            infill_fraction: self.infill_fraction,
            object_dims: self.object_dims_mm,
            object_color: self.object_color,
            info_color: self.info_color,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodySet {
    /// Object with the information volume carved out.
    pub object_body: TriMesh,
    pub info_body: TriMesh,
    pub manifest: Manifest,
}

/// Writes the two bodies as binary STL plus the manifest. Output bytes depend
/// only on the body set.
pub fn export_bodies(bodies: &BodySet, dir: &Path) -> Result<PathBuf, GeometryError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let m = &bodies.manifest;
    for (name, mesh) in [(&m.object_file, &bodies.object_body), (&m.info_file, &bodies.info_body)] {
        let path = dir.join(name);
        let bytes = write_stl(mesh, StlFormat::Binary)?;
        fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
    }
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(m).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Reads a directory written by [`export_bodies`].
pub fn load_bodies(dir: &Path) -> Result<BodySet, GeometryError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| GeometryError::BadManifest(e.to_string()))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(GeometryError::BadManifest(format!(
            "unsupported schema_version {}",
            manifest.schema_version
        )));
    }
    let read = |name: &str| -> Result<TriMesh, GeometryError> {
        let p = dir.join(name);
        let bytes = fs::read(&p).map_err(|e| io_err(&p, e))?;
        parse_stl(&bytes)
    };
    Ok(BodySet {
        object_body: read(&manifest.object_file)?,
        info_body: read(&manifest.info_file)?,
        manifest,
    })
}

fn io_err(path: &Path, source: std::io::Error) -> GeometryError {
    GeometryError::Io {
        path: path.to_path_buf(),
        source,
    }
}
