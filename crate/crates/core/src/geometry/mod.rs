//! Meshes, voxel grids, STL I/O and the boolean embedding of an information
//! body into an object body.

mod embed;
mod export;
mod mesh;
mod spec;
mod stl;
mod voxel;

use std::path::PathBuf;

pub use embed::{apply_mode, compose, embed, place_footprint, place_info};
pub use export::{export_bodies, load_bodies, BodySet, Manifest, INFO_FILE, MANIFEST_FILE, OBJECT_FILE};
pub(crate) use mesh::push_box_faces;
pub use mesh::{Aabb, Point3, TriMesh, Triangle};
pub use spec::{Color, EmbedSpec, FabricationMode};
pub use stl::{binary_len, parse_stl, write_stl, StlFormat};
pub use voxel::{classify, voxelize, Cell, GridFrame, VoxelGrid, OPEN_MESH_TOLERANCE};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("truncated STL: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: usize, actual: usize },
    #[error("malformed ASCII STL at line {line}: {message}")]
    MalformedSyntax { line: usize, message: String },
    #[error("non-finite vertex in triangle {triangle}")]
    NonFiniteVertex { triangle: usize },
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("mesh is not closed: {inconsistent} of {total} voxels disagree between ray directions")]
    OpenMesh { inconsistent: usize, total: usize },
    #[error("pitch too coarse: only {voxels} voxels along axis {axis}")]
    PitchTooCoarse { axis: usize, voxels: usize },
    #[error("voxel pitch must be positive and finite, got {0}")]
    InvalidPitch(f64),
    #[error("information body is not strictly inside the object")]
    InfoProtrudes,
    #[error("spec violation: {0}")]
    SpecViolation(String),
    #[error("grid has no information voxels")]
    ModeInapplicable,
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
