//! Payloads: bit matrices and glyph bitmaps, and their extrusion into
//! information meshes.

mod extrude;
mod matrix;
mod pbm;

pub use extrude::{bitmap_to_mesh, embed_matrix, matrix_footprint, matrix_to_mesh};
pub use matrix::{matrix_accuracy, random_matrix, BitMatrix};
pub use pbm::{load_pbm, GlyphBitmap};

use crate::geometry::GeometryError;

#[derive(Debug, thiserror::Error)]
pub enum PayloadError {
    #[error("ones = {ones} is outside 1..{cells} for a grid of {cells} cells")]
    OnesOutOfRange { ones: usize, cells: usize },
    #[error("dimension mismatch: expected {}x{}, found {found} values", expected.0, expected.1)]
    DimensionMismatch { expected: (usize, usize), found: usize },
    #[error("anchor bit (0, 0) must be 1")]
    AnchorNotSet,
    #[error("payload needs at least one 0 bit")]
    NoZeroBit,
    #[error("payload has no set bits")]
    EmptyPayload,
    #[error("glyph has no set pixels")]
    BlankGlyph,
    #[error("scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("not a P1/P4 bitmap")]
    BadMagic,
    #[error("bad bitmap: {0}")]
    BadPbmHeader(String),
    #[error("bad matrix file at line {line}: {message}")]
    BadMatrixFile { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
