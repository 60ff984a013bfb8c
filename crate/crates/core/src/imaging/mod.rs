//! Image primitives shared by both decoders.

mod contour;
mod filter;
mod image;
mod otsu;

pub use contour::{crop_largest, find_contours, BBox, Contour};
pub use filter::{fixed_threshold, gaussian_blur5, gaussian_kernel5, normalize_u8, upsample4, BLUR_SIGMA};
pub use image::{write_pgm, BinaryImage, Gray8, GrayImage, Image};
pub use otsu::{binarize, histogram, otsu_threshold};

#[derive(Debug, thiserror::Error)]
pub enum ImagingError {
    #[error("image is {width}x{height}, need at least 5x5")]
    ImageTooSmall { width: usize, height: usize },
    #[error("{width}x{height} image cannot hold {len} values")]
    BadDimensions { width: usize, height: usize, len: usize },
    #[error("histogram has a single value")]
    DegenerateHistogram,
    #[error("no contours")]
    NoContours,
    #[error("threshold fraction must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("image contains non-finite values")]
    NonFinite,
}
