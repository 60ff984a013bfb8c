//! Anchored lattice sampling shared by both decoders.

use serde::{Deserialize, Serialize};

use crate::imaging::{find_contours, BinaryImage, Contour};
use crate::payload::BitMatrix;

use super::DecodeError;

/// Which binarized class holds the 1-bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Thermal: the class whose level is closer to the background (the info
    /// body lags the surface temperature change). NIR: the bright class.
    #[default]
    Auto,
    /// The brighter (hotter) class is 1.
    Bright,
    /// The darker (cooler) class is 1.
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Pixels between neighbouring sample points.
    pub sample_spacing: f64,
    pub polarity: Polarity,
}

impl GridGeometry {
    pub fn new(rows: usize, cols: usize, sample_spacing: f64) -> Result<Self, DecodeError> {
        if rows == 0 || cols == 0 || !(sample_spacing > 0.0 && sample_spacing.is_finite()) {
            return Err(DecodeError::BadGeometry(format!(
                "{rows}x{cols} lattice with spacing {sample_spacing}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            sample_spacing,
            polarity: Polarity::Auto,
        })
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }
}

/// Contours usable as the anchor: not touching the image border (walls and
/// edge effects) and at least a quarter of a cell in area.
pub fn candidate_contours(fg: &BinaryImage, spacing: f64) -> Vec<Contour> {
    let (w, h) = (fg.width, fg.height);
    let min_area = 0.25 * spacing * spacing;
    find_contours(fg)
        .into_iter()
        .filter(|c| c.bbox.x0 > 0 && c.bbox.y0 > 0 && c.bbox.x1 + 1 < w && c.bbox.y1 + 1 < h)
        .filter(|c| c.area >= min_area)
        .collect()
}

/// The top-left contour: smallest `x0 + y0` of its bbox, ties by smaller
/// `y0`, then `x0`. The bbox corner is used instead of the centroid because
/// the anchor bit merges with any adjacent 1-bits into one contour.
pub fn top_left(contours: &[Contour]) -> Option<&Contour> {
    contours
        .iter()
        .min_by_key(|c| (c.bbox.x0 + c.bbox.y0, c.bbox.y0, c.bbox.x0))
}

/// Samples the `rows`×`cols` lattice anchored at the centre of the anchor
/// cell. Points falling outside the image read as 0.
pub fn sample_lattice(fg: &BinaryImage, geom: &GridGeometry) -> Result<BitMatrix, DecodeError> {
    let s = geom.sample_spacing;
    let contours = candidate_contours(fg, s);
    let anchor = top_left(&contours).ok_or(DecodeError::NoAnchorContour)?;
    let ax = anchor.bbox.x0 as f64 + (s - 1.0) / 2.0;
    let ay = anchor.bbox.y0 as f64 + (s - 1.0) / 2.0;
    let mut bits = Vec::with_capacity(geom.rows * geom.cols);
    for r in 0..geom.rows {
        for c in 0..geom.cols {
            let x = (ax + c as f64 * s).round();
            let y = (ay + r as f64 * s).round();
            let inside = x >= 0.0 && y >= 0.0 && (x as usize) < fg.width && (y as usize) < fg.height;
            bits.push(inside && fg.get(x as usize, y as usize));
        }
    }
    Ok(BitMatrix::raw(geom.rows, geom.cols, bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(m: &BitMatrix, cell: usize, margin: usize) -> BinaryImage {
        let w = m.cols() * cell + 2 * margin;
        let h = m.rows() * cell + 2 * margin;
        BinaryImage::from_fn(w, h, |x, y| {
            x >= margin
                && y >= margin
                && x < margin + m.cols() * cell
                && y < margin + m.rows() * cell
                && m.get((y - margin) / cell, (x - margin) / cell)
        })
    }

    #[test]
    fn samples_rendered_matrix() {
        let m = BitMatrix::parse("1100\n0110\n1001\n0101\n").unwrap();
        let img = render(&m, 5, 5);
        let geom = GridGeometry::new(4, 4, 5.0).unwrap();
        assert_eq!(sample_lattice(&img, &geom).unwrap(), m);
    }

    #[test]
    fn anchor_only() {
        let m = BitMatrix::parse("1000\n0000\n0000\n0000\n").unwrap();
        let img = render(&m, 6, 4);
        let got = sample_lattice(&img, &GridGeometry::new(4, 4, 6.0).unwrap()).unwrap();
        assert_eq!(got.popcount(), 1);
    }

    #[test]
    fn no_anchor() {
        let img = BinaryImage::filled(20, 20, false);
        assert!(matches!(
            sample_lattice(&img, &GridGeometry::new(4, 4, 5.0).unwrap()),
            Err(DecodeError::NoAnchorContour)
        ));
    }
}
