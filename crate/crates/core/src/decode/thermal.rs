use rayon::prelude::*;

use crate::imaging::{
    binarize, crop_largest, find_contours, gaussian_blur5, normalize_u8, otsu_threshold, BinaryImage, Gray8,
    GrayImage,
};
use crate::payload::{matrix_accuracy, BitMatrix};
use crate::thermsim::ThermalRecording;

use super::{sample_lattice, AccuracySeries, DecodeError, GridGeometry, Polarity};

/// Fraction of the object crop trimmed from each side before the second
/// binarization. The object rim is cooled by the side walls and blurred with
/// the background; left in, it outweighs the pattern in the second threshold.
pub const CROP_INSET: f64 = 0.1;

fn inset(img: &Gray8, frac: f64) -> Gray8 {
    let dx = (img.width as f64 * frac).round() as usize;
    let dy = (img.height as f64 * frac).round() as usize;
    if 2 * dx + 1 > img.width || 2 * dy + 1 > img.height {
        return img.clone();
    }
    img.crop(dx, dy, img.width - 1 - dx, img.height - 1 - dy)
}

/// Intermediate images of the thermal pipeline, for debugging and reports.
#[derive(Debug, Clone)]
pub struct ThermalStages {
    pub normalized: Gray8,
    pub object_mask: BinaryImage,
    pub crop: Gray8,
    pub bits_mask: BinaryImage,
    pub matrix: BitMatrix,
}

fn border_pixels<T: Copy>(img: &crate::imaging::Image<T>) -> impl Iterator<Item = T> + '_ {
    let (w, h) = (img.width, img.height);
    (0..w * h)
        .filter(move |&i| {
            let (x, y) = (i % w, i / w);
            x == 0 || y == 0 || x + 1 == w || y + 1 == h
        })
        .map(move |i| img.data[i])
}

fn class_mean(img: &Gray8, mask: &BinaryImage, class: bool) -> Option<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for (&v, &m) in img.data.iter().zip(&mask.data) {
        if m == class {
            s += v as f64;
            n += 1;
        }
    }
    (n > 0).then(|| s / n as f64)
}

/// Blur, normalize, binarize, isolate the object, binarize again inside the
/// object crop, then sample the anchored lattice.
pub fn decode_thermal_stages(frame: &GrayImage, geom: &GridGeometry) -> Result<ThermalStages, DecodeError> {
    let blurred = gaussian_blur5(frame)?;
    let normalized = normalize_u8(&blurred);
    let t1 = otsu_threshold(&normalized).map_err(|_| DecodeError::NoObjectContour)?;
    let bin1 = binarize(&normalized, t1);

    // The object is whichever class does not dominate the frame border.
    let (on, total) = border_pixels(&bin1).fold((0, 0), |(a, n), b| (a + b as usize, n + 1));
    let object_is_fg = 2 * on <= total;
    let object_mask = bin1.map(|b| b == object_is_fg);
    let objects = find_contours(&object_mask);
    if objects.is_empty() {
        return Err(DecodeError::NoObjectContour);
    }
    let crop = inset(&crop_largest(&normalized, &objects)?, CROP_INSET);
    let t2 = otsu_threshold(&crop).map_err(|_| DecodeError::NoAnchorContour)?;
    let bin2 = binarize(&crop, t2);

    let ones_bright = match geom.polarity {
        Polarity::Bright => true,
        Polarity::Dark => false,
        Polarity::Auto => {
            let background = {
                let (s, n) = border_pixels(&normalized).fold((0.0, 0usize), |(s, n), v| (s + v as f64, n + 1));
                s / n as f64
            };
            match (class_mean(&crop, &bin2, true), class_mean(&crop, &bin2, false)) {
                (Some(hi), Some(lo)) => (hi - background).abs() <= (lo - background).abs(),
                _ => true,
            }
        }
    };
    let bits_mask = bin2.map(|b| b == ones_bright);
    let matrix = sample_lattice(&bits_mask, geom)?;
    Ok(ThermalStages {
        normalized,
        object_mask,
        crop,
        bits_mask,
        matrix,
    })
}

pub fn decode_thermal_frame(frame: &GrayImage, geom: &GridGeometry) -> Result<BitMatrix, DecodeError> {
    decode_thermal_stages(frame, geom).map(|s| s.matrix)
}

/// Decodes every frame (failures score 0) and flags outliers.
pub fn decode_thermal_recording(
    rec: &ThermalRecording,
    geom: &GridGeometry,
    truth: &BitMatrix,
) -> Result<AccuracySeries, DecodeError> {
    if rec.frames.is_empty() {
        return Err(DecodeError::EmptyRecording);
    }
    let acc: Vec<(f64, f64)> = rec
        .frames
        .par_iter()
        .map(|f| {
            let a = decode_thermal_frame(&f.image, geom)
                .ok()
                .and_then(|m| matrix_accuracy(&m, truth).ok())
                .unwrap_or(0.0);
            (f.t, a)
        })
        .collect();
    Ok(AccuracySeries::with_outliers(acc))
}

/// Spacing for a design of width `object_width_mm` imaged with the object
/// spanning `crop_width_px` pixels.
pub fn thermal_spacing(density_x: f64, crop_width_px: usize, object_width_mm: f64) -> f64 {
    density_x * crop_width_px as f64 / object_width_mm
}
