use super::{BinaryImage, Gray8, ImagingError};

pub fn histogram(img: &Gray8) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in &img.data {
        h[v as usize] += 1;
    }
    h
}

/// Between-class variance at threshold `t`, scaled by `N²`, as the exact
/// fraction `(s0·w1 − s1·w0)² / (w0·w1)`.
fn score(w0: u64, s0: u64, n: u64, s: u64) -> (i128, i128) {
    let w1 = n - w0;
    if w0 == 0 || w1 == 0 {
        return (0, 1);
    }
    let diff = s0 as i128 * w1 as i128 - (s - s0) as i128 * w0 as i128;
    (diff * diff, w0 as i128 * w1 as i128)
}

/// `a/b > c/d` for positive denominators, exact when it fits in i128.
fn greater(a: (i128, i128), c: (i128, i128)) -> bool {
    match (a.0.checked_mul(c.1), c.0.checked_mul(a.1)) {
        (Some(l), Some(r)) => l > r,
        _ => a.0 as f64 / a.1 as f64 > c.0 as f64 / c.1 as f64,
    }
}

/// Threshold in `0..=254` maximizing between-class variance of the 256-bin
/// histogram; the smallest maximizer wins. Foreground is `value > t`.
pub fn otsu_threshold(img: &Gray8) -> Result<u8, ImagingError> {
    let h = histogram(img);
    if h.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(ImagingError::DegenerateHistogram);
    }
    let n: u64 = h.iter().sum();
    let s: u64 = h.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();
    let (mut w0, mut s0) = (0u64, 0u64);
    let mut best = (0u8, (-1i128, 1i128));
    for t in 0..255usize {
        w0 += h[t];
        s0 += t as u64 * h[t];
        let sc = score(w0, s0, n, s);
        if greater(sc, best.1) {
            best = (t as u8, sc);
        }
    }
    Ok(best.0)
}

pub fn binarize(img: &Gray8, t: u8) -> BinaryImage {
    img.map(|v| v > t)
}
