use super::{BinaryImage, Gray8, GrayImage, ImagingError};

pub const BLUR_SIGMA: f64 = 1.1;

/// Normalized 5-tap Gaussian weights for offsets -2..=2.
pub fn gaussian_kernel5(sigma: f64) -> [f64; 5] {
    let mut w = [0.0; 5];
    for (i, wi) in w.iter_mut().enumerate() {
        let d = i as f64 - 2.0;
        *wi = (-d * d / (2.0 * sigma * sigma)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Half-sample symmetric reflection (`cba|abc`); valid for offsets up to `n`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let r = if i < 0 {
        -i - 1
    } else if i >= n {
        2 * n - i - 1
    } else {
        i
    };
    r as usize
}

/// Separable 5×5 Gaussian blur, σ = 1.1. The symmetric-reflect border keeps
/// the image mean unchanged.
pub fn gaussian_blur5(img: &GrayImage) -> Result<GrayImage, ImagingError> {
    if img.width < 5 || img.height < 5 {
        return Err(ImagingError::ImageTooSmall {
            width: img.width,
            height: img.height,
        });
    }
    let k = gaussian_kernel5(BLUR_SIGMA);
    let (w, h) = (img.width, img.height);
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &img.data[y * w..(y + 1) * w];
        for x in 0..w {
            tmp[y * w + x] = (0..5)
                .map(|t| k[t] * row[reflect(x as isize + t as isize - 2, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = (0..5)
                .map(|t| k[t] * tmp[reflect(y as isize + t as isize - 2, h) * w + x])
                .sum();
        }
    }
    Ok(GrayImage { width: w, height: h, data: out })
}

/// Affine map of `[min, max]` onto `[0, 255]`, rounding half up. A constant
/// image maps to zeros.
pub fn normalize_u8(img: &GrayImage) -> Gray8 {
    let (lo, hi) = img.min_max();
    if !(hi > lo) {
        return img.map(|_| 0);
    }
    let scale = 255.0 / (hi - lo);
    img.map(|v| ((v - lo) * scale + 0.5).floor().clamp(0.0, 255.0) as u8)
}

/// Pixels strictly above `frac · max` become foreground.
pub fn fixed_threshold(img: &GrayImage, frac: f64) -> Result<BinaryImage, ImagingError> {
    if !(frac > 0.0 && frac < 1.0) {
        return Err(ImagingError::BadFraction(frac));
    }
    let (_, hi) = img.min_max();
    let cut = frac * hi;
    Ok(img.map(|v| v > cut))
}

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    // Keys cubic convolution with a = -0.5.
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * ((2.0 * p[1])
        + (-p[0] + p[2]) * t
        + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2
        + (-p[0] + 3.0 * p[1] - 3.0 * p[2] + p[3]) * t3)
}

/// Resamples a line of `n` samples to `4n`. Out-of-range taps are linear
/// extrapolations so linear signals pass through exactly.
fn upsample_line(src: &[f64], dst: &mut [f64]) {
    let n = src.len();
    let tap = |k: isize| -> f64 {
        if n == 1 {
            return src[0];
        }
        if k < 0 {
            src[0] + k as f64 * (src[1] - src[0])
        } else if k as usize >= n {
            let over = (k - n as isize + 1) as f64;
            src[n - 1] + over * (src[n - 1] - src[n - 2])
        } else {
            src[k as usize]
        }
    };
    for (o, d) in dst.iter_mut().enumerate() {
        let s = ((o as f64 + 0.5) / 4.0 - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = s.floor() as isize;
        let t = s - i0 as f64;
        *d = catmull_rom([tap(i0 - 1), tap(i0), tap(i0 + 1), tap(i0 + 2)], t);
    }
}

/// ×4 bicubic (Catmull-Rom) upsampling, output clamped to the input range.
pub fn upsample4(img: &GrayImage) -> GrayImage {
    let (w, h) = (img.width, img.height);
    let (ow, oh) = (4 * w, 4 * h);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        upsample_line(&img.data[y * w..(y + 1) * w], &mut tmp[y * ow..(y + 1) * ow]);
    }
    let mut out = vec![0.0; ow * oh];
    let mut col = vec![0.0; h];
    let mut res = vec![0.0; oh];
    for x in 0..ow {
        for y in 0..h {
            col[y] = tmp[y * ow + x];
        }
        upsample_line(&col, &mut res);
        for y in 0..oh {
            out[y * ow + x] = res[y];
        }
    }
    let (lo, hi) = img.min_max();
    for v in &mut out {
        *v = v.clamp(lo, hi);
    }
    GrayImage { width: ow, height: oh, data: out }
}
