use super::ImagingError;

/// Row-major raster; row 0 is the top of the view.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

/// Real-valued intensities (temperatures, reflectances).
pub type GrayImage = Image<f64>;
/// 8-bit intensities.
pub type Gray8 = Image<u8>;
/// Foreground mask.
pub type BinaryImage = Image<bool>;

impl<T: Copy> Image<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(ImagingError::BadDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Inclusive rectangle `[x0, x1] × [y0, y1]`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self::from_fn(x1 - x0 + 1, y1 - y0 + 1, |x, y| self.get(x0 + x, y0 + y))
    }
}

impl GrayImage {
    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn check_finite(&self) -> Result<(), ImagingError> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(ImagingError::NonFinite)
        }
    }
}

impl BinaryImage {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Binary PGM (P5) for debugging pipeline stages.
pub fn write_pgm(img: &Gray8) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crop_is_inclusive() {
        let img = Image::from_fn(20, 20, |x, y| (x + 100 * y) as f64);
        let c = img.crop(2, 2, 12, 12);
        assert_eq!((c.width, c.height), (11, 11));
        assert_eq!(c.get(0, 0), 202.0);
    }

    #[test]
    fn pgm_header() {
        let img = Gray8::filled(3, 2, 7);
        let bytes = write_pgm(&img);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 6);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(GrayImage::new(2, 2, vec![0.0; 3]).is_err());
    }
}
