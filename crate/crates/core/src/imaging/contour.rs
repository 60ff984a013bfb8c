//! Suzuki–Abe border following over 8-connected foreground.

use super::{BinaryImage, Image, ImagingError};

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BBox {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }
}

/// Outer border of one 8-connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    /// Border pixels `(x, y)` in tracing order, starting at the component's
    /// first pixel in row-major order.
    pub points: Vec<(usize, usize)>,
    /// `(x, y)` in pixel coordinates.
    pub centroid: (f64, f64),
    /// Pixel area enclosed by the border, holes included.
    pub area: f64,
    pub bbox: BBox,
}

// Neighbour offsets (dy, dx), counterclockwise on screen starting east.
const DIRS: [(isize, isize); 8] = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];

fn dir_of(from: (usize, usize), to: (usize, usize)) -> usize {
    let d = (to.0 as isize - from.0 as isize, to.1 as isize - from.1 as isize);
    DIRS.iter().position(|&o| o == d).expect("neighbouring pixels")
}

fn step(p: (usize, usize), d: usize) -> (usize, usize) {
    ((p.0 as isize + DIRS[d].0) as usize, (p.1 as isize + DIRS[d].1) as usize)
}

/// Returns the outer borders of all components in raster order of their first
/// pixel. The count equals the number of 8-connected components.
pub fn find_contours(bin: &BinaryImage) -> Vec<Contour> {
    // Zero-padded label image: 0 background, 1 unvisited foreground, ±NBD borders.
    let (w, h) = (bin.width + 2, bin.height + 2);
    let mut f = vec![0i32; w * h];
    for y in 0..bin.height {
        for x in 0..bin.width {
            if bin.get(x, y) {
                f[(y + 1) * w + x + 1] = 1;
            }
        }
    }
    let at = |p: (usize, usize)| p.0 * w + p.1;
    let mut nbd = 1;
    let mut out = Vec::new();
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let here = (i, j);
            let v = f[at(here)];
            let (outer, from) = if v == 1 && f[at((i, j - 1))] == 0 {
                (true, (i, j - 1))
            } else if v >= 1 && f[at((i, j + 1))] == 0 {
                (false, (i, j + 1))
            } else {
                continue;
            };
            nbd += 1;
            let mut points = vec![here];
            // Clockwise search around the start for the first non-zero pixel.
            let d0 = dir_of(here, from);
            let first = (0..8).map(|k| (d0 + 8 - k) % 8).find(|&d| f[at(step(here, d))] != 0);
            match first {
                None => f[at(here)] = -nbd,
                Some(d1) => {
                    let p1 = step(here, d1);
                    let (mut p2, mut p3) = (p1, here);
                    loop {
                        // Counterclockwise search around p3, after p2.
                        let d2 = dir_of(p3, p2);
                        let mut east_zero = false;
                        let mut p4 = p3;
                        for k in 1..=8 {
                            let d = (d2 + k) % 8;
                            let q = step(p3, d);
                            if f[at(q)] != 0 {
                                p4 = q;
                                break;
                            }
                            if d == 0 {
                                east_zero = true;
                            }
                        }
                        if east_zero {
                            f[at(p3)] = -nbd;
                        } else if f[at(p3)] == 1 {
                            f[at(p3)] = nbd;
                        }
                        if p4 == here && p3 == p1 {
                            break;
                        }
                        p2 = p3;
                        p3 = p4;
                        points.push(p3);
                    }
                }
            }
            if outer {
                out.push(summarize(points));
            }
        }
    }
    out
}

fn summarize(padded: Vec<(usize, usize)>) -> Contour {
    let points: Vec<(usize, usize)> = padded.iter().map(|&(y, x)| (x - 1, y - 1)).collect();
    let mut bbox = BBox {
        x0: usize::MAX,
        y0: usize::MAX,
        x1: 0,
        y1: 0,
    };
    for &(x, y) in &points {
        bbox.x0 = bbox.x0.min(x);
        bbox.y0 = bbox.y0.min(y);
        bbox.x1 = bbox.x1.max(x);
        bbox.y1 = bbox.y1.max(y);
    }
    let n = points.len();
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    if n > 1 {
        for k in 0..n {
            let (x0, y0) = (points[k].0 as f64, points[k].1 as f64);
            let (x1, y1) = (points[(k + 1) % n].0 as f64, points[(k + 1) % n].1 as f64);
            let c = x0 * y1 - x1 * y0;
            a2 += c;
            cx += (x0 + x1) * c;
            cy += (y0 + y1) * c;
        }
    }
    // Pick's theorem: enclosed lattice points = A + B/2 + 1, one step per
    // boundary point.
    let steps = if n > 1 { n } else { 0 };
    let area = 0.5 * a2.abs() + 0.5 * steps as f64 + 1.0;
    let centroid = if a2.abs() > 1e-9 {
        (cx / (3.0 * a2), cy / (3.0 * a2))
    } else {
        let sx: f64 = points.iter().map(|p| p.0 as f64).sum();
        let sy: f64 = points.iter().map(|p| p.1 as f64).sum();
        (sx / n as f64, sy / n as f64)
    };
    let centroid = (
        centroid.0.clamp(bbox.x0 as f64, bbox.x1 as f64),
        centroid.1.clamp(bbox.y0 as f64, bbox.y1 as f64),
    );
    Contour {
        points,
        centroid,
        area,
        bbox,
    }
}

/// Crops `img` to the bbox of the largest-area contour; ties go to the
/// earlier contour.
pub fn crop_largest<T: Copy>(img: &Image<T>, contours: &[Contour]) -> Result<Image<T>, ImagingError> {
    let mut best: Option<&Contour> = None;
    for c in contours {
        if best.map_or(true, |b| c.area > b.area) {
            best = Some(c);
        }
    }
    let b = best.ok_or(ImagingError::NoContours)?.bbox;
    Ok(img.crop(b.x0, b.y0, b.x1, b.y1))
}
