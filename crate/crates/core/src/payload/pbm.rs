//! Portable bitmap (P1 ASCII / P4 binary) reader.

use super::PayloadError;

/// Monochrome glyph; set pixels become extruded material.
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphBitmap {
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the top.
    pub pixels: Vec<bool>,
    /// Millimetres per pixel.
    pub scale: f64,
}

impl GlyphBitmap {
    pub fn new(width: usize, height: usize, pixels: Vec<bool>, scale: f64) -> Result<Self, PayloadError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(PayloadError::DimensionMismatch {
                expected: (height, width),
                found: pixels.len(),
            });
        }
        if !pixels.iter().any(|&p| p) {
            return Err(PayloadError::BlankGlyph);
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(PayloadError::BadScale(scale));
        }
        Ok(Self {
            width,
            height,
            pixels,
            scale,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    pub fn set_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }
}

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    /// Offset of the first raster byte.
    data_start: usize,
}

fn skip_ws_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_uint(bytes: &[u8], pos: usize) -> Result<(usize, usize), PayloadError> {
    let start = skip_ws_and_comments(bytes, pos);
    let end = bytes[start..]
        .iter()
        .position(|b| !b.is_ascii_digit())
        .map_or(bytes.len(), |n| start + n);
    let text = std::str::from_utf8(&bytes[start..end]).unwrap_or("");
    let value = text
        .parse::<usize>()
        .map_err(|_| PayloadError::BadPbmHeader(format!("expected a dimension at byte {start}")))?;
    Ok((value, end))
}

fn parse_header(bytes: &[u8]) -> Result<Header, PayloadError> {
    let binary = match bytes.get(..2) {
        Some(b"P1") => false,
        Some(b"P4") => true,
        _ => return Err(PayloadError::BadMagic),
    };
    let (width, pos) = read_uint(bytes, 2)?;
    let (height, pos) = read_uint(bytes, pos)?;
    if width == 0 || height == 0 {
        return Err(PayloadError::BadPbmHeader("zero dimension".into()));
    }
    // Exactly one whitespace byte separates the header from binary data.
    let data_start = if binary { pos + 1 } else { pos };
    Ok(Header {
        binary,
        width,
        height,
        data_start,
    })
}

/// Parses a P1 or P4 bitmap. `scale` sets millimetres per pixel.
pub fn load_pbm(bytes: &[u8], scale: f64) -> Result<GlyphBitmap, PayloadError> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let mut pixels = Vec::with_capacity(n);
    if h.binary {
        let stride = h.width.div_ceil(8);
        let data = bytes.get(h.data_start..).unwrap_or(&[]);
        if data.len() < stride * h.height {
            return Err(PayloadError::DimensionMismatch {
                expected: (h.height, h.width),
                found: data.len() / stride * h.width,
            });
        }
        for row in data.chunks_exact(stride).take(h.height) {
            for x in 0..h.width {
                pixels.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
            }
        }
    } else {
        let mut pos = h.data_start;
        while pixels.len() < n {
            pos = skip_ws_and_comments(bytes, pos);
            match bytes.get(pos) {
                Some(b'0') => pixels.push(false),
                Some(b'1') => pixels.push(true),
                Some(&other) => {
                    return Err(PayloadError::BadPbmHeader(format!(
                        "unexpected byte {other:#04x} in P1 raster"
                    )))
                }
                None => break,
            }
            pos += 1;
        }
        if pixels.len() != n {
            return Err(PayloadError::DimensionMismatch {
                expected: (h.height, h.width),
                found: pixels.len(),
            });
        }
    }
    GlyphBitmap::new(h.width, h.height, pixels, scale)
}
