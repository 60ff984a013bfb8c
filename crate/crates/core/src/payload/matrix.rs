use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PayloadError;

/// Row-major bit grid. Row 0 is the top row when the face is viewed from
/// above; bit (0, 0) is the anchor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    /// A payload: anchor bit set and at least one zero bit.
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self, PayloadError> {
        let m = Self::raw(rows, cols, bits)?;
        if !m.get(0, 0) {
            return Err(PayloadError::AnchorNotSet);
        }
        if m.popcount() == rows * cols {
            return Err(PayloadError::NoZeroBit);
        }
        Ok(m)
    }

    /// Any grid of bits, e.g. a decoder's output, with no payload invariants.
    pub fn raw(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self, PayloadError> {
        if rows == 0 || cols == 0 || bits.len() != rows * cols {
            return Err(PayloadError::DimensionMismatch {
                expected: (rows, cols),
                found: bits.len(),
            });
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.bits[r * self.cols + c] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn popcount(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True when the payload invariants (anchor set, some zero) hold.
    pub fn is_payload(&self) -> bool {
        self.get(0, 0) && self.popcount() < self.bits.len()
    }

    /// Reads the matrix file format: one line per row, `0`/`1` characters.
    pub fn parse(text: &str) -> Result<Self, PayloadError> {
        let mut cols = None;
        let mut bits = Vec::new();
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let row: Vec<bool> = line
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(PayloadError::BadMatrixFile {
                        line: lineno + 1,
                        message: format!("unexpected character `{other}`"),
                    }),
                })
                .collect::<Result<_, _>>()?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(PayloadError::BadMatrixFile {
                        line: lineno + 1,
                        message: format!("row has {} bits, expected {c}", row.len()),
                    })
                }
                _ => {}
            }
            bits.extend(row);
            rows += 1;
        }
        let cols = cols.ok_or(PayloadError::BadMatrixFile {
            line: 1,
            message: "no rows".into(),
        })?;
        Self::raw(rows, cols, bits)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = PayloadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Random payload with exactly `ones` set bits, the anchor always among them.
/// The remaining set bits are drawn uniformly without replacement.
pub fn random_matrix(rows: usize, cols: usize, ones: usize, seed: u64) -> Result<BitMatrix, PayloadError> {
    let n = rows * cols;
    if rows == 0 || cols == 0 || ones < 1 || ones >= n {
        return Err(PayloadError::OnesOutOfRange { ones, cells: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![false; n];
    bits[0] = true;
    for i in sample(&mut rng, n - 1, ones - 1) {
        bits[i + 1] = true;
    }
    BitMatrix::new(rows, cols, bits)
}

/// Fraction of positions where `decoded` agrees with `truth`.
pub fn matrix_accuracy(decoded: &BitMatrix, truth: &BitMatrix) -> Result<f64, PayloadError> {
    if decoded.rows != truth.rows || decoded.cols != truth.cols {
        return Err(PayloadError::DimensionMismatch {
            expected: (truth.rows, truth.cols),
            found: decoded.bits.len(),
        });
    }
    let same = decoded.bits.iter().zip(&truth.bits).filter(|(a, b)| a == b).count();
    Ok(same as f64 / truth.bits.len() as f64)
}
