//! Thermal recording text format:
//!
//! ```text
//! rows,<R>,cols,<C>
//! t,<seconds>
//! <R lines of C comma-separated °C values>
//!
//! t,<seconds>
//! ...
//! ```
//!
//! Values are written with three decimals; frames are separated by one blank line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::imaging::GrayImage;

use super::{ThermalError, ThermalFrame, ThermalRecording};

pub fn format_thermal_csv(rec: &ThermalRecording) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rows,{},cols,{}", rec.rows(), rec.cols());
    for (n, f) in rec.frames.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "t,{:.3}", f.t);
        for row in f.image.data.chunks(f.image.width) {
            for (c, v) in row.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                // Avoid "-0.000".
                let v = if v.abs() < 5e-4 { 0.0 } else { *v };
                let _ = write!(out, "{v:.3}");
            }
            out.push('\n');
        }
    }
    out
}

pub fn parse_thermal_csv(text: &str) -> Result<ThermalRecording, ThermalError> {
    let err = |line: usize, message: String| ThermalError::Format { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split(',').collect();
    let (rows, cols) = match fields.as_slice() {
        ["rows", r, "cols", c] => {
            let r: usize = r.trim().parse().map_err(|_| err(ln, format!("bad row count `{r}`")))?;
            let c: usize = c.trim().parse().map_err(|_| err(ln, format!("bad column count `{c}`")))?;
            if r == 0 || c == 0 {
                return Err(err(ln, "zero-sized frames".into()));
            }
            (r, c)
        }
        _ => return Err(err(ln, "expected `rows,<R>,cols,<C>`".into())),
    };

    let mut frames: Vec<ThermalFrame> = Vec::new();
    let mut expect_blank = false;
    while let Some((ln, line)) = lines.next() {
        if line.is_empty() {
            if !expect_blank {
                return Err(err(ln, "empty frame block".into()));
            }
            expect_blank = false;
            continue;
        }
        if expect_blank {
            return Err(err(ln, "frames must be separated by a blank line".into()));
        }
        let t = match line.split_once(',') {
            Some(("t", v)) => v.trim().parse::<f64>().map_err(|_| err(ln, format!("bad timestamp `{v}`")))?,
            _ => return Err(err(ln, "expected `t,<seconds>`".into())),
        };
        if !t.is_finite() {
            return Err(err(ln, "non-finite timestamp".into()));
        }
        if let Some(prev) = frames.last() {
            if !(t > prev.t) {
                return Err(err(ln, format!("timestamp {t} does not increase past {}", prev.t)));
            }
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (rl, row) = lines
                .next()
                .ok_or_else(|| err(ln + r + 1, format!("frame ends after {r} of {rows} rows")))?;
            if row.is_empty() {
                return Err(err(rl, format!("frame has {r} of {rows} rows")));
            }
            let before = data.len();
            for cell in row.split(',') {
                let v: f64 = cell.trim().parse().map_err(|_| err(rl, format!("bad temperature `{cell}`")))?;
                if !v.is_finite() {
                    return Err(err(rl, "non-finite temperature".into()));
                }
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(err(rl, format!("row has {} values, expected {cols}", data.len() - before)));
            }
        }
        frames.push(ThermalFrame {
            t,
            image: GrayImage {
                width: cols,
                height: rows,
                data,
            },
        });
        expect_blank = true;
    }
    if frames.is_empty() {
        return Err(err(ln + 1, "no frames".into()));
    }
    Ok(ThermalRecording { frames })
}

pub fn write_thermal_csv(rec: &ThermalRecording, path: &Path) -> Result<(), ThermalError> {
    rec.validate()?;
    fs::write(path, format_thermal_csv(rec)).map_err(|e| ThermalError::Io(path.display().to_string(), e))
}

pub fn read_thermal_csv(path: &Path) -> Result<ThermalRecording, ThermalError> {
    let text = fs::read_to_string(path).map_err(|e| ThermalError::Io(path.display().to_string(), e))?;
    parse_thermal_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec() -> ThermalRecording {
        let frames = (0..3)
            .map(|k| ThermalFrame {
                t: k as f64 / 6.0,
                image: GrayImage::from_fn(4, 2, |x, y| 27.0 + 0.123_456 * (x + 3 * y + k) as f64),
            })
            .collect();
        ThermalRecording::new(frames).unwrap()
    }

    #[test]
    fn roundtrip_within_precision() {
        let r = rec();
        let text = format_thermal_csv(&r);
        assert!(text.starts_with("rows,2,cols,4\nt,0.000\n"));
        let back = parse_thermal_csv(&text).unwrap();
        assert_eq!(back.frames.len(), 3);
        for (a, b) in r.frames.iter().zip(&back.frames) {
            assert!((a.t - b.t).abs() <= 5e-4);
            for (x, y) in a.image.data.iter().zip(&b.image.data) {
                assert!((x - y).abs() <= 5e-4 + 1e-12);
            }
        }
        assert_eq!(format_thermal_csv(&back), text);
    }

    #[test]
    fn decreasing_timestamp_reports_line() {
        let text = "rows,1,cols,2\nt,1.000\n1,2\n\nt,0.500\n1,2\n";
        match parse_thermal_csv(text) {
            Err(ThermalError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_frame_block() {
        let text = "rows,1,cols,2\nt,0.000\n1,2\n\n\nt,1.000\n1,2\n";
        assert!(matches!(parse_thermal_csv(text), Err(ThermalError::Format { line: 5, .. })));
        let text = "rows,2,cols,2\nt,0.000\n\n";
        assert!(matches!(parse_thermal_csv(text), Err(ThermalError::Format { line: 3, .. })));
    }

    #[test]
    fn short_row() {
        let text = "rows,1,cols,3\nt,0.000\n1,2\n";
        assert!(matches!(parse_thermal_csv(text), Err(ThermalError::Format { line: 3, .. })));
    }
}
