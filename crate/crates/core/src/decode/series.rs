use std::fmt::Write as _;

use super::DecodeError;

pub const OUTLIER_QUANTILE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyPoint {
    pub t: f64,
    pub accuracy: f64,
    pub flagged: bool,
}

/// Per-frame accuracy with outlier flags. Flagged frames are kept.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracySeries {
    pub points: Vec<AccuracyPoint>,
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

impl AccuracySeries {
    /// Flags every point whose accuracy is strictly below the 0.2 quantile.
    pub fn with_outliers(points: Vec<(f64, f64)>) -> Self {
        if points.is_empty() {
            return Self::default();
        }
        let acc: Vec<f64> = points.iter().map(|p| p.1).collect();
        let q = quantile(&acc, OUTLIER_QUANTILE);
        Self {
            points: points
                .into_iter()
                .map(|(t, accuracy)| AccuracyPoint {
                    t,
                    accuracy,
                    flagged: accuracy < q,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First non-flagged point at or after `t`.
    pub fn first_at_or_after(&self, t: f64) -> Option<&AccuracyPoint> {
        self.points.iter().find(|p| !p.flagged && p.t >= t - 1e-9)
    }

    /// `t,accuracy,flagged` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,accuracy,flagged\n");
        for p in &self.points {
            let _ = writeln!(out, "{:.3},{:.4},{}", p.t, p.accuracy, p.flagged as u8);
        }
        out
    }
}

fn median_interval(series: &AccuracySeries) -> f64 {
    let d: Vec<f64> = series.points.windows(2).map(|w| w[1].t - w[0].t).collect();
    if d.is_empty() {
        0.0
    } else {
        quantile(&d, 0.5)
    }
}

/// Duration of error-free decoding after contact: the run of perfect,
/// non-flagged frames starting at the first non-flagged frame at or after
/// `contact_end`. Flagged frames inside the run neither break nor end it.
/// Each frame accounts for one median frame interval.
pub fn reading_window(series: &AccuracySeries, contact_end: f64) -> Result<f64, DecodeError> {
    if series.is_empty() {
        return Err(DecodeError::EmptyRecording);
    }
    let Some(start) = series.points.iter().position(|p| !p.flagged && p.t >= contact_end - 1e-9) else {
        return Ok(0.0);
    };
    if series.points[start].accuracy < 1.0 {
        return Ok(0.0);
    }
    let mut last = start;
    for (i, p) in series.points.iter().enumerate().skip(start + 1) {
        if p.flagged {
            continue;
        }
        if p.accuracy < 1.0 {
            break;
        }
        last = i;
    }
    Ok(series.points[last].t - series.points[start].t + median_interval(series))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(acc: &[f64], fps: f64) -> AccuracySeries {
        AccuracySeries::with_outliers(acc.iter().enumerate().map(|(k, &a)| (k as f64 / fps, a)).collect())
    }

    #[test]
    fn seventy_two_frames_is_twelve_seconds() {
        let mut acc = vec![1.0; 72];
        acc.extend([0.5; 10]);
        let s = AccuracySeries {
            points: acc
                .iter()
                .enumerate()
                .map(|(k, &a)| AccuracyPoint {
                    t: k as f64 / 6.0,
                    accuracy: a,
                    flagged: false,
                })
                .collect(),
        };
        assert!((reading_window(&s, 0.0).unwrap() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn imperfect_start_is_zero() {
        let mut acc = vec![0.9375];
        acc.extend([1.0; 4]);
        acc.extend([0.5; 5]);
        let s = series(&acc, 6.0);
        assert!(!s.points[0].flagged);
        assert_eq!(reading_window(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quantile_flags_corrupted_frames() {
        let acc = [1.0, 1.0, 0.5, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0, 1.0];
        let s = series(&acc, 6.0);
        assert!((quantile(&acc, 0.2) - 0.9).abs() < 1e-12);
        let flagged: Vec<usize> = s.points.iter().enumerate().filter(|p| p.1.flagged).map(|p| p.0).collect();
        assert_eq!(flagged, [2, 6]);
        // The run continues across both flagged frames.
        assert!((reading_window(&s, 0.0).unwrap() - 10.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn all_perfect_nothing_flagged() {
        let s = series(&[1.0; 8], 6.0);
        assert!(s.points.iter().all(|p| !p.flagged));
    }

    #[test]
    fn csv_header() {
        let s = series(&[1.0, 0.5], 2.0);
        assert_eq!(s.to_csv(), "t,accuracy,flagged\n0.000,1.0000,0\n0.500,0.5000,1\n");
    }
}
