//! Checks the published decodability thresholds of each imaging method
//! against simulated sweep outcomes.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::geometry::Color;

use super::{Axis, AxisValue, HarnessError, Method, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorConstraint {
    Any,
    NonBlack,
}

impl ColorConstraint {
    pub fn allows(self, c: Color) -> bool {
        match self {
            Self::Any => true,
            Self::NonBlack => c != Color::Black,
        }
    }
}

/// Decodability envelope of one imaging method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidelineRow {
    pub method: Method,
    /// Smallest readable bit size, mm per pixel.
    pub min_density_mm: f64,
    pub max_depth_mm: f64,
    /// `None`: any infill.
    pub max_infill: Option<f64>,
    pub color: ColorConstraint,
    /// Readable right after the stimulus, at every contact temperature.
    pub instant: bool,
}

impl GuidelineRow {
    pub const THERMAL: Self = Self {
        method: Method::Thermal,
        min_density_mm: 5.0,
        max_depth_mm: 1.0,
        max_infill: Some(0.20),
        color: ColorConstraint::Any,
        instant: true,
    };

    pub const NIR: Self = Self {
        method: Method::Nir,
        min_density_mm: 3.0,
        max_depth_mm: 3.0,
        max_infill: None,
        color: ColorConstraint::NonBlack,
        instant: false,
    };

    pub fn table() -> [Self; 2] {
        [Self::THERMAL, Self::NIR]
    }

    /// Axes whose outcomes this row predicts.
    pub fn axes(&self) -> Vec<Axis> {
        let mut axes = vec![Axis::DensityX, Axis::DepthD, Axis::InfillFraction, Axis::Color];
        if self.instant {
            axes.push(Axis::ContactTemp);
        }
        axes
    }

    /// Whether the row says a design at this axis value decodes.
    pub fn expects_decode(&self, axis: Axis, value: AxisValue) -> bool {
        const EPS: f64 = 1e-9;
        match (axis, value) {
            (Axis::DensityX, AxisValue::Number(x)) => x >= self.min_density_mm - EPS,
            (Axis::DepthD, AxisValue::Number(d)) => d <= self.max_depth_mm + EPS,
            (Axis::InfillFraction, AxisValue::Number(f)) => self.max_infill.map_or(true, |m| f <= m + EPS),
            (Axis::Color, AxisValue::Color(c)) => self.color.allows(c),
            (Axis::ContactTemp, _) => self.instant,
            _ => false,
        }
    }

    pub fn threshold(&self, axis: Axis) -> String {
        match axis {
            Axis::DensityX => format!("X >= {} mm", self.min_density_mm),
            Axis::DepthD => format!("d <= {} mm", self.max_depth_mm),
            Axis::InfillFraction => match self.max_infill {
                Some(m) => format!("infill <= {m}"),
                None => "any infill".into(),
            },
            Axis::Color => match self.color {
                ColorConstraint::Any => "any color".into(),
                ColorConstraint::NonBlack => "non-black".into(),
            },
            Axis::ContactTemp => "instant at every contact temperature".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidelineCheck {
    pub method: Method,
    pub axis: Axis,
    pub threshold: String,
    /// Values that decoded perfectly on every seed, and those that did not.
    pub decoded: Vec<AxisValue>,
    pub failed: Vec<AxisValue>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidelineReport {
    pub checks: Vec<GuidelineCheck>,
}

impl GuidelineReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for GuidelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[AxisValue]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            }
        };
        for c in &self.checks {
            let mut line = String::new();
            let _ = write!(
                line,
                "{:<4} {:<7} {:<16} {:<38} decodes: {:<24} fails: {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.method,
                c.axis,
                c.threshold,
                list(&c.decoded),
                list(&c.failed)
            );
            writeln!(f, "{}", line.trim_end())?;
        }
        write!(f, "{}", if self.passed() { "all guidelines hold" } else { "guideline violations found" })
    }
}

/// A sweep point decodes when every seed reaches accuracy 1.0.
fn point_outcomes(records: &[RunRecord], method: Method, axis: Axis) -> Vec<(AxisValue, bool)> {
    let mut out: Vec<(AxisValue, bool)> = Vec::new();
    for r in records.iter().filter(|r| r.method == method && r.axis == axis) {
        let ok = r.accuracy >= 1.0;
        match out.iter_mut().find(|e| e.0 == r.value) {
            Some(e) => e.1 &= ok,
            None => out.push((r.value, ok)),
        }
    }
    out
}

/// Compares every row of the table with the recorded outcomes. Each check
/// passes when all tested values decode exactly where the row says they do.
pub fn check_guidelines(records: &[RunRecord], rows: &[GuidelineRow]) -> Result<GuidelineReport, HarnessError> {
    let mut checks = Vec::new();
    for row in rows {
        for axis in row.axes() {
            let outcomes = point_outcomes(records, row.method, axis);
            if outcomes.is_empty() {
                return Err(HarnessError::IncompleteCoverage {
                    method: row.method,
                    axis,
                });
            }
            let pass = outcomes.iter().all(|&(v, ok)| ok == row.expects_decode(axis, v));
            let pick = |want: bool| outcomes.iter().filter(|e| e.1 == want).map(|e| e.0).collect();
            checks.push(GuidelineCheck {
                method: row.method,
                axis,
                threshold: row.threshold(axis),
                decoded: pick(true),
                failed: pick(false),
                pass,
            });
        }
    }
    Ok(GuidelineReport { checks })
}
