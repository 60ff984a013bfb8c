//! Parameter sweeps: one embed, simulate and decode run per (method, value,
//! seed), written as CSV plus an SVG summary.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::{decode_nir_cube, decode_thermal_recording, nir_spacing, reading_window, GridGeometry};
use crate::geometry::{Color, EmbedSpec, TriMesh};
use crate::nirsim::simulate_scan;
use crate::payload::{embed_matrix, matrix_accuracy, random_matrix};
use crate::thermsim::{simulate_reading, ThermalScenario};

use super::{HarnessConfig, HarnessError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Thermal,
    Nir,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Thermal => "thermal",
            Self::Nir => "nir",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "thermal" => Ok(Self::Thermal),
            "nir" => Ok(Self::Nir),
            other => Err(format!("unknown imaging method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "depth_d")]
    DepthD,
    #[serde(rename = "density_X")]
    DensityX,
    #[serde(rename = "infill_fraction")]
    InfillFraction,
    #[serde(rename = "contact_temp")]
    ContactTemp,
    #[serde(rename = "color")]
    Color,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::DepthD, Axis::DensityX, Axis::InfillFraction, Axis::ContactTemp, Axis::Color];

    pub fn name(self) -> &'static str {
        match self {
            Self::DepthD => "depth_d",
            Self::DensityX => "density_X",
            Self::InfillFraction => "infill_fraction",
            Self::ContactTemp => "contact_temp",
            Self::Color => "color",
        }
    }

    /// Methods whose reading depends on this axis. Contact temperature only
    /// exists for the thermal reading.
    pub fn methods(self) -> &'static [Method] {
        match self {
            Self::ContactTemp => &[Method::Thermal],
            _ => &[Method::Thermal, Method::Nir],
        }
    }

    /// Parses a comma-separated list of axis values.
    pub fn parse_values(self, list: &str) -> Result<Vec<AxisValue>, HarnessError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.parse_value(s))
            .collect()
    }

    pub fn parse_value(self, s: &str) -> Result<AxisValue, HarnessError> {
        let bad = |m: String| HarnessError::BadValue(format!("{}: {m}", self.name()));
        match self {
            Self::Color => s.parse::<Color>().map(AxisValue::Color).map_err(bad),
            _ => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(AxisValue::Number(v)),
                _ => Err(bad(format!("`{s}` is not a number"))),
            },
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown axis `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValue {
    Number(f64),
    Color(Color),
}

impl AxisValue {
    pub fn number(self) -> Option<f64> {
        match self {
            Self::Number(v) => Some(v),
            Self::Color(_) => None,
        }
    }
}

impl fmt::Display for AxisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Number(v) => write!(f, "{v}"),
            Self::Color(c) => f.write_str(c.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<AxisValue>,
    /// Defaults to every method the axis applies to.
    pub methods: Vec<Method>,
    pub seeds: u64,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<AxisValue>, seeds: u64) -> Result<Self, HarnessError> {
        let spec = Self {
            axis,
            values,
            methods: axis.methods().to_vec(),
            seeds,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::BadValue(format!("{}: no values", self.axis)));
        }
        if self.seeds == 0 {
            return Err(HarnessError::BadValue("seeds must be >= 1".into()));
        }
        for m in &self.methods {
            if !self.axis.methods().contains(m) {
                return Err(HarnessError::BadValue(format!("axis {} does not apply to {m}", self.axis)));
            }
        }
        for v in &self.values {
            if matches!(v, AxisValue::Color(_)) != (self.axis == Axis::Color) {
                return Err(HarnessError::BadValue(format!("{v} is not a {} value", self.axis)));
            }
        }
        Ok(())
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub axis: Axis,
    pub value: AxisValue,
    pub seed: u64,
    /// Thermal: the first frame at or after contact end. NIR: the scan.
    pub accuracy: f64,
    /// Thermal only, s.
    pub window_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config_hash: String,
    pub records: Vec<RunRecord>,
}

fn apply_axis(spec: &mut EmbedSpec, scenario: &mut ThermalScenario, axis: Axis, value: AxisValue) {
    match (axis, value) {
        (Axis::DepthD, AxisValue::Number(v)) => spec.depth_d = v,
        (Axis::DensityX, AxisValue::Number(v)) => spec.density_x = v,
        (Axis::InfillFraction, AxisValue::Number(v)) => spec.infill_fraction = v,
        (Axis::ContactTemp, AxisValue::Number(v)) => scenario.contact_temp = v,
        (Axis::Color, AxisValue::Color(c)) => spec.object_color = c,
        _ => unreachable!("validated sweep spec"),
    }
}

fn object_for(spec: &EmbedSpec) -> TriMesh {
    TriMesh::cuboid([0.0; 3], spec.object_dims)
}

/// Runs a single (method, value, seed) point.
pub fn run_point(
    config: &HarnessConfig,
    method: Method,
    axis: Axis,
    value: AxisValue,
    seed: u64,
) -> Result<RunRecord, HarnessError> {
    let context = format!("{method} {axis}={value} seed {seed}");
    let wrap = |e: Box<dyn std::error::Error + Send + Sync>| HarnessError::Run {
        context: context.clone(),
        source: e,
    };
    let shape = config.payload;
    let truth = random_matrix(shape.rows, shape.cols, shape.ones, seed).map_err(|e| wrap(e.into()))?;
    let (accuracy, window_s) = match method {
        Method::Thermal => {
            let setup = &config.thermal;
            let mut spec = setup.base.clone();
            let mut scenario = ThermalScenario {
                seed,
                ..setup.scenario.clone()
            };
            apply_axis(&mut spec, &mut scenario, axis, value);
            let (grid, _) = embed_matrix(&object_for(&spec), &truth, &spec, setup.pitch_mm).map_err(|e| wrap(e.into()))?;
            let rec = simulate_reading(&grid, &spec, &scenario, &setup.model).map_err(|e| wrap(e.into()))?;
            let geom = GridGeometry::new(shape.rows, shape.cols, spec.density_x / setup.model.camera.pixel_mm)
                .map_err(|e| wrap(e.into()))?;
            let series = decode_thermal_recording(&rec, &geom, &truth).map_err(|e| wrap(e.into()))?;
            let end = scenario.contact_duration;
            let accuracy = series
                .points
                .iter()
                .find(|p| p.t >= end - 1e-9)
                .map_or(0.0, |p| p.accuracy);
            let window = reading_window(&series, end).map_err(|e| wrap(e.into()))?;
            (accuracy, Some(window))
        }
        Method::Nir => {
            let setup = &config.nir;
            let mut spec = setup.base.clone();
            let mut unused = ThermalScenario::default();
            apply_axis(&mut spec, &mut unused, axis, value);
            let (grid, _) =
                embed_matrix(&object_for(&spec), &truth, &spec, setup.model.pitch_mm).map_err(|e| wrap(e.into()))?;
            let scan = setup.scan(seed);
            let cube = simulate_scan(&grid, &spec, &setup.model, &scan).map_err(|e| wrap(e.into()))?;
            let geom = GridGeometry::new(shape.rows, shape.cols, nir_spacing(spec.density_x, scan.step_mm))
                .map_err(|e| wrap(e.into()))?;
            // Undecodable scans score zero.
            let accuracy = decode_nir_cube(&cube, &geom)
                .ok()
                .and_then(|m| matrix_accuracy(&m, &truth).ok())
                .unwrap_or(0.0);
            (accuracy, None)
        }
    };
    Ok(RunRecord {
        method,
        axis,
        value,
        seed,
        accuracy,
        window_s,
    })
}

/// Runs every point of the sweep in parallel; records come back in
/// (method, value, seed) order.
pub fn run_sweep(spec: &SweepSpec, config: &HarnessConfig) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    config.validate()?;
    let jobs: Vec<(Method, AxisValue, u64)> = spec
        .methods
        .iter()
        .flat_map(|&m| spec.values.iter().flat_map(move |&v| (0..spec.seeds).map(move |s| (m, v, s))))
        .collect();
    let records = jobs
        .into_par_iter()
        .map(|(m, v, s)| run_point(config, m, spec.axis, v, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        config_hash: config.hash(),
        records,
    })
}

pub const CSV_HEADER: &str = "method,axis,value,seed,accuracy,window_s";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# config sha256:{}\n{CSV_HEADER}\n", self.config_hash);
        for r in &self.records {
            let window = r.window_s.map(|w| format!("{w:.3}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{:.4},{}",
                r.method, r.axis, r.value, r.seed, r.accuracy, window
            );
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self, HarnessError> {
        let bad = |line: usize, message: String| HarnessError::Format { line, message };
        let mut lines = text.lines().enumerate();
        let config_hash = match lines.next() {
            Some((_, l)) if l.starts_with("# config sha256:") => l["# config sha256:".len()..].trim().to_string(),
            _ => return Err(bad(1, "missing `# config sha256:` line".into())),
        };
        match lines.next() {
            Some((_, l)) if l.trim() == CSV_HEADER => {}
            _ => return Err(bad(2, format!("expected header `{CSV_HEADER}`"))),
        }
        let mut records = Vec::new();
        for (n, line) in lines {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(line_no, format!("expected 6 fields, found {}", f.len())));
            }
            let method: Method = f[0].parse().map_err(|e| bad(line_no, e))?;
            let axis: Axis = f[1].parse().map_err(|e| bad(line_no, e))?;
            let value = axis.parse_value(f[2]).map_err(|e| bad(line_no, e.to_string()))?;
            let seed = f[3].parse().map_err(|_| bad(line_no, format!("bad seed `{}`", f[3])))?;
            let accuracy = f[4].parse().map_err(|_| bad(line_no, format!("bad accuracy `{}`", f[4])))?;
            let window_s = match f[5].trim() {
                "" => None,
                w => Some(w.parse().map_err(|_| bad(line_no, format!("bad window `{w}`")))?),
            };
            records.push(RunRecord {
                method,
                axis,
                value,
                seed,
                accuracy,
                window_s,
            });
        }
        Ok(Self { config_hash, records })
    }

    /// Mean accuracy per (method, value) in first-seen order.
    pub fn summary(&self) -> Vec<(Method, AxisValue, f64)> {
        let mut out: Vec<(Method, AxisValue, f64, usize)> = Vec::new();
        for r in &self.records {
            match out.iter_mut().find(|e| e.0 == r.method && e.1 == r.value) {
                Some(e) => {
                    e.2 += r.accuracy;
                    e.3 += 1;
                }
                None => out.push((r.method, r.value, r.accuracy, 1)),
            }
        }
        out.into_iter().map(|(m, v, s, n)| (m, v, s / n as f64)).collect()
    }

    /// Line plot of mean accuracy against the axis values, one line per
    /// method. Values are spaced evenly in sweep order.
    pub fn to_svg(&self, axis: Axis) -> String {
        const W: f64 = 480.0;
        const H: f64 = 300.0;
        const L: f64 = 60.0;
        const R: f64 = 20.0;
        const T: f64 = 40.0;
        const B: f64 = 50.0;
        let summary = self.summary();
        let mut values: Vec<AxisValue> = Vec::new();
        for (_, v, _) in &summary {
            if !values.contains(v) {
                values.push(*v);
            }
        }
        let x_at = |i: usize| {
            if values.len() <= 1 {
                L + 0.5 * (W - L - R)
            } else {
                L + i as f64 * (W - L - R) / (values.len() - 1) as f64
            }
        };
        let y_at = |a: f64| T + (1.0 - a) * (H - T - B);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, "<desc>config sha256:{}</desc>", self.config_hash);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">accuracy vs {axis}</text>"#,
            W / 2.0
        );
        let _ = writeln!(
            s,
            r#"<path d="M{L} {T} V{} H{}" stroke="black" fill="none"/>"#,
            H - B,
            W - R
        );
        for a in [0.0, 0.5, 1.0] {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{a:.1}</text>"#,
                L - 6.0,
                y_at(a) + 4.0
            );
        }
        for (i, v) in values.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{v}</text>"#,
                x_at(i),
                H - B + 18.0
            );
        }
        for (k, method) in [Method::Thermal, Method::Nir].into_iter().enumerate() {
            let pts: Vec<String> = summary
                .iter()
                .filter(|e| e.0 == method)
                .map(|(_, v, a)| {
                    let i = values.iter().position(|x| x == v).expect("collected above");
                    format!("{:.1},{:.1}", x_at(i), y_at(*a))
                })
                .collect();
            if pts.is_empty() {
                continue;
            }
            let color = if method == Method::Thermal { "#c0392b" } else { "#2c6fbb" };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
                pts.join(" ")
            );
            for p in &pts {
                let (x, y) = p.split_once(',').expect("formatted above");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{method}</text>"#,
                L + 10.0 + 70.0 * k as f64,
                H - 12.0
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Writes `<axis>.csv`, `<axis>.svg` and the resolved `config.json`.
    pub fn write(&self, dir: &Path, axis: Axis, config: &HarnessConfig) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::Io(dir.display().to_string(), e))?;
        let files = [
            (dir.join(format!("{axis}.csv")), self.to_csv()),
            (dir.join(format!("{axis}.svg")), self.to_svg(axis)),
            (dir.join("config.json"), config.to_json()),
        ];
        for (path, text) in &files {
            fs::write(path, text).map_err(|e| HarnessError::Io(path.display().to_string(), e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}

/// Reads every sweep CSV in `dir`. All files must share one config hash.
pub fn load_results(dir: &Path) -> Result<SweepResult, HarnessError> {
    let io = |e| HarnessError::Io(dir.display().to_string(), e);
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut hash: Option<String> = None;
    let mut records = Vec::new();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::Io(path.display().to_string(), e))?;
        let part = SweepResult::parse_csv(&text).map_err(|e| HarnessError::InFile(path.display().to_string(), Box::new(e)))?;
        match &hash {
            Some(h) if *h != part.config_hash => {
                return Err(HarnessError::ConfigMismatch(path.display().to_string()));
            }
            _ => hash = Some(part.config_hash.clone()),
        }
        records.extend(part.records);
    }
    Ok(SweepResult {
        config_hash: hash.unwrap_or_default(),
        records,
    })
}
