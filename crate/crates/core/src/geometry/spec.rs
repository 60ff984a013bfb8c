use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FabricationMode {
    /// Solid bridge between the top surface layers and the information body
    /// (thermal reading).
    #[serde(rename = "surface-join")]
    SurfaceJoin,
    /// Top layers printed solid down to the information body across the whole
    /// footprint (near-infrared reading).
    #[serde(rename = "surface-fill")]
    SurfaceFill,
}

impl fmt::Display for FabricationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SurfaceJoin => "surface-join",
            Self::SurfaceFill => "surface-fill",
        })
    }
}

impl FromStr for FabricationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "surface-join" => Ok(Self::SurfaceJoin),
            "surface-fill" => Ok(Self::SurfaceFill),
            other => Err(format!("unknown fabrication mode `{other}`")),
        }
    }
}

/// Filament colour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Gray,
    Orange,
    Red,
    Black,
    White,
}

impl Color {
    pub const ALL: [Color; 6] = [
        Color::Blue,
        Color::Gray,
        Color::Orange,
        Color::Red,
        Color::Black,
        Color::White,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Blue => "blue",
            Self::Gray => "gray",
            Self::Orange => "orange",
            Self::Red => "red",
            Self::Black => "black",
            Self::White => "white",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.name() == lower || (lower == "grey" && *c == Color::Gray))
            .ok_or_else(|| format!("unknown color `{s}`"))
    }
}

/// Fabrication parameters for one embedded design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedSpec {
    /// Distance from the object's top surface to the top of the information body.
    pub depth_d: f64,
    /// Side length of one payload bit, mm per pixel.
    #[serde(rename = "density_X")]
    pub density_x: f64,
    pub info_height: f64,
    pub mode: FabricationMode,
    pub infill_fraction: f64,
    /// Object width, depth and height (W, D, H) in mm.
    pub object_dims: [f64; 3],
    pub object_color: Color,
    pub info_color: Color,
}

impl Default for EmbedSpec {
    fn default() -> Self {
        Self {
            depth_d: 1.0,
            density_x: 5.0,
            info_height: 1.0,
            mode: FabricationMode::SurfaceJoin,
            infill_fraction: 0.10,
            object_dims: [30.0, 30.0, 15.0],
            object_color: Color::Black,
            info_color: Color::White,
        }
    }
}

impl EmbedSpec {
    /// Checks every constraint that does not depend on the payload size.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |msg: String| Err(GeometryError::SpecViolation(msg));
        let [w, d, h] = self.object_dims;
        if !(self.depth_d >= 0.0 && self.depth_d.is_finite()) {
            return bad(format!("depth_d must be >= 0, got {}", self.depth_d));
        }
        if !(self.density_x > 0.0 && self.density_x.is_finite()) {
            return bad(format!("density_X must be > 0, got {}", self.density_x));
        }
        if !(self.info_height > 0.0 && self.info_height.is_finite()) {
            return bad(format!("info_height must be > 0, got {}", self.info_height));
        }
        if !(self.infill_fraction > 0.0 && self.infill_fraction <= 1.0) {
            return bad(format!("infill_fraction must be in (0, 1], got {}", self.infill_fraction));
        }
        if !(w > 0.0 && d > 0.0 && h > 0.0) || !(w.is_finite() && d.is_finite() && h.is_finite()) {
            return bad(format!("object dimensions must be positive, got {:?}", self.object_dims));
        }
        if self.depth_d + self.info_height >= h {
            return bad(format!(
                "depth_d + info_height = {} must stay below the object height {h}",
                self.depth_d + self.info_height
            ));
        }
        Ok(())
    }

    /// Full validation including the payload footprint.
    pub fn validate_for_payload(&self, rows: usize, cols: usize) -> Result<(), GeometryError> {
        self.validate()?;
        let [w, d, _] = self.object_dims;
        if self.density_x * cols as f64 > w || self.density_x * rows as f64 > d {
            return Err(GeometryError::SpecViolation(format!(
                "a {rows}x{cols} payload at {} mm per bit does not fit a {w} x {d} mm face",
                self.density_x
            )));
        }
        Ok(())
    }
}
