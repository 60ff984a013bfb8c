use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, EmbedSpec, VoxelGrid};

use super::ThermalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialProps {
    /// Conductivity, W/(m·K).
    pub k: f64,
    /// Density, kg/m³.
    pub rho: f64,
    /// Specific heat capacity, J/(kg·K).
    pub c: f64,
}

impl MaterialProps {
    pub const PLA: Self = Self {
        k: 0.13,
        rho: 1240.0,
        c: 1800.0,
    };

    pub const AIR: Self = Self {
        k: 0.026,
        rho: 1.2,
        c: 1005.0,
    };

    pub fn new(k: f64, rho: f64, c: f64) -> Result<Self, ThermalError> {
        let m = Self { k, rho, c };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.k) && ok(self.rho) && ok(self.c) {
            Ok(())
        } else {
            Err(ThermalError::BadMaterial(*self))
        }
    }

    /// Volumetric heat capacity ρc, J/(m³·K).
    pub fn rho_c(&self) -> f64 {
        self.rho * self.c
    }

    pub fn diffusivity(&self) -> f64 {
        self.k / self.rho_c()
    }

    /// Linear filament/air mixture at filament fraction `f`. Density carries
    /// the ρc mixture so that `rho_c()` mixes linearly.
    pub fn effective(filament: &Self, air: &Self, f: f64) -> Self {
        let k = f * filament.k + (1.0 - f) * air.k;
        let rho_c = f * filament.rho_c() + (1.0 - f) * air.rho_c();
        let rho = f * filament.rho + (1.0 - f) * air.rho;
        Self { k, rho, c: rho_c / rho }
    }
}

/// Print layout and material constants for the thermal model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThermalMaterials {
    pub filament: MaterialProps,
    pub air: MaterialProps,
    /// Solid perimeter wall thickness, mm.
    pub wall_mm: f64,
    /// Solid bottom skin thickness, mm.
    pub bottom_mm: f64,
    /// Top skin printed solid down to the information top plane across the
    /// whole face (the slicer's thickened top layers joining the info body).
    /// When false only the fabrication mode's solid voxels are solid.
    pub top_skin_to_info: bool,
}

impl Default for ThermalMaterials {
    fn default() -> Self {
        Self {
            // Effective conductivity of printed PLA: the bead contacts of a
            // real print conduct better than the bulk value predicts.
            filament: MaterialProps { k: 0.3, ..MaterialProps::PLA },
            air: MaterialProps::AIR,
            wall_mm: 1.0,
            bottom_mm: 1.0,
            top_skin_to_info: true,
        }
    }
}

/// Per-voxel material: info and solid voxels are filament, remaining object
/// voxels are the infill effective medium, empty voxels are air.
pub fn material_grid(grid: &VoxelGrid, spec: &EmbedSpec, mats: &ThermalMaterials) -> Vec<MaterialProps> {
    let infill = MaterialProps::effective(&mats.filament, &mats.air, spec.infill_fraction);
    let [nx, ny, nz] = grid.dims();
    let p = grid.pitch();
    let wall = (mats.wall_mm / p).round() as usize;
    let bottom = (mats.bottom_mm / p).round() as usize;
    let info_top = grid.top_layer(Cell::Info);

    // Distance, in voxels, from each voxel to the nearest empty voxel within
    // its layer (Chebyshev, capped at `wall + 1`).
    let wall_dist = layer_distance(grid, wall + 1);

    let mut out = vec![mats.air; grid.cells.len()];
    for j in 0..ny {
        for i in 0..nx {
            let col: Vec<usize> = (0..nz).filter(|&k| grid.get(i, j, k) != Cell::Empty).collect();
            let (Some(&lo), Some(&hi)) = (col.first(), col.last()) else { continue };
            for &k in &col {
                let idx = grid.frame.index(i, j, k);
                let solid = grid.cells[idx] == Cell::Info
                    || grid.solid[idx]
                    || k < lo + bottom
                    || wall_dist[idx] <= wall
                    || (mats.top_skin_to_info && info_top.is_some_and(|t| k > t) && k <= hi);
                out[idx] = if solid { mats.filament } else { infill };
            }
        }
    }
    out
}

fn layer_distance(grid: &VoxelGrid, cap: usize) -> Vec<usize> {
    let [nx, ny, nz] = grid.dims();
    let mut dist = vec![cap; grid.cells.len()];
    for k in 0..nz {
        let mut frontier = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let idx = grid.frame.index(i, j, k);
                if grid.cells[idx] == Cell::Empty {
                    dist[idx] = 0;
                    frontier.push((i, j));
                }
            }
        }
        let mut d = 0;
        while !frontier.is_empty() && d + 1 < cap {
            d += 1;
            let mut next = Vec::new();
            for (i, j) in frontier {
                for dj in -1isize..=1 {
                    for di in -1isize..=1 {
                        let (a, b) = (i as isize + di, j as isize + dj);
                        if a < 0 || b < 0 || a >= nx as isize || b >= ny as isize {
                            continue;
                        }
                        let idx = grid.frame.index(a as usize, b as usize, k);
                        if dist[idx] > d {
                            dist[idx] = d;
                            next.push((a as usize, b as usize));
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    dist
}
