//! Explicit finite-volume heat conduction over the active voxels of a grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Cell, VoxelGrid};

use super::{MaterialProps, ThermalError};

const NONE: u32 = u32::MAX;

/// Boundary environment for one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    pub ambient: f64,
    /// Temperature clamped onto the top faces, if a contact body is present.
    pub contact: Option<f64>,
}

/// Reference temperature difference for [`Convection`], K.
pub const CONVECTION_REF_DT: f64 = 10.0;

/// Heat transfer coefficient of exposed faces,
/// `h = h_ref·(|T_voxel − T_ambient| / 10 K)^exponent`, capped at `h_max`.
/// An exponent of 1/4 is the laminar natural-convection law; 0 is linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convection {
    /// W/(m²·K)
    pub h_ref: f64,
    pub exponent: f64,
    /// W/(m²·K)
    pub h_max: f64,
}

impl Convection {
    pub fn linear(h: f64) -> Self {
        Self {
            h_ref: h,
            exponent: 0.0,
            h_max: h,
        }
    }

    pub fn coefficient(&self, delta_t: f64) -> f64 {
        if self.exponent == 0.0 {
            return self.h_ref.min(self.h_max);
        }
        (self.h_ref * (delta_t.abs() / CONVECTION_REF_DT).powf(self.exponent)).min(self.h_max)
    }

    fn validate(&self) -> Result<(), ThermalError> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if ok(self.h_ref) && ok(self.exponent) && ok(self.h_max) {
            Ok(())
        } else {
            Err(ThermalError::SpecViolation(format!("invalid convection law {self:?}")))
        }
    }
}

/// Conductance network of the non-empty voxels. Faces between two active
/// voxels use the harmonic-mean conductivity; faces to empty space exchange
/// heat with the environment through the half cell in series with `h·A`.
#[derive(Debug, Clone)]
pub struct HeatModel {
    /// Grid index of each active voxel.
    pub voxels: Vec<usize>,
    /// Heat capacity per voxel, J/K.
    cap: Vec<f64>,
    nbr: Vec<[u32; 6]>,
    g: Vec<[f64; 6]>,
    /// Voxel centre to face conductance, 2kA/p.
    half_g: Vec<f64>,
    /// Exposed faces other than top faces.
    side_faces: Vec<u8>,
    /// Whether the voxel has an exposed top face.
    top: Vec<bool>,
    area: f64,
    convection: Convection,
    /// Sum of conductances per voxel used in the stability bound, with
    /// convection at `h_max`.
    g_total_contact: Vec<f64>,
    g_total_free: Vec<f64>,
}

impl HeatModel {
    /// Builds the network with a constant coefficient `h` in W/(m²·K);
    /// `h = 0` gives insulated exposed faces. Top faces are the exposed `+z`
    /// faces of voxels in the highest active layer.
    pub fn new(grid: &VoxelGrid, props: &[MaterialProps], h: f64) -> Result<Self, ThermalError> {
        Self::with_convection(grid, props, Convection::linear(h))
    }

    pub fn with_convection(
        grid: &VoxelGrid,
        props: &[MaterialProps],
        convection: Convection,
    ) -> Result<Self, ThermalError> {
        convection.validate()?;
        if props.len() != grid.cells.len() {
            return Err(ThermalError::SpecViolation(format!(
                "{} material records for {} voxels",
                props.len(),
                grid.cells.len()
            )));
        }
        let frame = grid.frame;
        let [nx, ny, nz] = frame.dims;
        let p = frame.pitch * 1e-3;
        let area = p * p;
        let mut slot = vec![NONE; grid.cells.len()];
        let mut voxels = Vec::new();
        for (idx, &c) in grid.cells.iter().enumerate() {
            if c != Cell::Empty {
                props[idx].validate()?;
                slot[idx] = voxels.len() as u32;
                voxels.push(idx);
            }
        }
        if voxels.is_empty() {
            return Err(ThermalError::SpecViolation("grid has no material voxels".into()));
        }
        let top_k = voxels.iter().map(|&idx| frame.coords(idx)[2]).max().unwrap_or(0);
        let n = voxels.len();
        let mut m = Self {
            cap: Vec::with_capacity(n),
            nbr: vec![[NONE; 6]; n],
            g: vec![[0.0; 6]; n],
            half_g: vec![0.0; n],
            side_faces: vec![0; n],
            top: vec![false; n],
            area,
            convection,
            g_total_contact: vec![0.0; n],
            g_total_free: vec![0.0; n],
            voxels,
        };
        const OFFSETS: [[isize; 3]; 6] = [[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]];
        for s in 0..n {
            let idx = m.voxels[s];
            let mp = props[idx];
            m.cap.push(mp.rho_c() * p * p * p);
            m.half_g[s] = 2.0 * mp.k * p;
            let [i, j, k] = frame.coords(idx);
            for (f, o) in OFFSETS.iter().enumerate() {
                let (a, b, c) = (i as isize + o[0], j as isize + o[1], k as isize + o[2]);
                let inside = a >= 0 && b >= 0 && c >= 0 && a < nx as isize && b < ny as isize && c < nz as isize;
                let other = if inside { slot[frame.index(a as usize, b as usize, c as usize)] } else { NONE };
                if other != NONE {
                    let ko = props[m.voxels[other as usize]].k;
                    let kh = 2.0 * mp.k * ko / (mp.k + ko);
                    m.nbr[s][f] = other;
                    m.g[s][f] = kh * p;
                } else if f == 5 && k == top_k {
                    m.top[s] = true;
                } else {
                    m.side_faces[s] += 1;
                }
            }
            let inner: f64 = m.g[s].iter().sum();
            let conv_max = m.face_g(s, convection.h_max);
            let sides = m.side_faces[s] as f64 * conv_max;
            let top = if m.top[s] { 1.0 } else { 0.0 };
            m.g_total_free[s] = inner + sides + top * conv_max;
            m.g_total_contact[s] = inner + sides + top * m.half_g[s];
        }
        Ok(m)
    }

    /// Half cell in series with `h·A`.
    fn face_g(&self, s: usize, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        1.0 / (1.0 / (h * self.area) + 1.0 / self.half_g[s])
    }

    /// Same network with every exposed face insulated.
    pub fn insulated(grid: &VoxelGrid, props: &[MaterialProps]) -> Result<Self, ThermalError> {
        Self::new(grid, props, 0.0)
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    /// Largest stable explicit step: `min_i C_i / ΣG_i`. For a homogeneous
    /// grid with insulated faces this is `ρc·p²/(6k)`.
    pub fn stability_bound(&self, contact: bool) -> f64 {
        let tot = if contact { &self.g_total_contact } else { &self.g_total_free };
        self.cap
            .iter()
            .zip(tot)
            .filter(|(_, &g)| g > 0.0)
            .map(|(&c, &g)| c / g)
            .fold(f64::INFINITY, f64::min)
    }

    /// Total enthalpy `Σ C_i T_i`, J relative to 0 °C.
    pub fn enthalpy(&self, state: &[f64]) -> f64 {
        self.cap.iter().zip(state).map(|(c, t)| c * t).sum()
    }

    pub fn uniform(&self, t: f64) -> Vec<f64> {
        vec![t; self.len()]
    }

    /// One explicit step; `dt` in seconds.
    pub fn step(&self, state: &[f64], dt: f64, env: Environment) -> Result<Vec<f64>, ThermalError> {
        let bound = self.stability_bound(env.contact.is_some());
        if !(dt > 0.0) || dt > bound {
            return Err(ThermalError::UnstableDt { dt, bound });
        }
        let mut out = vec![0.0; state.len()];
        self.step_into(state, &mut out, dt, env);
        Ok(out)
    }

    /// Unchecked step used by the simulator after validating `dt` once.
    pub(crate) fn step_into(&self, state: &[f64], out: &mut [f64], dt: f64, env: Environment) {
        out.par_chunks_mut(4096).enumerate().for_each(|(chunk, dst)| {
            let base = chunk * 4096;
            for (o, t_new) in dst.iter_mut().enumerate() {
                let s = base + o;
                let t = state[s];
                let mut q = 0.0;
                for f in 0..6 {
                    let nb = self.nbr[s][f];
                    if nb != NONE {
                        q += self.g[s][f] * (state[nb as usize] - t);
                    }
                }
                if self.side_faces[s] > 0 || self.top[s] {
                    let conv = self.face_g(s, self.convection.coefficient(t - env.ambient));
                    q += self.side_faces[s] as f64 * conv * (env.ambient - t);
                    if self.top[s] {
                        q += match env.contact {
                            Some(tc) => self.half_g[s] * (tc - t),
                            None => conv * (env.ambient - t),
                        };
                    }
                }
                *t_new = t + dt / self.cap[s] * q;
            }
        });
    }

    /// Temperature of the exposed top surface of voxel slot `s`, from flux
    /// continuity across the half cell.
    pub(crate) fn surface_temp(&self, s: usize, t: f64, env: Environment) -> f64 {
        match env.contact {
            Some(tc) => tc,
            None => {
                let h = self.convection.coefficient(t - env.ambient);
                if h <= 0.0 || !self.top[s] {
                    return t;
                }
                // Series network: voxel centre -half_g- surface -h·A- ambient.
                let (gk, ha) = (self.half_g[s], h * self.area);
                (gk * t + ha * env.ambient) / (gk + ha)
            }
        }
    }
}

/// Free-function form of [`HeatModel::step`].
pub fn step_heat(model: &HeatModel, state: &[f64], dt: f64, env: Environment) -> Result<Vec<f64>, ThermalError> {
    model.step(state, dt, env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GridFrame, VoxelGrid};

    fn block(dims: [usize; 3], pitch: f64) -> VoxelGrid {
        let frame = GridFrame {
            origin: [0.0; 3],
            pitch,
            dims,
        };
        let mut g = VoxelGrid::empty(frame);
        g.cells.iter_mut().for_each(|c| *c = Cell::Object);
        g
    }

    const INSULATED: Environment = Environment {
        ambient: 20.0,
        contact: None,
    };

    #[test]
    fn uniform_field_is_fixed_point() {
        let g = block([4, 3, 5], 0.5);
        let props = vec![MaterialProps::PLA; g.cells.len()];
        let m = HeatModel::new(&g, &props, 10.0).unwrap();
        let dt = m.stability_bound(false);
        let s = m.step(&m.uniform(20.0), dt, INSULATED).unwrap();
        assert!(s.iter().all(|&t| t == 20.0));
    }

    #[test]
    fn homogeneous_bound_matches_formula() {
        let g = block([5, 5, 5], 0.5);
        let props = vec![MaterialProps::PLA; g.cells.len()];
        let m = HeatModel::insulated(&g, &props).unwrap();
        let p = 0.5e-3;
        let want = MaterialProps::PLA.rho_c() * p * p / (6.0 * MaterialProps::PLA.k);
        assert!((m.stability_bound(false) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn two_cells_relax_at_discrete_rate() {
        let g = block([2, 1, 1], 1.0);
        let props = vec![MaterialProps::PLA; 2];
        let m = HeatModel::insulated(&g, &props).unwrap();
        let p = 1e-3;
        let c = MaterialProps::PLA.rho_c() * p * p * p;
        let gk = MaterialProps::PLA.k * p;
        let dt = 0.2 * c / gk;
        let mut s = vec![30.0, 10.0];
        for n in 1..=20 {
            s = m.step(&s, dt, INSULATED).unwrap();
            let diff = 20.0 * (1.0 - 2.0 * gk * dt / c).powi(n);
            assert!((s[0] - s[1] - diff).abs() < 1e-9);
            assert!((s[0] + s[1] - 40.0).abs() < 1e-9);
        }
    }

    #[test]
    fn dt_above_bound_rejected() {
        let g = block([3, 3, 3], 0.5);
        let props = vec![MaterialProps::PLA; g.cells.len()];
        let m = HeatModel::insulated(&g, &props).unwrap();
        let b = m.stability_bound(false);
        let s = m.uniform(1.0);
        assert!(m.step(&s, b, INSULATED).is_ok());
        assert!(matches!(
            m.step(&s, b * (1.0 + 1e-12), INSULATED),
            Err(ThermalError::UnstableDt { .. })
        ));
    }
}
