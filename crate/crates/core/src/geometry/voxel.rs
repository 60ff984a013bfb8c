//! Voxel grids and parity-based inside/outside classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{Point3, TriMesh};
use super::GeometryError;

/// Fraction of voxels allowed to disagree between the three ray directions.
pub const OPEN_MESH_TOLERANCE: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[repr(u8)]
pub enum Cell {
    #[default]
    Empty,
    Object,
    Info,
}

/// Placement of a regular grid: voxel `(i, j, k)` has its centre at
/// `origin + (idx + 0.5) * pitch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFrame {
    pub origin: Point3,
    pub pitch: f64,
    pub dims: [usize; 3],
}

impl GridFrame {
    /// Frame covering `mesh`'s bounding box padded by one voxel on every side.
    pub fn around(mesh: &TriMesh, pitch: f64) -> Result<Self, GeometryError> {
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(GeometryError::InvalidPitch(pitch));
        }
        let bb = mesh.bbox().ok_or(GeometryError::EmptyMesh)?;
        let ext = bb.extent();
        let mut dims = [0usize; 3];
        for axis in 0..3 {
            let cells = (ext[axis] / pitch - 1e-9).ceil().max(0.0) as usize;
            let whole = (ext[axis] / pitch + 1e-9).floor() as usize;
            if whole < 2 {
                return Err(GeometryError::PitchTooCoarse { axis, voxels: whole });
            }
            dims[axis] = cells + 2;
        }
        Ok(Self {
            origin: [bb.min[0] - pitch, bb.min[1] - pitch, bb.min[2] - pitch],
            pitch,
            dims,
        })
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> Point3 {
        [
            self.origin[0] + (i as f64 + 0.5) * self.pitch,
            self.origin[1] + (j as f64 + 0.5) * self.pitch,
            self.origin[2] + (k as f64 + 0.5) * self.pitch,
        ]
    }

    fn axis_center(&self, axis: usize, idx: usize) -> f64 {
        self.origin[axis] + (idx as f64 + 0.5) * self.pitch
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub frame: GridFrame,
    pub cells: Vec<Cell>,
    /// Voxels printed fully solid regardless of infill (set by the fabrication mode).
    pub solid: Vec<bool>,
}

impl VoxelGrid {
    pub fn empty(frame: GridFrame) -> Self {
        Self {
            frame,
            cells: vec![Cell::Empty; frame.len()],
            solid: vec![false; frame.len()],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.frame.dims
    }

    pub fn pitch(&self) -> f64 {
        self.frame.pitch
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Cell {
        self.cells[self.frame.index(i, j, k)]
    }

    pub fn count(&self, label: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == label).count()
    }

    /// Highest layer index containing `label`, if any.
    pub fn top_layer(&self, label: Cell) -> Option<usize> {
        let [nx, ny, nz] = self.frame.dims;
        (0..nz).rev().find(|&k| {
            let base = nx * ny * k;
            self.cells[base..base + nx * ny].contains(&label)
        })
    }
}

/// Labels every voxel whose centre lies inside `mesh`.
pub fn voxelize(mesh: &TriMesh, pitch: f64, label: Cell) -> Result<VoxelGrid, GeometryError> {
    let frame = GridFrame::around(mesh, pitch)?;
    let inside = classify(mesh, &frame)?;
    let mut grid = VoxelGrid::empty(frame);
    for (cell, &hit) in grid.cells.iter_mut().zip(&inside) {
        if hit {
            *cell = label;
        }
    }
    Ok(grid)
}

/// Inside/outside for every voxel centre of `frame`.
///
/// Parity is evaluated along +x, +y and +z; the majority wins. Meshes where
/// the directions disagree on more than [`OPEN_MESH_TOLERANCE`] of the voxels
/// are rejected as open.
pub fn classify(mesh: &TriMesh, frame: &GridFrame) -> Result<Vec<bool>, GeometryError> {
    if mesh.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    mesh.check_finite()?;
    let votes: Vec<Vec<bool>> = (0..3usize)
        .into_par_iter()
        .map(|axis| parity_along(mesh, frame, axis))
        .collect();
    let mut inconsistent = 0usize;
    let out: Vec<bool> = (0..frame.len())
        .map(|idx| {
            let n = votes.iter().filter(|v| v[idx]).count();
            if n != 0 && n != 3 {
                inconsistent += 1;
            }
            n >= 2
        })
        .collect();
    let total = frame.len();
    if inconsistent as f64 > OPEN_MESH_TOLERANCE * total as f64 {
        return Err(GeometryError::OpenMesh { inconsistent, total });
    }
    Ok(out)
}

/// Ray parity for every voxel centre, casting rays along `axis`.
fn parity_along(mesh: &TriMesh, frame: &GridFrame, axis: usize) -> Vec<bool> {
    let u = (axis + 1) % 3;
    let v = (axis + 2) % 3;
    let (nu, nv, na) = (frame.dims[u], frame.dims[v], frame.dims[axis]);
    let p = frame.pitch;
    let mut crossings: Vec<Vec<f64>> = vec![Vec::new(); nu * nv];

    for tri in &mesh.triangles {
        let q: [[f64; 2]; 3] = tri.vertices.map(|pt| [pt[u], pt[v]]);
        let orient = edge_sign(q[0], q[1], q[2]);
        if orient == 0 {
            continue;
        }
        let area = edge_value(q[0], q[1], q[2]);
        if area == 0.0 {
            continue;
        }
        let lo = |c: usize| q.iter().map(|pt| pt[c]).fold(f64::INFINITY, f64::min);
        let hi = |c: usize| q.iter().map(|pt| pt[c]).fold(f64::NEG_INFINITY, f64::max);
        let range = |c: usize, axis_idx: usize, n: usize| {
            let a = ((lo(c) - frame.origin[axis_idx]) / p - 0.5).floor().max(0.0) as usize;
            let b = ((hi(c) - frame.origin[axis_idx]) / p - 0.5).ceil().max(0.0) as usize;
            a..(b + 1).min(n)
        };
        for iv in range(1, v, nv) {
            let pv = frame.axis_center(v, iv);
            for iu in range(0, u, nu) {
                let pt = [frame.axis_center(u, iu), pv];
                if edge_sign(q[0], q[1], pt) != orient
                    || edge_sign(q[1], q[2], pt) != orient
                    || edge_sign(q[2], q[0], pt) != orient
                {
                    continue;
                }
                let w0 = edge_value(q[1], q[2], pt);
                let w1 = edge_value(q[2], q[0], pt);
                let w2 = edge_value(q[0], q[1], pt);
                let sum = w0 + w1 + w2;
                let t = if sum != 0.0 {
                    (w0 * tri.vertices[0][axis] + w1 * tri.vertices[1][axis] + w2 * tri.vertices[2][axis]) / sum
                } else {
                    tri.vertices[0][axis]
                };
                crossings[iu + nu * iv].push(t);
            }
        }
    }

    let mut inside = vec![false; frame.len()];
    for iv in 0..nv {
        for iu in 0..nu {
            let hits = &mut crossings[iu + nu * iv];
            if hits.is_empty() {
                continue;
            }
            hits.sort_by(|a, b| a.total_cmp(b));
            // Number of crossings strictly beyond the voxel centre.
            let mut beyond = hits.len();
            let mut next = 0usize;
            for ia in 0..na {
                let c = frame.axis_center(axis, ia);
                while next < hits.len() && hits[next] <= c {
                    next += 1;
                    beyond -= 1;
                }
                if beyond % 2 == 1 {
                    let mut ijk = [0usize; 3];
                    ijk[axis] = ia;
                    ijk[u] = iu;
                    ijk[v] = iv;
                    inside[frame.index(ijk[0], ijk[1], ijk[2])] = true;
                }
            }
        }
    }
    inside
}

/// Edge function of the undirected edge {a, b} in a canonical direction, so the
/// two triangles sharing an edge see bitwise-opposite values.
fn edge_value(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> f64 {
    let (s, a, b) = if (a[0], a[1]) <= (b[0], b[1]) { (1.0, a, b) } else { (-1.0, b, a) };
    s * ((b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]))
}

/// Sign of [`edge_value`] with exact zeros resolved by perturbing the query
/// point by (eps, eps^2). Returns 0 only for degenerate edges.
fn edge_sign(a: [f64; 2], b: [f64; 2], q: [f64; 2]) -> i8 {
    let (s, a, b) = if (a[0], a[1]) <= (b[0], b[1]) { (1i8, a, b) } else { (-1i8, b, a) };
    let e = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
    let raw = if e > 0.0 {
        1
    } else if e < 0.0 {
        -1
    } else if b[1] != a[1] {
        if b[1] > a[1] { -1 } else { 1 }
    } else if b[0] != a[0] {
        1
    } else {
        0
    };
    s * raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::Triangle;

    #[test]
    fn aligned_cube_exact_count() {
        let cube = TriMesh::cuboid([0.0; 3], [30.0, 30.0, 15.0]);
        let g = voxelize(&cube, 0.5, Cell::Object).unwrap();
        assert_eq!(g.dims(), [62, 62, 32]);
        assert_eq!(g.count(Cell::Object), 60 * 60 * 30);
    }

    #[test]
    fn offset_cube_on_voxel_centres_is_consistent() {
        // Faces pass exactly through voxel centres; the tie rule must stay watertight.
        let cube = TriMesh::cuboid([0.25, 0.25, 0.25], [5.25, 3.25, 2.25]);
        let g = voxelize(&cube, 0.5, Cell::Object).unwrap();
        let n = g.count(Cell::Object);
        assert!((40..=11 * 7 * 5).contains(&n), "count {n}");
    }

    #[test]
    fn open_cube_rejected() {
        let mut cube = TriMesh::cuboid([0.0; 3], [5.0; 3]);
        cube.triangles.truncate(10);
        assert!(matches!(
            voxelize(&cube, 0.5, Cell::Object),
            Err(GeometryError::OpenMesh { .. })
        ));
    }

    #[test]
    fn coarse_pitch_rejected() {
        let cube = TriMesh::cuboid([0.0; 3], [1.0, 10.0, 10.0]);
        assert!(matches!(
            voxelize(&cube, 0.6, Cell::Object),
            Err(GeometryError::PitchTooCoarse { axis: 0, .. })
        ));
    }

    #[test]
    fn cavity_is_excluded() {
        let mut m = TriMesh::cuboid([0.0; 3], [10.0; 3]);
        let hole = TriMesh::cuboid([3.0; 3], [7.0; 3]);
        m.triangles.extend(hole.triangles.iter().map(Triangle::flipped));
        let g = voxelize(&m, 0.5, Cell::Object).unwrap();
        assert_eq!(g.count(Cell::Object), 20 * 20 * 20 - 8 * 8 * 8);
    }

    #[test]
    fn edge_sign_is_antisymmetric() {
        let a = [0.0, 0.0];
        let b = [1.0, 1.0];
        for q in [[0.5, 0.5], [0.0, 1.0], [2.0, 2.0], [1.0, 0.0]] {
            assert_eq!(edge_sign(a, b, q), -edge_sign(b, a, q));
            assert_ne!(edge_sign(a, b, q), 0);
        }
    }
}
