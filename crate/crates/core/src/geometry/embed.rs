//! Boolean embedding of an information body into an object body, and the two
//! fabrication modes.

use super::export::{BodySet, Manifest};
use super::mesh::{Aabb, TriMesh, Triangle};
use super::spec::{EmbedSpec, FabricationMode};
use super::voxel::{classify, Cell, GridFrame, VoxelGrid};
use super::GeometryError;

/// Relative slack used when comparing placements read back from f32 STL files.
const PLACEMENT_TOL: f64 = 1e-4;

/// Moves `info` so it is centred in X/Y over `object` with its top face
/// `spec.depth_d` below the object's top face.
pub fn place_info(object: &TriMesh, info: &TriMesh, spec: &EmbedSpec) -> Result<TriMesh, GeometryError> {
    let ib = info.bbox().ok_or(GeometryError::EmptyMesh)?;
    place_footprint(object, info, &ib, spec)
}

/// Like [`place_info`], but centres `footprint` instead of the mesh bbox. A bit
/// matrix whose outer rows or columns are zero has a smaller bbox than its
/// grid, and the grid is what the decoders assume is centred.
pub fn place_footprint(
    object: &TriMesh,
    info: &TriMesh,
    footprint: &Aabb,
    spec: &EmbedSpec,
) -> Result<TriMesh, GeometryError> {
    let ob = object.bbox().ok_or(GeometryError::EmptyMesh)?;
    let fb = footprint;
    let offset = [
        0.5 * (ob.min[0] + ob.max[0]) - 0.5 * (fb.min[0] + fb.max[0]),
        0.5 * (ob.min[1] + ob.max[1]) - 0.5 * (fb.min[1] + fb.max[1]),
        ob.max[2] - spec.depth_d - fb.max[2],
    ];
    Ok(info.translated(offset))
}

/// Carves `info` out of `object` and labels the composite grid.
///
/// `info` must already be placed (see [`place_info`]). The returned grid marks
/// info voxels `Info` and the remaining object voxels `Object`; the body set
/// holds the object-minus-info mesh (the info surface is added as an inward
/// facing cavity) and the info mesh itself.
pub fn embed(
    object: &TriMesh,
    info: &TriMesh,
    spec: &EmbedSpec,
    pitch: f64,
) -> Result<(VoxelGrid, BodySet), GeometryError> {
    spec.validate()?;
    let ob = object.bbox().ok_or(GeometryError::EmptyMesh)?;
    let ib = info.bbox().ok_or(GeometryError::EmptyMesh)?;
    let ext = ob.extent();
    let scale = ext.iter().fold(1.0f64, |m, &e| m.max(e));
    for (axis, (&have, &want)) in ext.iter().zip(&spec.object_dims).enumerate() {
        if (have - want).abs() > PLACEMENT_TOL * scale {
            return Err(GeometryError::SpecViolation(format!(
                "object extent along axis {axis} is {have} mm but object_dims says {want} mm"
            )));
        }
    }
    if !ob.strictly_contains(&ib, 0.0) {
        return Err(GeometryError::InfoProtrudes);
    }
    let depth = ob.max[2] - ib.max[2];
    if (depth - spec.depth_d).abs() > PLACEMENT_TOL * scale {
        return Err(GeometryError::SpecViolation(format!(
            "information top sits {depth} mm below the surface but depth_d is {} mm",
            spec.depth_d
        )));
    }
    if ib.extent()[2] > spec.info_height + PLACEMENT_TOL * scale {
        return Err(GeometryError::SpecViolation(format!(
            "information body is {} mm tall, info_height is {} mm",
            ib.extent()[2],
            spec.info_height
        )));
    }

    let frame = GridFrame::around(object, pitch)?;
    let grid = compose(object, info, &frame)?;
    if grid.count(Cell::Info) == 0 {
        return Err(GeometryError::PitchTooCoarse { axis: 2, voxels: 0 });
    }

    let mut carved = object.triangles.clone();
    carved.extend(info.triangles.iter().map(Triangle::flipped));
    let bodies = BodySet {
        object_body: TriMesh { triangles: carved },
        info_body: info.clone(),
        manifest: Manifest::new(spec, pitch),
    };
    Ok((grid, bodies))
}

/// Labels `frame` from an object mesh and an info mesh. The object mesh may or
/// may not already contain the info cavity; info voxels take precedence.
pub fn compose(object: &TriMesh, info: &TriMesh, frame: &GridFrame) -> Result<VoxelGrid, GeometryError> {
    let in_object = classify(object, frame)?;
    let in_info = classify(info, frame)?;
    let mut grid = VoxelGrid::empty(*frame);
    for idx in 0..frame.len() {
        grid.cells[idx] = match (in_object[idx], in_info[idx]) {
            (_, true) => Cell::Info,
            (true, false) => Cell::Object,
            (false, false) => Cell::Empty,
        };
    }
    Ok(grid)
}

/// Marks the voxels the fabrication mode prints solid.
///
/// * `SurfaceJoin`: every voxel above an info column, up to the object's top
///   surface, becomes solid `Object`.
/// * `SurfaceFill`: every voxel between the info top plane and the top
///   surface, across the whole object footprint, becomes solid `Object`.
///
/// Voxels below the information body are left to infill.
pub fn apply_mode(grid: &VoxelGrid, spec: &EmbedSpec) -> Result<VoxelGrid, GeometryError> {
    let info_top = grid.top_layer(Cell::Info).ok_or(GeometryError::ModeInapplicable)?;
    let [nx, ny, nz] = grid.dims();
    let frame = grid.frame;
    let mut out = grid.clone();
    for j in 0..ny {
        for i in 0..nx {
            let column_top = (0..nz).rev().find(|&k| grid.get(i, j, k) != Cell::Empty);
            let Some(column_top) = column_top else { continue };
            let start = match spec.mode {
                FabricationMode::SurfaceJoin => {
                    match (0..nz).rev().find(|&k| grid.get(i, j, k) == Cell::Info) {
                        Some(k) => k + 1,
                        None => continue,
                    }
                }
                FabricationMode::SurfaceFill => {
                    if column_top <= info_top {
                        continue;
                    }
                    info_top + 1
                }
            };
            for k in start..=column_top {
                let idx = frame.index(i, j, k);
                if out.cells[idx] != Cell::Info {
                    out.cells[idx] = Cell::Object;
                    out.solid[idx] = true;
                }
            }
        }
    }
    Ok(out)
}
