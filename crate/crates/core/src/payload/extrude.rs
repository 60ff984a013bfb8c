//! Extrusion of bit grids into information meshes.

use crate::geometry::{
    apply_mode, embed, place_footprint, push_box_faces, Aabb, BodySet, EmbedSpec, TriMesh, VoxelGrid,
};

use super::{BitMatrix, GlyphBitmap, PayloadError};

/// Extrudes the set cells of a `rows`×`cols` grid with square cells of side
/// `cell`. Row 0 lands at the largest y. Only faces between a set cell and an
/// unset (or outside) cell are emitted, so the union is closed and coplanar
/// faces of neighbouring cells never overlap.
fn extrude_cells(rows: usize, cols: usize, cell: f64, height: f64, set: impl Fn(usize, usize) -> bool) -> TriMesh {
    let mut triangles = Vec::new();
    let on = |r: isize, c: isize| r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols && set(r as usize, c as usize);
    for r in 0..rows {
        for c in 0..cols {
            if !set(r, c) {
                continue;
            }
            let (ri, ci) = (r as isize, c as isize);
            let x0 = c as f64 * cell;
            let y0 = (rows - 1 - r) as f64 * cell;
            let faces = [
                !on(ri, ci - 1),
                !on(ri, ci + 1),
                !on(ri + 1, ci),
                !on(ri - 1, ci),
                true,
                true,
            ];
            push_box_faces(&mut triangles, [x0, y0, 0.0], [x0 + cell, y0 + cell, height], faces);
        }
    }
    TriMesh { triangles }
}

/// Full grid extent of a matrix mesh, independent of which bits are set.
pub fn matrix_footprint(m: &BitMatrix, spec: &EmbedSpec) -> Aabb {
    Aabb {
        min: [0.0; 3],
        max: [m.cols() as f64 * spec.density_x, m.rows() as f64 * spec.density_x, spec.info_height],
    }
}

/// One `X`×`X`×`info_height` cuboid per 1-bit, in local coordinates with the
/// grid spanning `[0, cols·X] × [0, rows·X] × [0, h]`.
pub fn matrix_to_mesh(m: &BitMatrix, spec: &EmbedSpec) -> Result<TriMesh, PayloadError> {
    spec.validate()?;
    spec.validate_for_payload(m.rows(), m.cols())?;
    if m.popcount() == 0 {
        return Err(PayloadError::EmptyPayload);
    }
    Ok(extrude_cells(m.rows(), m.cols(), spec.density_x, spec.info_height, |r, c| {
        m.get(r, c)
    }))
}

/// Extrudes `m`, centres its grid footprint under the top face of `object`
/// at `spec.depth_d`, embeds it and applies the fabrication mode.
pub fn embed_matrix(
    object: &TriMesh,
    m: &BitMatrix,
    spec: &EmbedSpec,
    pitch: f64,
) -> Result<(VoxelGrid, BodySet), PayloadError> {
    let info = matrix_to_mesh(m, spec)?;
    let placed = place_footprint(object, &info, &matrix_footprint(m, spec), spec)?;
    let (grid, bodies) = embed(object, &placed, spec, pitch)?;
    Ok((apply_mode(&grid, spec)?, bodies))
}

/// Extrudes set pixels as `scale`×`scale`×`info_height` cuboids.
pub fn bitmap_to_mesh(g: &GlyphBitmap, info_height: f64) -> Result<TriMesh, PayloadError> {
    if !(info_height > 0.0 && info_height.is_finite()) {
        return Err(PayloadError::BadScale(info_height));
    }
    Ok(extrude_cells(g.height, g.width, g.scale, info_height, |r, c| g.get(r, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{voxelize, Cell};

    fn spec(x: f64) -> EmbedSpec {
        EmbedSpec {
            density_x: x,
            ..EmbedSpec::default()
        }
    }

    #[test]
    fn single_bit_is_one_cuboid() {
        let m = BitMatrix::raw(1, 1, vec![true]).unwrap();
        let mesh = matrix_to_mesh(&m, &spec(5.0)).unwrap();
        assert_eq!(mesh.len(), 12);
        let bb = mesh.bbox().unwrap();
        assert_eq!(bb.max, [5.0, 5.0, 1.0]);
    }

    #[test]
    fn full_grid_bbox() {
        let m = BitMatrix::parse("1001\n0110\n0110\n1001\n").unwrap();
        let mesh = matrix_to_mesh(&m, &spec(5.0)).unwrap();
        let bb = mesh.bbox().unwrap();
        assert_eq!((bb.min, bb.max), ([0.0; 3], [20.0, 20.0, 1.0]));
        assert!((mesh.signed_volume() - 8.0 * 25.0).abs() < 1e-9);
    }

    #[test]
    fn checkerboard_voxel_count() {
        let m = BitMatrix::parse("10\n01\n").unwrap();
        let mesh = matrix_to_mesh(&m, &spec(3.0)).unwrap();
        let g = voxelize(&mesh, 0.5, Cell::Info).unwrap();
        assert_eq!(g.count(Cell::Info), 144);
    }

    #[test]
    fn row_zero_is_north() {
        let m = BitMatrix::parse("10\n00\n").unwrap();
        let bb = matrix_to_mesh(&m, &spec(3.0)).unwrap().bbox().unwrap();
        assert_eq!((bb.min[1], bb.max[1]), (3.0, 6.0));
    }

    #[test]
    fn merged_neighbours_stay_closed() {
        let m = BitMatrix::parse("11\n10\n").unwrap();
        let mesh = matrix_to_mesh(&m, &spec(2.0)).unwrap();
        // 3 tops + 3 bottoms + 8 exposed sides, two triangles each.
        assert_eq!(mesh.len(), 28);
        assert!((mesh.signed_volume() - 12.0).abs() < 1e-9);
    }

    #[test]
    fn too_wide_payload_rejected() {
        let m = BitMatrix::parse("1000000\n").unwrap();
        assert!(matrix_to_mesh(&m, &spec(5.0)).is_err());
    }

    #[test]
    fn bitmap_extrusion() {
        let g = GlyphBitmap::new(2, 2, vec![true; 4], 1.0).unwrap();
        let bb = bitmap_to_mesh(&g, 1.0).unwrap().bbox().unwrap();
        assert_eq!(bb.max, [2.0, 2.0, 1.0]);
        let one = GlyphBitmap::new(1, 1, vec![true], 1.0).unwrap();
        assert_eq!(bitmap_to_mesh(&one, 1.0).unwrap().len(), 12);
    }
}
