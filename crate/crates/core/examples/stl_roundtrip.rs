//! Writes a sphere as binary and ASCII STL, reads both back and checks the
//! voxelized volume against the analytic one.

use std::f64::consts::PI;

use subprint::geometry::{parse_stl, voxelize, write_stl, Cell, StlFormat, TriMesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sphere = TriMesh::uv_sphere([0.0; 3], 5.0, 48, 96);
    for format in [StlFormat::Binary, StlFormat::Ascii] {
        let bytes = write_stl(&sphere, format)?;
        let back = parse_stl(&bytes)?;
        println!("{format:?}: {} bytes, {} triangles back", bytes.len(), back.triangles.len());
    }

    let pitch = 0.25;
    let grid = voxelize(&sphere, pitch, Cell::Object)?;
    let voxels = grid.count(Cell::Object) as f64 * pitch.powi(3);
    let exact = 4.0 / 3.0 * PI * 125.0;
    println!("voxel volume {voxels:.1} mm^3, analytic {exact:.1} mm^3 ({:+.2}%)", 100.0 * (voxels / exact - 1.0));
    Ok(())
}
