//! Hides a random 4x4 matrix 1 mm under the top of a 30 mm cube and exports
//! the two printable bodies.

use subprint::geometry::{export_bodies, Cell, EmbedSpec, FabricationMode, TriMesh};
use subprint::payload::{embed_matrix, random_matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = EmbedSpec {
        mode: FabricationMode::SurfaceFill,
        ..EmbedSpec::default()
    };
    let object = TriMesh::cuboid([0.0; 3], spec.object_dims);
    let payload = random_matrix(4, 4, 8, 7)?;
    print!("payload\n{payload}");

    let (grid, bodies) = embed_matrix(&object, &payload, &spec, 0.5)?;
    println!(
        "{} object voxels, {} info voxels at pitch {} mm",
        grid.count(Cell::Object),
        grid.count(Cell::Info),
        grid.pitch()
    );

    let dir = std::env::temp_dir().join("subprint-embed-cube");
    let manifest = export_bodies(&bodies, &dir)?;
    println!("wrote {}", manifest.display());
    Ok(())
}
