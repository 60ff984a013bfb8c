//! Embeds a small monochrome glyph instead of a bit matrix.

use subprint::geometry::{embed, place_info, Cell, EmbedSpec, TriMesh};
use subprint::payload::{bitmap_to_mesh, load_pbm};

const GLYPH: &str = "P1
5 5
0 1 1 1 0
1 0 0 0 1
1 1 1 1 1
1 0 0 0 1
1 0 0 0 1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = EmbedSpec {
        density_x: 3.0,
        ..EmbedSpec::default()
    };
    let glyph = load_pbm(GLYPH.as_bytes(), spec.density_x)?;
    for row in 0..glyph.height {
        let line: String = (0..glyph.width).map(|c| if glyph.get(row, c) { '#' } else { '.' }).collect();
        println!("{line}");
    }

    let object = TriMesh::cuboid([0.0; 3], spec.object_dims);
    let info = place_info(&object, &bitmap_to_mesh(&glyph, spec.info_height)?, &spec)?;
    let (grid, _) = embed(&object, &info, &spec, 0.5)?;
    println!("{} set pixels became {} info voxels", glyph.set_count(), grid.count(Cell::Info));
    Ok(())
}
