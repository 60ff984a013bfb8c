//! Scans a surface-fill design with a near-infrared spectrometer, for each
//! embed depth, and decodes the matrix from the band ratio.

use subprint::decode::{decode_nir_cube, nir_spacing, GridGeometry};
use subprint::geometry::{Color, EmbedSpec, FabricationMode, TriMesh};
use subprint::nirsim::{simulate_scan, NirModelConfig, ScanParams};
use subprint::payload::{embed_matrix, matrix_accuracy, random_matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = NirModelConfig::default();
    let truth = random_matrix(4, 4, 8, 11)?;
    for depth in [1.0, 2.0, 3.0, 4.0] {
        let spec = EmbedSpec {
            depth_d: depth,
            mode: FabricationMode::SurfaceFill,
            // Black would absorb the light before it reaches the payload.
            object_color: Color::Blue,
            ..EmbedSpec::default()
        };
        let (grid, _) = embed_matrix(&TriMesh::cuboid([0.0; 3], spec.object_dims), &truth, &spec, model.pitch_mm)?;
        let scan = ScanParams::standard(1, model.band_noise_sigma);
        let cube = simulate_scan(&grid, &spec, &model, &scan)?;
        let geom = GridGeometry::new(4, 4, nir_spacing(spec.density_x, scan.step_mm))?;
        match decode_nir_cube(&cube, &geom) {
            Ok(m) => println!("d = {depth} mm: accuracy {:.3}", matrix_accuracy(&m, &truth)?),
            Err(e) => println!("d = {depth} mm: not decodable ({e})"),
        }
    }
    Ok(())
}
