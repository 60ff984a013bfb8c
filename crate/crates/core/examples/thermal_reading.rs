//! Simulates touching a printed cube with a warm hand, records the surface
//! with a thermal camera and decodes the matrix frame by frame.

use subprint::decode::{decode_thermal_recording, reading_window, GridGeometry};
use subprint::geometry::{EmbedSpec, TriMesh};
use subprint::payload::{embed_matrix, random_matrix};
use subprint::thermsim::{simulate_reading, ThermalModelConfig, ThermalScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = EmbedSpec::default();
    let truth = random_matrix(4, 4, 8, 3)?;
    let (grid, _) = embed_matrix(&TriMesh::cuboid([0.0; 3], spec.object_dims), &truth, &spec, 1.0)?;

    let scenario = ThermalScenario {
        record_duration: 20.0,
        ..ThermalScenario::default()
    };
    let model = ThermalModelConfig::default();
    let rec = simulate_reading(&grid, &spec, &scenario, &model)?;
    println!("{} frames of {}x{} px", rec.frames.len(), rec.cols(), rec.rows());

    let geom = GridGeometry::new(4, 4, spec.density_x / model.camera.pixel_mm)?;
    let series = decode_thermal_recording(&rec, &geom, &truth)?;
    for p in series.points.iter().step_by(12) {
        println!("t = {:5.2} s  accuracy {:.3}{}", p.t, p.accuracy, if p.flagged { "  (outlier)" } else { "" });
    }
    let window = reading_window(&series, scenario.contact_duration)?;
    println!("readable for {window:.2} s after the hand leaves");
    Ok(())
}
