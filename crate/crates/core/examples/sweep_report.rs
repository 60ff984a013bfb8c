//! A reduced density sweep for both imaging methods, written as CSV and SVG.

use subprint::harness::{run_sweep, Axis, HarnessConfig, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = HarnessConfig {
        seeds: 2,
        ..HarnessConfig::default()
    };
    let axis = Axis::DensityX;
    let spec = SweepSpec::new(axis, axis.parse_values("1,3,5")?, config.seeds)?;
    let result = run_sweep(&spec, &config)?;
    for (method, value, accuracy) in result.summary() {
        println!("{method:<7} X = {value:<3} mean accuracy {accuracy:.3}");
    }
    let dir = std::env::temp_dir().join("subprint-sweep");
    for path in result.write(&dir, axis, &config)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
