//! Transient heat conduction through a printed design and the synthetic
//! thermal-camera recordings of a contact reading.

mod csv;
mod materials;
mod reading;
mod solver;

pub use csv::{format_thermal_csv, parse_thermal_csv, read_thermal_csv, write_thermal_csv};
pub use materials::{material_grid, MaterialProps, ThermalMaterials};
pub use reading::{
    simulate_reading, ThermalCamera, ThermalFrame, ThermalModelConfig, ThermalRecording, ThermalScenario,
};
pub use solver::{step_heat, Convection, Environment, HeatModel, CONVECTION_REF_DT};

#[derive(Debug, thiserror::Error)]
pub enum ThermalError {
    #[error("time step {dt} s exceeds the stability bound {bound} s")]
    UnstableDt { dt: f64, bound: f64 },
    #[error("spec violation: {0}")]
    SpecViolation(String),
    #[error("invalid material {0:?}")]
    BadMaterial(MaterialProps),
    #[error("thermal CSV line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("I/O error on {0}: {1}")]
    Io(String, #[source] std::io::Error),
}
