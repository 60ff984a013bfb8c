use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use subprint::decode::{
    decode_nir_cube, decode_thermal_recording, nir_spacing, reading_window, AccuracySeries, DecodeError, GridGeometry,
};
use subprint::geometry::{
    embed, export_bodies, parse_stl, place_info, Color, EmbedSpec, FabricationMode, GeometryError,
};
use subprint::harness::{
    check_guidelines, load_design, load_results, run_sweep, Axis, GuidelineRow, HarnessConfig, HarnessError, Method,
    SweepSpec,
};
use subprint::nirsim::{read_cube, simulate_scan, write_cube, NirError, ScanParams};
use subprint::payload::{bitmap_to_mesh, embed_matrix, load_pbm, matrix_accuracy, BitMatrix, PayloadError};
use subprint::thermsim::{read_thermal_csv, simulate_reading, write_thermal_csv, ThermalError, ThermalScenario};

/// Embed, simulate and decode information hidden under the surface of 3D prints.
#[derive(Parser)]
#[command(name = "subprint", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a bit matrix or bitmap under the top face of an object.
    Embed {
        #[arg(long)]
        object: PathBuf,
        /// Matrix file (rows of 0/1) or P1/P4 bitmap.
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        depth: f64,
        /// mm per payload bit
        #[arg(long)]
        density: f64,
        /// Information body height, mm.
        #[arg(long)]
        height: f64,
        #[arg(long)]
        mode: FabricationMode,
        #[arg(long)]
        infill: f64,
        #[arg(long)]
        out: PathBuf,
        /// Voxel pitch, mm.
        #[arg(long, default_value_t = 0.2)]
        pitch: f64,
        #[arg(long, default_value = "blue")]
        color: Color,
    },
    /// Simulate a contact reading and write the thermal recording.
    SimulateThermal {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        contact_temp: f64,
        #[arg(long)]
        ambient: f64,
        /// Recording length after contact, s.
        #[arg(long)]
        duration: f64,
        #[arg(long)]
        fps: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Harness config JSON for model constants.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Simulate a near-infrared raster scan and write the spectra cube.
    SimulateNir {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        color: Color,
        #[arg(long)]
        step_mm: f64,
        /// Raster size, e.g. 24x24.
        #[arg(long)]
        res: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Decode every frame of a thermal recording and write the accuracy series.
    DecodeThermal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// Pixels between sample points.
        #[arg(long)]
        spacing: f64,
        #[arg(long)]
        out: PathBuf,
        /// End of the contact phase, s.
        #[arg(long, default_value_t = 3.0)]
        contact_end: f64,
    },
    /// Decode a spectra cube and write its accuracy.
    DecodeNir {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// mm per payload bit
        #[arg(long, default_value_t = 5.0)]
        density: f64,
    },
    /// Sweep one design parameter and write CSV and SVG results.
    Sweep {
        #[arg(long)]
        axis: Axis,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Restrict to these methods (thermal, nir).
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
    },
    /// Check sweep results against the per-method readability limits.
    CheckGuidelines {
        #[arg(long)]
        results: PathBuf,
    },
}

/// A run that completed but did not decode (exit 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct BelowThreshold(String);

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_max_level(tracing::Level::WARN)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    const BELOW: u8 = 2;
    const FORMAT: u8 = 3;
    const SPEC: u8 = 4;
    fn geometry(e: &GeometryError) -> u8 {
        match e {
            GeometryError::SpecViolation(_)
            | GeometryError::InfoProtrudes
            | GeometryError::PitchTooCoarse { .. }
            | GeometryError::InvalidPitch(_)
            | GeometryError::ModeInapplicable => SPEC,
            _ => FORMAT,
        }
    }
    for cause in err.chain() {
        if cause.is::<BelowThreshold>() {
            return BELOW;
        }
        if let Some(e) = cause.downcast_ref::<GeometryError>() {
            return geometry(e);
        }
        if let Some(e) = cause.downcast_ref::<PayloadError>() {
            return match e {
                PayloadError::Geometry(g) => geometry(g),
                PayloadError::BadMagic | PayloadError::BadPbmHeader(_) | PayloadError::BadMatrixFile { .. } => FORMAT,
                _ => SPEC,
            };
        }
        if let Some(e) = cause.downcast_ref::<ThermalError>() {
            return match e {
                ThermalError::Format { .. } | ThermalError::Io(..) => FORMAT,
                _ => SPEC,
            };
        }
        if let Some(e) = cause.downcast_ref::<NirError>() {
            return match e {
                NirError::WindowOutOfBounds { .. } | NirError::BadOptics(_) => SPEC,
                _ => FORMAT,
            };
        }
        if let Some(e) = cause.downcast_ref::<DecodeError>() {
            return match e {
                DecodeError::BadGeometry(_) => SPEC,
                _ => BELOW,
            };
        }
        if let Some(e) = cause.downcast_ref::<HarnessError>() {
            match e {
                HarnessError::IncompleteCoverage { .. } | HarnessError::OutOfTable(_) | HarnessError::BadValue(_) => {
                    return SPEC
                }
                HarnessError::Geometry(g) => return geometry(g),
                // The failing module error follows in the chain.
                HarnessError::Run { .. } => continue,
                _ => return FORMAT,
            }
        }
    }
    FORMAT
}

fn read_truth(path: &Path) -> Result<BitMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BitMatrix::parse(&text).with_context(|| format!("in {}", path.display()))?)
}

fn load_config(path: Option<&Path>) -> Result<HarnessConfig> {
    Ok(match path {
        Some(p) => HarnessConfig::load(p)?,
        None => HarnessConfig::default(),
    })
}

fn parse_res(res: &str) -> Result<(usize, usize)> {
    let parse = || -> Option<(usize, usize)> {
        let (w, h) = res.split_once(['x', 'X'])?;
        Some((w.trim().parse().ok()?, h.trim().parse().ok()?))
    };
    match parse() {
        Some((w, h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(HarnessError::BadValue(format!("--res `{res}` is not WxH")).into()),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Embed {
            object,
            payload,
            depth,
            density,
            height,
            mode,
            infill,
            out,
            pitch,
            color,
        } => {
            let bytes = fs::read(&object).with_context(|| format!("reading {}", object.display()))?;
            let mesh = parse_stl(&bytes).with_context(|| format!("in {}", object.display()))?;
            let bbox = mesh.bbox().ok_or(GeometryError::EmptyMesh)?;
            let spec = EmbedSpec {
                depth_d: depth,
                density_x: density,
                info_height: height,
                mode,
                infill_fraction: infill,
                object_dims: bbox.extent(),
                object_color: color,
                ..EmbedSpec::default()
            };
            let raw = fs::read(&payload).with_context(|| format!("reading {}", payload.display()))?;
            let bodies = if raw.starts_with(b"P1") || raw.starts_with(b"P4") {
                let glyph = load_pbm(&raw, density).with_context(|| format!("in {}", payload.display()))?;
                let info = place_info(&mesh, &bitmap_to_mesh(&glyph, height)?, &spec)?;
                embed(&mesh, &info, &spec, pitch)?.1
            } else {
                let m = read_truth(&payload)?;
                embed_matrix(&mesh, &m, &spec, pitch)?.1
            };
            let manifest = export_bodies(&bodies, &out)?;
            println!("wrote {}", manifest.display());
        }
        Command::SimulateThermal {
            design,
            contact_temp,
            ambient,
            duration,
            fps,
            seed,
            out,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let (grid, spec) = load_design(&design, Some(cfg.thermal.pitch_mm))?;
            let scenario = ThermalScenario {
                contact_temp,
                ambient_temp: ambient,
                record_duration: duration,
                frame_rate: fps,
                seed,
                ..cfg.thermal.scenario.clone()
            };
            let rec = simulate_reading(&grid, &spec, &scenario, &cfg.thermal.model)?;
            write_thermal_csv(&rec, &out)?;
            println!("wrote {} frames of {}x{} to {}", rec.frames.len(), rec.cols(), rec.rows(), out.display());
        }
        Command::SimulateNir {
            design,
            color,
            step_mm,
            res,
            seed,
            out,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let (width, height) = parse_res(&res)?;
            let (grid, mut spec) = load_design(&design, Some(cfg.nir.model.pitch_mm))?;
            spec.object_color = color;
            let scan = ScanParams {
                width,
                height,
                step_mm,
                seed,
                noise_sigma: cfg.nir.model.band_noise_sigma,
            };
            let cube = simulate_scan(&grid, &spec, &cfg.nir.model, &scan)?;
            write_cube(&cube, &out)?;
            println!("wrote {}x{}x{} cube to {}", cube.width, cube.height, cube.bands(), out.display());
        }
        Command::DecodeThermal {
            input,
            truth,
            spacing,
            out,
            contact_end,
        } => {
            let m = read_truth(&truth)?;
            let rec = read_thermal_csv(&input)?;
            let geom = GridGeometry::new(m.rows(), m.cols(), spacing)?;
            let series = decode_thermal_recording(&rec, &geom, &m)?;
            fs::write(&out, series.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            let first = series.points.iter().find(|p| p.t >= contact_end - 1e-9).map_or(0.0, |p| p.accuracy);
            let window = reading_window(&series, contact_end)?;
            println!("first post-contact accuracy {first:.4}, reading window {window:.2} s");
            if first < 1.0 {
                bail!(BelowThreshold(format!("first post-contact frame decoded at {first:.4}")));
            }
        }
        Command::DecodeNir {
            input,
            truth,
            out,
            density,
        } => {
            let m = read_truth(&truth)?;
            let cube = read_cube(&input)?;
            let geom = GridGeometry::new(m.rows(), m.cols(), nir_spacing(density, cube.step_mm as f64))?;
            let decoded = decode_nir_cube(&cube, &geom)?;
            let accuracy = matrix_accuracy(&decoded, &m)?;
            let series = AccuracySeries::with_outliers(vec![(0.0, accuracy)]);
            fs::write(&out, series.to_csv()).with_context(|| format!("writing {}", out.display()))?;
            print!("{decoded}");
            println!("accuracy {accuracy:.4}");
            if accuracy < 1.0 {
                bail!(BelowThreshold(format!("decoded at {accuracy:.4}")));
            }
        }
        Command::Sweep {
            axis,
            values,
            config,
            out,
            methods,
        } => {
            let cfg = load_config(config.as_deref())?;
            let mut spec = SweepSpec::new(axis, axis.parse_values(&values)?, cfg.seeds)?;
            if let Some(m) = methods {
                spec.methods = m;
                spec.validate()?;
            }
            let result = run_sweep(&spec, &cfg)?;
            for (method, value, acc) in result.summary() {
                println!("{method:<7} {axis}={value:<8} mean accuracy {acc:.4}");
            }
            for p in result.write(&out, axis, &cfg)? {
                println!("wrote {}", p.display());
            }
        }
        Command::CheckGuidelines { results } => {
            let r = load_results(&results)?;
            let report = check_guidelines(&r.records, &GuidelineRow::table())?;
            println!("{report}");
            if !report.passed() {
                bail!(BelowThreshold("simulated outcomes contradict the guidelines".into()));
            }
        }
    }
    Ok(())
}
