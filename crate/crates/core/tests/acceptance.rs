//! Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
//! on any failure not listed in `KNOWN_FAILURES`.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;

use subprint::decode::{reading_window, AccuracySeries};
use subprint::geometry::{
    classify, embed, parse_stl, place_info, voxelize, write_stl, Cell, EmbedSpec, FabricationMode, GeometryError,
    GridFrame, StlFormat, TriMesh, Triangle, VoxelGrid,
};
use subprint::harness::{load_results, run_point, Axis, AxisValue, HarnessConfig, Method, RunRecord};
use subprint::imaging::{otsu_threshold, Gray8, Image};
use subprint::nirsim::{NirError, SpectraCube};
use subprint::payload::{matrix_accuracy, matrix_to_mesh, random_matrix, BitMatrix, PayloadError};
use subprint::thermsim::{
    format_thermal_csv, parse_thermal_csv, Environment, HeatModel, MaterialProps, ThermalError, ThermalFrame,
    ThermalRecording,
};

/// Criteria that fail with the shipped calibration for reasons the model
/// cannot address. They must keep failing; a pass means the list is stale.
const KNOWN_FAILURES: &[u32] = &[3];

const SWEEPS: [(&str, &str); 5] = [
    ("depth_d", "1,2,3,4"),
    ("density_X", "1,3,4,5"),
    ("infill_fraction", "0.1,0.2,0.4,0.8"),
    ("contact_temp", "10,20,35,40,50"),
    ("color", "blue,gray,orange,red,black"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let work = tempfile::tempdir().expect("temp dir");
    let default_dir = work.path().join("default");
    let negative_dir = work.path().join("negative");
    let t0 = Instant::now();
    let default_ok = sweep_all(&root.join("configs/default.json"), &default_dir);
    let negative_ok = sweep_all(&root.join("configs/negative_control.json"), &negative_dir);
    assert!(default_ok && negative_ok, "sweeps failed to run");
    let records = load_results(&default_dir).expect("default results").records;
    println!("sweeps finished in {:.1} s", t0.elapsed().as_secs_f64());

    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "thermal roundtrip", thermal_roundtrip()),
        (2, "thermal boundaries", thermal_boundaries(&records)),
        (3, "contact temperatures", temperatures(&records)),
        (4, "NIR roundtrip and boundaries", nir_boundaries(&records)),
        (5, "Otsu oracle", otsu_oracle()),
        (6, "heat solver physics", solver_physics()),
        (7, "geometry oracles", geometry_oracles()),
        (8, "metrics", metrics()),
        (9, "formats and guideline check", formats(&default_dir, &negative_dir)),
    ];

    let mut unexpected = 0;
    for (id, name, o) in &results {
        let known = KNOWN_FAILURES.contains(id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known failure)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!("criterion {id} [{name}]: {tag} - {}", o.detail);
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criterion outcome(s) differ from expectation");
        std::process::exit(1);
    }
}

fn sweep_all(config: &Path, out: &Path) -> bool {
    SWEEPS.iter().all(|(axis, values)| {
        Command::new(env!("CARGO_BIN_EXE_subprint"))
            .args(["sweep", "--axis", axis, "--values", values, "--config"])
            .arg(config)
            .arg("--out")
            .arg(out)
            .output()
            .map(|o| o.status.success())
            .unwrap_or(false)
    })
}

/// Mean accuracy of one sweep point.
fn point(records: &[RunRecord], method: Method, axis: Axis, value: AxisValue) -> f64 {
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.method == method && r.axis == axis && r.value == value)
        .map(|r| r.accuracy)
        .collect();
    assert!(!v.is_empty(), "no records for {method} {axis}={value}");
    v.iter().sum::<f64>() / v.len() as f64
}

fn num(v: f64) -> AxisValue {
    AxisValue::Number(v)
}

fn thermal_roundtrip() -> Outcome {
    let cfg = HarnessConfig::default();
    let t0 = Instant::now();
    let runs: Vec<RunRecord> = (0..100)
        .map(|seed| run_point(&cfg, Method::Thermal, Axis::InfillFraction, num(0.10), seed).expect("thermal run"))
        .collect();
    let secs = t0.elapsed().as_secs_f64();
    let perfect = runs.iter().filter(|r| r.accuracy == 1.0).count();
    let positive = runs.iter().filter(|r| r.window_s.is_some_and(|w| w > 0.0)).count();
    let min_window = runs.iter().filter_map(|r| r.window_s).fold(f64::INFINITY, f64::min);
    outcome(
        perfect == 100 && positive == 100 && secs < 60.0,
        format!("{perfect}/100 perfect, {positive}/100 windows > 0 (min {min_window:.2} s), {secs:.1} s"),
    )
}

fn thermal_boundaries(r: &[RunRecord]) -> Outcome {
    let t = Method::Thermal;
    let f: Vec<f64> = [0.1, 0.2, 0.4, 0.8]
        .map(|v| point(r, t, Axis::InfillFraction, num(v)))
        .to_vec();
    let x4 = point(r, t, Axis::DensityX, num(4.0));
    let d2 = point(r, t, Axis::DepthD, num(2.0));
    let pass = f[0] == 1.0 && f[1] == 1.0 && f[2] < 1.0 && f[3] < 1.0 && x4 < 1.0 && d2 < 1.0;
    outcome(
        pass,
        format!(
            "f 0.1/0.2/0.4/0.8 = {:.3}/{:.3}/{:.3}/{:.3}, X=4 {x4:.3}, d=2 {d2:.3}",
            f[0], f[1], f[2], f[3]
        ),
    )
}

fn temperatures(r: &[RunRecord]) -> Outcome {
    let temps = [10.0, 20.0, 35.0, 40.0, 50.0];
    let perfect = temps
        .iter()
        .filter(|&&c| point(r, Method::Thermal, Axis::ContactTemp, num(c)) == 1.0)
        .count();
    let window = |c: f64| {
        let w: Vec<f64> = r
            .iter()
            .filter(|x| x.axis == Axis::ContactTemp && x.value == num(c))
            .filter_map(|x| x.window_s)
            .collect();
        w.iter().sum::<f64>() / w.len() as f64
    };
    let all_positive = r
        .iter()
        .filter(|x| x.axis == Axis::ContactTemp)
        .all(|x| x.window_s.is_some_and(|w| w > 0.0));
    let (w40, w50) = (window(40.0), window(50.0));
    outcome(
        perfect == 5 && all_positive && w50 <= w40,
        format!("{perfect}/5 temperatures perfect, windows positive: {all_positive}, mean window 40 C {w40:.2} s, 50 C {w50:.2} s"),
    )
}

fn nir_boundaries(r: &[RunRecord]) -> Outcome {
    let n = Method::Nir;
    let d: Vec<f64> = [1.0, 2.0, 3.0, 4.0].map(|v| point(r, n, Axis::DepthD, num(v))).to_vec();
    let x: Vec<f64> = [1.0, 3.0, 5.0].map(|v| point(r, n, Axis::DensityX, num(v))).to_vec();
    let per_seed = |f: f64| -> Vec<f64> {
        r.iter()
            .filter(|x| x.method == n && x.axis == Axis::InfillFraction && x.value == num(f))
            .map(|x| x.accuracy)
            .collect()
    };
    let base = per_seed(0.1);
    let infill_same = base.len() == 10
        && base.iter().all(|&a| a == 1.0)
        && [0.2, 0.4, 0.8].iter().all(|&f| per_seed(f) == base);
    use subprint::geometry::Color::*;
    let colors_ok = [Blue, Gray, Orange, Red]
        .iter()
        .all(|&c| point(r, n, Axis::Color, AxisValue::Color(c)) == 1.0);
    let black = point(r, n, Axis::Color, AxisValue::Color(Black));
    let pass = d[..3].iter().all(|&a| a == 1.0)
        && d[3] < 1.0
        && x[1] == 1.0
        && x[2] == 1.0
        && x[0] < 1.0
        && infill_same
        && colors_ok
        && black < 1.0;
    outcome(
        pass,
        format!(
            "d1-4 {:.2}/{:.2}/{:.2}/{:.3}, X1/3/5 {:.3}/{:.2}/{:.2}, infill identical: {infill_same}, non-black perfect: {colors_ok}, black {black:.3}",
            d[0], d[1], d[2], d[3], x[0], x[1], x[2]
        ),
    )
}

/// Exhaustive between-class variance maximization straight from the pixels,
/// compared as exact rationals; the smallest maximizer wins.
fn otsu_reference(img: &Gray8) -> Option<u8> {
    let n = img.data.len() as i128;
    let total: i128 = img.data.iter().map(|&v| v as i128).sum();
    let mut best: Option<(u8, i128, i128)> = None;
    for t in 0..=254u8 {
        let (mut w0, mut s0) = (0i128, 0i128);
        for &v in &img.data {
            if v <= t {
                w0 += 1;
                s0 += v as i128;
            }
        }
        let w1 = n - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        // σ_b² · n² = (s0·n − total·w0)² / (w0·w1)
        let num = (s0 * n - total * w0).pow(2);
        let den = w0 * w1;
        match best {
            Some((_, bn, bd)) if num * bd <= bn * den => {}
            _ => best = Some((t, num, den)),
        }
    }
    best.map(|b| b.0)
}

fn otsu_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let mut compared = 0;
    for i in 0..1000 {
        let (w, h) = (rng.gen_range(2..40), rng.gen_range(2..40));
        let data: Vec<u8> = match i % 3 {
            0 => {
                let (a, b) = (rng.gen_range(0..128u8), rng.gen_range(128..=255u8));
                (0..w * h)
                    .map(|_| {
                        let c = if rng.gen_bool(0.4) { a } else { b };
                        c.saturating_add(rng.gen_range(0..12)).saturating_sub(rng.gen_range(0..12))
                    })
                    .collect()
            }
            1 => (0..w * h).map(|_| rng.gen()).collect(),
            _ => {
                let base = rng.gen_range(20..230u8);
                (0..w * h).map(|_| base.wrapping_add(rng.gen_range(0..5))).collect()
            }
        };
        let img: Gray8 = Image::new(w, h, data).unwrap();
        let got = otsu_threshold(&img).ok();
        compared += 1;
        if got != otsu_reference(&img) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over {compared} images"))
}

fn column(n: usize, pitch: f64) -> VoxelGrid {
    let frame = GridFrame {
        origin: [0.0; 3],
        pitch,
        dims: [1, 1, n],
    };
    let mut g = VoxelGrid::empty(frame);
    g.cells.iter_mut().for_each(|c| *c = Cell::Object);
    g
}

fn solver_physics() -> Outcome {
    let pla = MaterialProps::PLA;

    // Enthalpy drift of an insulated block with a random start field.
    let frame = GridFrame {
        origin: [0.0; 3],
        pitch: 0.5,
        dims: [8, 7, 6],
    };
    let mut block = VoxelGrid::empty(frame);
    block.cells.iter_mut().for_each(|c| *c = Cell::Object);
    let props = vec![pla; block.cells.len()];
    let m = HeatModel::insulated(&block, &props).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut state: Vec<f64> = (0..m.len()).map(|_| rng.gen_range(10.0..50.0)).collect();
    let env = Environment {
        ambient: 20.0,
        contact: None,
    };
    let dt = 0.9 * m.stability_bound(false);
    let h0 = m.enthalpy(&state);
    for _ in 0..10_000 {
        state = m.step(&state, dt, env).unwrap();
    }
    let drift = ((m.enthalpy(&state) - h0) / h0).abs();

    // Semi-infinite column under a fixed surface temperature.
    let (n, p) = (80, 0.5);
    let col = column(n, p);
    let cm = HeatModel::insulated(&col, &vec![pla; n]).unwrap();
    let (t0, ts) = (20.0, 35.0);
    let contact = Environment {
        ambient: t0,
        contact: Some(ts),
    };
    let dt = 0.5 * cm.stability_bound(true);
    let alpha = pla.diffusivity();
    let mut s = cm.uniform(t0);
    let mut t = 0.0;
    let mut worst: f64 = 0.0;
    for check in [3.0, 10.0, 30.0, 60.0] {
        while t + dt <= check {
            s = cm.step(&s, dt, contact).unwrap();
            t += dt;
        }
        let last = check - t;
        if last > 0.0 {
            s = cm.step(&s, last, contact).unwrap();
            t = check;
        }
        // Slot k counts up from the bottom; depth is measured from the top face.
        for k in 0..n - 2 {
            let depth_m = (n - k) as f64 * p * 1e-3 - 0.5 * p * 1e-3;
            let exact = ts + (t0 - ts) * erf(depth_m / (2.0 * (alpha * t).sqrt()));
            worst = worst.max((s[k] - exact).abs() / (ts - t0));
        }
    }

    // The stability bound is exact.
    let b = m.stability_bound(false);
    let at_bound = m.step(&m.uniform(1.0), b, env).is_ok();
    let above = matches!(
        m.step(&m.uniform(1.0), b * (1.0 + 1e-12), env),
        Err(ThermalError::UnstableDt { .. })
    );
    outcome(
        drift < 1e-6 && worst < 0.02 && at_bound && above,
        format!(
            "enthalpy drift {drift:.2e} over 1e4 steps, erf profile max error {:.2}%, bound accepted: {at_bound}, above rejected: {above}",
            worst * 100.0
        ),
    )
}

fn geometry_oracles() -> Outcome {
    let sphere = TriMesh::uv_sphere([0.0; 3], 5.0, 96, 192);
    let count = voxelize(&sphere, 0.25, Cell::Object).unwrap().count(Cell::Object) as f64;
    let analytic = 4.0 / 3.0 * std::f64::consts::PI * 125.0 / 0.25f64.powi(3);
    let sphere_err = (count - analytic).abs() / analytic;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let object = TriMesh::cuboid([0.0; 3], [30.0, 30.0, 15.0]);
    let mut embed_fail = 0;
    for _ in 0..100 {
        let spec = EmbedSpec {
            depth_d: [0.5, 1.0, 2.0, 3.0][rng.gen_range(0..4)],
            density_x: [3.0, 4.0, 5.0, 6.0][rng.gen_range(0..4)],
            infill_fraction: rng.gen_range(0.05..1.0),
            mode: if rng.gen() { FabricationMode::SurfaceJoin } else { FabricationMode::SurfaceFill },
            ..EmbedSpec::default()
        };
        let m = random_matrix(4, 4, rng.gen_range(1..16), rng.gen()).unwrap();
        let info = place_info(&object, &matrix_to_mesh(&m, &spec).unwrap(), &spec).unwrap();
        let pitch = [0.5, 1.0][rng.gen_range(0..2)];
        let (grid, bodies) = embed(&object, &info, &spec, pitch).unwrap();
        let frame = grid.frame;
        let carved = classify(&bodies.object_body, &frame).unwrap();
        let inside = classify(&bodies.info_body, &frame).unwrap();
        let original = classify(&object, &frame).unwrap();
        let overlap = carved.iter().zip(&inside).filter(|(a, b)| **a && **b).count();
        let union = carved.iter().zip(&inside).filter(|(a, b)| **a || **b).count();
        let whole = original.iter().filter(|&&x| x).count();
        let labelled = grid.count(Cell::Object) + grid.count(Cell::Info);
        if overlap != 0 || union != whole || labelled != whole {
            embed_fail += 1;
        }
    }

    let mut stl_fail = 0;
    for _ in 0..100 {
        let tris: Vec<Triangle> = (0..rng.gen_range(1..60))
            .map(|_| {
                let mut v = || [0; 3].map(|_: i32| rng.gen_range(-1e3..1e3) as f32 as f64);
                Triangle::new(v(), v(), v())
            })
            .collect();
        let mesh = TriMesh::new(tris).unwrap();
        let bytes = write_stl(&mesh, StlFormat::Binary).unwrap();
        let back = parse_stl(&bytes).unwrap();
        let vertices = |m: &TriMesh| m.triangles.iter().map(|t| t.vertices).collect::<Vec<_>>();
        if vertices(&back) != vertices(&mesh) || write_stl(&back, StlFormat::Binary).unwrap() != bytes {
            stl_fail += 1;
        }
    }
    outcome(
        sphere_err < 0.02 && embed_fail == 0 && stl_fail == 0,
        format!(
            "sphere volume error {:.3}%, embed violations {embed_fail}/100, STL roundtrip mismatches {stl_fail}/100",
            sphere_err * 100.0
        ),
    )
}

fn metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut acc_fail = 0;
    for _ in 0..1000 {
        let a: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
        let b: Vec<bool> = (0..16).map(|_| rng.gen()).collect();
        let pack = |v: &[bool]| v.iter().enumerate().fold(0u16, |acc, (i, &x)| acc | (x as u16) << i);
        let want = (!(pack(&a) ^ pack(&b))).count_ones() as f64 / 16.0;
        let got = matrix_accuracy(&BitMatrix::raw(4, 4, a).unwrap(), &BitMatrix::raw(4, 4, b).unwrap()).unwrap();
        if got != want {
            acc_fail += 1;
        }
    }

    let series = AccuracySeries::with_outliers(
        (0..100)
            .map(|k| (k as f64 / 6.0, if k < 72 { 1.0 } else { 0.5 }))
            .collect(),
    );
    let window = reading_window(&series, 0.0).unwrap();

    let mut acc = vec![1.0; 10];
    acc[3] = 0.5;
    acc[7] = 0.5;
    let flagged: Vec<usize> = AccuracySeries::with_outliers(acc.iter().enumerate().map(|(i, &a)| (i as f64, a)).collect())
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.flagged)
        .map(|(i, _)| i)
        .collect();
    outcome(
        acc_fail == 0 && window == 12.0 && flagged == [3, 7],
        format!("accuracy mismatches {acc_fail}/1000, window {window} s, flagged frames {flagged:?}"),
    )
}

fn formats(default_dir: &PathBuf, negative_dir: &PathBuf) -> Outcome {
    let mut problems: Vec<String> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Thermal CSV: values survive at three decimals.
    let frames: Vec<ThermalFrame> = (0..5)
        .map(|k| ThermalFrame {
            t: k as f64 / 6.0,
            image: Image::new(7, 5, (0..35).map(|_| rng.gen_range(-20.0..80.0)).collect()).unwrap(),
        })
        .collect();
    let rec = ThermalRecording::new(frames).unwrap();
    let back = parse_thermal_csv(&format_thermal_csv(&rec)).unwrap();
    let worst = rec
        .frames
        .iter()
        .zip(&back.frames)
        .flat_map(|(a, b)| a.image.data.iter().zip(&b.image.data).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    if worst > 5e-4 + 1e-12 {
        problems.push(format!("thermal CSV error {worst}"));
    }

    // Spectra cube: bit-exact.
    let wl: Vec<f32> = (0..228).map(|i| 900.0 + 800.0 * i as f32 / 227.0).collect();
    let data: Vec<f32> = (0..6 * 4 * 228).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let cube = SpectraCube::new(6, 4, wl, data, 1.0).unwrap();
    let bytes = cube.to_bytes();
    if SpectraCube::from_bytes(&bytes).ok().as_ref() != Some(&cube) {
        problems.push("cube roundtrip".into());
    }

    // Malformed inputs name the error and where it is.
    let text = format_thermal_csv(&rec);
    let bad_csv = {
        let mut lines: Vec<&str> = text.lines().collect();
        lines[3] = "1.0,oops,2.0,3.0,4.0,5.0,6.0";
        lines.join("\n")
    };
    if !matches!(parse_thermal_csv(&bad_csv), Err(ThermalError::Format { line: 4, .. })) {
        problems.push("thermal CSV error position".into());
    }
    if !matches!(
        parse_stl(b"solid x\nfacet normal 0 0 1\nouter loop\nvertex 0 0\n"),
        Err(GeometryError::MalformedSyntax { line: 4, .. })
    ) {
        problems.push("ASCII STL error position".into());
    }
    let stl = write_stl(&TriMesh::cuboid([0.0; 3], [1.0; 3]), StlFormat::Binary).unwrap();
    if !matches!(parse_stl(&stl[..stl.len() - 1]), Err(GeometryError::TruncatedFile { .. })) {
        problems.push("truncated STL".into());
    }
    if !matches!(SpectraCube::from_bytes(&bytes[..bytes.len() - 4]), Err(NirError::LengthMismatch { .. })) {
        problems.push("truncated cube".into());
    }
    if !matches!(SpectraCube::from_bytes(b"CUBE0000"), Err(NirError::BadMagic)) {
        problems.push("cube magic".into());
    }
    if !matches!(BitMatrix::parse("1010\n10x0\n"), Err(PayloadError::BadMatrixFile { line: 2, .. })) {
        problems.push("matrix file error position".into());
    }

    // The guideline check passes on the default calibration and fails on the
    // negative control.
    let check = |dir: &PathBuf| {
        Command::new(env!("CARGO_BIN_EXE_subprint"))
            .args(["check-guidelines", "--results"])
            .arg(dir)
            .output()
            .expect("run check-guidelines")
            .status
            .code()
    };
    let (d, n) = (check(default_dir), check(negative_dir));
    if d != Some(0) {
        problems.push(format!("default check exit {d:?}"));
    }
    if n != Some(2) {
        problems.push(format!("negative control exit {n:?}"));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            format!("CSV max error {worst:.1e}, cube bit-exact, 6 malformed inputs rejected, check-guidelines exit {d:?} / negative control {n:?}")
        } else {
            problems.join("; ")
        },
    )
}
