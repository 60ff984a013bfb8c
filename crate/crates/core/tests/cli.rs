//! End-to-end runs of the command-line tool.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use subprint::geometry::{write_stl, StlFormat, TriMesh};

fn subprint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subprint")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes the 30 mm cube and a 4x4 payload, and embeds it at d = `depth`.
fn design(dir: &Path, depth: f64, mode: &str) -> std::path::PathBuf {
    let cube = TriMesh::cuboid([0.0; 3], [30.0, 30.0, 15.0]);
    fs::write(dir.join("cube.stl"), write_stl(&cube, StlFormat::Binary).unwrap()).unwrap();
    fs::write(dir.join("truth.txt"), "1011\n0100\n1001\n0110\n").unwrap();
    let out = dir.join(format!("design-{mode}-{depth}"));
    let o = subprint(&[
        "embed",
        "--object",
        path(&dir.join("cube.stl")),
        "--payload",
        path(&dir.join("truth.txt")),
        "--depth",
        &depth.to_string(),
        "--density",
        "5",
        "--height",
        "1",
        "--mode",
        mode,
        "--infill",
        "0.1",
        "--pitch",
        "0.5",
        "--out",
        path(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn thermal_pipeline_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let design = design(d, 1.0, "surface-join");
    assert!(design.join("manifest.json").exists());

    let rec = d.join("rec.csv");
    let o = subprint(&[
        "simulate-thermal",
        "--design",
        path(&design),
        "--contact-temp",
        "35",
        "--ambient",
        "27",
        "--duration",
        "8",
        "--fps",
        "6",
        "--seed",
        "1",
        "--out",
        path(&rec),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let series = d.join("series.csv");
    let truth = d.join("truth.txt");
    let args = [
        "decode-thermal",
        "--in",
        path(&rec),
        "--truth",
        path(&truth),
        "--spacing",
        "5",
        "--out",
        path(&series),
    ];
    let o = subprint(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&series).unwrap();
    assert!(text.lines().count() > 60);
    assert!(String::from_utf8_lossy(&o.stdout).contains("first post-contact accuracy 1.0000"));

    // The same recording against a different truth completes but does not decode.
    fs::write(d.join("truth.txt"), "0100\n1011\n0110\n1001\n").unwrap();
    assert_eq!(code(&subprint(&args)), 2);
}

#[test]
fn nir_pipeline_decodes_and_fails_past_the_depth_limit() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (depth, want) in [(2.0, 0), (4.0, 2)] {
        let design = design(d, depth, "surface-fill");
        let cube = d.join(format!("scan-{depth}.cube"));
        let o = subprint(&[
            "simulate-nir",
            "--design",
            path(&design),
            "--color",
            "blue",
            "--step-mm",
            "1",
            "--res",
            "24x24",
            "--seed",
            "3",
            "--out",
            path(&cube),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = subprint(&[
            "decode-nir",
            "--in",
            path(&cube),
            "--truth",
            path(&d.join("truth.txt")),
            "--out",
            path(&d.join("nir.csv")),
        ]);
        assert_eq!(code(&o), want, "d = {depth}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn malformed_inputs_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("truth.txt"), "1011\n0100\n1001\n0110\n").unwrap();
    fs::write(d.join("rec.csv"), "t,row,col,temp\n0,0,0,oops\n").unwrap();
    let o = subprint(&[
        "decode-thermal",
        "--in",
        path(&d.join("rec.csv")),
        "--truth",
        path(&d.join("truth.txt")),
        "--spacing",
        "5",
        "--out",
        path(&d.join("s.csv")),
    ]);
    assert_eq!(code(&o), 3);

    fs::write(d.join("bad.stl"), b"solid x\n  facet normal 0 0 1\n").unwrap();
    let o = subprint(&[
        "embed",
        "--object",
        path(&d.join("bad.stl")),
        "--payload",
        path(&d.join("truth.txt")),
        "--depth",
        "1",
        "--density",
        "5",
        "--height",
        "1",
        "--mode",
        "surface-join",
        "--infill",
        "0.1",
        "--out",
        path(&d.join("out")),
    ]);
    assert_eq!(code(&o), 3);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn invalid_parameters_and_usage_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cube = TriMesh::cuboid([0.0; 3], [30.0, 30.0, 15.0]);
    fs::write(d.join("cube.stl"), write_stl(&cube, StlFormat::Binary).unwrap()).unwrap();
    fs::write(d.join("truth.txt"), "1011\n0100\n1001\n0110\n").unwrap();
    // An information body deeper than the object is tall.
    let o = subprint(&[
        "embed",
        "--object",
        path(&d.join("cube.stl")),
        "--payload",
        path(&d.join("truth.txt")),
        "--depth",
        "20",
        "--density",
        "5",
        "--height",
        "1",
        "--mode",
        "surface-join",
        "--infill",
        "0.1",
        "--out",
        path(&d.join("out")),
    ]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(code(&subprint(&["sweep", "--axis", "nope", "--values", "1", "--out", "x"])), 4);
    assert_eq!(code(&subprint(&["--help"])), 0);
}

#[test]
fn incomplete_results_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = subprint(&["check-guidelines", "--results", path(dir.path())]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}
