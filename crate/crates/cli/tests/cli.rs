use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: [&str; 4] = ["--n-r", "6", "--n-theta", "16"];

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diskharm")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// `(r, value)` pairs of a grid file.
fn rows(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect()
}

const FIG9_SOURCE: &str = "type = \"char_rect\"\nr = [0.9, 1.0]\ntheta = [-0.5235987755982989, 0.5235987755982989]\n";

#[test]
fn figure_four_is_flat_at_pi_over_16() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &[&["figure", "4"][..], &SMALL].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for (_, v) in rows(&dir.path().join("fig4.csv")) {
        assert!((v - PI / 16.0).abs() <= 1e-3);
    }
}

#[test]
fn figure_eight_center_is_one_sixth() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &[&["figure", "8"][..], &SMALL].concat())), 0);
    let center: Vec<f64> =
        rows(&dir.path().join("fig8.csv")).into_iter().filter(|(r, _)| *r == 0.0).map(|(_, v)| v).collect();
    assert_eq!(center.len(), 16);
    for v in center {
        assert!((v - 1.0 / 6.0).abs() <= 1e-6);
    }
}

#[test]
fn figure_five_writes_both_panels() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["figure", "5"])), 0);
    let peak = rows(&dir.path().join("fig5b.csv")).into_iter().map(|(_, v)| v).fold(f64::MIN, f64::max);
    assert!((peak - 0.5).abs() <= 0.1, "{peak}");
    assert!(dir.path().join("fig5a.csv").exists());
}

#[test]
fn paired_figures_write_a_ratio() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &[&["figure", "12"][..], &SMALL].concat())), 0);
    for f in ["fig12_poisson.csv", "fig12_q.csv", "fig12_ratio.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let q = rows(&dir.path().join("fig12_q.csv"));
    let p = rows(&dir.path().join("fig12_poisson.csv"));
    let ratio = rows(&dir.path().join("fig12_ratio.csv"));
    for k in 0..q.len() {
        assert_eq!(ratio[k].1.to_bits(), (q[k].1 / p[k].1).to_bits());
    }
}

#[test]
fn transform_matches_figure_nine_bitwise() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("s.toml"), FIG9_SOURCE).unwrap();
    assert_eq!(code(&run(dir.path(), &[&["figure", "9", "--out", "figs"][..], &SMALL].concat())), 0);
    let args =
        [&["transform", "--source-file", "s.toml", "--prefactor", "2/pi", "--out", "t.csv"][..], &SMALL].concat();
    assert_eq!(code(&run(dir.path(), &args)), 0);
    assert_eq!(fs::read(dir.path().join("t.csv")).unwrap(), fs::read(dir.path().join("figs/fig9.csv")).unwrap());
    assert_eq!(
        fs::read(dir.path().join("t.csv.meta.json")).unwrap(),
        fs::read(dir.path().join("figs/fig9.csv.meta.json")).unwrap()
    );
}

#[test]
fn repeated_runs_are_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&run(d.path(), &[&["figure", "13", "--reload"][..], &SMALL].concat())), 0);
    }
    for f in ["fig13_q.csv", "fig13_q.csv.meta.json", "fig13_ratio.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert!(!fs::read_to_string(a.path().join("fig13_q.csv.meta.json")).unwrap().contains("created_unix"));
}

#[test]
fn timestamp_only_on_request() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &[&["figure", "4", "--timestamp"][..], &SMALL].concat())), 0);
    assert!(fs::read_to_string(dir.path().join("fig4.csv.meta.json")).unwrap().contains("created_unix"));
}

#[test]
fn kernel_profile_at_origin_is_one() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["kernel", "--radii", "0,0.5", "--n-theta", "9", "--out", "k.csv"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("k.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,r=0,r=0.5"));
    for l in lines {
        assert_eq!(l.split(',').nth(1), Some("1.0000000000000000e0"));
    }
}

#[test]
fn verify_passes_and_catches_a_bad_kernel() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verify", "--out", "v.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(doc["all_passed"], true);
    assert_eq!(code(&run(dir.path(), &["verify", "--sign-flipped"])), 1);
}

#[test]
fn verify_checks_a_source_file() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("s.toml"), FIG9_SOURCE).unwrap();
    let out = run(dir.path(), &["verify", "--source-file", "s.toml", "--prefactor", "2/pi"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("harmonicity:s.toml"));
}

#[test]
fn conjecture_report_is_complete() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["conjecture", "--figure", "4", "--n-r", "32", "--n-theta", "32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("conjecture_report.json")).unwrap()).unwrap();
    for key in
        ["source", "boundary_condition", "mesh", "n_points", "correlation", "scale_factor", "residual_rms", "solver"]
    {
        assert!(!doc[key].is_null(), "{key}");
    }
    let robin =
        run(dir.path(), &["conjecture", "--figure", "15", "--boundary", "robin", "--n-r", "32", "--n-theta", "32"]);
    assert_eq!(code(&robin), 0);
}

#[test]
fn norms_of_a_boundary_function() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("b.toml"), "type = \"constant_one\"\n").unwrap();
    let out = run(dir.path(), &["norms", "--source-file", "b.toml", "--out", "n.json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("n.json")).unwrap()).unwrap();
    assert!((doc["value"].as_f64().unwrap() - (2.0 * PI).sqrt()).abs() < 1e-9);
}

#[test]
fn norms_of_a_written_field() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["figure", "4", "--n-r", "9", "--n-theta", "16"])), 0);
    let out = run(dir.path(), &["norms", "--field", "fig4.csv", "--kind", "hardy-sup"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["figure", "16"])), 2);
    assert_eq!(code(&run(dir.path(), &["figure", "4", "--n-r", "1"])), 2);
    assert_eq!(code(&run(dir.path(), &["figure", "4", "--r-max", "0.999"])), 2);
    assert_eq!(code(&run(dir.path(), &["transform", "--source-file", "missing.toml"])), 2);
    assert_eq!(code(&run(dir.path(), &["transform", "--source-file", "x", "--prefactor", "two"])), 2);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);
    fs::write(dir.path().join("bad.toml"), "type = \"char_disk\"\nradius = 1.5\n").unwrap();
    let out = run(dir.path(), &["transform", "--source-file", "bad.toml"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
}

#[test]
fn overflowing_source_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let text = "type = \"weighted_sum\"\n\n[[terms]]\ncoefficient = 1e300\n\n[terms.source]\ntype = \"separable\"\n\
                radial = { gaussian = { amp = 1e300, center = 0.5, rate = 0.0 } }\nangular = \"one\"\n\
                rect = { r = [0.0, 0.5], theta = [-1.0, 1.0] }\n";
    fs::write(dir.path().join("big.toml"), text).unwrap();
    let out = run(dir.path(), &[&["transform", "--source-file", "big.toml"][..], &SMALL].concat());
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
