use std::path::Path;
use std::process::{Command, Output};

use shapefit::io::read_points_file;
use shapefit::report::FitReport;
use shapefit::Family;
use tempfile::TempDir;

fn shapefit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapefit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn line_count(p: &Path) -> usize {
    std::fs::read_to_string(p).unwrap().lines().count()
}

#[test]
fn generate_line_counts() {
    let dir = TempDir::new().unwrap();
    let h0 = dir.path().join("h0.csv");
    let out = shapefit(&[
        "generate",
        "--shape",
        "H0",
        "--n",
        "360",
        "--noise",
        "0.5",
        "--gaps",
        "0",
        "--seed",
        "42",
        "-o",
        path_str(&h0),
    ]);
    assert!(out.status.success());
    assert_eq!(line_count(&h0), 361);
    assert_eq!(read_points_file(&h0).unwrap().len(), 360);

    let e1 = dir.path().join("e1.csv");
    let out = shapefit(&[
        "generate",
        "--shape",
        "E1",
        "--n",
        "360",
        "--gaps",
        "0.25",
        "-o",
        path_str(&e1),
    ]);
    assert!(out.status.success());
    assert_eq!(read_points_file(&e1).unwrap().len(), 270);
}

#[test]
fn generated_triangle_lies_on_catalog_shape() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t0.csv");
    assert!(
        shapefit(&["generate", "--shape", "T0", "-o", path_str(&csv)])
            .status
            .success()
    );
    let entry = shapefit::datagen::catalog_entry("T0").unwrap();
    let params = entry.params::<f64>();
    let spec = entry.spec::<f64>();
    for p in read_points_file(&csv).unwrap().iter() {
        assert!(shapefit::shape_model::geometric_distance(*p, &params, &spec) < 1e-9);
    }
}

#[test]
fn generation_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = shapefit(&[
            "generate",
            "--shape",
            "R1",
            "--noise",
            "0.5",
            "--gaps",
            "0.1",
            "--seed",
            "9",
            "-o",
            path_str(p),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn unknown_shape_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = shapefit(&[
        "generate",
        "--shape",
        "Q9",
        "-o",
        path_str(&dir.path().join("x.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Q9"));
}

#[test]
fn missing_arguments_exit_with_one() {
    assert_eq!(shapefit(&["fit"]).status.code(), Some(1));
    assert_eq!(shapefit(&["bogus"]).status.code(), Some(1));
    assert_eq!(shapefit(&["--help"]).status.code(), Some(0));
}

#[test]
fn fit_and_eval_noise_free_ellipse() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("e0.csv");
    let report = dir.path().join("e0.json");
    assert!(
        shapefit(&["generate", "--shape", "E0", "-o", path_str(&csv)])
            .status
            .success()
    );
    let out = shapefit(&[
        "fit",
        "--family",
        "ellipse",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = FitReport::read(&report).unwrap();
    assert_eq!(r.family, Family::Ellipse);
    assert!(r.converged);
    assert!(r.rmse < 1e-9);
    assert!((r.x_c - 52.0).abs() < 1e-6 && (r.y_c - 8.0).abs() < 1e-6);
    let mut scales = [r.m_x, r.m_y];
    scales.sort_by(f64::total_cmp);
    assert!((scales[0] - 8.0).abs() < 1e-6 && (scales[1] - 12.0).abs() < 1e-6);

    let out = shapefit(&[
        "eval",
        "--fit",
        path_str(&report),
        "--truth",
        "E0",
        "--tol-center",
        "1e-6",
        "--tol-scale",
        "1e-6",
        "--tol-angle",
        "1e-4",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn fit_noisy_square_rmse_band() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r0.csv");
    let report = dir.path().join("r0.json");
    assert!(shapefit(&[
        "generate",
        "--shape",
        "R0",
        "--noise",
        "0.5",
        "--seed",
        "3",
        "-o",
        path_str(&csv)
    ])
    .status
    .success());
    let out = shapefit(&[
        "fit",
        "--family",
        "square",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report),
    ]);
    assert!(out.status.success());
    let r = FitReport::read(&report).unwrap();
    assert!((r.rmse - 0.55).abs() <= 0.15, "rmse {}", r.rmse);
}

#[test]
fn eval_of_fit_against_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("h1.csv");
    let report = dir.path().join("h1.json");
    assert!(shapefit(&[
        "generate",
        "--shape",
        "H1",
        "--noise",
        "0.2",
        "--seed",
        "1",
        "-o",
        path_str(&csv)
    ])
    .status
    .success());
    let out = shapefit(&[
        "fit",
        "--family",
        "hexagon",
        "--lambda",
        "free",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report),
    ]);
    assert!(out.status.success());
    let out = shapefit(&[
        "eval",
        "--fit",
        path_str(&report),
        "--truth",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for line in text.lines().filter(|l| l.starts_with("delta")) {
        let v: f64 = line.split_whitespace().last().unwrap().parse().unwrap();
        assert_eq!(v, 0.0, "{line}");
    }
}

#[test]
fn eval_reports_family_mismatch_and_tolerance_failure() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("t0.csv");
    let report = dir.path().join("t0.json");
    assert!(shapefit(&[
        "generate",
        "--shape",
        "T0",
        "--noise",
        "0.5",
        "--seed",
        "4",
        "-o",
        path_str(&csv)
    ])
    .status
    .success());
    assert!(shapefit(&[
        "fit",
        "--family",
        "triangle",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report)
    ])
    .status
    .success());

    let out = shapefit(&["eval", "--fit", path_str(&report), "--truth", "R0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("family mismatch"));

    let out = shapefit(&[
        "eval",
        "--fit",
        path_str(&report),
        "--truth",
        "T0",
        "--tol-center",
        "0.3",
        "--tol-scale",
        "1",
        "--tol-angle",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = shapefit(&[
        "eval",
        "--fit",
        path_str(&report),
        "--truth",
        "T0",
        "--tol-center",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let out = shapefit(&[
        "fit",
        "--family",
        "square",
        "--points",
        path_str(&empty),
        "-o",
        path_str(&dir.path().join("o.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
    let out = shapefit(&[
        "fit",
        "--family",
        "square",
        "--points",
        path_str(&bad),
        "-o",
        path_str(&dir.path().join("o.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn non_convergence_exits_with_two_and_still_writes_report() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r2.csv");
    let report = dir.path().join("r2.json");
    assert!(shapefit(&[
        "generate",
        "--shape",
        "R2",
        "--noise",
        "0.5",
        "--seed",
        "2",
        "-o",
        path_str(&csv)
    ])
    .status
    .success());
    let out = shapefit(&[
        "fit",
        "--family",
        "square",
        "--lambda",
        "free",
        "--max-iter",
        "1",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = FitReport::read(&report).unwrap();
    assert!(!r.converged);
    assert!(!r.warnings.is_empty());
}

#[test]
fn jacobian_modes_agree() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("h0.csv");
    assert!(shapefit(&[
        "generate",
        "--shape",
        "H0",
        "--noise",
        "0.3",
        "--seed",
        "5",
        "-o",
        path_str(&csv)
    ])
    .status
    .success());
    let mut reports = Vec::new();
    for mode in ["hybrid", "fd"] {
        let out_path = dir.path().join(format!("{mode}.json"));
        let out = shapefit(&[
            "fit",
            "--family",
            "hexagon",
            "--jacobian",
            mode,
            "--points",
            path_str(&csv),
            "-o",
            path_str(&out_path),
        ]);
        assert!(out.status.success());
        reports.push(FitReport::read(&out_path).unwrap());
    }
    assert!((reports[0].rmse - reports[1].rmse).abs() < 1e-6);
    assert!((reports[0].x_c - reports[1].x_c).abs() < 1e-4);
}

fn parse_pairs(s: &str) -> Vec<(f64, f64)> {
    s.split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len_sq).clamp(0.0, 1.0)
    };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

#[test]
fn plot_is_well_formed_svg() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r1.csv");
    let report = dir.path().join("r1.json");
    let svg = dir.path().join("r1.svg");
    assert!(
        shapefit(&["generate", "--shape", "R1", "-o", path_str(&csv)])
            .status
            .success()
    );
    assert!(shapefit(&[
        "fit",
        "--family",
        "square",
        "--points",
        path_str(&csv),
        "-o",
        path_str(&report)
    ])
    .status
    .success());
    let out = shapefit(&[
        "plot",
        "--points",
        path_str(&csv),
        "--fit",
        path_str(&report),
        "-o",
        path_str(&svg),
    ]);
    assert!(out.status.success());

    let text = std::fs::read_to_string(&svg).unwrap();
    let doc = roxmltree::Document::parse(&text).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));

    let view: Vec<f64> = root
        .attribute("viewBox")
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(view.len(), 4);

    let boundary = doc
        .descendants()
        .find(|n| n.has_tag_name("polygon"))
        .unwrap();
    let verts = parse_pairs(boundary.attribute("points").unwrap());
    assert_eq!(verts.len(), 720);

    let markers: Vec<(f64, f64)> = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .map(|n| {
            (
                n.attribute("cx").unwrap().parse().unwrap(),
                n.attribute("cy").unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(markers.len(), 360);
    for &m in &markers {
        assert!(m.0 >= view[0] && m.0 <= view[0] + view[2]);
        assert!(m.1 >= view[1] && m.1 <= view[1] + view[3]);
        let d = (0..verts.len())
            .map(|i| segment_distance(m, verts[i], verts[(i + 1) % verts.len()]))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1.0, "marker {m:?} is {d} from the boundary");
    }
}
