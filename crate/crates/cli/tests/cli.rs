use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use soliton_core::catalog::{build, BuildRequest, FamilyId};
use soliton_core::surface::fd_jet;
use tempfile::TempDir;

fn soliton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const INTRO_X: &str = "gamma = \"(log(s), 1/(2*s), -1/(2*s))\"\nw = \"(1, s, s)\"\ns_range = 0.5, 2\nt_range = 1, 2\n";

#[test]
fn list_shows_all_families() {
    let o = soliton(&["list"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 13);
    let o = soliton(&["list", "--family", "Thm4A1"]);
    let text = stdout(&o);
    let names: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(names, ["v2", "a", "b"]);
    let o = soliton(&["list", "--json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 13);
    assert_eq!(json[8]["id"], "Thm4A1");
    assert_eq!(soliton(&["list", "--family", "Nope"]).status.code(), Some(2));
}

#[test]
fn obj_mesh_layout() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.obj");
    let o = soliton(&[
        "sample",
        "Gr1Cosh",
        "--a",
        "0",
        "--b",
        "0",
        "--v1",
        "0",
        "--grid",
        "50x50",
        "--format",
        "obj",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2500);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 49 * 49);
    // u = -log cosh s at s = -1 on the first vertex
    let z: f64 = text
        .lines()
        .next()
        .unwrap()
        .split_whitespace()
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((z + 1.0_f64.cosh().ln()).abs() < 1e-15);
}

#[test]
fn csv_round_trip_matches_kernel() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let o = soliton(&[
        "sample",
        "IntroX",
        "--grid",
        "40x40",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,t,x,y,z"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1600);
    let fam = build(FamilyId::IntroX, &BuildRequest::default()).unwrap();
    for r in rows.iter().step_by(37) {
        let p = fam.surface.point(r[0], r[1]).unwrap();
        let jet = fd_jet(|s, t| fam.surface.point(s, t).unwrap(), r[0], r[1], 1e-4);
        for (got, want) in [(r[2], p.x), (r[3], p.y), (r[4], p.z)] {
            assert!((got - want).abs() <= 1e-12);
        }
        assert!((jet.p.x - r[2]).abs() <= 1e-12 && (jet.p.z - r[4]).abs() <= 1e-12);
    }
}

#[test]
fn domain_violation_names_the_constraint() {
    let o = soliton(&["sample", "Gr2Arctanh", "--a", "1", "--s-range", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a e^(2s) < 1"), "{}", stderr(&o));
}

#[test]
fn residual_pass_and_fail() {
    let o = soliton(&["residual", "Gr3", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "status"), "PASS");
    let o = soliton(&["residual", "IntroY", "--v", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = soliton(&["residual", "IntroY", "--v", "0,1,0"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert_eq!(field(&text, "status"), "FAIL");
    assert!(field(&text, "max_residual").parse::<f64>().unwrap() > 1e-3);
}

#[test]
fn residual_random_points_follow_the_seed() {
    let run = |seed: &str| {
        stdout(&soliton(&[
            "residual",
            "Thm4A0",
            "--random-points",
            "50",
            "--seed",
            seed,
        ]))
    };
    let a = run("7");
    assert_eq!(a, run("7"));
    assert_eq!(field(&a, "evaluated"), "950");
}

#[test]
fn residual_of_spec_file() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "x.spec", &format!("{INTRO_X}v = 1, 0, 0\n"));
    let o = soliton(&["residual", &spec]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn solve_ode_outputs() {
    let o = soliton(&["solve-ode", "gr0-spacelike", "--init", "0,0", "--range", "0,2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows[0], vec![0.0, 0.0, 0.0, 1.0]);
    assert_eq!(rows.last().unwrap()[0], 2.0);
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1] && w[1][3] > 0.0);
    }
    assert!(field(&stderr(&o), "termination").starts_with("completed"));

    let o = soliton(&[
        "solve-ode",
        "eq32",
        "--v2",
        "1",
        "--v1",
        "0",
        "--init",
        "0,0",
        "--range",
        "0,1",
        "--lift",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stderr(&o), "lift_max_residual").parse::<f64>().unwrap() <= 1e-6);

    let o = soliton(&["solve-ode", "eq31-spacelike", "--init", "0,2", "--range", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside the regime"));
}

#[test]
fn classify_spec_files() {
    let dir = TempDir::new().unwrap();
    let x = write(&dir, "x.spec", INTRO_X);
    let coeffs = dir.path().join("b.csv");
    let o = soliton(&["classify", &x, "--coefficients", coeffs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(field(&text, "case"), "Thm4-Candidate");
    let v: Vec<f64> = field(&text, "velocity")
        .split(',')
        .map(|c| c.trim().parse().unwrap())
        .collect();
    assert!((v[0] - 1.0).abs() < 1e-6 && v[1].abs() < 1e-6 && v[2].abs() < 1e-6);
    assert!(fs::read_to_string(&coeffs)
        .unwrap()
        .starts_with("s,eps,scale,c0,c1,c2\n"));

    let l = write(
        &dir,
        "l.spec",
        "gamma = \"(0, s, s^2/10)\"\nw = \"(cos(s), sin(s), 1)\"\ns_range = 0.2, 1.2\nt_range = 0.1, 0.6\n",
    );
    let text = stdout(&soliton(&["classify", &l]));
    assert_eq!(field(&text, "case"), "Thm2-Excluded");
    assert!(text.contains("condition: ruling_direction_variation"));

    let cyl = write(
        &dir,
        "c.spec",
        "gamma = \"(s, -log(cos(s)), 0)\"\nw = \"(0, 0, 1)\"\ns_range = -1, 1\nt_range = -1, 1\n",
    );
    let text = stdout(&soliton(&["classify", &cyl]));
    assert_eq!(field(&text, "case"), "Thm1-TimelikeCylinder");
}

#[test]
fn spec_parse_errors_report_line_and_column() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.spec",
        "gamma = \"(s, 1, 0)\"\nw = \"(1, s +, s)\"\ns_range = 0, 1\nt_range = 0, 1\n",
    );
    let o = soliton(&["classify", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.spec:2:"), "{err}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "job.cfg", "# sampling job\ngrid = 10x10\nformat = csv\na = 0.5\n");
    let text = stdout(&soliton(&["sample", "Gr1Cosh", "--config", &cfg]));
    assert_eq!(text.lines().count(), 101);
    let first: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((first[4] + (-0.5_f64).cosh().ln()).abs() < 1e-15);
    let text = stdout(&soliton(&["sample", "Gr1Cosh", "--config", &cfg, "--grid", "5x5"]));
    assert_eq!(text.lines().count(), 26);
    let bad = write(&dir, "bad.cfg", "grid = 10x10\ncolour = red\n");
    let o = soliton(&["sample", "Gr1Cosh", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"));
}

#[test]
fn fit_velocity_reports_ruling_ambiguity() {
    let o = soliton(&["fit-velocity", "Gr3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "nullspace_dim"), "1");
    assert!(field(&text, "distance_to_true").parse::<f64>().unwrap() < 1e-9);
    let o = soliton(&["fit-velocity", "Thm4A1", "--constrain", "0,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "nullspace_dim"), "0");
    assert!(Path::new(env!("CARGO_BIN_EXE_soliton")).exists());
}
