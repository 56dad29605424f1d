use std::process::Command;

use matdyn_cli::run_with;

fn run(args: &[&str]) -> (i32, Vec<u8>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("matdyn").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, out, String::from_utf8(err).unwrap())
}

fn text(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    String::from_utf8(out).unwrap()
}

#[test]
fn nilpotent_orbit_collapses() {
    let s = text(&["orbit", "--map", "phi-id", "--m", "0,0,1,0,0,0,0,0", "--steps", "3"]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "step,x_re,x_im,y_re,y_im,z_re,z_im,t_re,t_im");
    assert_eq!(lines.len(), 5);
    let row1: Vec<f64> = lines[2].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(lines[2].starts_with("1,"));
    assert!(row1.iter().all(|&v| v == 0.0));
}

#[test]
fn planar_orbit_and_verdict() {
    let (code, out, err) = run(&["orbit", "--planar", "det0:1", "--p", "10,10", "--steps", "5", "--escape-r", "30"]);
    assert_eq!(code, 0);
    assert!(err.contains("escaped at step 1"), "{err}");
    let s = String::from_utf8(out).unwrap();
    assert_eq!(s.lines().nth(2).unwrap(), "1,2.0000000000000000e2,0.0000000000000000e0,2.0000000000000000e2,0.0000000000000000e0");
}

#[test]
fn render_ppm_is_byte_stable() {
    let args = ["render", "--planar", "det0:1", "--kappa", "75", "--escape-r", "30", "--window", "10", "--px", "400", "--out", "ppm"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let hdr = b"P6\n400 400\n255\n";
    assert_eq!(&a[..hdr.len()], hdr);
    assert_eq!(a.len(), hdr.len() + 400 * 400 * 3);
}

#[test]
fn render_to_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("img.ppm");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["render", "--planar", "phi-theta:1", "--kappa", "10", "--escape-r", "0.99498743710662", "--window", "1", "--px", "16", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(std::fs::read(&path).unwrap().starts_with(b"P6\n16 16\n255\n"));
    let s = text(&["render", "--planar", "det0:1", "--kappa", "5", "--escape-r", "30", "--window", "10", "--px", "3", "--out", "csv"]);
    assert_eq!(s.lines().count(), 10);
    assert_eq!(s.lines().next().unwrap(), "ix,iy,x,y,value");
}

#[test]
fn json_rows_are_flat_objects() {
    let s = text(&["quat", "two-periodic", "--theta", "0.5", "--out", "json"]);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0]["tag"], "a");
    assert!(rows.iter().all(|r| r.as_object().unwrap().values().all(|x| !x.is_object() && !x.is_array())));
    assert_eq!(rows.iter().filter(|r| r["fixed"] == true).count(), 3);
}

#[test]
fn periodic_listing() {
    let s = text(&["periodic", "--map", "phi-id", "--n", "2"]);
    // 0, two axis circles of 3 roots each, and the 3x3 torus lattice.
    assert_eq!(s.lines().count(), 1 + 1 + 6 + 9);
    let s = text(&["periodic", "--map", "phi-diag:2,0", "--n", "1"]);
    assert!(s.contains("diag-torus"));
    let s = text(&["periodic", "--map", "phi-jordan", "--n", "1"]);
    assert!(s.contains("jordan-line"));
}

#[test]
fn basin_rows() {
    let s = text(&["basin", "--m", "0.5,0,0,0,0,0,0.5,0", "--m", "1,0,0,0,0,0,0.5,0", "--random", "3"]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[1].ends_with("interior,5.0000000000000000e-1,5.0000000000000000e-1,none,converged"));
    assert!(lines[2].contains(",boundary,"));
}

#[test]
fn segment_and_quat_tables() {
    let s = text(&["segment", "--theta", "0", "--x1", "0", "--iters", "1", "--eps", "0.5"]);
    assert_eq!(s.lines().count(), 11);
    assert!(s.lines().skip(6).all(|l| l.ends_with(",-1.0000000000000000e0,0.0000000000000000e0")));
    let s = text(&["quat", "tn", "--lambda", "0.5", "--v", "-0.5,0.8660254037844386", "--n", "30"]);
    assert!(s.lines().skip(2).all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() < 1.0));
    let s = text(&["quat", "delta", "--theta", "0.5235987755982988"]);
    let d: f64 = s.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!(d.abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    let (code, _, err) = run(&["orbit", "--map", "bogus", "--m", "1,0,0,0,0,0,0,0"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage: matdyn orbit"), "{err}");
    assert_eq!(run(&["orbit", "--map", "phi-id", "--m", "1,2"]).0, 2);
    assert_eq!(run(&["render", "--planar", "det0:1", "--kappa", "5", "--escape-r", "30", "--window", "10", "--px", "0"]).0, 2);
    assert_eq!(run(&["periodic", "--map", "phi-id", "--n", "3", "--out", "ppm"]).0, 2);
    // Degenerate angle is a runtime failure.
    assert_eq!(run(&["quat", "fixed", "--theta", "0"]).0, 1);
    assert_eq!(run(&["segment", "--theta", "0", "--x1", "0.5", "--iters", "1", "--eps", "1e-7"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn selftest_subset() {
    let s = text(&["selftest", "--only", "11", "--only", "3"]);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("PASS [11]"));
    assert!(lines[1].starts_with("PASS [03]"));
    assert_eq!(run(&["selftest", "--only", "14"]).0, 2);
}

#[test]
fn binary_selftest_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_matdyn")).arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert_eq!(s.lines().filter(|l| l.starts_with("PASS")).count(), 13);
}

#[test]
fn binary_output_is_deterministic() {
    let args = ["basin", "--random", "20", "--seed", "7"];
    let a = Command::new(env!("CARGO_BIN_EXE_matdyn")).args(args).output().unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_matdyn")).args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
