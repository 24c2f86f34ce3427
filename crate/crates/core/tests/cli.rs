use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bdew::bell::{build_bell_basis, Convention};
use bdew::lp::{parse_lp, simplex_solve, write_lp};
use bdew::rational::fmt_q;
use bdew::tensor::{parse_cmat, Dims};
use bdew::witness::{family_witness, Family};
use bdew::rational::q;

fn bdew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdew")).args(args).env_remove("BDEW_CONFIG").output().unwrap()
}

fn bdew_with_config(cfg: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdew")).args(args).env("BDEW_CONFIG", cfg).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn critical_three_three() {
    let o = bdew(&["witness", "critical", "--family", "three-three-x", "--x", "67/756"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "c_min=1/12 r_c=-3");
}

#[test]
fn critical_multiqubit() {
    let o = bdew(&["witness", "critical", "--family", "multiqubit-a", "--n", "3", "--x", "1/5"]);
    assert_eq!(stdout(&o).trim(), "c_min=1/10 r_c=-4");
}

#[test]
fn decimal_parameters_warn() {
    let o = bdew(&["witness", "critical", "--family", "three-three-x", "--x", "0.125"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("rationalized to 1/8"));
    assert_eq!(stdout(&o).trim(), "c_min=1/12 r_c=-3");
}

#[test]
fn exit_codes() {
    assert_eq!(bdew(&["lp", "solve", "missing.lp"]).status.code(), Some(1));
    assert_eq!(bdew(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bdew(&["witness", "critical"]).status.code(), Some(2));
    let o = bdew(&["witness", "critical", "--family", "three-three-x", "--x", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(bdew(&["--help"]).status.code(), Some(0));
}

#[test]
fn lp_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let lp = bdew::lp::family_lp(&Family::ThreeThreeX { x: q(1, 8) }).unwrap();
    let text = write_lp(&lp);
    assert_eq!(parse_lp(&text).unwrap(), lp);
    let path = dir.path().join("f.lp");
    fs::write(&path, &text).unwrap();
    let o = bdew(&["lp", "solve", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sol = simplex_solve(&lp).unwrap();
    assert!(stdout(&o).contains(&format!("value={}", fmt_q(&sol.value))));
}

#[test]
fn bell_basis_dump_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.cmat");
    let o = bdew(&["bell-basis", "--dims", "3,3", "--convention", "generic", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = parse_cmat(&fs::read_to_string(&path).unwrap()).unwrap();
    let basis = build_bell_basis(&Dims::new(vec![3, 3]).unwrap(), Convention::GenericPhaseShift).unwrap();
    assert_eq!(m, basis.as_matrix());
}

#[test]
fn witness_build_and_detect() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.cmat");
    let rho = dir.path().join("rho.cmat");
    let o = bdew(&["witness", "build", "--family", "three-three-x", "--x", "67/756", "--out", w.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expect = family_witness(&Family::ThreeThreeX { x: q(67, 756) }).unwrap().matrix;
    assert_eq!(parse_cmat(&fs::read_to_string(&w).unwrap()).unwrap(), expect);
    let o = bdew(&[
        "nd", "bound-state", "--x", "67/756", "--eta", "0", "--zeta", "0.05", "--mu", "auto", "--out",
        rho.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = bdew(&["nd", "detect", "--witness", w.to_str().unwrap(), "--state", rho.to_str().unwrap()]);
    assert!(stdout(&o).contains("detected=true"), "{}", stdout(&o));
}

#[test]
fn pt_spectrum_reports_closed_form() {
    let o = bdew(&["nd", "pt-spectrum", "--x", "67/756"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lm: f64 = out.lines().find_map(|l| l.strip_prefix("lambda_minus=")).unwrap().parse().unwrap();
    let (_, expect) = bdew::spectral::lambda_pm(67.0 / 756.0);
    assert!((lm - expect).abs() < 1e-12);
}

#[test]
fn oracle_reads_q_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.tsv");
    let mut text = String::from("0 0 0\n1 0 1/8\n2 0 1/8\n");
    for i in 0..3 {
        for j in 1..3 {
            text.push_str(&format!("{i} {j} 1/8\n"));
        }
    }
    fs::write(&path, text).unwrap();
    let o = bdew(&["oracle", "min-c", "--dims", "3,3", "--q", path.to_str().unwrap(), "--grid", "24", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: f64 = stdout(&o).lines().find_map(|l| l.strip_prefix("c_min=")).unwrap().parse().unwrap();
    assert!((v - 1.0 / 12.0).abs() < 1e-6);
}

#[test]
fn choi_commands() {
    let o = bdew(&["choi", "lp", "--a", "2", "--b", "1", "--c", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("c_min=2/45 r_c=-2/3"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.cmat");
    let o = bdew(&["choi", "witness", "--a", "2", "--b", "1", "--c", "0", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = parse_cmat(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!((m.trace().re - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bdew.conf");
    fs::write(&cfg, "format = tsv\nseed = 3\n").unwrap();
    let o = bdew_with_config(&cfg, &["witness", "critical", "--family", "three-three-x", "--x", "1/8"]);
    assert_eq!(stdout(&o), "c_min\tr_c\n1/12\t-3\n");
    fs::write(&cfg, "tol_eq = -1\n").unwrap();
    let o = bdew_with_config(&cfg, &["witness", "critical", "--family", "three-three-x", "--x", "1/8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = bdew(&["reproduce", "--all", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 9);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
    let fam = fs::read_to_string(a.path().join("families.tsv")).unwrap();
    assert!(fam.contains("three-three-x(x=67/756)\t1/12\t-3\t-3"));
}
