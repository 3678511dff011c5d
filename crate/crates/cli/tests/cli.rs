use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vpspace_core::algebra::SparsePoly;
use vpspace_core::circuit::parse_circuit;

fn vpspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpspace")).args(args).env_remove("VPSPACE_MAX_ROWS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

// G = (z, z^2) as C_G(z, y) = y1 z + y2 z^2
const MAP: &str = "inputs 1\nvars 3\ng0 = input x1\ng1 = input x2\ng2 = input x3\ng3 = mul g0 g1\ng4 = mul g0 g0\ng5 = mul g4 g2\ng6 = add g3 g5\noutputs g6\nassign 1 : 1 0\nassign 2 : 0 1\n";

#[test]
fn selftest_passes() {
    let o = vpspace(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.ends_with(": pass")));
}

#[test]
fn annihilate_parabola_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.txt");
    fs::write(&map, MAP).unwrap();
    let poly = dir.path().join("a.poly");
    let circ = dir.path().join("ca.txt");
    let rep = dir.path().join("report.txt");
    let o = vpspace(&["annihilate", "--map", p(&map), "--out-poly", p(&poly), "--out-circuit", p(&circ), "--report", p(&rep)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a = SparsePoly::parse(&fs::read_to_string(&poly).unwrap()).unwrap();
    assert!(a.proportional_to(&SparsePoly::parse("vars 2\n1 : 2 0\n-1 : 0 1\n").unwrap()));
    let c = parse_circuit(&fs::read_to_string(&circ).unwrap()).unwrap();
    c.validate().unwrap();
    let report = fs::read_to_string(&rep).unwrap();
    assert!(report.contains("c_g_instances=1\n"));
    assert!(report.contains("c_a_check=pass\n"));

    // fixed seed: byte-identical artifacts
    let poly2 = dir.path().join("a2.poly");
    let rep2 = dir.path().join("report2.txt");
    let circ2 = dir.path().join("ca2.txt");
    let o = vpspace(&["annihilate", "--map", p(&map), "--out-poly", p(&poly2), "--out-circuit", p(&circ2), "--report", p(&rep2)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&poly).unwrap(), fs::read(&poly2).unwrap());
    assert_eq!(fs::read(&rep).unwrap(), fs::read(&rep2).unwrap());
    assert_eq!(fs::read(&circ).unwrap(), fs::read(&circ2).unwrap());
}

#[test]
fn resource_ceiling_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.txt");
    fs::write(&map, MAP).unwrap();
    let o = vpspace(&["annihilate", "--map", p(&map), "--max-rows", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_vpspace"))
        .args(["annihilate", "--map", p(&map)])
        .env("VPSPACE_MAX_ROWS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_circuit_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    fs::write(&f, "vars 1\ng0 = input x1\ng1 = frobnicate g0\noutputs g1\n").unwrap();
    let o = vpspace(&["expand", "--circuit", p(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = vpspace(&["expand", "--circuit", p(&dir.path().join("missing.txt"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn det_compile_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    // 2x2 symbolic matrix [[x1, x2], [x3, x4]]: variables x1..x4, row bit, col bit
    let enc = "vars 6\n\
        g0 = input x1\ng1 = input x2\ng2 = input x3\ng3 = input x4\ng4 = input x5\ng5 = input x6\n\
        g6 = one\ng7 = minusone\ng8 = mul g7 g4\ng9 = add g6 g8\ng10 = mul g7 g5\ng11 = add g6 g10\n\
        g12 = mul g9 g11\ng13 = mul g12 g0\ng14 = mul g9 g5\ng15 = mul g14 g1\ng16 = mul g4 g11\ng17 = mul g16 g2\n\
        g18 = mul g4 g5\ng19 = mul g18 g3\ng20 = add g13 g15\ng21 = add g17 g19\ng22 = add g20 g21\noutputs g22\n";
    let f = dir.path().join("enc.txt");
    fs::write(&f, enc).unwrap();
    let out = dir.path().join("det.txt");
    let o = vpspace(&["det-compile", "--matrix", p(&f), "--n", "2", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = vpspace(&["eval", "--circuit", p(&out), "--point", "1,2,3,4"]);
    assert_eq!(stdout(&o).trim(), "-2");
    let o = vpspace(&["eval", "--circuit", p(&out), "--point", "5,-1,2,7", "--prime", "101"]);
    assert_eq!(stdout(&o).trim(), "37");
    let o = vpspace(&["expand", "--circuit", p(&out)]);
    let d = SparsePoly::parse(&stdout(&o)).unwrap();
    assert_eq!(d.with_nvars(4).unwrap(), SparsePoly::parse("vars 4\n1 : 1 0 0 1\n-1 : 0 1 1 0\n").unwrap());
}

#[test]
fn coefficient_queries() {
    let dir = tempfile::tempdir().unwrap();
    // (x + 1)^2
    let f = dir.path().join("c.txt");
    fs::write(&f, "vars 1\ng0 = input x1\ng1 = one\ng2 = add g0 g1\ng3 = mul g2 g2\noutputs g3\n").unwrap();
    let o = vpspace(&["coeff", "--circuit", p(&f), "--exponent", "1"]);
    assert_eq!(stdout(&o).trim(), "2");
    let o = vpspace(&["coeff", "--circuit", p(&f), "--exponent", "1", "--bit", "0"]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = vpspace(&["coeff", "--circuit", p(&f), "--exponent", "1,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn from_coeff_three_x() {
    let dir = tempfile::tempdir().unwrap();
    // CF(y, i1 i2) = y * i1: bits at i = 2, 3 of e = 1, i.e. 3x
    let f = dir.path().join("cf.txt");
    fs::write(&f, "vars 3\ng0 = input x1\ng1 = input x2\ng2 = mul g0 g1\noutputs g2\n").unwrap();
    let out = dir.path().join("f.txt");
    let o = vpspace(&["from-coeff", "--cf-circuit", p(&f), "--n", "1", "--dbits", "1", "--cbits", "2", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = vpspace(&["expand", "--circuit", p(&out)]);
    let e = SparsePoly::parse(&stdout(&o)).unwrap();
    assert_eq!(e.with_nvars(1).unwrap(), SparsePoly::parse("vars 1\n3 : 1\n").unwrap());
    let o = vpspace(&["from-coeff", "--cf-circuit", p(&f), "--n", "1", "--dbits", "1", "--cbits", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qbf_and_gadgets() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("q.txt");
    fs::write(&f, "# exists y (y and x)\nvars 2\nexists x2\nmatrix and x2 x1\n").unwrap();
    let out = dir.path().join("q.circ");
    let o = vpspace(&["qbf", "--formula", p(&f), "--out", p(&out), "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&vpspace(&["eval", "--circuit", p(&out), "--point", "1,0"])).trim(), "1");
    assert_eq!(stdout(&vpspace(&["eval", "--circuit", p(&out), "--point", "0,0"])).trim(), "0");
    fs::write(&f, "vars 1\nmatrix x3\n").unwrap();
    assert_eq!(vpspace(&["qbf", "--formula", p(&f)]).status.code(), Some(2));

    for (kind, params) in [("eq", "width=2"), ("inc", "width=3"), ("mon", "n=2,delta=2"), ("universal", "n=1,d=2,s=2")] {
        let o = vpspace(&["gadget", "--kind", kind, "--params", params]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        parse_circuit(&stdout(&o)).unwrap().validate().unwrap();
    }
    assert_eq!(vpspace(&["gadget", "--kind", "eq"]).status.code(), Some(2));
    assert_eq!(vpspace(&["gadget", "--kind", "nope", "--params", "width=1"]).status.code(), Some(2));
}

#[test]
fn abp_eval_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("abp.txt");
    fs::write(
        &f,
        "vars 2\ng0 = input x1\ng1 = input x2\ng2 = mul g0 g1\nsource (0,0,0)\nsink (2,0,0)\nedge (0,0,0) (1,0,0) = g2\nedge (1,0,0) (2,0,0) = g0\nedge (0,0,0) (1,1,0) = g1\nedge (1,1,0) (2,0,0) = g1\n",
    )
    .unwrap();
    // x1^2 x2 + x2^2 at (3, 2)
    assert_eq!(stdout(&vpspace(&["abp-eval", "--abp", p(&f), "--point", "3,2"])).trim(), "22");
    assert_eq!(stdout(&vpspace(&["abp-eval", "--abp", p(&f), "--point", "3,2", "--prime", "7"])).trim(), "1");
}
