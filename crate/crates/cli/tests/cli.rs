use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bpfail(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpfail"))
        .args(args)
        .current_dir(dir)
        .env_remove("BPFAIL_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_shape(path: impl AsRef<Path>) -> (usize, usize) {
    let text = fs::read_to_string(path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    (rows.len(), rows[0].split(',').count())
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn gen_writes_the_requested_shapes() {
    let t = TempDir::new().unwrap();
    let o = bpfail(t.path(), &["gen", "ctrb", "--diag", "0.8,0.7,0.6,0.5,0.4", "--N", "50"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_shape(t.path().join("V.csv")), (5, 50));

    let o = bpfail(t.path(), &["gen", "bernstein", "--degree", "10", "--points", "0.1,0.2,0.3,0.4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_shape(t.path().join("V.csv")), (4, 11));

    let o = bpfail(
        t.path(),
        &["gen", "hankel", "--num", "1", "--den", "1,-1.4,0.53,-0.04", "--M", "5", "--N", "20"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(csv_shape(t.path().join("V.csv")), (5, 20));
}

#[test]
fn gen_fuel_reproduces_the_initial_state() {
    let t = TempDir::new().unwrap();
    let o = bpfail(
        t.path(),
        &["gen", "fuel", "--diag", "0.8,0.7,0.6,0.5,0.4", "--N", "40", "--impulse", "0:+1,9:-1"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inst = json(t.path().join("instance.json"));
    let xi = floats(&inst["xi"]);
    for (a, b) in xi.iter().zip([8.0632, 33.9728, 163.7151, 1022.0, 9534.2432]) {
        assert!((a - b).abs() <= 1e-3, "{xi:?}");
    }
    assert_eq!(csv_shape(t.path().join("V.csv")), (5, 40));
    assert_eq!(fs::read_to_string(t.path().join("y.csv")).unwrap().lines().count(), 5);
}

#[test]
fn invalid_generator_input_is_a_usage_error() {
    let t = TempDir::new().unwrap();
    let o = bpfail(t.path(), &["gen", "bernstein", "--degree", "3", "--points", "0.5,1.5"]);
    assert_eq!(code(&o), 1);
    let o = bpfail(t.path(), &["gen", "fuel", "--diag", "0.5", "--N", "4", "--impulse", "x"]);
    assert_eq!(code(&o), 1);
    let o = bpfail(t.path(), &["gen", "ctrb", "--N", "4"]);
    assert_eq!(code(&o), 1);
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn certify_finds_the_critical_index_deterministically() {
    let t = TempDir::new().unwrap();
    bpfail(t.path(), &["gen", "ctrb", "--diag", "0.8,0.7,0.6,0.5,0.4", "--N", "50"]);
    let o = bpfail(t.path(), &["certify", "--input", "V.csv"]);
    assert_eq!(code(&o), 0);
    let first = fs::read(t.path().join("certificate.json")).unwrap();
    let cert = json(t.path().join("certificate.json"));
    assert_eq!(cert["critical_index"], 36);
    assert_eq!(cert["route"], "thm_unimodal_bisection");
    let p = fs::read_to_string(t.path().join("p.txt")).unwrap();
    assert_eq!(p.lines().count(), 50);
    assert!(p.lines().all(|l| l.split(' ').count() == 2));

    bpfail(t.path(), &["certify", "--input", "V.csv"]);
    assert_eq!(fs::read(t.path().join("certificate.json")).unwrap(), first);
}

#[test]
fn certify_reports_no_failure_for_slow_modes() {
    let t = TempDir::new().unwrap();
    bpfail(t.path(), &["gen", "ctrb", "--diag", "0.98,0.97,0.96,0.95,0.94", "--N", "500"]);
    let o = bpfail(t.path(), &["certify", "--input", "V.csv"]);
    assert_eq!(code(&o), 0);
    let cert = json(t.path().join("certificate.json"));
    assert_eq!(cert["failure_indices"], Value::Array(vec![]));
    assert!(cert["p"]["min_p_beyond_r"].as_f64().unwrap() > 1.0);
}

#[test]
fn certify_full_scan_on_hankel() {
    let t = TempDir::new().unwrap();
    bpfail(
        t.path(),
        &["gen", "hankel", "--num", "1", "--den", "1,-1.4,0.53,-0.04", "--M", "5", "--N", "20"],
    );
    let o = bpfail(t.path(), &["certify", "--input", "V.csv", "--full-scan"]);
    assert_eq!(code(&o), 0);
    let cert = json(t.path().join("certificate.json"));
    assert_eq!(cert["route"], "full_scan");
    assert_eq!(cert["r"], 3);
    assert_eq!(cert["critical_index"], 11);
}

#[test]
fn certify_image_condition_violation_exits_2_with_report() {
    let t = TempDir::new().unwrap();
    write(t.path(), "V.csv", "1,1,0\n0,0,1\n");
    let o = bpfail(t.path(), &["certify", "--input", "V.csv"]);
    assert_eq!(code(&o), 2);
    let rep = json(t.path().join("certificate.json"));
    assert_eq!(rep["error"], "image_condition");
    assert_eq!(rep["p"]["image_condition_ok"], false);
}

#[test]
fn certify_instance_adds_the_polynomial_test() {
    let t = TempDir::new().unwrap();
    bpfail(
        t.path(),
        &["gen", "fuel", "--diag", "0.8,0.7,0.6,0.5,0.4", "--N", "40", "--impulse", "0:+1,9:-1"],
    );
    let o = bpfail(t.path(), &["certify", "--instance", "instance.json"]);
    assert_eq!(code(&o), 0);
    let cert = json(t.path().join("certificate.json"));
    assert_eq!(cert["drastic"]["route"], "thm_char_poly");
    assert_eq!(cert["critical_index"], 36);
}

#[test]
fn fuel_instance_solvers() {
    let t = TempDir::new().unwrap();
    bpfail(
        t.path(),
        &["gen", "fuel", "--diag", "0.8,0.7,0.6,0.5,0.4", "--N", "40", "--impulse", "0:+1,9:-1"],
    );
    let o = bpfail(t.path(), &["solve-bp", "--instance", "instance.json"]);
    assert_eq!(code(&o), 0);
    let bp = json(t.path().join("bp.json"));
    assert_eq!(bp["solution"]["status"], "optimal");
    assert!((3..=5).contains(&bp["solution"]["support"].as_array().unwrap().len()));
    assert!(bp["solution"]["objective"].as_f64().unwrap() < 2.0);
    assert_eq!(bp["truth"]["recovered"], false);
    assert_eq!(fs::read_to_string(t.path().join("bp_stem.txt")).unwrap().lines().count(), 40);

    let o = bpfail(t.path(), &["solve-l0", "--instance", "instance.json", "--max-card", "2"]);
    assert_eq!(code(&o), 0);
    let l0 = json(t.path().join("l0.json"));
    assert_eq!(l0["min_cardinality"], 2);
    assert_eq!(l0["exhaustive"], true);
    assert_eq!(l0["count"], 1);
}

#[test]
fn loose_threshold_recovers_the_slow_mode_input() {
    let t = TempDir::new().unwrap();
    bpfail(
        t.path(),
        &["gen", "fuel", "--diag", "0.98,0.97,0.96,0.95,0.94", "--N", "40", "--impulse", "0:+1,9:-1"],
    );
    let o = bpfail(t.path(), &["solve-bp", "--instance", "instance.json", "--threshold", "5e-8"]);
    assert_eq!(code(&o), 0);
    let bp = json(t.path().join("bp.json"));
    assert_eq!(bp["truth"]["recovered"], true);
}

#[test]
fn zero_rhs_gives_zero_solutions() {
    let t = TempDir::new().unwrap();
    write(t.path(), "V.csv", "1,2,3\n4,5,7\n");
    write(t.path(), "y.csv", "0\n0\n");
    assert_eq!(code(&bpfail(t.path(), &["solve-bp", "--input", "V.csv", "--rhs", "y.csv"])), 0);
    let bp = json(t.path().join("bp.json"));
    assert_eq!(floats(&bp["solution"]["u"]), vec![0.0; 3]);
    assert_eq!(code(&bpfail(t.path(), &["solve-l0", "--input", "V.csv", "--rhs", "y.csv"])), 0);
    let l0 = json(t.path().join("l0.json"));
    assert_eq!(l0["min_cardinality"], 0);
    assert_eq!(floats(&l0["solutions_found"][0]["u"]), vec![0.0; 3]);
}

#[test]
fn square_invertible_system_has_one_answer() {
    let t = TempDir::new().unwrap();
    write(t.path(), "V.csv", "2,1\n1,3\n");
    write(t.path(), "y.csv", "1\n2\n");
    assert_eq!(code(&bpfail(t.path(), &["solve-bp", "--input", "V.csv", "--rhs", "y.csv"])), 0);
    assert_eq!(code(&bpfail(t.path(), &["solve-l0", "--input", "V.csv", "--rhs", "y.csv"])), 0);
    let bp = floats(&json(t.path().join("bp.json"))["solution"]["u"]);
    let l0 = floats(&json(t.path().join("l0.json"))["solutions_found"][0]["u"]);
    for (a, b) in bp.iter().zip(&l0) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert!((bp[0] - 0.2).abs() <= 1e-12 && (bp[1] - 0.6).abs() <= 1e-12, "{bp:?}");
}

#[test]
fn inconsistent_system_exits_3() {
    let t = TempDir::new().unwrap();
    write(t.path(), "V.csv", "1,1\n1,1\n");
    write(t.path(), "y.csv", "1\n2\n");
    assert_eq!(code(&bpfail(t.path(), &["solve-bp", "--input", "V.csv", "--rhs", "y.csv"])), 3);
    assert_eq!(json(t.path().join("bp.json"))["solution"]["status"], "infeasible");
    assert_eq!(code(&bpfail(t.path(), &["solve-l0", "--input", "V.csv", "--rhs", "y.csv"])), 3);
}

#[test]
fn usage_errors_exit_1() {
    let t = TempDir::new().unwrap();
    write(t.path(), "V.csv", "1,0\n0,1\n");
    assert_eq!(code(&bpfail(t.path(), &["solve-bp", "--input", "V.csv"])), 1);
    assert_eq!(code(&bpfail(t.path(), &["solve-bp", "--input", "V.csv", "--rhs", "V.csv", "--threshold=0"])), 1);
    assert_eq!(code(&bpfail(t.path(), &["certify", "--input", "missing.csv"])), 1);
    assert_eq!(code(&bpfail(t.path(), &["frobnicate"])), 1);
    assert_eq!(code(&bpfail(t.path(), &["repro", "fig9"])), 1);
    assert_eq!(code(&bpfail(t.path(), &["--help"])), 0);
}

#[test]
fn check_reports_structure() {
    let t = TempDir::new().unwrap();
    bpfail(t.path(), &["gen", "bernstein", "--degree", "10", "--points", "0.1,0.2,0.3,0.4"]);
    let o = bpfail(
        t.path(),
        &["check", "--input", "V.csv", "--property", "sc", "--transpose", "--difference", "--order", "4"],
    );
    assert_eq!(code(&o), 0);
    let rep = json(t.path().join("structure.json"));
    assert_eq!(rep["holds"], false);
    assert_eq!(rep["order"], 4);

    write(t.path(), "a.csv", "1\n3\n2\n");
    let o = bpfail(t.path(), &["check", "--input", "a.csv", "--property", "unimodal"]);
    assert_eq!(code(&o), 0);
    let rep = json(t.path().join("structure.json"));
    assert_eq!(rep["holds"], true);
    assert_eq!(rep["peak_index"], 2);
}

#[test]
fn output_directory_precedence() {
    let t = TempDir::new().unwrap();
    let run = |env: Option<&str>, args: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_bpfail"));
        c.current_dir(t.path()).env_remove("BPFAIL_OUT");
        if let Some(e) = env {
            c.env("BPFAIL_OUT", e);
        }
        c.args(args).args(["gen", "bernstein", "--degree", "2", "--points", "0.5"]);
        assert!(c.output().unwrap().status.success());
    };
    run(Some("from_env"), &[]);
    assert!(t.path().join("from_env/V.csv").exists());
    run(Some("from_env_2"), &["--out", "from_flag"]);
    assert!(t.path().join("from_flag/V.csv").exists());
    assert!(!t.path().join("from_env_2").exists());
    run(None, &[]);
    assert!(t.path().join("V.csv").exists());
}

#[test]
fn repro_passes_and_writes_plot_data() {
    let t = TempDir::new().unwrap();
    let o = bpfail(t.path(), &["repro", "unimodal-p"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(t.path().join("fig2/report.json"));
    assert_eq!(rep["pass"], true);
    let p = fs::read_to_string(t.path().join("fig2/p.txt")).unwrap();
    let flips: Vec<usize> = p
        .lines()
        .map(|l| {
            let mut it = l.split(' ');
            (it.next().unwrap().parse::<usize>().unwrap(), it.next().unwrap().parse::<f64>().unwrap())
        })
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| (w[0].1 >= 1.0) != (w[1].1 >= 1.0))
        .map(|w| w[1].0)
        .collect();
    assert_eq!(flips, vec![36]);

    for id in ["fig1", "fig4", "char-poly", "sec4-ii"] {
        let o = bpfail(t.path(), &["repro", id]);
        assert_eq!(code(&o), 0, "{id}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read_to_string(t.path().join("fig1/u_bp.txt")).unwrap().lines().count(), 40);
}

#[test]
fn repro_is_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        assert_eq!(code(&bpfail(d.path(), &["repro", "fig1"])), 0);
    }
    for f in ["report.json", "bp.json", "l0.json", "instance.json", "u_bp.txt"] {
        assert_eq!(
            fs::read(a.path().join("fig1").join(f)).unwrap(),
            fs::read(b.path().join("fig1").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn repro_mismatch_exits_4_and_lists_deltas() {
    let t = TempDir::new().unwrap();
    let o = bpfail(t.path(), &["repro", "three-mode"]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ex3.1 coefficients"), "{err}");
    let rep = json(t.path().join("ex3.1/report.json"));
    assert_eq!(rep["pass"], false);
    assert!(t.path().join("ex3.1/p.txt").exists());
}
