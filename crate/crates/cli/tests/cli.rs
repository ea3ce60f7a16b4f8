use std::path::Path;
use std::process::{Command, Output};

fn pindex(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pindex"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PINDEX_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

/// `E = diag(1, 0)`, `A = [[0, 1], [1, 0]]`.
fn analytic_files(dir: &Path) {
    write(dir, "e.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n0\n");
    write(dir, "a.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1\n");
}

fn read_dir_sorted(d: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn structure_reports_index2_candidate() {
    let d = tempfile::tempdir().unwrap();
    analytic_files(d.path());
    let o = pindex(&["structure", "--E", "e.mtx", "--A", "a.mtx"], d.path());
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "Index2Candidate");
    assert_eq!(v["n1"], 1);
}

#[test]
fn sweep_to_stdout_is_csv() {
    let d = tempfile::tempdir().unwrap();
    analytic_files(d.path());
    let o = pindex(&["sweep", "--E", "e.mtx", "--A", "a.mtx", "--points", "4", "--tau-min", "1e-6", "--tau-max", "1e-3"], d.path());
    assert!(o.status.success());
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "tau,value,lower,upper");
    let row: Vec<f64> = lines[1].split(',').take(2).map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - (row[0] * (1.0 + row[0])).sqrt()).abs() < 1e-12 * row[1]);
}

#[test]
fn scaled_sweep_records_scale() {
    let d = tempfile::tempdir().unwrap();
    analytic_files(d.path());
    let o = pindex(
        &["sweep", "--E", "e.mtx", "--A", "a.mtx", "--scale", "22026.47", "--points", "20", "--format", "json"],
        d.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "sweep");
    assert_eq!(v["curve"]["meta"]["scale"], 22026.47);
}

#[test]
fn bench_is_deterministic_and_replayable() {
    let d = tempfile::tempdir().unwrap();
    let args = ["bench", "toy", "--n", "6", "--points", "40", "--samples", "3", "--seed", "7"];
    let run = |out: &str| {
        let mut a = args.to_vec();
        a.extend(["--out", out]);
        let o = pindex(&a, d.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let first = run("a");
    assert!(first.starts_with("method1: "));
    run("b");
    let a = read_dir_sorted(&d.path().join("a"));
    assert_eq!(a, read_dir_sorted(&d.path().join("b")));
    let names: Vec<&str> = a.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["manifest.json", "method1.csv", "method1.json", "method2.csv", "method2.json", "plot.gp"]);

    let o = pindex(&["replay", "a/manifest.json", "--out", "c"], d.path());
    assert!(o.status.success());
    assert_eq!(a, read_dir_sorted(&d.path().join("c")));
}

#[test]
fn seed_comes_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let base = ["bench", "analytic", "--method", "two", "--points", "30", "--samples", "2"];
    let o = Command::new(env!("CARGO_BIN_EXE_pindex"))
        .args(base)
        .args(["--out", "env"])
        .env("PINDEX_SEED", "11")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let mut a = base.to_vec();
    a.extend(["--seed", "11", "--out", "flag"]);
    assert!(pindex(&a, d.path()).status.success());
    assert_eq!(read_dir_sorted(&d.path().join("env")), read_dir_sorted(&d.path().join("flag")));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("env/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 11);
}

#[test]
fn classify_toy_curve() {
    let d = tempfile::tempdir().unwrap();
    let o = pindex(&["bench", "toy", "--n", "20", "--method", "one", "--seed", "1", "--out", "t"], d.path());
    assert!(o.status.success());
    let o = pindex(&["classify", "--in", "t/method1.json"], d.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("Index2"));
}

#[test]
fn plot_script_has_three_panels_for_perturbed_family() {
    let d = tempfile::tempdir().unwrap();
    let o = pindex(&["bench", "perturbed", "--n", "5", "--points", "30", "--out", "p"], d.path());
    assert!(o.status.success());
    let gp = std::fs::read_to_string(d.path().join("p/plot.gp")).unwrap();
    assert!(gp.contains("set multiplot layout 1,3"));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn malformed_matrix_is_an_input_error() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "e.mtx", "not a matrix market file\n");
    write(d.path(), "a.mtx", "%%MatrixMarket matrix array real general\n1 1\n1\n");
    let o = pindex(&["structure", "--E", "e.mtx", "--A", "a.mtx"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(pindex(&["sweep"], d.path()).status.code(), Some(2));
    assert_eq!(pindex(&["bench", "nonsense"], d.path()).status.code(), Some(2));
}

#[test]
fn singular_cayley_is_a_numerical_failure() {
    let d = tempfile::tempdir().unwrap();
    let id = "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n";
    write(d.path(), "e.mtx", id);
    write(d.path(), "a.mtx", id);
    let o = pindex(&["randomized", "--E", "e.mtx", "--A", "a.mtx", "--h", "1", "--points", "10"], d.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
