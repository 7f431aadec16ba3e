use std::path::PathBuf;
use std::process::{Command, Output};

fn dunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl"))
        .args(args)
        .env_remove("DUNKL_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dunkl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn kernel_csv_matches_closed_form_in_rank_one() {
    let o = dunkl(&["--mu", "5/2", "kernel", "--grid", "-1:1:5"]);
    assert!(o.status.success(), "{o:?}");
    let mut rows = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["x", "y", "K", "certified_tail", "converged", "closed_form"]
    );
    let mut n = 0;
    for r in rows.records() {
        let r = r.unwrap();
        let k: f64 = r[2].parse().unwrap();
        let c: f64 = r[5].parse().unwrap();
        assert!((k - c).abs() < 1e-13, "{r:?}");
        assert_eq!(&r[4], "true");
        n += 1;
    }
    assert_eq!(n, 25);
}

#[test]
fn rank_two_columns_are_indexed_from_zero() {
    let o = dunkl(&["--system", "b", "--k0", "1", "--k1", "1/2", "kernel", "--grid", "0,1"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("x0,x1,y0,y1,K,certified_tail,converged\n"));
}

#[test]
fn heat_solve_conserves_mass_and_starts_from_the_profile() {
    let o = dunkl(&["--mu", "1/2", "--format", "json", "heat", "solve", "--f", "gaussian:2", "--grid", "0,1", "--times", "0,1"]);
    assert!(o.status.success(), "{o:?}");
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!((r["mass"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        if r["t"] == 0.0 {
            let x = r["x"].as_f64().unwrap();
            assert!((r["u"].as_f64().unwrap() - (-2.0 * x * x).exp()).abs() < 1e-15);
        }
    }
}

#[test]
fn transform_of_hermite_function_is_an_eigenfunction() {
    let t = dunkl(&["--format", "json", "transform", "--f", "hermite:3", "--grid", "0.7"]);
    let k = dunkl(&["--nmax", "3", "basis"]);
    assert!(t.status.success() && k.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&t.stdout).unwrap();
    // D h_3 = i h_3, so the real part vanishes.
    assert!(rows[0]["re"].as_f64().unwrap().abs() < 1e-10, "{rows:?}");
    assert!(rows[0]["im"].as_f64().unwrap().abs() > 1e-3);
}

#[test]
fn basis_json_reports_identity_gram() {
    let path = scratch("basis.json");
    let o = dunkl(&["--system", "a", "--alpha", "1", "--nmax", "3", "--out", path.to_str().unwrap(), "basis"]);
    assert!(o.status.success(), "{o:?}");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["gram_is_identity"], true);
    assert_eq!(doc["system"], "S3(k=1)");
    assert_eq!(doc["records"].as_array().unwrap().len(), 20);
}

#[test]
fn check_passes_for_z2_and_fails_when_mutated() {
    let o = dunkl(&["check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], true);

    let o = dunkl(&["--system", "b", "--k0", "1", "--k1", "1", "check", "--mutate"]);
    assert_eq!(o.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["passed"], false);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["--system", "e8", "basis"],
        vec!["--mu", "-1", "basis"],
        vec!["--mu", "1/0", "basis"],
        vec!["--system", "dihedral", "basis"],
        vec!["--system", "dihedral", "--order", "3", "basis"],
        vec!["kernel", "--grid", "0:1"],
        vec!["heat", "solve", "--f", "cosine", "--grid", "0"],
        vec!["--rank", "9", "basis"],
    ] {
        let o = dunkl(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_dunkl")).args(["basis"]).env("DUNKL_PRECISION", "lots").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_read_and_overridden() {
    let path = scratch("run.toml");
    std::fs::write(&path, "system = \"b\"\nk0 = 1\nk1 = \"1/2\"\nnmax = 2\n").unwrap();
    let o = dunkl(&["--config", path.to_str().unwrap(), "--nmax", "1", "basis"]);
    assert!(o.status.success(), "{o:?}");
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["system"], "B2(k=1,1/2)");
    assert_eq!(doc["n_max"], 1);

    std::fs::write(&path, "system = \"b\"\nbogus = 1\n").unwrap();
    assert_eq!(dunkl(&["--config", path.to_str().unwrap(), "basis"]).status.code(), Some(2));
}
