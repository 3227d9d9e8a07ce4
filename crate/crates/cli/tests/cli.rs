use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str = "experiment_id,dgp,n,alpha,method,counting_mode,coverage,undefined_rate,mc_se,reps,seed,feasible";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ratio-ci"));
    c.env_remove("RATIO_CI_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ratio-ci")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn small_config(dir: &Path) -> String {
    let csv = dir.join("out/small.csv");
    let svg = dir.join("out/small.svg");
    write_config(
        dir,
        &format!(
            r#"{{
  "experiment_id": "small",
  "dgp": {{"family": "bivariate_gaussian", "params": {{"mean_x": 0.5, "var_x": 1, "mean_y": 0.1, "var_y": 2, "corr": 0.5}}}},
  "n_grid": [100, 1000, 5000],
  "alpha": 0.1,
  "methods": [{{"kind": "delta"}}, {{"kind": "bc_general", "bounds": "from_dgp"}}],
  "reps": 200,
  "seed": 4,
  "reference_bounds": "from_dgp",
  "outputs": {{"csv_path": {csv:?}, "svg_path": {svg:?}}}
}}"#
        ),
    )
}

#[test]
fn simulate_writes_csv_and_svg_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = run(&["simulate", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv1 = fs::read(dir.path().join("out/small.csv")).unwrap();
    let svg1 = fs::read(dir.path().join("out/small.svg")).unwrap();
    let text = String::from_utf8(csv1.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let infeasible: Vec<_> = rows.iter().filter(|r| r[11] == "false").collect();
    assert_eq!(infeasible.len(), 2);
    assert!(infeasible.iter().all(|r| r[4] == "bc_general" && r[6] == "NA"));
    let svg = String::from_utf8(svg1.clone()).unwrap();
    assert!(svg.contains(r#"class="nominal""#));
    assert!(svg.contains(r#"class="threshold""#));

    let o = bin().env("RATIO_CI_THREADS", "1").args(["simulate", &cfg]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(dir.path().join("out/small.csv")).unwrap(), csv1);
    assert_eq!(fs::read(dir.path().join("out/small.svg")).unwrap(), svg1);
}

#[test]
fn simulate_prints_csv_without_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment_id": "stdout", "dgp": {"family": "gaussian_product", "params": {"mean_x": 1, "var_x": 1, "mean_y": 1, "var_y": 1}},
            "n_grid": [50], "alpha": 0.05, "methods": [{"kind": "delta"}], "reps": 100, "seed": 1}"#,
    );
    let o = run(&["simulate", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with(HEADER));
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().starts_with("stdout,gaussian_product,50,0.05,delta,undefined_as_miss,"));
}

#[test]
fn simulate_names_method_missing_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"experiment_id": "bad", "dgp": {"family": "gaussian_product", "params": {"mean_x": 1, "var_x": 1, "mean_y": 1, "var_y": 1}},
            "n_grid": [50], "alpha": 0.05, "methods": [{"kind": "hoeff_general"}], "reps": 10, "seed": 1}"#,
    );
    let o = run(&["simulate", &cfg]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("hoeff_general"), "{}", stderr(&o));
}

#[test]
fn simulate_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"experiment_id": "x", "bogus": 1}"#);
    let o = run(&["simulate", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn diagnose_reports_thresholds() {
    let o = run(&["diagnose", "--n", "1000", "--alpha", "0.05", "--ly", "0.25", "--uy", "1.0625"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("alpha_bar_n = 0.032\n"), "{out}");
    assert!(out.contains("n_bar_alpha = 640\n"), "{out}");
    assert!(out.contains("snr_tilde = "));
    assert!(out.contains(": feasible\n"), "{out}");
    assert!(out.contains("length_lower_bound = NA"));

    let o = run(&["diagnose", "--n", "100", "--alpha", "0.1", "--ly", "0.1", "--uy", "2.01", "--ux", "1.25"]);
    let out = stdout(&o);
    assert!(out.contains("n_bar_alpha = 4000\n"), "{out}");
    assert!(out.contains(": infeasible\n"), "{out}");
    let v_n = 1.25 / (0.1f64 + 2f64.sqrt()).powi(2);
    let want = (v_n / (3.0 * 100.0 * 0.1)).sqrt();
    let got: f64 = out
        .lines()
        .find_map(|l| l.strip_prefix("length_lower_bound = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((got / want - 1.0).abs() < 1e-5, "{got} vs {want}");
}

#[test]
fn diagnose_rejects_bad_alpha() {
    let o = run(&["diagnose", "--n", "10", "--alpha", "1.5", "--ly", "1", "--uy", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn classify_reports_cells() {
    let o = run(&["classify", "--a", "0", "--a-prime", "0", "--b", "0", "--b-prime", "0"]);
    let out = stdout(&o);
    assert!(out.contains("law_family = GaussianLinear\n"), "{out}");
    assert!(out.contains("delta_method_ok = true\n"));
    let o = run(&["classify", "--a", "1", "--a-prime", "0", "--b", "1.5", "--b-prime", "0"]);
    let out = stdout(&o);
    assert!(out.contains("law_family = GaussianRatio\n"), "{out}");
    assert!(out.contains("renorm_exponent = 0.5\n"), "{out}");
    assert!(out.contains("delta_method_ok = false\n"));
    let o = run(&["classify", "--a", "x", "--a-prime", "0", "--b", "0", "--b-prime", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_unit_denominator_gives_mean_interval() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "x,one\n1,1\n2,1\n4,1\n7,1\n").unwrap();
    let o = run(&["analyze", data.to_str().unwrap(), "--num", "x", "--den", "one", "--alpha", "0.05", "--bootstrap-reps", "200"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("theta_hat = 3.5\n"), "{out}");
    // 3.5 +/- 1.959964 sqrt(5.25 / 4)
    assert!(out.contains("delta CI (95%) = [1.25458, 5.74542]"), "{out}");
    assert_eq!(stdout(&run(&["analyze", data.to_str().unwrap(), "--num", "x", "--den", "one", "--bootstrap-reps", "200"])), out);
}

#[test]
fn analyze_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let o = run(&["analyze", empty.to_str().unwrap(), "--num", "x", "--den", "y"]);
    assert_eq!(o.status.code(), Some(1));
    let data = dir.path().join("d.csv");
    fs::write(&data, "x,y\n1,2\n").unwrap();
    let o = run(&["analyze", data.to_str().unwrap(), "--num", "x", "--den", "z"]);
    assert!(stderr(&o).contains("\"z\""), "{}", stderr(&o));
    let o = bin()
        .env("RATIO_CI_THREADS", "0")
        .args(["analyze", data.to_str().unwrap(), "--num", "x", "--den", "y"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("RATIO_CI_THREADS"));
}

#[test]
fn mimic_then_analyze_flags_rare_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("wages.csv");
    let o = run(&["mimic", "--n", "204246", "--seed", "1", "--out", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let common = run(&["analyze", data.to_str().unwrap(), "--num", "female", "--den", "indicator:wage>=3000", "--bootstrap-reps", "200"]);
    assert!(stdout(&common).contains("no flag"), "{}", stdout(&common));
    let rare = run(&["analyze", data.to_str().unwrap(), "--num", "female", "--den", "indicator:wage>=30000", "--bootstrap-reps", "200"]);
    let out = stdout(&rare);
    assert!(out.contains("delta method flagged unreliable"), "{out}");
}
