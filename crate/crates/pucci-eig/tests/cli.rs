//! End-to-end tests of the command-line binary: exit-code discipline,
//! schema tagging, typed JSON round-trips, CSV shape, determinism, and
//! atomic file output.

mod support;

use support::run_cli;

use pucci_eig::cli::{AreaDocument, EigDocument, SweepDocument};
use pucci_eig::report::json_string;
use pucci_eig::verify::VerifyReport;

fn stdout_str(out: &std::process::Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout must be UTF-8")
}

#[test]
fn eig_on_the_square_recovers_the_laplacian_eigenvalue() {
    let out = run_cli(&["eig", "--lambda", "1", "--Lambda", "1", "--square"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: EigDocument = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc.schema, "pucci-eig/1");
    assert!((doc.mu - 1.0).abs() < 0.01, "mu = {}", doc.mu);
    assert!(doc.converged);
    assert!(doc.monotone_certificate);
    assert!(doc.residual < 1e-5);
    assert!(doc.iterations > 0);
}

#[test]
fn eig_json_round_trips_byte_for_byte() {
    let out = run_cli(&[
        "eig", "--lambda", "1", "--Lambda", "2", "--gamma", "1", "--h", "0.2", "--W", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let doc: EigDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(json_string(&doc).unwrap(), text);
}

#[test]
fn eig_csv_has_one_row_matching_the_json_value() {
    let json = run_cli(&["eig", "--omega", "2", "--h", "0.3"]);
    let csv = run_cli(&["eig", "--omega", "2", "--h", "0.3", "--format", "csv"]);
    let doc: EigDocument = serde_json::from_str(&stdout_str(&json)).unwrap();
    let text = stdout_str(&csv);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("mu,h,W,"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(lines.next(), None);
    let mu: f64 = row[0].parse().unwrap();
    assert_eq!(mu.to_bits(), doc.mu.to_bits(), "CSV floats are exact");
}

#[test]
fn eig_reports_nonconvergence_with_exit_two() {
    let out = run_cli(&[
        "eig", "--omega", "2", "--h", "0.4", "--tol", "1e-14", "--max-iter", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc: EigDocument = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(!doc.converged);
}

#[test]
fn usage_errors_exit_one_on_stderr() {
    for args in [
        &["eig", "--no-such-flag"][..],
        &["eig", "--gamma", "7", "--omega", "2"][..],
        &["eig", "--lambda", "1", "--Lambda", "2", "--omega", "5"][..],
        &["render", "--square"][..],
        &["verify", "--format", "csv"][..],
        &["no-such-command"][..],
    ] {
        let out = run_cli(args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {out:?}");
        assert!(out.stdout.is_empty(), "errors must not pollute stdout");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run_cli(&["--help"]).status.code(), Some(0));
    assert_eq!(run_cli(&["--version"]).status.code(), Some(0));
    assert_eq!(run_cli(&["eig", "--help"]).status.code(), Some(0));
}

#[test]
fn area_json_and_csv_agree() {
    let json = run_cli(&["area", "--omega", "1", "--gamma", "1"]);
    assert_eq!(json.status.code(), Some(0));
    let doc: AreaDocument = serde_json::from_str(&stdout_str(&json)).unwrap();
    let expected = 2.0 * std::f64::consts::PI.powi(2);
    assert!((doc.area - expected).abs() < 1e-8);

    let csv = run_cli(&["area", "--omega", "1", "--gamma", "1", "--format", "csv"]);
    let text = stdout_str(&csv);
    let row = text.lines().nth(1).unwrap();
    let area_field = row.rsplit(',').next().unwrap();
    let area: f64 = area_field.parse().unwrap();
    assert_eq!(area.to_bits(), doc.area.to_bits());
}

#[test]
fn sweep_gamma_marks_the_symmetric_argmin() {
    let out = run_cli(&["sweep-gamma", "--omega", "4", "--n", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let gamma_col = header.iter().position(|&c| c == "gamma").unwrap();
    let argmin_col = header.iter().position(|&c| c == "is_argmin").unwrap();
    let argmin_rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|r| r[argmin_col] == "true")
        .collect();
    assert_eq!(argmin_rows.len(), 1);
    let gamma: f64 = argmin_rows[0][gamma_col].parse().unwrap();
    assert_eq!(gamma, 1.0);
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn sweep_gamma_json_round_trips() {
    let out = run_cli(&["sweep-gamma", "--omega", "4", "--n", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let doc: SweepDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.schema, "pucci-eig/1");
    assert_eq!(doc.result.rows.len(), 5);
    assert_eq!(json_string(&doc).unwrap(), text);
}

#[test]
fn verify_is_byte_deterministic_and_passes() {
    let args = &["verify", "--all", "--seed", "42", "--samples", "400"];
    let first = run_cli(args);
    assert_eq!(first.status.code(), Some(0), "{:?}", first);
    let second = run_cli(args);
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");
    let report: VerifyReport = serde_json::from_str(&stdout_str(&first)).unwrap();
    assert!(report.hard_failures.is_empty());
    assert_eq!(report.seed, 42);
    // Typed round-trip: parse back and re-serialize to the same bytes.
    assert_eq!(json_string(&report).unwrap(), stdout_str(&first));
}

#[test]
fn output_file_is_written_atomically_and_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args_base = ["area", "--omega", "2", "--gamma", "1.1"];
    let to_stdout = run_cli(&args_base);
    let mut args_file: Vec<&str> = args_base.to_vec();
    let path_str = path.to_str().unwrap();
    args_file.extend_from_slice(&["--out", path_str]);
    let to_file = run_cli(&args_file);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    // No temporary droppings next to the target.
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names, vec!["report.json".to_string()]);
}

#[test]
fn render_emits_boundary_and_classified_interior_rows() {
    let out = run_cli(&["render", "--gamma", "1.0", "--omega", "4", "--samples", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert_eq!(text.lines().next().unwrap(), "kind,region,x,y,value");
    let mut kinds = std::collections::BTreeMap::new();
    let mut regions = std::collections::BTreeSet::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        *kinds.entry(f[0].to_string()).or_insert(0usize) += 1;
        let value: f64 = f[4].parse().unwrap();
        if f[0].starts_with("boundary") {
            assert!(value.abs() <= 1e-11, "boundary value {value}");
        } else {
            assert!(value > 0.0, "interior values are positive");
            regions.insert(f[1].to_string());
        }
    }
    assert_eq!(kinds["boundary_top"], 300);
    assert_eq!(kinds["boundary_bottom"], 300);
    assert_eq!(kinds["interior"], 300);
    assert_eq!(
        regions.into_iter().collect::<Vec<_>>(),
        vec!["central_square", "east_west", "north_south"]
    );
}

#[test]
fn render_respects_shear_and_scale_maps() {
    let out = run_cli(&[
        "render", "--omega", "2", "--gamma", "1", "--a", "1.5", "--delta", "0.5", "--samples",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout_str(&out);
    // The sheared & scaled domain is no longer symmetric under x ↦ −x at
    // fixed y; just check the rows parse and boundary values vanish.
    let n_rows = text.lines().count() - 1;
    assert_eq!(n_rows, 64 * 3);
}

#[test]
fn thread_cap_env_var_is_validated() {
    let ok = std::process::Command::new(env!("CARGO_BIN_EXE_pucci-eig"))
        .args(["area", "--omega", "2"])
        .env("PUCCI_EIG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_pucci-eig"))
        .args(["area", "--omega", "2"])
        .env("PUCCI_EIG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sweep_shear_csv_reports_bound_checks() {
    // Coarse and fast: correctness of the shape, not the numbers.
    let out = run_cli(&[
        "sweep-shear",
        "--lambda",
        "1",
        "--Lambda",
        "2",
        "--a",
        "0",
        "--a",
        "1.5707963267948966",
        "--h",
        "0.4",
        "--W",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout_str(&out);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header[0], "a");
    let ok_col = header.iter().position(|&c| c == "lower_bound_ok").unwrap();
    let strict_col = header.iter().position(|&c| c == "strict").unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert!(f[ok_col] == "true" || f[ok_col] == "false");
        assert!(f[strict_col] == "strict" || f[strict_col] == "indeterminate");
    }
    assert_eq!(text.lines().count(), 3);
}
