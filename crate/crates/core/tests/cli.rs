use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use casimir_plate::output::{CompareDocument, CorrelationDocument, ScanDocument};
use casimir_plate::potential::cp_far_zone_plate;
use casimir_plate::geometry::PlateGeometry;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_casimir-plate"));
    c.env_remove("CASIMIR_PLATE_CONFIG_DIR");
    c
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (
        status.code().expect("exit code"),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(repo().join("schemas").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, text: &str) {
    let doc: serde_json::Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

const SMALL_GRID: &str = r#"{"schema_version": 1, "z_a": [0.0, 1.0], "z_b": [0.5, 3.0], "rho": [0.0, 2.0],
  "methods": ["far_zone_closed", "correlation_wick", "double_integral_far"], "k": [0.5, 2.0]}"#;

#[test]
fn potential_matches_library_to_the_last_bit() {
    let (code, out, err) = run(bin().args(["potential", "--method", "far", "--atom-a", "0,0,1", "--atom-b", "0.5,0.2,2"]));
    assert_eq!(code, 0, "{err}");
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let idx = headers.iter().position(|h| h == "value").unwrap();
    let rec = rdr.records().next().unwrap().unwrap();
    let value: f64 = rec[idx].parse().unwrap();
    let g = PlateGeometry::new([0.0, 0.0, 1.0], [0.5, 0.2, 2.0]).unwrap();
    assert_eq!(value, cp_far_zone_plate(1.0, 1.0, &g).unwrap().value);
}

#[test]
fn potential_with_atom_files_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"label": "a", "transitions": [{"k": 1.0, "mu2": 1.0}]}"#);
    let (code, out, err) = run(bin().args([
        "potential", "--method", "wick", "--atoms-a", a.to_str().unwrap(), "--atoms-b", a.to_str().unwrap(),
        "--atom-a", "0,0,2", "--atom-b", "3,0,1", "--format", "json",
    ]));
    assert_eq!(code, 0, "{err}");
    assert_valid(&schema("result.schema.json"), &out);
    let doc: ScanDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.rows.len(), 1);
    assert!(doc.rows[0].value.unwrap() < 0.0);
}

#[test]
fn scan_csv_and_json_agree_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.json", SMALL_GRID);
    let csv_path = dir.path().join("out.csv");
    let json_path = dir.path().join("out.json");
    for p in [&csv_path, &json_path] {
        let (code, _, err) = run(bin().args(["scan", "--grid", grid.to_str().unwrap(), "--output", p.to_str().unwrap()]));
        assert_eq!(code, 0, "{err}");
    }
    let json = std::fs::read_to_string(&json_path).unwrap();
    assert_valid(&schema("result.schema.json"), &json);
    let doc: ScanDocument = serde_json::from_str(&json).unwrap();
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.rows.len(), 8 * 3);

    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap().get(0), Some("z_a"));
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), doc.rows.len());
    for (rec, row) in records.iter().zip(&doc.rows) {
        assert_eq!(&rec[5], row.method);
        assert_eq!(rec[6].parse::<f64>().unwrap(), row.value.unwrap());
        let mantissa = rec[6].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    }
}

#[test]
fn output_is_deterministic_across_runs_and_execution_modes() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.json", SMALL_GRID);
    let g = grid.to_str().unwrap();
    let (_, first, _) = run(bin().args(["scan", "--grid", g]));
    let (_, second, _) = run(bin().args(["scan", "--grid", g]));
    let (_, sequential, _) = run(bin().args(["--sequential", "scan", "--grid", g]));
    assert_eq!(first, second);
    assert_eq!(first, sequential);
}

#[test]
fn config_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "grid.json", SMALL_GRID);
    let (code, out, err) = run(bin()
        .env("CASIMIR_PLATE_CONFIG_DIR", dir.path())
        .current_dir(std::env::temp_dir())
        .args(["scan", "--grid", "grid.json", "--method", "far"]));
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 9);
    let (code, _, err) = run(bin().current_dir(std::env::temp_dir()).args(["scan", "--grid", "grid.json"]));
    assert_eq!(code, 1);
    assert!(err.contains("grid.json"), "{err}");
}

#[test]
fn compare_pass_and_fail_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.json", SMALL_GRID);
    let g = grid.to_str().unwrap();
    let out = dir.path().join("cmp.json");
    let (code, _, err) = run(bin().args(["compare", "--grid", g, "--tol", "1e-8", "--output", out.to_str().unwrap()]));
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("PASS"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_valid(&schema("result.schema.json"), &text);
    let doc: CompareDocument = serde_json::from_str(&text).unwrap();
    assert!(doc.report.all_pass);

    let (code, out, err) = run(bin().args(["compare", "--grid", g, "--tol", "1e-300"]));
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("FAIL"));
    assert!(out.lines().skip(1).any(|l| l.contains(",false,")), "failing rows are still written");
}

#[test]
fn invalid_grid_points_are_flagged_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"schema_version": 1, "z_a": [-1.0, 1.0], "z_b": [1.0], "rho": [1.0]}"#,
    );
    let (code, out, _) = run(bin().args(["scan", "--grid", grid.to_str().unwrap()]));
    assert_eq!(code, 1);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("validation_error"));
    assert!(lines[2].contains(",ok,"));
}

#[test]
fn numerical_failure_exits_2_with_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"schema_version": 1, "z_a": [0.3], "z_b": [2.0], "rho": [1.5],
            "methods": ["far_zone_closed", "correlation_wick"],
            "quadrature": {"rel_tol": 1e-16, "abs_tol": 1e-300, "max_subdivisions": 1}}"#,
    );
    let (code, out, _) = run(bin().args(["scan", "--grid", grid.to_str().unwrap()]));
    assert_eq!(code, 2);
    assert!(out.contains("far_zone_closed") && out.contains(",ok,"));
    assert!(out.contains("numerical_failure"));
}

#[test]
fn malformed_json_reports_path_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "broken.json", "{\n  \"schema_version\": 1,\n  \"z_a\": [1,\n}");
    let (code, _, err) = run(bin().args(["scan", "--grid", grid.to_str().unwrap()]));
    assert_eq!(code, 1);
    assert!(err.contains("broken.json") && err.contains("line 4"), "{err}");

    let grid = write(dir.path(), "extra.json", r#"{"schema_version": 1, "z_a": [1], "z_b": [1], "rho": [1], "zz": 3}"#);
    let (code, _, err) = run(bin().args(["scan", "--grid", grid.to_str().unwrap()]));
    assert_eq!(code, 1);
    assert!(err.contains("zz"), "{err}");

    let grid = write(dir.path(), "v2.json", r#"{"schema_version": 2, "z_a": [1], "z_b": [1], "rho": [1]}"#);
    let (code, _, err) = run(bin().args(["scan", "--grid", grid.to_str().unwrap()]));
    assert_eq!(code, 1);
    assert!(err.contains("schema_version"), "{err}");
}

#[test]
fn correlation_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.json", SMALL_GRID);
    let out = dir.path().join("corr.csv");
    let (code, _, err) = run(bin().args([
        "correlation", "--grid", grid.to_str().unwrap(), "--k", "0.5,1.0,2.0", "--output", out.to_str().unwrap(),
    ]));
    assert_eq!(code, 0, "{err}");
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap().len(), 13);
    assert_eq!(rdr.records().count(), 3 * 8);

    let (code, out, _) = run(bin().args(["correlation", "--grid", grid.to_str().unwrap(), "--format", "json"]));
    assert_eq!(code, 0);
    assert_valid(&schema("result.schema.json"), &out);
    let doc: CorrelationDocument = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.rows.len(), 2 * 8);

    let (code, _, _) = run(bin().args(["correlation", "--grid", grid.to_str().unwrap(), "--k", "-1"]));
    assert_eq!(code, 1);
}

#[test]
fn checks_are_seeded_and_pass() {
    let (code, first, _) = run(bin().args(["selftest", "--seed", "11", "--cases", "50"]));
    assert_eq!(code, 0, "{first}");
    let (_, second, _) = run(bin().args(["selftest", "--seed", "11", "--cases", "50"]));
    assert_eq!(first, second);
    assert!(first.lines().skip(1).all(|l| l.starts_with("PASS")));
    let (code, out, _) = run(bin().args(["oracle-check", "--seed", "5"]));
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(bin().arg("version"));
    assert_eq!(code, 0);
    assert!(out.starts_with("casimir-plate "));
}

#[test]
fn shipped_configs_validate_against_schemas() {
    let grid = schema("grid.schema.json");
    let atom = schema("atom.schema.json");
    for entry in std::fs::read_dir(repo().join("configs")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let v = if value.get("transitions").is_some() { &atom } else { &grid };
        assert!(v.is_valid(&value), "{}", path.display());
        if value.get("transitions").is_none() {
            casimir_plate::grid::ScanConfig::load(&path).unwrap();
        }
    }
}
