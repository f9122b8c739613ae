//! Deterministic CSV and JSON emission.
//!
//! CSV floats carry 17 significant digits (`{:.16e}`), so every value
//! round-trips bit for bit; JSON uses the shortest round-tripping form.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationRow;
use crate::error::{Error, Result};
use crate::grid::{GridPoint, OutputFormat, SCHEMA_VERSION};
use crate::potential::{ComparisonReport, MethodOutcome, OutcomeStatus, PotentialResult};

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// One evaluated `(point, method)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRow {
    pub z_a: f64,
    pub z_b: f64,
    pub rho: f64,
    pub r: Option<f64>,
    pub rbar: Option<f64>,
    pub method: String,
    pub value: Option<f64>,
    pub reduced_coefficient: Option<f64>,
    pub error_estimate: Option<f64>,
    pub status: OutcomeStatus,
    pub message: Option<String>,
}

impl ScanRow {
    pub fn new(point: &GridPoint, outcome: &MethodOutcome) -> Self {
        let geometry = point.geometry().ok();
        let res: Option<&PotentialResult> = outcome.result.as_ref();
        ScanRow {
            z_a: point.z_a,
            z_b: point.z_b,
            rho: point.rho,
            r: geometry.map(|g| g.r),
            rbar: geometry.map(|g| g.rbar),
            method: outcome.method.tag().to_string(),
            value: res.map(|r| r.value),
            reduced_coefficient: res.map(|r| r.reduced_coefficient),
            error_estimate: res.map(|r| r.error_estimate),
            status: outcome.status,
            message: outcome.message.clone(),
        }
    }

    /// Row for a grid point that is not a valid configuration.
    pub fn invalid(point: &GridPoint, method: &str, message: String) -> Self {
        ScanRow {
            z_a: point.z_a,
            z_b: point.z_b,
            rho: point.rho,
            r: None,
            rbar: None,
            method: method.to_string(),
            value: None,
            reduced_coefficient: None,
            error_estimate: None,
            status: OutcomeStatus::ValidationError,
            message: Some(message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanDocument {
    pub schema_version: u32,
    pub kind: String,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationDocument {
    pub schema_version: u32,
    pub kind: String,
    pub rows: Vec<CorrelationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareDocument {
    pub schema_version: u32,
    pub kind: String,
    pub report: ComparisonReport,
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: "<csv output>".into(),
            source,
        },
        other => Error::InvalidConfig(format!("csv output: {other:?}")),
    }
}

pub fn scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "z_a",
        "z_b",
        "rho",
        "r",
        "rbar",
        "method",
        "value",
        "reduced_coefficient",
        "error_estimate",
        "status",
        "message",
    ])
    .map_err(csv_error)?;
    for r in rows {
        let status = serde_json::to_value(r.status).expect("status serializes");
        w.write_record([
            format_float(r.z_a),
            format_float(r.z_b),
            format_float(r.rho),
            opt(r.r),
            opt(r.rbar),
            r.method.clone(),
            opt(r.value),
            opt(r.reduced_coefficient),
            opt(r.error_estimate),
            status.as_str().unwrap_or_default().to_string(),
            r.message.clone().unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv output>".into(),
        source,
    })
}

pub const TENSOR_COLUMNS: [&str; 9] = ["t_xx", "t_xy", "t_xz", "t_yx", "t_yy", "t_yz", "t_zx", "t_zy", "t_zz"];

pub fn correlation_csv<W: Write>(rows: &[CorrelationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k", "z_a", "z_b", "rho"];
    header.extend(TENSOR_COLUMNS);
    w.write_record(&header).map_err(csv_error)?;
    for r in rows {
        let mut rec = vec![format_float(r.k), format_float(r.z_a), format_float(r.z_b), format_float(r.rho)];
        rec.extend(r.components.iter().map(|&c| format_float(c)));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv output>".into(),
        source,
    })
}

/// Flattened comparison table: one line per `(point, method)` plus the
/// row's worst pairwise deviation and verdict.
pub fn compare_csv<W: Write>(report: &ComparisonReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "z_a",
        "z_b",
        "rho",
        "method",
        "value",
        "reduced_coefficient",
        "error_estimate",
        "status",
        "max_pair_deviation",
        "row_pass",
        "message",
    ])
    .map_err(csv_error)?;
    for row in &report.rows {
        let worst = row.deviations.iter().map(|d| d.relative).fold(0.0, f64::max);
        let base = [format_float(row.point.z_a), format_float(row.point.z_b), format_float(row.point.rho)];
        if let Some(msg) = &row.geometry_error {
            let mut rec = base.to_vec();
            rec.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "validation_error".into(),
                String::new(),
                "false".into(),
                msg.clone(),
            ]);
            w.write_record(&rec).map_err(csv_error)?;
            continue;
        }
        for o in &row.outcomes {
            let res = o.result.as_ref();
            let status = serde_json::to_value(o.status).expect("status serializes");
            let mut rec = base.to_vec();
            rec.extend([
                o.method.tag().to_string(),
                opt(res.map(|r| r.value)),
                opt(res.map(|r| r.reduced_coefficient)),
                opt(res.map(|r| r.error_estimate)),
                status.as_str().unwrap_or_default().to_string(),
                format_float(worst),
                row.pass.to_string(),
                o.message.clone().unwrap_or_default(),
            ]);
            w.write_record(&rec).map_err(csv_error)?;
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv output>".into(),
        source,
    })
}

pub fn scan_document(rows: Vec<ScanRow>) -> ScanDocument {
    ScanDocument {
        schema_version: SCHEMA_VERSION,
        kind: "scan".into(),
        rows,
    }
}

pub fn correlation_document(rows: Vec<CorrelationRow>) -> CorrelationDocument {
    CorrelationDocument {
        schema_version: SCHEMA_VERSION,
        kind: "correlation".into(),
        rows,
    }
}

pub fn compare_document(report: ComparisonReport) -> CompareDocument {
    CompareDocument {
        schema_version: SCHEMA_VERSION,
        kind: "compare".into(),
        report,
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Picks the format from an explicit choice, else from the file extension, else CSV.
pub fn resolve_format(explicit: Option<OutputFormat>, path: Option<&Path>) -> OutputFormat {
    explicit
        .or_else(|| match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Some(OutputFormat::Json),
            _ => None,
        })
        .unwrap_or(OutputFormat::Csv)
}

/// Writes `bytes` to `path`, or to `stdout` when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => stdout.write_all(bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv_text() {
        for x in [1.0 / 3.0, -2.069014260194639, 1e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "");
    }

    #[test]
    fn correlation_csv_has_header_and_rows() {
        let row = CorrelationRow {
            k: 0.5,
            z_a: 1.0,
            z_b: 2.0,
            rho: 0.25,
            components: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -0.5],
        };
        let mut buf = Vec::new();
        correlation_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,z_a,z_b,rho,t_xx,t_xy,t_xz,t_yx,t_yy,t_yz,t_zx,t_zy,t_zz");
        assert!(lines.next().unwrap().starts_with("5.0000000000000000e-1,1.0000000000000000e0,"));
    }

    #[test]
    fn format_resolution() {
        assert_eq!(resolve_format(None, Some(Path::new("a.json"))), OutputFormat::Json);
        assert_eq!(resolve_format(None, Some(Path::new("a.csv"))), OutputFormat::Csv);
        assert_eq!(resolve_format(Some(OutputFormat::Json), None), OutputFormat::Json);
        assert_eq!(resolve_format(None, None), OutputFormat::Csv);
    }
}
