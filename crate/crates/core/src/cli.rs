//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 invalid input, 2 numerical failure or failed comparison.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::atom::{AtomSpec, Polarizability};
use crate::checks::{self, CheckOutcome};
use crate::correlation::correlation_scan;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::PlateGeometry;
use crate::grid::{resolve_config_path, Grid, GridPoint, OutputFormat, ScanConfig};
use crate::output::{self, ScanRow};
use crate::potential::{compare_methods, evaluate, Method, MethodOutcome, OutcomeStatus, QuadratureConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "casimir-plate", version, about = "Casimir-Polder potential of two atoms above a conducting plate")]
struct Cli {
    /// Evaluate grid points one at a time instead of in parallel.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[arg(long, default_value = "far", value_parser = parse_method)]
    method: Method,
    /// Atom description for A (JSON); static unit polarizability if omitted.
    #[arg(long)]
    atoms_a: Option<PathBuf>,
    #[arg(long)]
    atoms_b: Option<PathBuf>,
    /// Static polarizability of A when no atom file is given.
    #[arg(long, conflicts_with = "atoms_a")]
    alpha_a: Option<f64>,
    #[arg(long, conflicts_with = "atoms_b")]
    alpha_b: Option<f64>,
    /// Position of A as x,y,z.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    atom_a: [f64; 3],
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    atom_b: [f64; 3],
    /// Quadrature settings (JSON).
    #[arg(long)]
    quadrature: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Potential for a single pair of atom positions.
    Potential(PotentialArgs),
    /// Evaluate the grid of a scan config with one or more methods.
    Scan {
        #[arg(long)]
        grid: PathBuf,
        /// Comma-separated methods; overrides the config.
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        method: Vec<Method>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check methods on a grid and report pairwise relative deviations.
    Compare {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, value_delimiter = ',', value_parser = parse_method)]
        method: Vec<Method>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Free-plus-image field correlation density on a grid.
    Correlation {
        #[arg(long)]
        grid: PathBuf,
        /// Comma-separated wavenumbers; overrides the config.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the tensor kernels against independent quadrature and finite differences.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Seeded invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
    /// Print version and output schema version.
    Version,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    Method::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Method::ALL.iter().map(|m| m.short_name()).collect();
        format!("unknown method '{s}' (expected one of {})", names.join(", "))
    })
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("not a number: '{p}'"))?;
    }
    Ok(v)
}

fn load_atom(file: &Option<PathBuf>, alpha: Option<f64>, which: char) -> Result<Polarizability> {
    match file {
        Some(p) => Ok(Polarizability::Dynamic(AtomSpec::load(&resolve_config_path(p))?)),
        None => {
            let a = alpha.unwrap_or(1.0);
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "atom {which}: static polarizability must be positive, got {a}"
                )));
            }
            Ok(Polarizability::Static(a))
        }
    }
}

fn load_quadrature(path: &Option<PathBuf>) -> Result<QuadratureConfig> {
    let Some(p) = path else {
        return Ok(QuadratureConfig::default());
    };
    let p = resolve_config_path(p);
    let text = std::fs::read_to_string(&p).map_err(|source| Error::Io { path: p.clone(), source })?;
    let q: QuadratureConfig = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: p.clone(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    q.validate()?;
    Ok(q)
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

fn exit_for_statuses<'a>(statuses: impl Iterator<Item = &'a OutcomeStatus>) -> i32 {
    let mut code = EXIT_OK;
    for s in statuses {
        match s {
            OutcomeStatus::NumericalFailure => return EXIT_NUMERICAL,
            OutcomeStatus::ValidationError => code = EXIT_VALIDATION,
            OutcomeStatus::Ok | OutcomeStatus::Skipped => {}
        }
    }
    code
}

fn write_scan(rows: Vec<ScanRow>, format: OutputFormat, path: Option<&Path>, io: &mut Io) -> Result<()> {
    let bytes = match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            output::scan_csv(&rows, &mut buf)?;
            buf
        }
        OutputFormat::Json => output::to_json(&output::scan_document(rows)).into_bytes(),
    };
    output::emit(path, &bytes, io.stdout)
}

fn output_target(cli: Option<PathBuf>, format: Option<Format>, cfg: &ScanConfig) -> (Option<PathBuf>, OutputFormat) {
    let spec = cfg.output.as_ref();
    let path = cli.or_else(|| {
        spec.and_then(|s| s.path.clone()).map(|p| {
            if p.is_relative() {
                cfg.source.parent().map(|d| d.join(&p)).unwrap_or(p)
            } else {
                p
            }
        })
    });
    let explicit = format.map(OutputFormat::from).or_else(|| spec.and_then(|s| s.format));
    let fmt = output::resolve_format(explicit, path.as_deref());
    (path, fmt)
}

fn cmd_potential(args: PotentialArgs, io: &mut Io) -> Result<i32> {
    let method = args.method;
    let a = load_atom(&args.atoms_a, args.alpha_a, 'A')?;
    let b = load_atom(&args.atoms_b, args.alpha_b, 'B')?;
    let quad = load_quadrature(&args.quadrature)?;
    let g = PlateGeometry::new(args.atom_a, args.atom_b)?;
    let outcome = MethodOutcome::from_result(method, evaluate(method, &a, &b, &g, &quad));
    let point = GridPoint {
        z_a: g.z_a(),
        z_b: g.z_b(),
        rho: g.rho,
    };
    if let Some(msg) = &outcome.message {
        writeln!(io.stderr, "{method}: {msg}").ok();
    }
    let code = exit_for_statuses(std::iter::once(&outcome.status));
    let code = if outcome.status == OutcomeStatus::Skipped { EXIT_VALIDATION } else { code };
    let fmt = output::resolve_format(args.format.map(Into::into), args.output.as_deref());
    write_scan(vec![ScanRow::new(&point, &outcome)], fmt, args.output.as_deref(), io)?;
    Ok(code)
}

fn scan_rows(cfg: &ScanConfig, methods: &[Method], exec: Execution) -> Vec<ScanRow> {
    let points = cfg.grid.points();
    let per_point = exec.map(&points, |p| -> Vec<ScanRow> {
        match p.geometry() {
            Ok(g) => methods
                .iter()
                .map(|&m| {
                    let o = MethodOutcome::from_result(m, evaluate(m, &cfg.atom_a, &cfg.atom_b, &g, &cfg.quadrature));
                    ScanRow::new(p, &o)
                })
                .collect(),
            Err(e) => methods.iter().map(|m| ScanRow::invalid(p, m.tag(), e.to_string())).collect(),
        }
    });
    per_point.into_iter().flatten().collect()
}

fn cmd_scan(
    grid: &Path,
    method: Vec<Method>,
    format: Option<Format>,
    output: Option<PathBuf>,
    exec: Execution,
    io: &mut Io,
) -> Result<i32> {
    let cfg = ScanConfig::load(grid)?;
    let methods = if method.is_empty() { cfg.methods.clone() } else { method };
    let rows = scan_rows(&cfg, &methods, exec);
    let code = exit_for_statuses(rows.iter().map(|r| &r.status));
    let failed = rows.iter().filter(|r| r.status != OutcomeStatus::Ok).count();
    if failed > 0 {
        writeln!(io.stderr, "{failed} of {} evaluations did not succeed; see the status column", rows.len()).ok();
    }
    let (path, fmt) = output_target(output, format, &cfg);
    write_scan(rows, fmt, path.as_deref(), io)?;
    Ok(code)
}

fn cmd_compare(
    grid: &Path,
    tol: f64,
    method: Vec<Method>,
    format: Option<Format>,
    output: Option<PathBuf>,
    exec: Execution,
    io: &mut Io,
) -> Result<i32> {
    let cfg = ScanConfig::load(grid)?;
    let methods = if !method.is_empty() {
        method
    } else if cfg.methods.len() > 1 {
        cfg.methods.clone()
    } else {
        vec![
            Method::FarZoneClosed,
            Method::CorrelationWick,
            Method::CorrelationAbel,
            Method::DoubleIntegralFar,
        ]
    };
    let report = compare_methods(
        &cfg.atom_a,
        &cfg.atom_b,
        &cfg.grid.points(),
        &cfg.quadrature,
        &methods,
        tol,
        exec,
    )?;
    let failing = report.rows.iter().filter(|r| !r.pass).count();
    writeln!(
        io.stderr,
        "{} points, {} methods, max relative deviation {:.3e} (tolerance {:.1e}): {}",
        report.rows.len(),
        methods.len(),
        report.max_deviation,
        tol,
        if report.all_pass {
            "PASS".to_string()
        } else {
            format!("FAIL ({failing} points)")
        }
    )
    .ok();
    let code = if report.rows.iter().any(|r| r.has_numerical_failure()) || !report.all_pass {
        if report.rows.iter().any(|r| r.has_validation_error()) && !report.rows.iter().any(|r| r.has_numerical_failure()) {
            EXIT_VALIDATION
        } else {
            EXIT_NUMERICAL
        }
    } else {
        EXIT_OK
    };
    let (path, fmt) = output_target(output, format, &cfg);
    let bytes = match fmt {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            output::compare_csv(&report, &mut buf)?;
            buf
        }
        OutputFormat::Json => output::to_json(&output::compare_document(report)).into_bytes(),
    };
    output::emit(path.as_deref(), &bytes, io.stdout)?;
    Ok(code)
}

fn cmd_correlation(
    grid: &Path,
    k: Vec<f64>,
    format: Option<Format>,
    output: Option<PathBuf>,
    exec: Execution,
    io: &mut Io,
) -> Result<i32> {
    let cfg = ScanConfig::load(grid)?;
    let ks = if k.is_empty() { cfg.k.clone() } else { k };
    if ks.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: no wavenumbers given (use --k or the config's \"k\" list)",
            cfg.source.display()
        )));
    }
    let g: &Grid = &cfg.grid;
    let rows = correlation_scan(&ks, g, exec)?;
    let (path, fmt) = output_target(output, format, &cfg);
    let bytes = match fmt {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            output::correlation_csv(&rows, &mut buf)?;
            buf
        }
        OutputFormat::Json => output::to_json(&output::correlation_document(rows)).into_bytes(),
    };
    output::emit(path.as_deref(), &bytes, io.stdout)?;
    Ok(EXIT_OK)
}

fn report_checks(checks: &[CheckOutcome], io: &mut Io) -> i32 {
    for c in checks {
        writeln!(io.stdout, "{c}").ok();
    }
    if checks::all_pass(checks) {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}

fn dispatch(cli: Cli, io: &mut Io) -> Result<i32> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Potential(args) => cmd_potential(args, io),
        Command::Scan {
            grid,
            method,
            format,
            output,
        } => cmd_scan(&grid, method, format, output, exec, io),
        Command::Compare {
            grid,
            tol,
            method,
            format,
            output,
        } => cmd_compare(&grid, tol, method, format, output, exec, io),
        Command::Correlation { grid, k, format, output } => cmd_correlation(&grid, k, format, output, exec, io),
        Command::OracleCheck { seed, samples } => {
            if samples == 0 {
                return Err(Error::InvalidConfig("--samples must be at least 1".into()));
            }
            Ok(report_checks(&checks::oracle_check(seed, samples), io))
        }
        Command::Selftest { seed, cases } => {
            if cases == 0 {
                return Err(Error::InvalidConfig("--cases must be at least 1".into()));
            }
            writeln!(io.stdout, "seed {seed}").ok();
            Ok(report_checks(&checks::selftest(seed, cases), io))
        }
        Command::Version => {
            writeln!(
                io.stdout,
                "casimir-plate {} (output schema version {})",
                env!("CARGO_PKG_VERSION"),
                crate::grid::SCHEMA_VERSION
            )
            .ok();
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                stderr.write_all(text.as_bytes()).ok();
            } else {
                stdout.write_all(text.as_bytes()).ok();
            }
            return code;
        }
    };
    let mut io = Io { stdout, stderr };
    match dispatch(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            writeln!(io.stderr, "error: {e}").ok();
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_VALIDATION
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("casimir-plate").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn vec3_parsing() {
        assert_eq!(parse_vec3("1,-2.5, 3").unwrap(), [1.0, -2.5, 3.0]);
        assert!(parse_vec3("1,2").is_err());
        assert!(parse_vec3("1,x,2").is_err());
    }

    #[test]
    fn potential_default_is_far_zone_csv() {
        let (code, out, _) = run_capture(&["potential", "--atom-a", "0,0,1", "--atom-b", "1,0,1"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("z_a,z_b,rho,r,rbar,method,value"));
        assert!(lines.next().unwrap().contains("far_zone_closed"));
    }

    #[test]
    fn validation_errors_exit_1() {
        let (code, _, err) = run_capture(&["potential", "--atom-a", "0,0,-1", "--atom-b", "1,0,1"]);
        assert_eq!(code, 1, "{err}");
        let (code, _, _) = run_capture(&["potential", "--method", "bogus", "--atom-a", "0,0,1", "--atom-b", "1,0,1"]);
        assert_eq!(code, 1);
        let (code, _, _) = run_capture(&["no-such-command"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn abel_with_dynamic_atoms_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.json");
        std::fs::write(&p, r#"{"label": "x", "transitions": [{"k": 1.0, "mu2": 1.0}]}"#).unwrap();
        let p = p.to_str().unwrap();
        let (code, out, err) = run_capture(&[
            "potential", "--method", "abel", "--atoms-a", p, "--atoms-b", p, "--atom-a", "0,0,1", "--atom-b", "1,0,1",
        ]);
        assert_eq!(code, 1, "{err}");
        assert!(out.contains("skipped"));
    }

    #[test]
    fn version_and_help_exit_0() {
        let (code, out, _) = run_capture(&["version"]);
        assert_eq!(code, 0);
        assert!(out.contains("schema version 1"));
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("oracle-check"));
    }
}
