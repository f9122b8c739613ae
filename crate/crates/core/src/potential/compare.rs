//! Runs several routes over a grid and reports their pairwise agreement.

use serde::{Deserialize, Serialize};

use super::{evaluate, Method, PotentialResult, QuadratureConfig};
use crate::atom::Polarizability;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::GridPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Ok,
    /// The route does not apply to these inputs (Abel with dynamic atoms).
    Skipped,
    ValidationError,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub status: OutcomeStatus,
    pub result: Option<PotentialResult>,
    pub message: Option<String>,
}

impl MethodOutcome {
    pub fn from_result(method: Method, r: Result<PotentialResult>) -> Self {
        match r {
            Ok(res) => MethodOutcome {
                method,
                status: OutcomeStatus::Ok,
                result: Some(res),
                message: None,
            },
            Err(e) => {
                let status = match e {
                    Error::PoleOnRealAxis { .. } => OutcomeStatus::Skipped,
                    ref e if e.is_numerical() => OutcomeStatus::NumericalFailure,
                    _ => OutcomeStatus::ValidationError,
                };
                MethodOutcome {
                    method,
                    status,
                    result: None,
                    message: Some(e.to_string()),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDeviation {
    pub first: Method,
    pub second: Method,
    /// `|v1 - v2| / max(|v1|, |v2|)`.
    pub relative: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub point: GridPoint,
    pub outcomes: Vec<MethodOutcome>,
    pub deviations: Vec<PairDeviation>,
    /// Set when the grid point itself is not a valid configuration.
    pub geometry_error: Option<String>,
    pub pass: bool,
}

impl ComparisonRow {
    pub fn has_numerical_failure(&self) -> bool {
        self.outcomes.iter().any(|o| o.status == OutcomeStatus::NumericalFailure)
    }

    pub fn has_validation_error(&self) -> bool {
        self.geometry_error.is_some() || self.outcomes.iter().any(|o| o.status == OutcomeStatus::ValidationError)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tolerance: f64,
    pub methods: Vec<Method>,
    pub rows: Vec<ComparisonRow>,
    pub all_pass: bool,
    pub max_deviation: f64,
}

fn relative_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn compare_point(
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    point: &GridPoint,
    quad: &QuadratureConfig,
    methods: &[Method],
    tol: f64,
) -> ComparisonRow {
    let g = match point.geometry() {
        Ok(g) => g,
        Err(e) => {
            return ComparisonRow {
                point: *point,
                outcomes: Vec::new(),
                deviations: Vec::new(),
                geometry_error: Some(e.to_string()),
                pass: false,
            }
        }
    };
    let outcomes: Vec<MethodOutcome> = methods
        .iter()
        .map(|&m| MethodOutcome::from_result(m, evaluate(m, atom_a, atom_b, &g, quad)))
        .collect();
    // The free-space route computes a different quantity and is not paired.
    let values: Vec<(Method, f64)> = outcomes
        .iter()
        .filter(|o| o.method != Method::FreeSpace)
        .filter_map(|o| o.result.as_ref().map(|r| (o.method, r.value)))
        .collect();
    let mut deviations = Vec::new();
    for (i, &(m1, v1)) in values.iter().enumerate() {
        for &(m2, v2) in &values[i + 1..] {
            let relative = relative_deviation(v1, v2);
            deviations.push(PairDeviation {
                first: m1,
                second: m2,
                relative,
                pass: relative <= tol,
            });
        }
    }
    let pass = outcomes
        .iter()
        .all(|o| matches!(o.status, OutcomeStatus::Ok | OutcomeStatus::Skipped))
        && deviations.iter().all(|d| d.pass);
    ComparisonRow {
        point: *point,
        outcomes,
        deviations,
        geometry_error: None,
        pass,
    }
}

/// Evaluates every method at every point. Failures are recorded per row and
/// never abort the grid.
pub fn compare_methods(
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    points: &[GridPoint],
    quad: &QuadratureConfig,
    methods: &[Method],
    tol: f64,
    exec: Execution,
) -> Result<ComparisonReport> {
    if points.is_empty() {
        return Err(Error::InvalidGrid("grid has no points".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no methods requested".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    quad.validate()?;
    let rows = exec.map(points, |p| compare_point(atom_a, atom_b, p, quad, methods, tol));
    let all_pass = rows.iter().all(|r| r.pass);
    let max_deviation = rows
        .iter()
        .flat_map(|r| r.deviations.iter().map(|d| d.relative))
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        tolerance: tol,
        methods: methods.to_vec(),
        rows,
        all_pass,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Polarizability {
        Polarizability::Static(1.0)
    }

    fn pt(z_a: f64, z_b: f64, rho: f64) -> GridPoint {
        GridPoint { z_a, z_b, rho }
    }

    #[test]
    fn far_zone_grid_all_pass() {
        let points = [pt(1.0, 2.0, 0.5), pt(3.0, 1.0, 2.0), pt(0.0, 0.5, 1.0)];
        let methods = [
            Method::FarZoneClosed,
            Method::CorrelationWick,
            Method::CorrelationAbel,
            Method::DoubleIntegralFar,
        ];
        let rep = compare_methods(&unit(), &unit(), &points, &QuadratureConfig::default(), &methods, 1e-5, Execution::default()).unwrap();
        assert!(rep.all_pass, "{:?}", rep.max_deviation);
        assert_eq!(rep.rows[0].deviations.len(), 6);
    }

    #[test]
    fn single_method_degenerates() {
        let rep = compare_methods(&unit(), &unit(), &[pt(1.0, 2.0, 0.0)], &QuadratureConfig::default(), &[Method::FarZoneClosed], 1e-5, Execution::Sequential).unwrap();
        assert!(rep.all_pass);
        assert!(rep.rows[0].deviations.is_empty());
        let v = rep.rows[0].outcomes[0].result.as_ref().unwrap().value;
        assert!((v + 802997.0 / (139968.0 * std::f64::consts::PI)).abs() < 1e-15);
    }

    #[test]
    fn invalid_geometry_is_isolated() {
        let points = [pt(1.0, 1.0, 0.0), pt(1.0, 2.0, 0.0), pt(-1.0, 1.0, 1.0)];
        let rep = compare_methods(&unit(), &unit(), &points, &QuadratureConfig::default(), &[Method::FarZoneClosed, Method::CorrelationWick], 1e-5, Execution::Sequential).unwrap();
        assert!(!rep.all_pass);
        assert!(rep.rows[0].geometry_error.is_some());
        assert!(rep.rows[1].pass);
        assert!(rep.rows[2].has_validation_error());
    }

    #[test]
    fn empty_inputs_rejected() {
        let q = QuadratureConfig::default();
        assert!(compare_methods(&unit(), &unit(), &[], &q, &[Method::FarZoneClosed], 1e-5, Execution::Sequential).is_err());
        assert!(compare_methods(&unit(), &unit(), &[pt(1.0, 2.0, 0.0)], &q, &[], 1e-5, Execution::Sequential).is_err());
    }
}
