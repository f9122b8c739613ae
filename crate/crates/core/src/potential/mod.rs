//! Casimir-Polder potential of two atoms above the plate, by three routes
//! that are cross-checked against one another.
//!
//! Every route works in reduced form: lengths in units of `R`, the potential
//! as `value R^7 / (alpha_A(0) alpha_B(0))`. The physical value is recovered
//! at the end, so tolerances act on O(1) numbers whatever the separation.

mod compare;
mod correlation;
mod double_integral;
mod far_zone;
mod free_space;

pub use compare::{compare_methods, ComparisonReport, ComparisonRow, MethodOutcome, OutcomeStatus, PairDeviation};
pub use correlation::{abel_phase_polynomials, cp_plate_correlation, CorrelationMode, PhaseComponent};
pub use double_integral::{cp_plate_double_integral_far, laplace_tau_plate};
pub use far_zone::{cp_far_zone_plate, far_zone_terms, FarZoneTerms, FREE_SPACE_COEFFICIENT};
pub use free_space::cp_free_space;

use serde::{Deserialize, Serialize};

use crate::atom::Polarizability;
use crate::error::{Error, Result};
use crate::geometry::PlateGeometry;
use crate::quadrature::{SemiInfiniteMap, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Abel regulators as fractions of each phase length: the component
    /// oscillating like `e^{ika}` is damped by `e^{-c a k}` for every `c` here.
    pub regulator_etas: Vec<f64>,
    pub extrapolation_order: usize,
    pub semi_infinite_map: SemiInfiniteMap,
}

/// Geometric ladder of `n` regulators from `hi` down to `lo`.
pub fn geometric_etas(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| hi * (lo / hi).powf(i as f64 / (n - 1) as f64))
        .collect()
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            regulator_etas: geometric_etas(0.2, 0.01, 10),
            extrapolation_order: 8,
            semi_infinite_map: SemiInfiniteMap::Rational,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        if self.regulator_etas.len() < 2 {
            return Err(Error::InvalidConfig("need at least two regulator etas".into()));
        }
        if self.regulator_etas.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidConfig("regulator etas must be positive".into()));
        }
        if self.regulator_etas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig("regulator etas must be strictly decreasing".into()));
        }
        if self.extrapolation_order == 0 {
            return Err(Error::InvalidConfig("extrapolation_order must be at least 1".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            rel: self.rel_tol,
            abs: self.abs_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FarZoneClosed,
    CorrelationWick,
    CorrelationAbel,
    DoubleIntegralFar,
    FreeSpace,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::FarZoneClosed,
        Method::CorrelationWick,
        Method::CorrelationAbel,
        Method::DoubleIntegralFar,
        Method::FreeSpace,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::FarZoneClosed => "far_zone_closed",
            Method::CorrelationWick => "correlation_wick",
            Method::CorrelationAbel => "correlation_abel",
            Method::DoubleIntegralFar => "double_integral_far",
            Method::FreeSpace => "free_space",
        }
    }

    /// Short CLI spelling.
    pub fn short_name(self) -> &'static str {
        match self {
            Method::FarZoneClosed => "far",
            Method::CorrelationWick => "wick",
            Method::CorrelationAbel => "abel",
            Method::DoubleIntegralFar => "double",
            Method::FreeSpace => "free",
        }
    }

    /// Accepts either the short CLI name or the full tag.
    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.short_name() == s || m.tag() == s)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub evaluations: usize,
    pub subdivisions: usize,
    /// Abel mode: successive-extrapolant differences, one list per phase.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub eta_residuals: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialResult {
    pub method: Method,
    pub value: f64,
    /// `value R^7 / (alpha_A(0) alpha_B(0))`.
    pub reduced_coefficient: f64,
    pub error_estimate: f64,
    pub diagnostics: Diagnostics,
}

impl PotentialResult {
    /// Builds a result from a reduced coefficient (and its absolute error).
    pub(crate) fn from_reduced(
        method: Method,
        reduced: f64,
        reduced_error: f64,
        alpha_product: f64,
        r: f64,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let scale = alpha_product / r.powi(7);
        let value = reduced * scale;
        if !reduced.is_finite() || !value.is_finite() {
            return Err(Error::QuadratureFailure {
                value: reduced,
                error: reduced_error,
                subdivisions: diagnostics.subdivisions,
            });
        }
        Ok(PotentialResult {
            method,
            value,
            reduced_coefficient: reduced,
            error_estimate: reduced_error.abs() * scale.abs(),
            diagnostics,
        })
    }
}

/// Runs one route. Far-zone routes use the static limits of the atoms; the
/// free-space route uses only the separation.
pub fn evaluate(
    method: Method,
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    g: &PlateGeometry,
    quad: &QuadratureConfig,
) -> Result<PotentialResult> {
    match method {
        Method::FarZoneClosed => cp_far_zone_plate(atom_a.static_value(), atom_b.static_value(), g),
        Method::CorrelationWick => cp_plate_correlation(atom_a, atom_b, g, quad, CorrelationMode::Wick),
        Method::CorrelationAbel => cp_plate_correlation(atom_a, atom_b, g, quad, CorrelationMode::Abel),
        Method::DoubleIntegralFar => {
            cp_plate_double_integral_far(atom_a.static_value(), atom_b.static_value(), g, quad)
        }
        Method::FreeSpace => cp_free_space(atom_a, atom_b, g.r, quad),
    }
}

pub(crate) fn check_static(alpha: f64, which: char) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "static polarizability of atom {which} must be positive, got {alpha}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let q = QuadratureConfig::default();
        q.validate().unwrap();
        assert_eq!(q.regulator_etas.len(), 10);
        let mut bad = q.clone();
        bad.regulator_etas = vec![0.1, 0.2];
        assert!(bad.validate().is_err());
        bad.regulator_etas = vec![0.1, -0.01];
        assert!(bad.validate().is_err());
        let mut bad = q;
        bad.rel_tol = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.short_name()), Some(m));
            assert_eq!(Method::parse(m.tag()), Some(m));
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.tag()));
        }
        assert_eq!(Method::parse("nope"), None);
    }

    #[test]
    fn partial_quadrature_overrides() {
        let q: QuadratureConfig = serde_json::from_str(r#"{"rel_tol": 1e-8}"#).unwrap();
        assert_eq!(q.rel_tol, 1e-8);
        assert_eq!(q.extrapolation_order, 8);
    }
}
