//! Isotropic ground-state polarizability built from a finite list of dipole
//! transitions, in reduced units (hbar = c = 1).
//!
//! ```text
//! alpha(k)  = (2/3) sum_p k_p mu2_p / (k_p^2 - k^2)     real axis
//! alpha(iu) = (2/3) sum_p k_p mu2_p / (k_p^2 + u^2)     imaginary axis
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance from a resonance below which `alpha_dynamic` refuses to evaluate.
pub const DEFAULT_POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Transition wavenumber `k_p0 > 0`.
    pub k: f64,
    /// Squared dipole matrix element `|mu_p0|^2 >= 0`.
    pub mu2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAtom", into = "RawAtom")]
pub struct AtomSpec {
    label: String,
    transitions: Vec<Transition>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    label: String,
    transitions: Vec<Transition>,
}

impl TryFrom<RawAtom> for AtomSpec {
    type Error = Error;
    fn try_from(raw: RawAtom) -> Result<Self> {
        AtomSpec::new(raw.label, raw.transitions)
    }
}

impl From<AtomSpec> for RawAtom {
    fn from(a: AtomSpec) -> Self {
        RawAtom {
            label: a.label,
            transitions: a.transitions,
        }
    }
}

impl AtomSpec {
    /// Validates the transition list and sorts it by wavenumber.
    pub fn new(label: impl Into<String>, mut transitions: Vec<Transition>) -> Result<Self> {
        for t in &transitions {
            if !(t.k.is_finite() && t.k > 0.0) {
                return Err(Error::InvalidAtom(format!(
                    "transition wavenumber must be positive and finite, got {}",
                    t.k
                )));
            }
            if !(t.mu2.is_finite() && t.mu2 >= 0.0) {
                return Err(Error::InvalidAtom(format!(
                    "squared dipole element must be non-negative and finite, got {}",
                    t.mu2
                )));
            }
        }
        if !transitions.iter().any(|t| t.mu2 > 0.0) {
            return Err(Error::InvalidAtom(
                "need at least one transition with non-zero dipole strength".into(),
            ));
        }
        transitions.sort_by(|a, b| a.k.total_cmp(&b.k));
        Ok(AtomSpec {
            label: label.into(),
            transitions,
        })
    }

    /// One transition of wavenumber `k` and strength `mu2`.
    pub fn two_level(label: impl Into<String>, k: f64, mu2: f64) -> Result<Self> {
        Self::new(label, vec![Transition { k, mu2 }])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json {
                line,
                column,
                message,
                ..
            } => Error::Json {
                path: path.to_path_buf(),
                line,
                column,
                message,
            },
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        // Validation errors surface through serde's custom error; re-run the
        // constructor on the raw form so they keep their own variant.
        let raw: RawAtom = serde_json::from_str(text).map_err(|e| Error::json("<atom>", &e))?;
        AtomSpec::try_from(raw)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn lowest_transition(&self) -> f64 {
        self.transitions[0].k
    }

    pub fn alpha_dynamic(&self, k: f64) -> Result<f64> {
        self.alpha_dynamic_guarded(k, DEFAULT_POLE_GUARD)
    }

    pub fn alpha_dynamic_guarded(&self, k: f64, pole_guard: f64) -> Result<f64> {
        let mut sum = 0.0;
        for t in &self.transitions {
            if ((k - t.k) / t.k).abs() < pole_guard {
                return Err(Error::PoleProximity { k_p0: t.k, k });
            }
            sum += t.k * t.mu2 / (t.k * t.k - k * k);
        }
        Ok(2.0 / 3.0 * sum)
    }

    pub fn alpha_imag(&self, u: f64) -> f64 {
        2.0 / 3.0
            * self
                .transitions
                .iter()
                .map(|t| t.k * t.mu2 / (t.k * t.k + u * u))
                .sum::<f64>()
    }

    pub fn alpha_static(&self) -> f64 {
        self.alpha_imag(0.0)
    }
}

/// What the potential routes actually consume: either the full frequency
/// dependence of an atom, or a constant (far-zone) polarizability.
#[derive(Debug, Clone, PartialEq)]
pub enum Polarizability {
    Static(f64),
    Dynamic(AtomSpec),
}

impl Polarizability {
    pub fn static_value(&self) -> f64 {
        match self {
            Polarizability::Static(a) => *a,
            Polarizability::Dynamic(atom) => atom.alpha_static(),
        }
    }

    pub fn at_imaginary(&self, u: f64) -> f64 {
        match self {
            Polarizability::Static(a) => *a,
            Polarizability::Dynamic(atom) => atom.alpha_imag(u),
        }
    }

    /// Static limit of this polarizability.
    pub fn to_static(&self) -> Polarizability {
        Polarizability::Static(self.static_value())
    }

    pub fn is_static(&self) -> bool {
        matches!(self, Polarizability::Static(_))
    }

    pub fn label(&self) -> String {
        match self {
            Polarizability::Static(a) => format!("static({a})"),
            Polarizability::Dynamic(atom) => atom.label().to_string(),
        }
    }
}

impl From<AtomSpec> for Polarizability {
    fn from(a: AtomSpec) -> Self {
        Polarizability::Dynamic(a)
    }
}
