//! Potential from the vacuum field-correlation model:
//! `(1/pi) int_0^inf dk k^3 a_A(k) a_B(k) sum_lm T_lm(k) W_lm(k)` with
//! `T = tau(kR) - sigma tau(kRbar)` and `W = V(kR) - sigma V(kRbar)`.
//!
//! Writing `C(k) = e^{ikR} A(k; R) - sigma e^{ikRbar} A(k; Rbar)` gives
//! `k^3 T = Re C` and `W = Im C`, so the integrand is `(1/2pi) Im[C:C]`.
//! `C:C` carries only the phases `2R`, `R + Rbar` and `2Rbar` (the
//! `Rbar - R` cross terms cancel), each times a quartic polynomial in `k`.
//!
//! * Wick: rotate to `k = iu`, where `C(iu) = i G(u)` with `G` real, and the
//!   integrand becomes `-(1/2pi) a_A(iu) a_B(iu) |G(u)|_F^2`.
//! * Abel: damp each phase component `e^{ika} p(k)` by `e^{-c a k}`, integrate
//!   on the real axis, and extrapolate `c -> 0`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_static, Diagnostics, Method, PotentialResult, QuadratureConfig};
use crate::atom::Polarizability;
use crate::error::{Error, Result};
use crate::extrapolate::extrapolate_to_zero;
use crate::geometry::{reflect_rows, PlateGeometry};
use crate::linalg::{scale, Accumulator, Mat3};
use crate::dd::{gauss_legendre_dd, Dd};
use crate::quadrature::integrate_semi_infinite;
use crate::tensor::{projectors, KernelPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    Wick,
    Abel,
}

/// Damped argument `c a k` beyond which the integrand is dropped.
const ABEL_CUTOFF: f64 = 70.0;

pub fn cp_plate_correlation(
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    g: &PlateGeometry,
    quad: &QuadratureConfig,
    mode: CorrelationMode,
) -> Result<PotentialResult> {
    quad.validate()?;
    let a0 = atom_a.static_value();
    let b0 = atom_b.static_value();
    check_static(a0, 'A')?;
    check_static(b0, 'B')?;
    match mode {
        CorrelationMode::Wick => wick(atom_a, atom_b, a0, b0, g, quad),
        CorrelationMode::Abel => {
            for atom in [atom_a, atom_b] {
                if !atom.is_static() {
                    return Err(Error::PoleOnRealAxis { label: atom.label() });
                }
            }
            abel(a0 * b0, g, quad)
        }
    }
}

fn wick(
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    a0: f64,
    b0: f64,
    g: &PlateGeometry,
    quad: &QuadratureConfig,
) -> Result<PotentialResult> {
    // Reduced units: R = 1, Rbar = q, s = uR.
    let (p1, q1, _) = projectors(&g.r_vec)?;
    let (p2, q2, _) = projectors(&g.rbar_vec)?;
    let (p2, q2) = (reflect_rows(&p2), reflect_rows(&q2));
    let q = g.rbar / g.r;
    let r = g.r;
    let integrand = |s: f64| {
        let direct = (p1.scaled(s * s) + q1.scaled(s + 1.0)).scaled((-s).exp());
        let image = (p2.scaled(s * s / q) + q2.scaled(s / (q * q) + 1.0 / (q * q * q))).scaled((-s * q).exp());
        let gm: Mat3 = direct - image;
        let ratio = atom_a.at_imaginary(s / r) / a0 * (atom_b.at_imaginary(s / r) / b0);
        -ratio * gm.contract(&gm) / TAU
    };
    let est = integrate_semi_infinite(integrand, 1.0, quad.semi_infinite_map, &quad.tolerance())?;
    let diagnostics = Diagnostics {
        evaluations: est.evaluations,
        subdivisions: est.subdivisions,
        ..Diagnostics::default()
    };
    PotentialResult::from_reduced(Method::CorrelationWick, est.value, est.error, a0 * b0, g.r, diagnostics)
}

/// One oscillating piece `Im[e^{i k phase} p(k)]` of the real-axis integrand
/// (reduced units, `R = 1`, without the `1/2pi` prefactor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComponent {
    pub phase: f64,
    /// Coefficients of `p(k) = sum_n coeffs[n] k^n`.
    pub coeffs: [Complex64; 5],
}

impl PhaseComponent {
    pub fn eval(&self, k: f64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * k + c)
    }

    /// `int_0^inf e^{-c a k} Im[e^{ika} p(k)] dk` in closed form.
    pub fn damped_integral(&self, c: f64) -> f64 {
        let z = Complex64::new(c, -1.0) * self.phase;
        let mut fact = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, coef) in self.coeffs.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            sum += coef * fact / z.powu(n as u32 + 1);
        }
        sum.im
    }
}

/// Splits `C:C` into its three phase components.
pub fn abel_phase_polynomials(g: &PlateGeometry) -> Result<[PhaseComponent; 3]> {
    let a = KernelPolynomial::new(&scale(&g.r_vec, 1.0 / g.r))?;
    let b = KernelPolynomial::new(&scale(&g.rbar_vec, 1.0 / g.r))?.reflected();
    let q = g.rbar / g.r;
    let product = |x: &KernelPolynomial, y: &KernelPolynomial, w: f64| {
        let mut c = [Complex64::new(0.0, 0.0); 5];
        for i in 0..3 {
            for j in 0..3 {
                c[i + j] += x.coeffs[i].contract(&y.coeffs[j]) * w;
            }
        }
        c
    };
    Ok([
        PhaseComponent {
            phase: 2.0,
            coeffs: product(&a, &a, 1.0),
        },
        PhaseComponent {
            phase: 1.0 + q,
            coeffs: product(&a, &b, -2.0),
        },
        PhaseComponent {
            phase: 2.0 * q,
            coeffs: product(&b, &b, 1.0),
        },
    ])
}

/// Number of Gauss-Legendre nodes per period of the phase.
const ABEL_NODES: usize = 20;

/// Numerical `int_0^inf e^{-c a k} Im[e^{ika} p(k)] dk` for every `c` in
/// `cs`, on the real axis.
///
/// The damped sum cancels to roughly `c^5` of its largest terms, so nodes,
/// weights and the accumulation are carried in double-double. Integration
/// runs over periods of the phase, with the phase inside each period taken
/// from the in-period offset, and the undamped node values are shared by all
/// regulators. Returns one value per regulator and the node count.
fn damped_integrals_numeric(comp: &PhaseComponent, cs: &[f64]) -> (Vec<f64>, usize) {
    let c_min = cs.iter().copied().fold(f64::INFINITY, f64::min);
    let periods_for = |c: f64| (ABEL_CUTOFF / (TAU * c)).ceil() as usize;
    let max_periods = periods_for(c_min);
    let half = Dd::TAU.mul_f64(0.5);
    // nodes phi in [0, 2 pi) and weights
    let rule: Vec<(Dd, Dd)> = gauss_legendre_dd(ABEL_NODES)
        .into_iter()
        .map(|(x, w)| ((x + Dd::ONE) * half, w * half))
        .collect();
    let phases: Vec<(Dd, Dd)> = rule.iter().map(|(phi, _)| phi.cos_sin()).collect();
    let inv_a = Dd::ONE.div_f64(comp.phase);
    let coeffs: Vec<(f64, f64)> = comp.coeffs.iter().map(|c| (c.re, c.im)).collect();
    let mut values = Vec::with_capacity(max_periods * ABEL_NODES);
    for j in 0..max_periods {
        let offset = Dd::TAU.mul_f64(j as f64);
        for (i, (phi, _)) in rule.iter().enumerate() {
            let k = (offset + *phi) * inv_a;
            let (mut pr, mut pi) = (Dd::ZERO, Dd::ZERO);
            for &(cr, ci) in coeffs.iter().rev() {
                pr = pr * k + Dd::from_f64(cr);
                pi = pi * k + Dd::from_f64(ci);
            }
            let (cos, sin) = phases[i];
            values.push(cos * pi + sin * pr);
        }
    }
    let out = cs
        .iter()
        .map(|&c| {
            let weights: Vec<Dd> = rule
                .iter()
                .map(|(phi, w)| *w * (-phi.mul_f64(c)).exp())
                .collect();
            let step = (-Dd::TAU.mul_f64(c)).exp();
            let mut damp = Dd::ONE;
            let mut total = Dd::ZERO;
            for period in values.chunks(ABEL_NODES).take(periods_for(c)) {
                let mut s = Dd::ZERO;
                for (v, w) in period.iter().zip(&weights) {
                    s = s + *v * *w;
                }
                total = total + s * damp;
                damp = damp * step;
            }
            (total * inv_a).to_f64()
        })
        .collect();
    (out, max_periods * ABEL_NODES)
}

fn abel(alpha_product: f64, g: &PlateGeometry, quad: &QuadratureConfig) -> Result<PotentialResult> {
    let comps = abel_phase_polynomials(g)?;
    let etas = &quad.regulator_etas;
    let mut diagnostics = Diagnostics::default();
    let mut value = Accumulator::default();
    let mut error = 0.0;
    for comp in &comps {
        let scale = comp.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            diagnostics.eta_residuals.push(Vec::new());
            continue;
        }
        let (ys, evaluations) = damped_integrals_numeric(comp, etas);
        if let Some(bad) = ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::QuadratureFailure {
                value: *bad,
                error: f64::NAN,
                subdivisions: evaluations / ABEL_NODES,
            });
        }
        diagnostics.evaluations += evaluations;
        diagnostics.subdivisions += evaluations / ABEL_NODES;
        let ex = extrapolate_to_zero(etas, &ys, quad.extrapolation_order);
        let floor = 1e-13 * ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
        let first = ex.residuals.first().copied().unwrap_or(0.0);
        if ex.error > floor && ex.error >= first {
            return Err(Error::ExtrapolationUnstable {
                residuals: ex.residuals,
            });
        }
        value.add(ex.value);
        error += ex.error;
        diagnostics.eta_residuals.push(ex.residuals);
    }
    PotentialResult::from_reduced(
        Method::CorrelationAbel,
        value.value() / TAU,
        error / TAU,
        alpha_product,
        g.r,
        diagnostics,
    )
}
