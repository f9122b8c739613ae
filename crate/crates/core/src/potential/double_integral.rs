//! Far-zone dressed-state route: a symmetric double `k, k'` integral with
//! weight `(k k')^3 / (k + k')` and static polarizabilities.
//!
//! Writing `1/(k + k') = int_0^inf dt e^{-(k + k') t}` factorizes it into
//! `-(a_A a_B / pi^2) int_0^inf dt |g(t)|_F^2`, where
//! `g(t) = int_0^inf dk k^3 e^{-kt} T(k)` is the Laplace transform of the
//! plate-modified `tau`. With `z = t - i r` and `k^3 tau = Re[e^{ikr} A(k)]`,
//!
//! ```text
//! g(t; r) = (2/r) Im(z^-3) P + (Re(z^-2)/r^2 - Im(z^-1)/r^3) Q
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_static, Diagnostics, Method, PotentialResult, QuadratureConfig};
use crate::error::{Error, Result};
use crate::geometry::{reflect_rows, PlateGeometry};
use crate::linalg::{Mat3, Vec3};
use crate::quadrature::integrate_semi_infinite;
use crate::tensor::projectors;

struct Laplace {
    p: Mat3,
    q: Mat3,
    r: f64,
}

impl Laplace {
    fn new(v: &Vec3) -> Result<Self> {
        let (p, q, r) = projectors(v)?;
        Ok(Laplace { p, q, r })
    }

    fn eval(&self, t: f64) -> Mat3 {
        let r = self.r;
        let zi = Complex64::new(t, -r).inv();
        let zi2 = zi * zi;
        let zi3 = zi2 * zi;
        self.p.scaled(2.0 * zi3.im / r) + self.q.scaled(zi2.re / (r * r) - zi.im / (r * r * r))
    }
}

struct PlateLaplace {
    direct: Laplace,
    image: Laplace,
}

impl PlateLaplace {
    fn new(r_vec: &Vec3, rbar_vec: &Vec3) -> Result<Self> {
        Ok(PlateLaplace {
            direct: Laplace::new(r_vec)?,
            image: Laplace::new(rbar_vec)?,
        })
    }

    fn eval(&self, t: f64) -> Mat3 {
        self.direct.eval(t) - reflect_rows(&self.image.eval(t))
    }
}

/// `int_0^inf dk k^3 e^{-kt} [tau(kR) - sigma tau(kRbar)]` in closed form.
pub fn laplace_tau_plate(t: f64, g: &PlateGeometry) -> Result<Mat3> {
    Ok(PlateLaplace::new(&g.r_vec, &g.rbar_vec)?.eval(t))
}

pub fn cp_plate_double_integral_far(
    alpha_a0: f64,
    alpha_b0: f64,
    g: &PlateGeometry,
    quad: &QuadratureConfig,
) -> Result<PotentialResult> {
    check_static(alpha_a0, 'A')?;
    check_static(alpha_b0, 'B')?;
    quad.validate()?;
    let inv = 1.0 / g.r;
    let scaled = |v: &Vec3| [v[0] * inv, v[1] * inv, v[2] * inv];
    let kernel = PlateLaplace::new(&scaled(&g.r_vec), &scaled(&g.rbar_vec))?;
    let integrand = |t: f64| {
        let m = kernel.eval(t);
        m.contract(&m)
    };
    let at_zero = integrand(0.0);
    if !at_zero.is_finite() {
        return Err(Error::EndpointSingularity { value: at_zero });
    }
    let est = integrate_semi_infinite(integrand, 1.0, quad.semi_infinite_map, &quad.tolerance())?;
    let diagnostics = Diagnostics {
        evaluations: est.evaluations,
        subdivisions: est.subdivisions,
        ..Diagnostics::default()
    };
    let k = 1.0 / (PI * PI);
    PotentialResult::from_reduced(
        Method::DoubleIntegralFar,
        -k * est.value,
        k * est.error,
        alpha_a0 * alpha_b0,
        g.r,
        diagnostics,
    )
}
