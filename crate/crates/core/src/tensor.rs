//! Closed-form tensor kernels and the two brute-force oracles that check them.
//!
//! With `x = kR`, `P = 1 - RR` and `Q = 1 - 3RR` (unit `R`):
//!
//! ```text
//! tau(k, R) = P sin(x)/x + Q (cos(x)/x^2 - sin(x)/x^3)
//! V(k, R)   = -P k^2 cos(x)/R + Q (cos(x)/R^3 + k sin(x)/R^2)
//! ```
//!
//! Both are the real and imaginary parts of one analytic kernel,
//! `e^{ikR} A(k; R) = k^3 tau + i V`, where
//! `A(k; R) = -i (k^2/R) P + (k/R^2 + i/R^3) Q` is a quadratic matrix
//! polynomial in `k`. The potential routes are built on that identity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{reflect_rows, PlateGeometry};
use crate::linalg::{norm, scale, CMat3, Mat3, Vec3};
use crate::quadrature::gauss_legendre;

/// Below this `kR` the `cos/x^2 - sin/x^3` combination is summed as a series.
pub const SMALL_ARGUMENT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Tau,
    Dipole,
    TauPlate,
    DipolePlate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionTensor {
    pub kind: KernelKind,
    pub k: f64,
    pub m: Mat3,
}

impl InteractionTensor {
    pub fn matrix(&self) -> &Mat3 {
        &self.m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (self.m[(i, j)] - self.m[(j, i)]).abs() <= tol))
    }
}

/// Transverse and longitudinal-ish projectors built from the unit separation.
pub(crate) fn projectors(r_vec: &Vec3) -> Result<(Mat3, Mat3, f64)> {
    let r = norm(r_vec);
    if !(r > 0.0) {
        return Err(Error::DegenerateSeparation);
    }
    let n = scale(r_vec, 1.0 / r);
    let nn = Mat3::outer(&n, &n);
    Ok((Mat3::IDENTITY - nn, Mat3::IDENTITY - nn.scaled(3.0), r))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `cos(x)/x^2 - sin(x)/x^3`, finite at the origin (limit -1/3).
fn tau_q_coefficient(x: f64) -> f64 {
    if x.abs() < SMALL_ARGUMENT {
        let x2 = x * x;
        -1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 / 45360.0))
    } else {
        let (s, c) = x.sin_cos();
        (c - s / x) / (x * x)
    }
}

pub fn tau(k: f64, r_vec: &Vec3) -> Result<InteractionTensor> {
    let (p, q, r) = projectors(r_vec)?;
    let x = k * r;
    let m = p.scaled(sinc(x)) + q.scaled(tau_q_coefficient(x));
    Ok(InteractionTensor {
        kind: KernelKind::Tau,
        k,
        m,
    })
}

/// `tau(kR) - sigma tau(kRbar)`: the angular average of the half-space
/// polarization sum.
pub fn tau_plate(k: f64, g: &PlateGeometry) -> Result<InteractionTensor> {
    let direct = tau(k, &g.r_vec)?;
    let image = tau(k, &g.rbar_vec)?;
    Ok(InteractionTensor {
        kind: KernelKind::TauPlate,
        k,
        m: direct.m - reflect_rows(&image.m),
    })
}

pub fn dipole_kernel(k: f64, r_vec: &Vec3) -> Result<InteractionTensor> {
    let (p, q, r) = projectors(r_vec)?;
    let (s, c) = (k * r).sin_cos();
    let m = p.scaled(-k * k * c / r) + q.scaled(c / (r * r * r) + k * s / (r * r));
    Ok(InteractionTensor {
        kind: KernelKind::Dipole,
        k,
        m,
    })
}

/// `V(k, R) - sigma V(k, Rbar)`: dipole kernel including the image atom.
pub fn dipole_kernel_plate(k: f64, g: &PlateGeometry) -> Result<InteractionTensor> {
    let direct = dipole_kernel(k, &g.r_vec)?;
    let image = dipole_kernel(k, &g.rbar_vec)?;
    Ok(InteractionTensor {
        kind: KernelKind::DipolePlate,
        k,
        m: direct.m - reflect_rows(&image.m),
    })
}

/// Coefficients of `A(k; R) = A0 + A1 k + A2 k^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPolynomial {
    pub coeffs: [CMat3; 3],
    pub r: f64,
}

impl KernelPolynomial {
    pub fn new(r_vec: &Vec3) -> Result<Self> {
        let (p, q, r) = projectors(r_vec)?;
        let zero = Mat3::ZERO;
        Ok(KernelPolynomial {
            coeffs: [
                CMat3::from_parts(&zero, &q.scaled(1.0 / (r * r * r))),
                CMat3::from_parts(&q.scaled(1.0 / (r * r)), &zero),
                CMat3::from_parts(&zero, &p.scaled(-1.0 / r)),
            ],
            r,
        })
    }

    /// Same polynomial with `sigma` applied from the left.
    pub fn reflected(&self) -> Self {
        let flip = |m: &CMat3| CMat3::from_parts(&reflect_rows(&m.re()), &reflect_rows(&m.im()));
        KernelPolynomial {
            coeffs: [flip(&self.coeffs[0]), flip(&self.coeffs[1]), flip(&self.coeffs[2])],
            r: self.r,
        }
    }

    pub fn eval(&self, k: Complex64) -> CMat3 {
        self.coeffs[0] + self.coeffs[1].scaled(k) + self.coeffs[2].scaled(k * k)
    }
}

/// `e^{ikR} A(k; R)`; on the real axis this is `k^3 tau(k, R) + i V(k, R)`.
pub fn retarded_kernel(k: Complex64, r_vec: &Vec3) -> Result<CMat3> {
    let poly = KernelPolynomial::new(r_vec)?;
    let phase = (Complex64::i() * k * poly.r).exp();
    Ok(poly.eval(k).scaled(phase))
}

/// Retarded kernel on the positive imaginary axis, divided by `i`:
/// `e^{-uR} [(u^2/R) P + (u/R^2 + 1/R^3) Q]`, real and non-negative-definite in `u`.
pub fn retarded_kernel_imaginary(u: f64, r_vec: &Vec3) -> Result<Mat3> {
    let (p, q, r) = projectors(r_vec)?;
    let damp = (-u * r).exp();
    Ok((p.scaled(u * u / r) + q.scaled(u / (r * r) + 1.0 / (r * r * r))).scaled(damp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularOracle {
    /// Real part of the angular average.
    pub tensor: Mat3,
    /// Largest magnitude of the imaginary part, which must vanish.
    pub imag_max: f64,
    pub nodes: usize,
}

/// Direct sphere quadrature of `(1/4pi) int dOmega (1 - kk) e^{i k.R}`:
/// Gauss-Legendre in `cos(theta)` times the trapezoid rule in `phi`,
/// `node_budget` points along each.
pub fn angular_oracle_tau(k: f64, r_vec: &Vec3, node_budget: usize) -> AngularOracle {
    let n = node_budget.max(6);
    let (mu, w) = gauss_legendre(n);
    let dphi = 2.0 * std::f64::consts::PI / n as f64;
    let mut re = Mat3::ZERO;
    let mut im = Mat3::ZERO;
    for (&c, &wc) in mu.iter().zip(&w) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n {
            let (sp, cp) = (j as f64 * dphi).sin_cos();
            let khat = [s * cp, s * sp, c];
            let phase = k * (khat[0] * r_vec[0] + khat[1] * r_vec[1] + khat[2] * r_vec[2]);
            let (ps, pc) = phase.sin_cos();
            let weight = wc * dphi / (4.0 * std::f64::consts::PI);
            let proj = Mat3::IDENTITY - Mat3::outer(&khat, &khat);
            re = re + proj.scaled(weight * pc);
            im = im + proj.scaled(weight * ps);
        }
    }
    AngularOracle {
        tensor: re,
        imag_max: im.max_abs(),
        nodes: n * n,
    }
}

fn retarded_potential(k: f64, p: &Vec3) -> f64 {
    let r = norm(p);
    (k * r).cos() / r
}

/// `(laplacian delta - grad grad) cos(kR)/R` by central second differences.
pub fn fd_oracle_dipole(k: f64, r_vec: &Vec3, step: f64) -> Result<Mat3> {
    let r = norm(r_vec);
    if r == 0.0 {
        return Err(Error::DegenerateSeparation);
    }
    if !(step > 0.0) || step > 0.01 * r {
        return Err(Error::StepTooLarge {
            step,
            separation: r,
        });
    }
    let f = |d: [f64; 3]| {
        retarded_potential(k, &[r_vec[0] + d[0], r_vec[1] + d[1], r_vec[2] + d[2]])
    };
    let h = step;
    let f0 = f([0.0; 3]);
    let mut hess = Mat3::ZERO;
    for l in 0..3 {
        let mut e = [0.0; 3];
        e[l] = h;
        let mut me = [0.0; 3];
        me[l] = -h;
        hess[(l, l)] = (f(e) - 2.0 * f0 + f(me)) / (h * h);
        for m in (l + 1)..3 {
            let shifted = |sl: f64, sm: f64| {
                let mut d = [0.0; 3];
                d[l] = sl * h;
                d[m] = sm * h;
                f(d)
            };
            let v = (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0) + shifted(-1.0, -1.0))
                / (4.0 * h * h);
            hess[(l, m)] = v;
            hess[(m, l)] = v;
        }
    }
    Ok(Mat3::IDENTITY.scaled(hess.trace()) - hess)
}

/// Richardson-extrapolated finite-difference oracle (steps `h` and `h/2`).
pub fn fd_oracle_dipole_extrapolated(k: f64, r_vec: &Vec3, step: f64) -> Result<Mat3> {
    let coarse = fd_oracle_dipole(k, r_vec, step)?;
    let fine = fd_oracle_dipole(k, r_vec, 0.5 * step)?;
    Ok((fine.scaled(4.0) - coarse).scaled(1.0 / 3.0))
}
