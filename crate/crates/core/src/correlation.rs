//! Equal-time spatial correlation of the transverse displacement field in
//! front of the plate, resolved by wavenumber.
//!
//! The exported density is the polarization- and angle-reduced spectral
//! density at fixed `k`, `2 pi k [tau(kR) - sigma tau(kRbar)]` in reduced units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{reflect, reflect_rows, PlateGeometry};
use crate::grid::Grid;
use crate::linalg::{dot, norm, sub, CMat3, Mat3, Vec3};
use crate::quadrature::gauss_legendre;
use crate::tensor::{tau, tau_plate};

const UNIT_TOLERANCE: f64 = 1e-12;

/// Per-direction half-space mode sum
/// `(1 - kk) e^{i k.(r - r')} - sigma (1 - kk) e^{i k.(r - sigma r')}`
/// for wave vector `k k_hat`.
pub fn polarization_sum(k: f64, k_hat: &Vec3, r: &Vec3, r_prime: &Vec3) -> Result<CMat3> {
    let n = norm(k_hat);
    if !((n - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(Error::NonUnitDirection { norm: n });
    }
    let proj = Mat3::IDENTITY - Mat3::outer(k_hat, k_hat);
    let direct = Complex64::from_polar(1.0, k * dot(k_hat, &sub(r, r_prime)));
    let image = Complex64::from_polar(1.0, k * dot(k_hat, &sub(r, &reflect(r_prime))));
    let zero = Mat3::ZERO;
    let p = CMat3::from_parts(&proj, &zero);
    let sp = CMat3::from_parts(&reflect_rows(&proj), &zero);
    Ok(p.scaled(direct) - sp.scaled(image))
}

/// Sphere quadrature of `polarization_sum` over directions (Gauss-Legendre in
/// `cos(theta)`, trapezoid in `phi`, `nodes` points along each).
pub fn angular_average_polarization_sum(k: f64, r: &Vec3, r_prime: &Vec3, nodes: usize) -> Result<CMat3> {
    let n = nodes.max(6);
    let (mu, w) = gauss_legendre(n);
    let dphi = std::f64::consts::TAU / n as f64;
    let mut acc = CMat3::ZERO;
    for (&c, &wc) in mu.iter().zip(&w) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n {
            let (sp, cp) = (j as f64 * dphi).sin_cos();
            let khat = [s * cp, s * sp, c];
            let weight = wc * dphi / (4.0 * std::f64::consts::PI);
            acc = acc + polarization_sum(k, &khat, r, r_prime)?.scaled(Complex64::new(weight, 0.0));
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDensity {
    pub k: f64,
    pub geometry: PlateGeometry,
    pub tensor: Mat3,
}

impl CorrelationDensity {
    /// The plate-free part `2 pi k tau(kR)`.
    pub fn free_space_part(&self) -> Mat3 {
        tau(self.k, &self.geometry.r_vec)
            .expect("geometry guarantees R > 0")
            .m
            .scaled(std::f64::consts::TAU * self.k)
    }

    /// The image contribution `-2 pi k sigma tau(kRbar)`.
    pub fn image_part(&self) -> Mat3 {
        self.tensor - self.free_space_part()
    }
}

pub fn correlation_density(k: f64, geometry: &PlateGeometry) -> Result<CorrelationDensity> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!("wavenumber must be positive, got {k}")));
    }
    let t = tau_plate(k, geometry)?;
    Ok(CorrelationDensity {
        k,
        geometry: *geometry,
        tensor: t.m.scaled(std::f64::consts::TAU * k),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub k: f64,
    pub z_a: f64,
    pub z_b: f64,
    pub rho: f64,
    /// Row-major `xx, xy, xz, yx, ..., zz`.
    pub components: [f64; 9],
}

/// Correlation densities for every `k` and grid point, ordered by `k` index,
/// then lexicographically over the grid.
pub fn correlation_scan(ks: &[f64], grid: &Grid, exec: Execution) -> Result<Vec<CorrelationRow>> {
    if ks.is_empty() {
        return Err(Error::InvalidGrid("wavenumber list is empty".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid has no points".into()));
    }
    if let Some(bad) = ks.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(Error::InvalidGrid(format!("wavenumbers must be positive, got {bad}")));
    }
    let points = grid.points();
    let geometries = points
        .iter()
        .map(|p| p.geometry())
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(f64, usize)> = ks
        .iter()
        .flat_map(|&k| (0..points.len()).map(move |i| (k, i)))
        .collect();
    exec.map(&jobs, |&(k, i)| {
        let d = correlation_density(k, &geometries[i])?;
        Ok(CorrelationRow {
            k,
            z_a: points[i].z_a,
            z_b: points[i].z_b,
            rho: points[i].rho,
            components: d.tensor.to_array(),
        })
    })
    .into_iter()
    .collect()
}
