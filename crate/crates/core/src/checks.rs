//! Seeded numerical self-checks behind the `oracle-check` and `selftest`
//! subcommands. Each check samples random inputs and reports the worst
//! deviation it saw against its tolerance.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atom::{AtomSpec, Polarizability};
use crate::correlation::correlation_density;
use crate::error::Result;
use crate::geometry::PlateGeometry;
use crate::linalg::{norm, Vec3};
use crate::potential::{
    cp_far_zone_plate, cp_free_space, cp_plate_correlation, cp_plate_double_integral_far, far_zone_terms,
    CorrelationMode, QuadratureConfig, FREE_SPACE_COEFFICIENT,
};
use crate::tensor::{angular_oracle_tau, dipole_kernel, fd_oracle_dipole_extrapolated, tau};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub failure: Option<String>,
}

impl CheckOutcome {
    fn new(name: &str, samples: usize, worst: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            samples,
            worst,
            tolerance,
            pass: worst <= tolerance,
            failure: None,
        }
    }

    fn failed(name: &str, samples: usize, tolerance: f64, e: crate::Error) -> Self {
        CheckOutcome {
            name: name.into(),
            samples,
            worst: f64::INFINITY,
            tolerance,
            pass: false,
            failure: Some(e.to_string()),
        }
    }

    fn from_result(name: &str, samples: usize, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(worst) => Self::new(name, samples, worst, tolerance),
            Err(e) => Self::failed(name, samples, tolerance, e),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match &self.failure {
            Some(msg) => write!(f, "{verdict} {}: {msg}", self.name),
            None => write!(
                f,
                "{verdict} {}: worst {:.3e} (tolerance {:.1e}, {} samples)",
                self.name, self.worst, self.tolerance, self.samples
            ),
        }
    }
}

pub fn all_pass(checks: &[CheckOutcome]) -> bool {
    checks.iter().all(|c| c.pass)
}

pub fn random_direction(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Random two-atom configuration with both atoms in `0 <= z <= zmax`.
pub fn random_geometry(rng: &mut impl Rng, span: f64, zmax: f64) -> PlateGeometry {
    loop {
        let a = [rng.gen_range(-span..span), rng.gen_range(-span..span), rng.gen_range(0.0..zmax)];
        let b = [rng.gen_range(-span..span), rng.gen_range(-span..span), rng.gen_range(0.0..zmax)];
        if let Ok(g) = PlateGeometry::new(a, b) {
            if g.r > 1e-3 * span {
                return g;
            }
        }
    }
}

/// Sphere quadrature budget that resolves `e^{ik.R}` at `kR`.
pub fn oracle_nodes(kr: f64) -> usize {
    48 + (1.2 * kr).ceil() as usize
}

/// Finite-difference step for the dipole oracle: small against both the
/// separation and the wavelength, but large enough that cancellation in the
/// second differences stays below the Richardson truncation error.
pub fn fd_step(k: f64, r: f64) -> f64 {
    8e-3 * r.min(1.0 / k)
}

/// Worst deviation of `tau` from the sphere quadrature of the transverse
/// projector, and of the dipole kernel from finite differences of
/// `cos(kR)/R` (relative to the kernel's largest entry).
pub fn oracle_check(seed: u64, samples: usize) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tau_worst = 0.0_f64;
    let mut imag_worst = 0.0_f64;
    let mut fd_worst = 0.0_f64;
    let mut failure = None;
    for _ in 0..samples {
        let dir = random_direction(&mut rng);
        let r = rng.gen_range(0.2..5.0);
        let kr: f64 = rng.gen_range(0.1..50.0);
        let k = kr / r;
        let v = [dir[0] * r, dir[1] * r, dir[2] * r];
        let sample = (|| -> Result<()> {
            let exact = tau(k, &v)?.m;
            let oracle = angular_oracle_tau(k, &v, oracle_nodes(kr));
            tau_worst = tau_worst.max((oracle.tensor - exact).max_abs());
            imag_worst = imag_worst.max(oracle.imag_max);
            let kernel = dipole_kernel(k, &v)?.m;
            let fd = fd_oracle_dipole_extrapolated(k, &v, fd_step(k, r))?;
            fd_worst = fd_worst.max((fd - kernel).max_abs() / kernel.max_abs());
            Ok(())
        })();
        if let Err(e) = sample {
            failure = Some(e);
            break;
        }
    }
    if let Some(e) = failure {
        return vec![CheckOutcome::failed("oracle sampling", samples, 0.0, e)];
    }
    vec![
        CheckOutcome::new("tau vs sphere quadrature", samples, tau_worst, 1e-9),
        CheckOutcome::new("sphere quadrature imaginary part", samples, imag_worst, 1e-9),
        CheckOutcome::new("dipole kernel vs finite differences", samples, fd_worst, 1e-6),
    ]
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Invariant suite run by `selftest`. `cases` sets the sample count of the
/// cheap checks; the quadrature-backed ones use a tenth of it.
pub fn selftest(seed: u64, cases: usize) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heavy = (cases / 10).max(3);
    let quad = QuadratureConfig::default();
    let mut out = Vec::new();

    let mut worst = 0.0_f64;
    for _ in 0..cases {
        let g = random_geometry(&mut rng, 10.0, 10.0);
        let lhs = g.r * g.sin2_theta.sqrt();
        let rhs = g.rbar * g.sin2_theta_bar.sqrt();
        worst = worst.max((lhs - rhs).abs() / g.r.max(g.rbar));
    }
    out.push(CheckOutcome::new("transverse separation identity", cases, worst, 1e-12));

    let mut worst = 0.0_f64;
    let mut err = None;
    for _ in 0..cases {
        let mut g = random_geometry(&mut rng, 3.0, 4.0);
        g = PlateGeometry::new([g.r_a[0], g.r_a[1], 0.0], g.r_b).unwrap_or(g);
        let k = rng.gen_range(0.05..20.0);
        match correlation_density(k, &g) {
            Ok(d) => {
                let z_row = (0..3).map(|j| d.tensor[(2, j)].abs()).fold(0.0, f64::max);
                for i in 0..2 {
                    for j in 0..3 {
                        worst = worst.max(d.tensor[(i, j)].abs() / z_row);
                    }
                }
            }
            Err(e) => err = Some(e),
        }
    }
    out.push(match err {
        Some(e) => CheckOutcome::failed("tangential correlation on the plate", cases, 1e-13, e),
        None => CheckOutcome::new("tangential correlation on the plate", cases, worst, 1e-13),
    });

    let mut worst = 0.0_f64;
    let mut signs_ok = true;
    for _ in 0..cases {
        let g = random_geometry(&mut rng, 5.0, 5.0);
        let t = far_zone_terms(&g);
        worst = worst.max(relative(t.total(), far_zone_terms(&g.swapped()).total()));
        signs_ok &= t.direct < 0.0 && t.image < 0.0 && t.mixed >= 0.0;
    }
    out.push(CheckOutcome::new("far-zone exchange symmetry", cases, worst, 1e-13));
    out.push(CheckOutcome::new(
        "far-zone sign structure",
        cases,
        if signs_ok { 0.0 } else { 1.0 },
        0.0,
    ));

    let mut wick = 0.0_f64;
    let mut dbl = 0.0_f64;
    let mut abel = 0.0_f64;
    let mut err = None;
    let unit = Polarizability::Static(1.0);
    for i in 0..heavy {
        let g = random_geometry(&mut rng, 5.0, 5.0);
        let r = (|| -> Result<()> {
            let far = cp_far_zone_plate(1.0, 1.0, &g)?.reduced_coefficient;
            let w = cp_plate_correlation(&unit, &unit, &g, &quad, CorrelationMode::Wick)?;
            wick = wick.max(relative(w.reduced_coefficient, far));
            let d = cp_plate_double_integral_far(1.0, 1.0, &g, &quad)?;
            dbl = dbl.max(relative(d.reduced_coefficient, far));
            if i < 3 {
                let a = cp_plate_correlation(&unit, &unit, &g, &quad, CorrelationMode::Abel)?;
                abel = abel.max(relative(a.reduced_coefficient, far));
            }
            Ok(())
        })();
        if let Err(e) = r {
            err = Some(e);
            break;
        }
    }
    match err {
        Some(e) => out.push(CheckOutcome::failed("route agreement", heavy, 1e-5, e)),
        None => {
            out.push(CheckOutcome::new("imaginary-axis route vs far zone", heavy, wick, 1e-9));
            out.push(CheckOutcome::new("double integral vs far zone", heavy, dbl, 1e-9));
            out.push(CheckOutcome::new("regularized real-axis route vs far zone", heavy.min(3), abel, 1e-7));
        }
    }

    let k0 = rng.gen_range(0.5..2.0);
    let atom = Polarizability::Dynamic(AtomSpec::two_level("two-level", k0, 1.0).expect("valid atom"));
    let r = 1e4 / k0;
    out.push(CheckOutcome::from_result(
        "free-space retarded limit",
        1,
        1e-3,
        cp_free_space(&atom, &atom, r, &quad).map(|p| relative(p.reduced_coefficient, FREE_SPACE_COEFFICIENT)),
    ));

    out
}
