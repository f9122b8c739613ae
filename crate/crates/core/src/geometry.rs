//! Two atoms above an infinite conducting plate at `z = 0`.
//!
//! `R = r_B - r_A` points from A to B; `Rbar = r_B - sigma r_A` points from the
//! mirror image of A to B. Every potential formula consumes only the lengths,
//! the transverse separation, and `sin^2` of the polar angles, so those are
//! cached here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, sub, Mat3, Vec3};

/// Mirror reflection through the plate, `sigma = diag(1, 1, -1)`.
pub const SIGMA: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);

pub fn reflect(p: &Vec3) -> Vec3 {
    [p[0], p[1], -p[2]]
}

/// `sigma * m`: flips the sign of the z row.
pub fn reflect_rows(m: &Mat3) -> Mat3 {
    let mut out = *m;
    for v in out.0[2].iter_mut() {
        *v = -*v;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateGeometry {
    pub r_a: Vec3,
    pub r_b: Vec3,
    pub r_vec: Vec3,
    pub rbar_vec: Vec3,
    pub r: f64,
    pub rbar: f64,
    /// Transverse (in-plane) separation, shared by `R` and `Rbar`.
    pub rho: f64,
    pub theta: f64,
    pub theta_bar: f64,
    pub sin2_theta: f64,
    pub sin2_theta_bar: f64,
}

impl PlateGeometry {
    pub fn new(r_a: Vec3, r_b: Vec3) -> Result<Self> {
        for (atom, p) in [('A', &r_a), ('B', &r_b)] {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinitePosition { atom });
            }
            if p[2] < 0.0 {
                return Err(Error::BelowPlate { atom, z: p[2] });
            }
        }
        let r_vec = sub(&r_b, &r_a);
        let r = norm(&r_vec);
        if r == 0.0 {
            return Err(Error::CoincidentAtoms);
        }
        let rbar_vec = sub(&r_b, &reflect(&r_a));
        let rbar = norm(&rbar_vec);
        let rho = r_vec[0].hypot(r_vec[1]);
        let sin2 = |len: f64| {
            let s = rho / len;
            (s * s).min(1.0)
        };
        Ok(PlateGeometry {
            r_a,
            r_b,
            r_vec,
            rbar_vec,
            r,
            rbar,
            rho,
            theta: rho.atan2(r_vec[2]),
            theta_bar: rho.atan2(rbar_vec[2]),
            sin2_theta: sin2(r),
            sin2_theta_bar: sin2(rbar),
        })
    }

    /// `r_A = (0, 0, z_a)`, `r_B = (rho, 0, z_b)`: the layout used by grid scans.
    pub fn from_heights(z_a: f64, z_b: f64, rho: f64) -> Result<Self> {
        Self::new([0.0, 0.0, z_a], [rho, 0.0, z_b])
    }

    pub fn z_a(&self) -> f64 {
        self.r_a[2]
    }

    pub fn z_b(&self) -> f64 {
        self.r_b[2]
    }

    /// True when either atom sits exactly on the plate, where `Rbar = R`.
    pub fn touches_plate(&self) -> bool {
        self.r_a[2] == 0.0 || self.r_b[2] == 0.0
    }

    /// Same configuration with the atom labels exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.r_b, self.r_a).expect("swapping a valid geometry stays valid")
    }
}

pub fn build_geometry(r_a: Vec3, r_b: Vec3) -> Result<PlateGeometry> {
    PlateGeometry::new(r_a, r_b)
}
