//! Closed-form far-zone potential with static polarizabilities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{check_static, Diagnostics, Method, PotentialResult};
use crate::error::Result;
use crate::geometry::PlateGeometry;

/// Reduced coefficient of the free-space far-zone potential, `-23/(4 pi)`.
pub const FREE_SPACE_COEFFICIENT: f64 = -23.0 / (4.0 * PI);

/// The three terms of the closed form, each as `E R^7 / (alpha_A alpha_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarZoneTerms {
    /// `-23/(4 pi R^7)`: the free-space interaction.
    pub direct: f64,
    /// `-23/(4 pi Rbar^7)`: interaction with the image.
    pub image: f64,
    /// Mixed `R`/`Rbar` term, non-negative.
    pub mixed: f64,
}

impl FarZoneTerms {
    pub fn total(&self) -> f64 {
        self.direct + self.image + self.mixed
    }
}

pub fn far_zone_terms(g: &PlateGeometry) -> FarZoneTerms {
    let q = g.rbar / g.r;
    let (s2, sb2) = (g.sin2_theta, g.sin2_theta_bar);
    let numerator = s2 + 5.0 * q * s2 + q * q * (6.0 + s2 + sb2) + 5.0 * q.powi(3) * sb2 + q.powi(4) * sb2;
    let denominator = q.powi(3) * (1.0 + q).powi(5);
    FarZoneTerms {
        direct: FREE_SPACE_COEFFICIENT,
        image: FREE_SPACE_COEFFICIENT / q.powi(7),
        mixed: 8.0 / PI * numerator / denominator,
    }
}

pub fn cp_far_zone_plate(alpha_a0: f64, alpha_b0: f64, g: &PlateGeometry) -> Result<PotentialResult> {
    check_static(alpha_a0, 'A')?;
    check_static(alpha_b0, 'B')?;
    let terms = far_zone_terms(g);
    let total = terms.total();
    let diagnostics = Diagnostics {
        notes: vec![format!(
            "terms: direct {:.17e}, image {:.17e}, mixed {:.17e}",
            terms.direct, terms.image, terms.mixed
        )],
        ..Diagnostics::default()
    };
    PotentialResult::from_reduced(
        Method::FarZoneClosed,
        total,
        4.0 * f64::EPSILON * total.abs(),
        alpha_a0 * alpha_b0,
        g.r,
        diagnostics,
    )
}
