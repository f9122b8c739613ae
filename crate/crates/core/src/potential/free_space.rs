//! Two-atom potential without the plate, from the imaginary-axis integral
//! `-(1/(pi R^2)) int du u^4 a_A(iu) a_B(iu) (1 + 2/uR + 5/(uR)^2 + 6/(uR)^3 + 3/(uR)^4) e^{-2uR}`.

use std::f64::consts::PI;

use super::{Diagnostics, Method, PotentialResult, QuadratureConfig};
use crate::atom::Polarizability;
use crate::error::{Error, Result};
use crate::quadrature::integrate_semi_infinite;

pub fn cp_free_space(
    atom_a: &Polarizability,
    atom_b: &Polarizability,
    r: f64,
    quad: &QuadratureConfig,
) -> Result<PotentialResult> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::DegenerateSeparation);
    }
    let a0 = atom_a.static_value();
    let b0 = atom_b.static_value();
    super::check_static(a0, 'A')?;
    super::check_static(b0, 'B')?;
    // s = uR; the bracket times u^4 is a polynomial in s, so s = 0 is regular.
    let integrand = |s: f64| {
        let u = s / r;
        let ratio = atom_a.at_imaginary(u) / a0 * (atom_b.at_imaginary(u) / b0);
        let poly = (((s + 2.0) * s + 5.0) * s + 6.0) * s + 3.0;
        ratio * poly * (-2.0 * s).exp()
    };
    let est = integrate_semi_infinite(integrand, 1.0, quad.semi_infinite_map, &quad.tolerance())?;
    let diagnostics = Diagnostics {
        evaluations: est.evaluations,
        subdivisions: est.subdivisions,
        ..Diagnostics::default()
    };
    PotentialResult::from_reduced(Method::FreeSpace, -est.value / PI, est.error / PI, a0 * b0, r, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::AtomSpec;
    use crate::potential::FREE_SPACE_COEFFICIENT;
    use crate::quadrature::SemiInfiniteMap;

    #[test]
    fn constant_polarizability_anchor() {
        let q = QuadratureConfig::default();
        for r in [1e-3, 1.0, 7.5, 1e4] {
            let res = cp_free_space(&Polarizability::Static(2.0), &Polarizability::Static(0.5), r, &q).unwrap();
            assert!(((res.reduced_coefficient - FREE_SPACE_COEFFICIENT) / FREE_SPACE_COEFFICIENT).abs() < 1e-12);
            let expected = FREE_SPACE_COEFFICIENT / r.powi(7);
            assert!(((res.value - expected) / expected).abs() < 1e-12);
        }
        let ts = QuadratureConfig {
            semi_infinite_map: SemiInfiniteMap::TanhSinh,
            ..QuadratureConfig::default()
        };
        let res = cp_free_space(&Polarizability::Static(1.0), &Polarizability::Static(1.0), 1.0, &ts).unwrap();
        assert!(((res.reduced_coefficient - FREE_SPACE_COEFFICIENT) / FREE_SPACE_COEFFICIENT).abs() < 1e-10);
    }

    #[test]
    fn two_level_atoms_far_apart() {
        let a = Polarizability::Dynamic(AtomSpec::two_level("unit", 1.0, 1.0).unwrap());
        let res = cp_free_space(&a, &a, 100.0, &QuadratureConfig::default()).unwrap();
        assert!(((res.reduced_coefficient - FREE_SPACE_COEFFICIENT) / FREE_SPACE_COEFFICIENT).abs() < 5e-3);
        assert!(res.reduced_coefficient > FREE_SPACE_COEFFICIENT);
    }

    #[test]
    fn magnitude_decreases_with_distance() {
        let a = Polarizability::Dynamic(AtomSpec::two_level("unit", 1.0, 1.0).unwrap());
        let q = QuadratureConfig::default();
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let r = 0.05 * 1.7f64.powi(i);
            let v = cp_free_space(&a, &a, r, &q).unwrap().value;
            assert!(v < 0.0);
            assert!(v.abs() < prev);
            prev = v.abs();
        }
    }

    #[test]
    fn near_zone_approaches_london_form() {
        // kR << 1: E -> -(3/(pi R^6)) int du a(iu)^2 ; for one transition this is -k0 a0^2 * 3/(4 R^6)
        let a = Polarizability::Dynamic(AtomSpec::two_level("unit", 1.0, 1.0).unwrap());
        let r = 1e-3;
        let v = cp_free_space(&a, &a, r, &QuadratureConfig::default()).unwrap().value;
        let london = -0.75 * (2.0f64 / 3.0).powi(2) / r.powi(6);
        assert!(((v - london) / london).abs() < 1e-2);
    }

    #[test]
    fn rejects_bad_separation() {
        let a = Polarizability::Static(1.0);
        assert!(cp_free_space(&a, &a, 0.0, &QuadratureConfig::default()).is_err());
    }
}
