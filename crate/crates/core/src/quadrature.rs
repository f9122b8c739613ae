//! One-dimensional quadrature: adaptive Gauss-Kronrod (10/21), tanh-sinh,
//! Gauss-Legendre node generation, and maps from `[0, inf)` onto `[0, 1)`.
//!
//! Interval selection is deterministic (largest error first, ties broken by
//! creation order) so repeated runs produce bit-identical results.

#![allow(clippy::excessive_precision)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Accumulator;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208828178893,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-10,
            abs: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

/// How `[0, inf)` is mapped onto a finite interval before integrating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemiInfiniteMap {
    /// `t = s x / (1 - x)` with adaptive Gauss-Kronrod panels on `[0, 1)`.
    #[default]
    Rational,
    /// Same rational map, integrated with the tanh-sinh rule.
    TanhSinh,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// Single 21-point Kronrod panel with the embedded 10-point Gauss error estimate.
pub fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    (res_k * half, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    order: usize,
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Estimate> {
    let (v, e) = gk21(&mut f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v,
        error: e,
        order: 0,
    }];
    let mut evaluations = 21;
    let mut created = 1;
    loop {
        let total: Accumulator = panels.iter().map(|p| p.value).collect();
        let err: Accumulator = panels.iter().map(|p| p.error).collect();
        let (total, err) = (total.value(), err.value());
        if !total.is_finite() {
            return Err(Error::QuadratureFailure {
                value: total,
                error: err,
                subdivisions: panels.len(),
            });
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= tol.max_subdivisions {
            return Err(Error::QuadratureFailure {
                value: total,
                error: err,
                subdivisions: panels.len(),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error).then(q.order.cmp(&p.order)))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureFailure {
                value: total,
                error: err,
                subdivisions: panels.len() + 1,
            });
        }
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (v, e) = gk21(&mut f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value: v,
                error: e,
                order: created,
            });
            created += 1;
        }
        evaluations += 42;
    }
}

/// Integrates `f` over `[0, inf)` after mapping with characteristic length `scale`.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    scale: f64,
    map: SemiInfiniteMap,
    tol: &Tolerance,
) -> Result<Estimate> {
    let mut mapped = |x: f64, xc: f64| {
        if xc <= 0.0 {
            return 0.0;
        }
        let t = scale * x / xc;
        let jac = scale / (xc * xc);
        if !t.is_finite() || !jac.is_finite() {
            return 0.0;
        }
        let v = f(t) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    match map {
        SemiInfiniteMap::Rational => integrate(|x| mapped(x, 1.0 - x), 0.0, 1.0, tol),
        SemiInfiniteMap::TanhSinh => tanh_sinh_unit(mapped, tol),
    }
}

/// Tanh-sinh rule on `[0, 1]`; the integrand receives both `x` and `1 - x`
/// so endpoint behaviour is resolved without cancellation.
pub fn tanh_sinh_unit<F: FnMut(f64, f64) -> f64>(mut f: F, tol: &Tolerance) -> Result<Estimate> {
    use std::f64::consts::FRAC_PI_2;
    const T_MAX: f64 = 6.5;
    // Returns the rule's contribution from nodes at t = j h for the given
    // index set (all when `odd_only` is false).
    let mut level_sum = |h: f64, odd_only: bool, evals: &mut usize| {
        let mut acc = Accumulator::default();
        let n = (T_MAX / h).ceil() as i64;
        let step = if odd_only { 2 } else { 1 };
        let start = if odd_only { 1 } else { 0 };
        let mut j = start;
        while j <= n {
            let t = j as f64 * h;
            let s = FRAC_PI_2 * t.sinh();
            let cs = FRAC_PI_2 * t.cosh();
            // x = (1 + tanh s)/2, 1 - x = 1/(1 + e^{2s})
            let e = (-2.0 * s.abs()).exp();
            let small = e / (1.0 + e);
            let big = 1.0 / (1.0 + e);
            let w = cs * 2.0 * e / ((1.0 + e) * (1.0 + e));
            if j == 0 {
                acc.add(w * f(0.5, 0.5));
                *evals += 1;
            } else {
                let (xp, xpc) = (big, small);
                acc.add(w * f(xp, xpc));
                acc.add(w * f(xpc, xp));
                *evals += 2;
            }
            j += step;
        }
        acc.value()
    };
    let mut evals = 0;
    let mut h = 0.5;
    let mut sum = level_sum(h, false, &mut evals);
    let mut prev = sum * h;
    for level in 1..=12 {
        h *= 0.5;
        sum += level_sum(h, true, &mut evals);
        let cur = sum * h;
        let err = (cur - prev).abs();
        if level >= 3 && err <= tol.abs.max(tol.rel * cur.abs()) {
            return Ok(Estimate {
                value: cur,
                error: err,
                evaluations: evals,
                subdivisions: level,
            });
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure {
        value: prev,
        error: f64::NAN,
        subdivisions: 12,
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}
