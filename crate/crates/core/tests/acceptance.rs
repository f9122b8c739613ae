//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use casimir_plate::atom::{AtomSpec, Polarizability};
use casimir_plate::correlation::correlation_density;
use casimir_plate::exec::Execution;
use casimir_plate::geometry::PlateGeometry;
use casimir_plate::grid::Grid;
use casimir_plate::linalg::norm;
use casimir_plate::potential::{
    cp_far_zone_plate, cp_free_space, evaluate, far_zone_terms, Method, QuadratureConfig, FREE_SPACE_COEFFICIENT,
};
use casimir_plate::tensor::{angular_oracle_tau, dipole_kernel, fd_oracle_dipole_extrapolated, tau};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20_240_917)
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = norm(&v);
        if (0.1..=1.0).contains(&n) {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn free_space_anchor() -> Verdict {
    let quad = QuadratureConfig::default();
    let a = Polarizability::Static(1.0);
    let start = Instant::now();
    let res = cp_free_space(&a, &a, 1.0, &quad);
    let elapsed = start.elapsed();
    match res {
        Ok(r) => {
            let err = rel(r.reduced_coefficient, -23.0 / (4.0 * PI));
            verdict(
                err <= 1e-8 && elapsed < Duration::from_secs(1),
                format!("relative error {err:.2e}, {elapsed:.2?}"),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn far_from_plate() -> Verdict {
    let g = PlateGeometry::from_heights(1e3, 1e3, 1.0).unwrap();
    let t = far_zone_terms(&g);
    let total = cp_far_zone_plate(1.0, 1.0, &g).unwrap().reduced_coefficient;
    let err = rel(total, FREE_SPACE_COEFFICIENT);
    let plate = t.image.abs().max(t.mixed.abs());
    verdict(
        err <= 1e-6 && plate < 1e-9,
        format!("relative error {err:.2e}, largest plate term {plate:.2e}"),
    )
}

fn log_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn grid_agreement() -> Verdict {
    let mut za = vec![0.0];
    za.extend(log_axis(0.05, 200.0, 9));
    let mut zb = vec![0.0];
    zb.extend(log_axis(0.07, 300.0, 9));
    let grid = Grid::new(za, zb, vec![0.1, 1.0, 10.0, 100.0]);
    let quad = QuadratureConfig::default();
    let a = Polarizability::Static(1.0);
    let methods = [Method::CorrelationWick, Method::CorrelationAbel, Method::DoubleIntegralFar];
    let start = Instant::now();
    let per_point = Execution::default().map(&grid.points(), |p| {
        let g = p.geometry()?;
        let far = cp_far_zone_plate(1.0, 1.0, &g)?.value;
        let mut errs = [0.0; 3];
        for (e, &m) in errs.iter_mut().zip(&methods) {
            *e = rel(evaluate(m, &a, &a, &g, &quad)?.value, far);
        }
        Ok::<_, casimir_plate::Error>(errs)
    });
    let elapsed = start.elapsed();
    let mut worst = [0.0_f64; 3];
    for r in per_point {
        match r {
            Ok(errs) => {
                for (w, e) in worst.iter_mut().zip(errs) {
                    *w = w.max(e);
                }
            }
            Err(e) => return verdict(false, e.to_string()),
        }
    }
    verdict(
        worst.iter().all(|&w| w <= 1e-5) && elapsed < Duration::from_secs(300),
        format!(
            "{} points, worst wick {:.2e}, abel {:.2e}, double {:.2e}, {elapsed:.2?}",
            grid.len(),
            worst[0],
            worst[1],
            worst[2]
        ),
    )
}

fn tensor_oracles() -> Verdict {
    let mut rng = rng();
    let mut tau_worst = 0.0_f64;
    let mut fd_worst = 0.0_f64;
    for _ in 0..100 {
        let d = unit_vector(&mut rng);
        let r = rng.gen_range(0.2..5.0);
        let kr: f64 = rng.gen_range(0.1..50.0);
        let k = kr / r;
        let v = [d[0] * r, d[1] * r, d[2] * r];
        let nodes = 48 + (1.2 * kr).ceil() as usize;
        let oracle = angular_oracle_tau(k, &v, nodes);
        tau_worst = tau_worst.max((oracle.tensor - tau(k, &v).unwrap().m).max_abs());
        let exact = dipole_kernel(k, &v).unwrap().m;
        let fd = fd_oracle_dipole_extrapolated(k, &v, 8e-3 * r.min(1.0 / k)).unwrap();
        fd_worst = fd_worst.max((fd - exact).max_abs() / exact.max_abs());
    }
    verdict(
        tau_worst <= 1e-9 && fd_worst <= 1e-6,
        format!("tau vs sphere quadrature {tau_worst:.2e}, dipole vs finite differences {fd_worst:.2e}"),
    )
}

fn boundary_condition() -> Verdict {
    let mut rng = rng();
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), 0.0];
        let b = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.05..4.0)];
        let k = rng.gen_range(0.05..20.0);
        let g = PlateGeometry::new(a, b).unwrap();
        let d = correlation_density(k, &g).unwrap();
        let scale = d.tensor.max_abs();
        for i in 0..2 {
            for j in 0..3 {
                worst = worst.max(d.tensor[(i, j)].abs() / scale);
            }
        }
    }
    verdict(worst <= 1e-13, format!("largest tangential component {worst:.2e}"))
}

fn geometry_identity() -> Verdict {
    let mut rng = rng();
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let a = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..10.0)];
        let b = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.0..10.0)];
        let g = PlateGeometry::new(a, b).unwrap();
        let lhs = g.r * g.theta.sin();
        let rhs = g.rbar * g.theta_bar.sin();
        worst = worst.max((lhs - rhs).abs() / g.rbar);
    }
    verdict(worst <= 1e-12, format!("worst relative mismatch {worst:.2e}"))
}

fn on_plate() -> Verdict {
    let quad = QuadratureConfig::default();
    let a = Polarizability::Static(1.0);
    let g = PlateGeometry::from_heights(0.0, 0.0, 1.7).unwrap();
    let expected = -13.0 / (2.0 * PI);
    let mut worst = 0.0_f64;
    for m in [Method::FarZoneClosed, Method::CorrelationWick, Method::DoubleIntegralFar] {
        match evaluate(m, &a, &a, &g, &quad) {
            Ok(r) => worst = worst.max(rel(r.reduced_coefficient, expected)),
            Err(e) => return verdict(false, format!("{m}: {e}")),
        }
    }
    verdict(worst <= 1e-12, format!("worst relative error {worst:.2e} over far, wick, double"))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn retarded_scaling() -> Verdict {
    let quad = QuadratureConfig::default();
    let k0 = 1.0;
    let atom = Polarizability::Dynamic(AtomSpec::two_level("two-level", k0, 1.0).unwrap());
    let scales = log_axis(50.0 / k0, 5000.0 / k0, 8);
    let lx: Vec<f64> = scales.iter().map(|s| s.ln()).collect();
    let mut free = Vec::new();
    let mut plate = Vec::new();
    for &s in &scales {
        let g = PlateGeometry::new([0.0, 0.0, 0.4 * s], [0.6 * s, 0.0, 1.1 * s]).unwrap();
        let f = cp_free_space(&atom, &atom, s, &quad);
        let p = evaluate(Method::CorrelationWick, &atom, &atom, &g, &quad);
        match (f, p) {
            (Ok(f), Ok(p)) => {
                free.push((-f.value).ln());
                plate.push((-p.value).ln());
            }
            (Err(e), _) | (_, Err(e)) => return verdict(false, e.to_string()),
        }
    }
    let (sf, sp) = (slope(&lx, &free), slope(&lx, &plate));
    let dev = ((sf + 7.0) / 7.0).abs().max(((sp + 7.0) / 7.0).abs());
    verdict(
        dev <= 0.01,
        format!("log-log slope free space {sf:.5}, plate {sp:.5}"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("free-space retarded coefficient", free_space_anchor),
        ("plate far away recovers free space", far_from_plate),
        ("three routes agree on the 10x10x4 grid", grid_agreement),
        ("tensor kernels match independent oracles", tensor_oracles),
        ("tangential correlation vanishes on the plate", boundary_condition),
        ("transverse separation identity", geometry_identity),
        ("both atoms on the plate", on_plate),
        ("R^-7 scaling in the retarded regime", retarded_scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
