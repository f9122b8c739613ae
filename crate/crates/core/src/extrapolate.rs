//! Polynomial extrapolation of a sampled function to `x = 0`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    /// `|E_m - E_{m-1}|` for the extrapolants built from the `m` largest
    /// abscissae, `m = 2..=n`.
    pub residuals: Vec<f64>,
    pub error: f64,
}

/// Least-squares polynomial of degree `degree` through `(xs, ys)`, evaluated at zero.
///
/// Abscissae are rescaled to `[0, 1]` and the system is solved by
/// Householder QR.
pub fn polyfit_at_zero(xs: &[f64], ys: &[f64], degree: usize) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let cols = (degree + 1).min(n);
    let xmax = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut a: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| {
            let t = x / xmax;
            (0..cols).map(|j| t.powi(j as i32)).collect()
        })
        .collect();
    let mut b = ys.to_vec();
    for j in 0..cols {
        let norm = (j..n).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for c in j..cols {
            let s: f64 = (j..n).map(|i| v[i - j] * a[i][c]).sum::<f64>() * 2.0 / vnorm2;
            for i in j..n {
                a[i][c] -= s * v[i - j];
            }
        }
        let s: f64 = (j..n).map(|i| v[i - j] * b[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in j..n {
            b[i] -= s * v[i - j];
        }
    }
    let mut coef = vec![0.0; cols];
    for j in (0..cols).rev() {
        let s: f64 = (j + 1..cols).map(|c| a[j][c] * coef[c]).sum();
        coef[j] = (b[j] - s) / a[j][j];
    }
    coef[0]
}

/// Extrapolates samples to zero with a polynomial of at most `order`, also
/// reporting how successive extrapolants settle as smaller abscissae enter.
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64], order: usize) -> Extrapolation {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[j].total_cmp(&xs[i]));
    let xs: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    let mut estimates = Vec::with_capacity(xs.len());
    for m in 2..=xs.len() {
        let deg = order.min(m - 1);
        estimates.push(polyfit_at_zero(&xs[..m], &ys[..m], deg));
    }
    let residuals: Vec<f64> = estimates.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let value = *estimates.last().expect("at least two samples");
    let error = residuals.last().copied().unwrap_or(f64::INFINITY);
    Extrapolation {
        value,
        residuals,
        error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_of_matching_degree() {
        let xs: Vec<f64> = (1..=8).map(|i| 0.1 / i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 5.0 * x * x - x.powi(4)).collect();
        let v = polyfit_at_zero(&xs, &ys, 4);
        assert!((v - 3.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn residuals_shrink_for_smooth_function() {
        let xs: Vec<f64> = (0..8).map(|i| 0.1 * 0.7f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x)).collect();
        let e = extrapolate_to_zero(&xs, &ys, 4);
        assert!((e.value - 1.0).abs() < 1e-6, "{} {:?}", e.value, e.residuals);
        assert!(e.residuals.last().unwrap() < e.residuals.first().unwrap());
    }
}
