//! Double-double arithmetic (about 32 significant digits), used where a sum
//! cancels so strongly that f64 rounding of individual terms would dominate.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const TAU: Dd = Dd {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from_f64(b))
    }

    /// Halvings that bring `|x|` below 1/2, where the Taylor series converges fast.
    fn halvings(x: f64) -> i32 {
        if x.abs() <= 0.5 {
            0
        } else {
            (x.abs() / 0.5).log2().ceil() as i32
        }
    }

    /// `e^x` by Taylor series on a halved argument, then repeated squaring.
    pub fn exp(self) -> Dd {
        let halvings = Self::halvings(self.hi);
        let x = self.mul_f64(0.5f64.powi(halvings));
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..30 {
            term = (term * x).div_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..halvings {
            sum = sum * sum;
        }
        sum
    }

    /// `(cos x, sin x)` by Taylor series on a halved argument, then double-angle steps.
    pub fn cos_sin(self) -> (Dd, Dd) {
        let halvings = Self::halvings(self.hi);
        let x = self.mul_f64(0.5f64.powi(halvings));
        let x2 = x * x;
        let (mut c, mut s) = (Dd::ONE, x);
        let (mut tc, mut ts) = (Dd::ONE, x);
        for n in 1..20 {
            let m = (2 * n) as f64;
            tc = -(tc * x2).div_f64((m - 1.0) * m);
            ts = -(ts * x2).div_f64(m * (m + 1.0));
            c = c + tc;
            s = s + ts;
            if tc.hi.abs() < 1e-34 && ts.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..halvings {
            let c2 = c * c - s * s;
            s = (c * s).mul_f64(2.0);
            c = c2;
        }
        (c, s)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` in double-double precision.
pub(crate) fn gauss_legendre_dd(n: usize) -> Vec<(Dd, Dd)> {
    let (x0, _) = crate::quadrature::gauss_legendre(n);
    x0.iter()
        .map(|&guess| {
            let mut x = Dd::from_f64(guess);
            let mut dp = Dd::ONE;
            for _ in 0..3 {
                let (mut p0, mut p1) = (Dd::ONE, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = (x * p1).mul_f64(2.0 * kf - 1.0) - p0.mul_f64(kf - 1.0);
                    p0 = p1;
                    p1 = p2.div_f64(kf);
                }
                // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
                dp = (x * p1 - p0).mul_f64(n as f64).div(x * x - Dd::ONE);
                x = x - p1.div(dp);
            }
            let w = Dd::from_f64(2.0).div((Dd::ONE - x * x) * dp * dp);
            (x, w)
        })
        .collect()
}
