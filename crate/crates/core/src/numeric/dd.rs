//! Double-double arithmetic (about 32 significant digits).
//!
//! The warp ODE `f'' + G f = 0` is violently ill-conditioned when `f` decays
//! like `e^{-t^2}`: a relative perturbation `δ` of `G` near the pole shows up in
//! `f(t)` amplified by roughly `e^{2t^2}`. Plain `f64` cannot reproduce such a
//! warp past `t ≈ 3`, so the curvature-to-warp solver runs in this type
//! whenever the curvature can be evaluated in it.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
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

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Multiplication by a power of two, exact.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Dd::new(k)).ldexp(-10);
        // expm1 of the reduced argument by Taylor, then undo the 2^-10 scaling
        let mut term = r;
        let mut s = r;
        for n in 2..=11 {
            term = term * r / Dd::new(n as f64);
            s = s + term;
        }
        for _ in 0..10 {
            s = s.ldexp(1) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, y: f64) -> Dd {
        self * Dd::new(y)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::new(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::new(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_reference_values() {
        // 40-digit references: e^{-6.25}, e^{1}
        let e = Dd::new(-6.25).exp();
        let want = Dd { hi: 0.001_930_454_136_227_709_2, lo: 0.0 };
        assert!(((e - want).to_f64() / want.hi).abs() < 1e-16);
        let one = Dd::ONE.exp();
        assert_eq!(one.hi, std::f64::consts::E);
        // e * e^{-1} = 1 to double-double accuracy
        let prod = one * Dd::new(-1.0).exp() - Dd::ONE;
        assert!(prod.to_f64().abs() < 1e-30, "{prod:?}");
    }

    #[test]
    fn division_roundtrip() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let back = a * Dd::new(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        assert!((a.hi - 1.0 / 3.0).abs() == 0.0 && a.lo != 0.0);
    }

    #[test]
    fn exp_addition_theorem() {
        for &(x, y) in &[(0.3, 1.7), (-2.5, 0.125), (4.0, -9.0)] {
            let lhs = (Dd::new(x) + Dd::new(y)).exp();
            let rhs = Dd::new(x).exp() * Dd::new(y).exp();
            assert!(((lhs - rhs).to_f64() / lhs.hi).abs() < 1e-30, "{x} {y}");
        }
    }
}
