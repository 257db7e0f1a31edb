//! Small numerical kernels shared by the geometry modules.

pub mod dd;
pub mod directions;
pub mod fd;
pub mod ode;
pub mod quad;
pub mod roots;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = theta.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Cubic Hermite interpolation on `[0, h]` given values and slopes at both ends.
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, tau: f64) -> f64 {
    let u = tau / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Derivative of [`hermite`] with respect to `tau`.
pub fn hermite_slope(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, tau: f64) -> f64 {
    let u = tau / h;
    let u2 = u * u;
    let dh00 = 6.0 * u2 - 6.0 * u;
    let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
    let dh01 = -6.0 * u2 + 6.0 * u;
    let dh11 = 3.0 * u2 - 2.0 * u;
    (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_keeps_principal_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_angle(2.0 * PI + 0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x * x * x;
        let dp = |x: f64| 2.0 - 2.0 * x + 1.5 * x * x;
        let (a, h) = (0.3, 0.7);
        for k in 0..=10 {
            let tau = h * k as f64 / 10.0;
            let y = hermite(p(a), dp(a), p(a + h), dp(a + h), h, tau);
            let d = hermite_slope(p(a), dp(a), p(a + h), dp(a + h), h, tau);
            assert!((y - p(a + tau)).abs() < 1e-13);
            assert!((d - dp(a + tau)).abs() < 1e-12);
        }
    }
}
