//! Classical fourth-order Runge-Kutta steps for autonomous systems.

use nalgebra::DVector;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], k: &[f64; N], a: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// One RK4 step of `y' = rhs(y)` with step `h`.
pub fn rk4_step<const N: usize, F>(rhs: F, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let k1 = rhs(y);
    let k2 = rhs(&axpy(y, &k1, 0.5 * h));
    let k3 = rhs(&axpy(y, &k2, 0.5 * h));
    let k4 = rhs(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Same as [`rk4_step`] for heap vectors, used where the dimension is a runtime value.
pub fn rk4_step_dyn<F>(rhs: F, y: &DVector<f64>, h: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let k1 = rhs(y);
    let k2 = rhs(&(y + &k1 * (0.5 * h)));
    let k3 = rhs(&(y + &k2 * (0.5 * h)));
    let k4 = rhs(&(y + &k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}
