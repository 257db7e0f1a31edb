//! Central finite-difference stencils.

/// Fourth-order five-point first derivative.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Fourth-order five-point second derivative.
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}

/// Five-point weights for the first derivative, as `(offset, weight)` pairs; divide by `h`.
pub const D1_STENCIL: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];

/// Applies [`D1_STENCIL`] to a vector-valued function of the offset.
pub fn d1_vec<F: Fn(f64) -> Vec<f64>>(f: F, h: f64) -> Vec<f64> {
    let mut acc: Option<Vec<f64>> = None;
    for &(off, w) in D1_STENCIL.iter() {
        let v = f(off * h);
        match acc.as_mut() {
            None => acc = Some(v.iter().map(|x| x * w / h).collect()),
            Some(a) => {
                for (ai, vi) in a.iter_mut().zip(v.iter()) {
                    *ai += vi * w / h;
                }
            }
        }
    }
    acc.unwrap_or_default()
}
