//! Bracketing root finders.

/// Result of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Illinois-modified regula falsi on a sign-changing bracket.
///
/// Stops when `|f| <= ftol` or the bracket is narrower than `xtol`.
/// Returns `None` when the endpoints do not bracket a sign change.
pub fn illinois<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    mut fb: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Option<Root> {
    if fa == 0.0 {
        return Some(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Some(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for it in 1..=max_iter {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() <= ftol || (b - a).abs() <= xtol {
            return Some(Root { x: best.0, fx: best.1, iterations: it });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Some(Root { x: best.0, fx: best.1, iterations: max_iter })
}

/// Plain bisection on a sign change; robust when `f` is only piecewise continuous.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
        return None;
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_cubic_root() {
        let f = |x: f64| x * x * x - 2.0;
        let r = illinois(f, 0.0, f(0.0), 2.0, f(2.0), 1e-15, 1e-14, 200).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
        assert!(r.iterations < 40);
    }

    #[test]
    fn illinois_rejects_non_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(illinois(f, -1.0, 2.0, 1.0, 2.0, 1e-12, 1e-12, 50).is_none());
    }

    #[test]
    fn bisect_step_function() {
        let f = |x: f64| if x < 0.3 { -1.0 } else { 1.0 };
        let x = bisect(f, 0.0, 1.0, 1e-12, 100).unwrap();
        assert!((x - 0.3).abs() < 1e-11);
    }
}
