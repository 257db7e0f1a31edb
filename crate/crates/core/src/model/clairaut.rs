//! Clairaut integrals along `t`-monotone geodesic arcs.
//!
//! On an arc with Clairaut constant `ν` and no turning point,
//! `dθ/dt = ν / (f sqrt(f^2 - ν^2))` and `ds/dt = f / sqrt(f^2 - ν^2)`.
//! The arclength is reported through its excess over `|t1 - t0|`, which stays
//! meaningful when `ν` is far below the resolution of `t` (chains at large `t`
//! on rapidly decaying warps have excesses near `1e-40`).

use crate::error::{Error, Result};
use crate::model::surface::ModelSurface;
use crate::numeric::quad::{integrate, integrate_to_singular_end};
use crate::numeric::roots::illinois;

const REL_TOL: f64 = 1e-13;
const PANEL: f64 = 0.05;
/// Guard used by [`length_lower_bound`]: `f - ν` must stay above this.
pub const SINGULAR_GAP: f64 = 1e-8;

/// `t1 - t0 + (ν^2 / 2) ∫ dt / (f sqrt(f^2 - ν^2))`, a lower bound for the
/// length of any `t`-monotone geodesic from radius `t0` to `t1` with constant `ν`.
pub fn length_lower_bound(surface: &ModelSurface, nu: f64, t0: f64, t1: f64) -> Result<f64> {
    if !(t1 > t0) {
        return Err(Error::InvalidInput(format!("need t1 > t0, got {t0}, {t1}")));
    }
    if nu == 0.0 {
        return Ok(t1 - t0);
    }
    let checks = 2_000;
    for k in 0..=checks {
        let t = t0 + (t1 - t0) * k as f64 / checks as f64;
        if surface.f(t) - nu < SINGULAR_GAP {
            return Err(Error::IntegrandSingular { t });
        }
    }
    let integral = integrate(
        |t| {
            let f = surface.f(t);
            1.0 / (f * ((f - nu) * (f + nu)).sqrt())
        },
        t0,
        t1,
        REL_TOL,
        PANEL,
    );
    Ok(t1 - t0 + 0.5 * nu * nu * integral)
}

/// Which end of an arc, if any, sits at a turning point.
fn singular_end(surface: &ModelSurface, nu: f64, lo: f64, hi: f64) -> (f64, f64, Option<bool>) {
    let (flo, fhi) = (surface.f(lo), surface.f(hi));
    let near = |f: f64| (f - nu) <= 0.1 * nu;
    let end = if near(fhi) && fhi <= flo {
        Some(true)
    } else if near(flo) {
        Some(false)
    } else {
        None
    };
    (flo, fhi, end)
}

/// `f(t) - ν` at distance `d` inside the interval from a turning-point end,
/// using a Taylor expansion about the end once `t` itself can no longer
/// resolve `d`.
fn gap_near_end(surface: &ModelSurface, nu: f64, end: f64, d: f64, inward: f64) -> (f64, f64) {
    if d < 1e-6 {
        let (f, df, d2f) = surface.warp.derivs(end);
        let delta = inward * df * d + 0.5 * d2f * d * d;
        (f + delta, (f - nu) + delta)
    } else {
        let f = surface.f(end + inward * d);
        (f, f - nu)
    }
}

/// Integrates `h(f, f - ν)` over `[t0, t1]` (in either order), resolving an
/// inverse-square-root singularity at a turning-point end.
fn arc_integral<H: Fn(f64, f64) -> f64>(surface: &ModelSurface, nu: f64, t0: f64, t1: f64, h: H) -> f64 {
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    if lo == hi {
        return 0.0;
    }
    match singular_end(surface, nu, lo, hi).2 {
        None => integrate(
            |t| {
                let f = surface.f(t);
                h(f, f - nu)
            },
            lo,
            hi,
            REL_TOL,
            PANEL,
        ),
        Some(true) => integrate_to_singular_end(
            |_, d| {
                let (f, gap) = gap_near_end(surface, nu, hi, d, -1.0);
                h(f, gap)
            },
            lo,
            hi,
            REL_TOL,
            PANEL,
        ),
        Some(false) => integrate_to_singular_end(
            |_, d| {
                let (f, gap) = gap_near_end(surface, nu, lo, d, 1.0);
                h(f, gap)
            },
            lo,
            hi,
            REL_TOL,
            PANEL,
        ),
    }
}

/// `Δθ` swept by the monotone arc with constant `ν` between radii `t0` and `t1`.
pub fn arc_theta(surface: &ModelSurface, nu: f64, t0: f64, t1: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    arc_integral(surface, nu, t0, t1, |f, gap| {
        let r = (gap * (f + nu)).max(0.0).sqrt();
        nu / (f * r)
    })
}

/// Length of the monotone arc minus `|t1 - t0|`.
pub fn arc_excess(surface: &ModelSurface, nu: f64, t0: f64, t1: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    arc_integral(surface, nu, t0, t1, |f, gap| {
        let r = (gap * (f + nu)).max(0.0).sqrt();
        nu * nu / (r * (f + r))
    })
}

/// Largest `ν` for which the arc between `t0` and `t1` has no interior turning point.
pub fn arc_nu_max(surface: &ModelSurface, t0: f64, t1: f64) -> f64 {
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    let n = 400;
    (0..=n).map(|k| surface.f(lo + (hi - lo) * k as f64 / n as f64)).fold(f64::INFINITY, f64::min)
}

/// `∫ f^-2` over `[t0, t1]`.
pub fn inverse_square_integral(surface: &ModelSurface, t0: f64, t1: f64) -> f64 {
    integrate(|t| surface.f(t).powi(-2), t0.min(t1), t0.max(t1), REL_TOL, PANEL)
}

/// Solves `value(ν) = target` for an increasing arc functional, in `log ν`.
fn solve_log_nu<F: Fn(f64) -> f64>(value: F, target: f64, nu_lo: f64, nu_hi: f64) -> Option<f64> {
    if target <= 0.0 {
        return Some(0.0);
    }
    let g = |u: f64| (value(u.exp()) / target).ln();
    let (a, b) = (nu_lo.ln(), nu_hi.ln());
    let (ga, gb) = (g(a), g(b));
    if !(ga <= 0.0) {
        return None;
    }
    if gb < 0.0 {
        return None;
    }
    illinois(g, a, ga, b, gb, 1e-15, 1e-15, 200).map(|r| r.x.exp())
}

/// The `ν` of the monotone arc from radius `t0` to `t1` sweeping `Δθ = dtheta`,
/// or `None` when every monotone arc sweeps less.
pub fn arc_nu_for_theta(surface: &ModelSurface, t0: f64, t1: f64, dtheta: f64) -> Option<f64> {
    let nu_max = arc_nu_max(surface, t0, t1) * (1.0 - 1e-12);
    // ν ∫ f^-2 underestimates Δθ, so this start is always below the root
    let guess = dtheta / inverse_square_integral(surface, t0, t1);
    let nu_lo = (0.5 * guess).min(0.5 * nu_max);
    solve_log_nu(|nu| arc_theta(surface, nu, t0, t1), dtheta, nu_lo, nu_max)
}

/// The `ν` of the monotone arc from `t0` to `t1` whose length exceeds `|t1 - t0|` by `excess`.
pub fn arc_nu_for_excess(surface: &ModelSurface, t0: f64, t1: f64, excess: f64) -> Option<f64> {
    let nu_max = arc_nu_max(surface, t0, t1) * (1.0 - 1e-12);
    // excess >= (ν^2/2) ∫ f^-2 for small ν, so this start is below the root
    let guess = (2.0 * excess / inverse_square_integral(surface, t0, t1)).sqrt();
    let nu_lo = (0.25 * guess).min(0.5 * nu_max);
    solve_log_nu(|nu| arc_excess(surface, nu, t0, t1), excess, nu_lo, nu_max)
}

/// Radius reached on the monotone arc from `t0` (outward if `t1 > t0`) after sweeping `dtheta`.
pub fn arc_t_at_theta(surface: &ModelSurface, nu: f64, t0: f64, t1: f64, dtheta: f64) -> f64 {
    if dtheta <= 0.0 || nu == 0.0 {
        return t0;
    }
    let total = arc_theta(surface, nu, t0, t1);
    if dtheta >= total {
        return t1;
    }
    // θ grows like ∫ f^-2, so its logarithm is close to linear in t
    let g = |t: f64| (arc_theta(surface, nu, t0, t) / dtheta).ln();
    let (a, b) = (t0 + (t1 - t0) * 1e-12, t1);
    illinois(g, a, g(a), b, (total / dtheta).ln(), 1e-14 * t1.abs().max(1.0), 1e-14, 200).map_or(t1, |r| r.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::geodesic::{integrate_geodesic, DEFAULT_STEP};
    use crate::model::surface::ModelPoint;

    #[test]
    fn meridian_bound_is_exact() {
        let s = ModelSurface::gauss_tanh();
        assert_eq!(length_lower_bound(&s, 0.0, 1.0, 2.5).unwrap(), 1.5);
    }

    #[test]
    fn flat_bound_against_arcsec() {
        let s = ModelSurface::flat();
        let got = length_lower_bound(&s, 1.0, 2.0, 3.0).unwrap();
        // d/dt arcsec t = 1/(t sqrt(t^2 - 1))
        let arcsec = |t: f64| (1.0 / t).acos();
        let want = 1.0 + 0.5 * (arcsec(3.0) - arcsec(2.0));
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn singular_integrand_is_rejected() {
        let s = ModelSurface::flat();
        assert!(matches!(length_lower_bound(&s, 2.0, 2.0, 3.0), Err(Error::IntegrandSingular { .. })));
    }

    #[test]
    fn arc_integrals_match_flat_geometry() {
        // line at distance ν from the origin: θ(t) = arccos(ν/t), s(t) = sqrt(t^2 - ν^2)
        let s = ModelSurface::flat();
        let (nu, t0, t1) = (0.7, 1.0, 2.5);
        let dth = arc_theta(&s, nu, t0, t1);
        let want = (nu / t1).acos() - (nu / t0).acos();
        assert!((dth - want).abs() < 1e-12);
        let ex = arc_excess(&s, nu, t0, t1);
        let want = (t1 * t1 - nu * nu).sqrt() - (t0 * t0 - nu * nu).sqrt() - (t1 - t0);
        assert!((ex - want).abs() < 1e-12);
        // singular end at the turning point t = ν
        let dth = arc_theta(&s, nu, nu, t1);
        assert!((dth - (nu / t1).acos()).abs() < 1e-12, "{dth}");
    }

    #[test]
    fn arc_inversions() {
        let s = ModelSurface::gauss_tanh();
        let nu = 3e-3;
        let (t0, t1) = (1.2, 2.0);
        let dth = arc_theta(&s, nu, t0, t1);
        let back = arc_nu_for_theta(&s, t0, t1, dth).unwrap();
        assert!(((back - nu) / nu).abs() < 1e-10);
        let ex = arc_excess(&s, nu, t0, t1);
        let back = arc_nu_for_excess(&s, t0, t1, ex).unwrap();
        assert!(((back - nu) / nu).abs() < 1e-8);
        let tm = arc_t_at_theta(&s, nu, t0, t1, 0.5 * dth);
        assert!((arc_theta(&s, nu, t0, tm) - 0.5 * dth).abs() < 1e-12);
    }

    #[test]
    fn arc_matches_integrated_geodesic() {
        let s = ModelSurface::gauss_tanh();
        let (t0, psi) = (1.0, 0.3);
        let g = integrate_geodesic(&s, ModelPoint::new(t0, 0.0), psi, 0.3, DEFAULT_STEP).unwrap();
        let end = g.end();
        assert!(g.is_t_monotone());
        let dth = arc_theta(&s, g.nu, t0, end.t);
        assert!((dth - end.theta).abs() < 1e-9, "{dth} vs {}", end.theta);
        let len = end.t - t0 + arc_excess(&s, g.nu, t0, end.t);
        assert!((len - g.length).abs() < 1e-9);
    }
}
