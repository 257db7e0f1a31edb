//! Geodesics of a model surface via the second-order system
//! `t'' = f f' θ'^2`, `θ'' = -2 (f'/f) t' θ'`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::surface::{ModelPoint, ModelSurface};
use crate::numeric::ode::rk4_step;

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Clairaut drift that triggers step halving.
pub const CLAIRAUT_TOL: f64 = 1e-6;
const MAX_HALVINGS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub s: f64,
    pub t: f64,
    pub theta: f64,
    pub dt: f64,
    pub dtheta: f64,
}

/// A sampled unit-speed geodesic. `theta` is not wrapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelGeodesic {
    pub start: ModelPoint,
    pub psi: f64,
    pub nu: f64,
    pub samples: Vec<GeodesicSample>,
    pub length: f64,
    pub step: f64,
}

impl ModelGeodesic {
    /// `max |f(t)^2 |θ'| - ν|` over the samples.
    pub fn clairaut_drift(&self, surface: &ModelSurface) -> f64 {
        self.samples
            .iter()
            .map(|p| {
                let f = surface.f(p.t);
                (f * f * p.dtheta.abs() - self.nu).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |t'^2 + f^2 θ'^2 - 1|` over the samples.
    pub fn speed_residual(&self, surface: &ModelSurface) -> f64 {
        self.samples
            .iter()
            .map(|p| {
                let f = surface.f(p.t);
                (p.dt * p.dt + f * f * p.dtheta * p.dtheta - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Index of the sample where `|t'|` is smallest.
    pub fn turning_sample(&self) -> usize {
        self.samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.dt.abs().total_cmp(&b.1.dt.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn end(&self) -> GeodesicSample {
        *self.samples.last().expect("non-empty geodesic")
    }

    /// Whether `t` is monotone along the path.
    pub fn is_t_monotone(&self) -> bool {
        let inc = self.samples.windows(2).all(|w| w[1].t >= w[0].t);
        let dec = self.samples.windows(2).all(|w| w[1].t <= w[0].t);
        inc || dec
    }
}

/// Right-hand side of the geodesic system in `(t, θ, t', θ')`.
#[inline]
pub(crate) fn geodesic_rhs(surface: &ModelSurface, y: &[f64; 4]) -> [f64; 4] {
    let (f, df) = surface.f_df(y[0]);
    [y[2], y[3], f * df * y[3] * y[3], -2.0 * df / f * y[2] * y[3]]
}

/// Step size actually used at radius `t`: never more than 5% of the distance to the pole.
#[inline]
pub(crate) fn local_step(h: f64, t: f64) -> f64 {
    h.min(0.01 * t)
}

/// Initial state for a unit-speed geodesic leaving `(t, θ)` at angle `ψ` from `∂/∂t`.
pub(crate) fn initial_state(surface: &ModelSurface, t: f64, theta: f64, psi: f64) -> [f64; 4] {
    let f = surface.f(t);
    [t, theta, psi.cos(), psi.sin() / f]
}

/// `ν = f(t) |sin ψ|`.
pub fn clairaut_constant(surface: &ModelSurface, point: ModelPoint, psi: f64) -> Result<f64> {
    if point.t <= surface.t_min() || point.t > surface.t_max() {
        return Err(Error::InvalidInput(format!("t = {} outside (t_min, t_max]", point.t)));
    }
    Ok(surface.f(point.t) * psi.sin().abs())
}

fn integrate_fixed(surface: &ModelSurface, start: ModelPoint, psi: f64, length: f64, h: f64) -> Result<ModelGeodesic> {
    let nu = surface.f(start.t) * psi.sin().abs();
    let mut y = initial_state(surface, start.t, start.theta, psi);
    let mut s = 0.0;
    let cap = (length / h).ceil() as usize + 1;
    let mut samples = Vec::with_capacity(cap);
    samples.push(GeodesicSample { s, t: y[0], theta: y[1], dt: y[2], dtheta: y[3] });
    while s < length {
        let step = local_step(h, y[0]).min(length - s);
        y = rk4_step(|z| geodesic_rhs(surface, z), &y, step);
        s += step;
        if y[0] <= surface.t_min() {
            return Err(Error::PoleCrossing { s });
        }
        if y[0] > surface.t_max() {
            return Err(Error::LeftDomain { s });
        }
        samples.push(GeodesicSample { s, t: y[0], theta: y[1], dt: y[2], dtheta: y[3] });
        if length - s < 1e-14 * length.max(1.0) {
            break;
        }
    }
    Ok(ModelGeodesic { start, psi, nu, samples, length: s, step: h })
}

/// Integrates the geodesic from `start` at angle `ψ` (radians from `∂/∂t`,
/// positive towards increasing `θ`) for arclength `length`.
///
/// The step is halved until the Clairaut drift falls below [`CLAIRAUT_TOL`].
pub fn integrate_geodesic(surface: &ModelSurface, start: ModelPoint, psi: f64, length: f64, step: f64) -> Result<ModelGeodesic> {
    if !(step > 0.0) || !(length >= 0.0) {
        return Err(Error::InvalidInput(format!("need step > 0 and length >= 0, got {step}, {length}")));
    }
    if start.t <= surface.t_min() {
        return Err(Error::PoleCrossing { s: 0.0 });
    }
    let mut h = step;
    let mut path = integrate_fixed(surface, start, psi, length, h)?;
    for _ in 0..MAX_HALVINGS {
        if path.clairaut_drift(surface) < CLAIRAUT_TOL {
            break;
        }
        h *= 0.5;
        path = integrate_fixed(surface, start, psi, length, h)?;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::surface::{SurfaceFamily, SurfaceSpec};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn flat_plane_geodesic_is_a_line() {
        let s = ModelSurface::build(&SurfaceSpec::new(SurfaceFamily::Flat).with_t_max(20.0)).unwrap();
        let start = ModelPoint::new(2.0, 0.3);
        let psi = 1.1;
        let g = integrate_geodesic(&s, start, psi, 10.0, DEFAULT_STEP).unwrap();
        let (x0, y0) = (2.0 * 0.3f64.cos(), 2.0 * 0.3f64.sin());
        // unit radial and angular vectors at the start
        let dir = (0.3 + psi).sin_cos();
        let mut worst: f64 = 0.0;
        for p in &g.samples {
            let (x, y) = (p.t * p.theta.cos(), p.t * p.theta.sin());
            let (ex, ey) = (x0 + p.s * dir.1, y0 + p.s * dir.0);
            worst = worst.max(((x - ex).powi(2) + (y - ey).powi(2)).sqrt());
        }
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn meridian() {
        let s = ModelSurface::gauss_tanh();
        let g = integrate_geodesic(&s, ModelPoint::new(1.0, 0.5), 0.0, 2.0, DEFAULT_STEP).unwrap();
        for p in &g.samples {
            assert_eq!(p.theta, 0.5);
            assert!((p.t - 1.0 - p.s).abs() < 1e-12);
        }
    }

    #[test]
    fn turning_point_certificate() {
        let s = ModelSurface::gauss_tanh();
        let g = integrate_geodesic(&s, ModelPoint::new(1.5, 0.0), FRAC_PI_3, 3.0, DEFAULT_STEP).unwrap();
        let i = g.turning_sample();
        let p = g.samples[i];
        assert!(i > 0 && i + 1 < g.samples.len(), "turning point not interior");
        assert!((s.f(p.t) - g.nu).abs() <= 1e-4, "{}", (s.f(p.t) - g.nu).abs());
        assert!(g.clairaut_drift(&s) <= 1e-6);
        assert!(g.speed_residual(&s) <= 1e-8);
    }

    #[test]
    fn clairaut_constant_examples() {
        let flat = ModelSurface::flat();
        let p = ModelPoint::new(1.0, 0.0);
        assert_eq!(clairaut_constant(&flat, p, 0.0).unwrap(), 0.0);
        assert!((clairaut_constant(&flat, p, FRAC_PI_4).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pole_crossing_is_an_error() {
        let s = ModelSurface::flat();
        let err = integrate_geodesic(&s, ModelPoint::new(1.0, 0.0), std::f64::consts::PI, 2.0, DEFAULT_STEP).unwrap_err();
        assert!(matches!(err, Error::PoleCrossing { .. }));
    }
}
