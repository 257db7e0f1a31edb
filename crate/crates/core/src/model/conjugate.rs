//! Conjugate points, cut loci and the two structural lemmas of von Mangoldt planes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::distance::{model_distance, shoot, Shot};
use crate::model::geodesic::{integrate_geodesic, DEFAULT_STEP};
use crate::model::surface::{ModelPoint, ModelSurface};
use crate::numeric::ode::rk4_step;
use crate::numeric::roots::bisect;

/// First zero `s* > 0` of the Jacobi field along the meridian from `(t_start, θ)`
/// through the vertex and out along the opposite meridian, or `None` if `J`
/// does not vanish before the path leaves the domain.
pub fn first_conjugate_point(surface: &ModelSurface, t_start: f64) -> Result<Option<f64>> {
    if t_start <= surface.t_min() || t_start > surface.t_max() {
        return Err(Error::InvalidInput(format!("t_start = {t_start} outside (t_min, t_max]")));
    }
    let s_end = t_start + surface.t_max();
    let h = DEFAULT_STEP;
    // state (J, J', s)
    let rhs = |y: &[f64; 3]| [y[1], -surface.g((t_start - y[2]).abs()) * y[0], 1.0];
    let mut y = [0.0, 1.0, 0.0];
    let n = (s_end / h).ceil() as usize;
    for i in 0..n {
        let step = h.min(s_end - y[2]);
        let next = rk4_step(rhs, &y, step);
        if i > 0 && next[0] <= 0.0 {
            let start = y;
            let s_star = bisect(|tau| rk4_step(rhs, &start, tau)[0], 0.0, step, 1e-15, 100).expect("sign change");
            return Ok(Some(start[2] + s_star));
        }
        y = next;
    }
    Ok(None)
}

/// Cut locus of a point on a von Mangoldt plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutLocus {
    Empty,
    /// The part `t >= t_cut` of the meridian `θ = theta_opposite`.
    Ray { theta_opposite: f64, t_cut: f64 },
}

/// Number of geodesics in the fan that approaches the through-vertex meridian.
pub const CUT_FAN: usize = 240;

/// Cut locus of `x`: the infimum over a fan of geodesics leaving `x` towards
/// the vertex of the radius at which they reach the opposite meridian while
/// still no longer than the path through the vertex. Each such point is joined
/// to `x` by that geodesic and its mirror image, so it is a cut point.
pub fn cut_locus(surface: &ModelSurface, x: ModelPoint) -> Result<CutLocus> {
    if x.t <= surface.t_min() || x.t > surface.t_max() {
        return Err(Error::InvalidInput(format!("t = {} outside (t_min, t_max]", x.t)));
    }
    let budget = x.t + surface.t_max();
    let mut t_cut = f64::INFINITY;
    // angles π - ε with ε log-spaced from 1 down to 1e-9, plus a uniform fan
    let mut psis: Vec<f64> = (0..CUT_FAN).map(|k| PI - 10f64.powf(-(9.0 * k as f64) / (CUT_FAN - 1) as f64)).collect();
    psis.extend((1..64).map(|k| PI * k as f64 / 64.0));
    for psi in psis {
        if let Shot::Hit { s, t } = shoot(surface, x.t, psi, PI, budget, DEFAULT_STEP, None) {
            if s <= x.t + t + 1e-6 && t < t_cut {
                t_cut = t;
            }
        }
    }
    if t_cut.is_finite() {
        Ok(CutLocus::Ray { theta_opposite: (x.theta + PI).rem_euclid(std::f64::consts::TAU), t_cut })
    } else {
        Ok(CutLocus::Empty)
    }
}

/// Output of [`check_angle_lemma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleLemma {
    pub angle_at_x: f64,
    pub min_t: f64,
    pub stays_outside: bool,
    pub passes: bool,
}

/// For `ρ < t(x) <= t(y)`, the minimal geodesic from `x` to `y` should leave
/// `x` at an angle below `π/2` from `∂/∂t` and avoid the closed `ρ`-ball.
pub fn check_angle_lemma(surface: &ModelSurface, x: ModelPoint, y: ModelPoint) -> Result<AngleLemma> {
    let rho = surface.rho().ok_or_else(|| Error::HypothesisViolated("surface has no critical radius".into()))?;
    if !(x.t > rho && y.t > rho) {
        return Err(Error::HypothesisViolated(format!("need t(x), t(y) > ρ = {rho}, got {} and {}", x.t, y.t)));
    }
    if x.t > y.t {
        return Err(Error::HypothesisViolated(format!("need t(x) <= t(y), got {} > {}", x.t, y.t)));
    }
    let (_, g) = model_distance(surface, x, y)?;
    let p = g.samples[0];
    let f = surface.f(p.t);
    let angle_at_x = (f * p.dtheta).abs().atan2(p.dt);
    let min_t = g.samples.iter().map(|p| p.t).fold(f64::INFINITY, f64::min);
    let stays_outside = min_t > rho;
    Ok(AngleLemma { angle_at_x, min_t, stays_outside, passes: angle_at_x < PI / 2.0 && stays_outside })
}

/// Largest deviation `|t(s) - ρ|` of the geodesic started tangent to the
/// parallel `t = ρ`, over `length`.
pub fn parallel_circle_residual(surface: &ModelSurface, length: f64) -> Result<f64> {
    let rho = surface.rho().ok_or_else(|| Error::HypothesisViolated("surface has no critical radius".into()))?;
    let g = integrate_geodesic(surface, ModelPoint::new(rho, 0.0), PI / 2.0, length, DEFAULT_STEP)?;
    Ok(g.samples.iter().map(|p| (p.t - rho).abs()).fold(0.0, f64::max))
}
