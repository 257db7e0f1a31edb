//! Two-point distances on a model surface by shooting in the initial angle.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::geodesic::{geodesic_rhs, initial_state, integrate_geodesic, local_step, GeodesicSample, ModelGeodesic, DEFAULT_STEP};
use crate::model::surface::{ModelPoint, ModelSurface};
use crate::numeric::ode::rk4_step;
use crate::numeric::roots::illinois;
use crate::numeric::wrap_angle;

/// Uniform angles in the initial scan.
pub const SCAN_STARTS: usize = 64;
/// Step of the coarse scan; brackets are refined with [`DEFAULT_STEP`].
pub const COARSE_STEP: f64 = 1e-2;
/// Endpoint residual targeted by the refinement.
pub const RESIDUAL_TARGET: f64 = 1e-10;
/// Largest endpoint residual accepted.
pub const RESIDUAL_LIMIT: f64 = 1e-6;
/// Two connectors tie when their lengths differ by less than this.
pub const TIE_TOL: f64 = 1e-6;

/// Outcome of a single shot towards the meridian `θ = target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shot {
    Hit { s: f64, t: f64 },
    Missed { t: f64 },
}

impl Shot {
    pub(crate) fn residual(&self, t_target: f64) -> f64 {
        match *self {
            Shot::Hit { t, .. } => t - t_target,
            Shot::Missed { t } if t > t_target => f64::INFINITY,
            Shot::Missed { .. } => f64::NEG_INFINITY,
        }
    }
}

/// Radius below which a geodesic heading for the vertex is carried across it
/// in closed form, treating the metric as Euclidean.
fn jump_radius(surface: &ModelSurface) -> f64 {
    surface.t_min().min(1e-3)
}

/// Shoots from `(t0, 0)` at angle `ψ ∈ (0, π)` until `θ` reaches `target`
/// or the arclength exceeds `budget`.
pub(crate) fn shoot(
    surface: &ModelSurface,
    t0: f64,
    psi: f64,
    target: f64,
    budget: f64,
    h: f64,
    mut record: Option<&mut Vec<GeodesicSample>>,
) -> Shot {
    let nu = surface.f(t0) * psi.sin();
    let mut y = initial_state(surface, t0, 0.0, psi);
    let mut s = 0.0;
    let r_jump = jump_radius(surface);
    let push = |s: f64, y: &[f64; 4], rec: &mut Option<&mut Vec<GeodesicSample>>| {
        if let Some(v) = rec.as_deref_mut() {
            v.push(GeodesicSample { s, t: y[0], theta: y[1], dt: y[2], dtheta: y[3] });
        }
    };
    push(s, &y, &mut record);
    while s < budget {
        if y[2] < 0.0 && y[0] < r_jump && nu < surface.f(y[0]) {
            // straight line passing the vertex at distance ν
            let r = surface.f(y[0]);
            let alpha0 = (nu / r).acos();
            let half = (r - nu).max(0.0).sqrt() * (r + nu).sqrt();
            if target <= y[1] + 2.0 * alpha0 {
                let alpha = target - (y[1] + alpha0);
                let (t_hit, along) = if nu > 0.0 { (nu / alpha.cos(), nu * alpha.tan()) } else { (0.0, 0.0) };
                let s_hit = s + half + along;
                y = [t_hit, target, 0.0, 0.0];
                push(s_hit, &y, &mut record);
                return Shot::Hit { s: s_hit, t: t_hit };
            }
            s += 2.0 * half;
            y[1] += 2.0 * alpha0;
            y[2] = -y[2];
            push(s, &y, &mut record);
            continue;
        }
        let step = local_step(h, y[0]).min(budget - s);
        let rhs = |z: &[f64; 4]| geodesic_rhs(surface, z);
        let next = rk4_step(rhs, &y, step);
        if next[1] >= target {
            let phi = |tau: f64| rk4_step(rhs, &y, tau)[1] - target;
            let tau = illinois(phi, 0.0, y[1] - target, step, next[1] - target, 1e-17, 1e-15, 100)
                .map(|r| r.x)
                .unwrap_or(step);
            let hit = rk4_step(rhs, &y, tau);
            push(s + tau, &hit, &mut record);
            return Shot::Hit { s: s + tau, t: hit[0] };
        }
        y = next;
        s += step;
        push(s, &y, &mut record);
        if y[0] > surface.t_max() {
            break;
        }
    }
    Shot::Missed { t: y[0] }
}

/// Parametrization of `ψ` used inside a bracket: logarithmic next to `0` and `π`.
#[derive(Debug, Clone, Copy)]
enum Chart {
    Linear,
    LogZero,
    LogPi,
}

impl Chart {
    fn pick(a: f64, b: f64) -> Chart {
        if a.max(b) < 1e-3 {
            Chart::LogZero
        } else if PI - a.min(b) < 1e-3 {
            Chart::LogPi
        } else {
            Chart::Linear
        }
    }
    fn to_u(self, psi: f64) -> f64 {
        match self {
            Chart::Linear => psi,
            Chart::LogZero => psi.ln(),
            Chart::LogPi => (PI - psi).ln(),
        }
    }
    fn to_psi(self, u: f64) -> f64 {
        match self {
            Chart::Linear => u,
            Chart::LogZero => u.exp(),
            Chart::LogPi => PI - u.exp(),
        }
    }
}

/// A geodesic from `(t_a, 0)` to `(t_b, dtheta)` found by shooting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connector {
    pub psi: f64,
    pub length: f64,
    pub residual: f64,
}

/// Initial angles of the scan, increasing.
fn scan_angles(residual_at: &mut impl FnMut(f64) -> f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let base = PI / (2 * SCAN_STARTS) as f64;
    // decades towards 0 while the shot still lands short of the target radius
    let mut small = Vec::new();
    let mut psi = base;
    for _ in 0..300 {
        psi *= 0.1;
        if psi < 1e-300 {
            break;
        }
        let r = residual_at(psi);
        small.push((psi, r));
        if r > 0.0 {
            break;
        }
    }
    small.reverse();
    out.extend(small);
    for k in 0..SCAN_STARTS {
        let psi = (k as f64 + 0.5) * PI / SCAN_STARTS as f64;
        out.push((psi, residual_at(psi)));
    }
    for j in 1..=4 {
        let psi = PI - base * 10f64.powi(-j);
        out.push((psi, residual_at(psi)));
    }
    out
}

/// All connectors from `(t_a, 0)` to `(t_b, dtheta)` with `0 < dtheta <= π`
/// of length at most `t_a + t_b`, shortest first.
pub fn shooting_connectors(surface: &ModelSurface, t_a: f64, t_b: f64, dtheta: f64) -> Vec<Connector> {
    let budget = t_a + t_b + 1e-6;
    let mut coarse = |psi: f64| shoot(surface, t_a, psi, dtheta, budget, COARSE_STEP, None).residual(t_b);
    let scan = scan_angles(&mut coarse);
    let fine = |psi: f64| shoot(surface, t_a, psi, dtheta, budget, DEFAULT_STEP, None);
    let mut found: Vec<Connector> = Vec::new();
    for w in scan.windows(2) {
        let ((pa, ra), (pb, rb)) = (w[0], w[1]);
        if ra == rb || ra.signum() == rb.signum() || (ra.is_nan() || rb.is_nan()) {
            continue;
        }
        let chart = Chart::pick(pa, pb);
        let g = |u: f64| fine(chart.to_psi(u)).residual(t_b);
        let (ua, ub) = (chart.to_u(pa), chart.to_u(pb));
        let (ga, gb) = (g(ua), g(ub));
        if ga.signum() == gb.signum() {
            continue;
        }
        let Some(root) = illinois(g, ua, ga, ub, gb, 1e-15, RESIDUAL_TARGET, 200) else { continue };
        let psi = chart.to_psi(root.x);
        if let Shot::Hit { s, t } = fine(psi) {
            let residual = (t - t_b).abs();
            if residual <= RESIDUAL_LIMIT {
                found.push(Connector { psi, length: s, residual });
            }
        }
    }
    found.sort_by(|a, b| a.length.total_cmp(&b.length));
    found
}

fn with_sign(mut g: ModelGeodesic, theta0: f64, sign: f64) -> ModelGeodesic {
    g.psi *= sign;
    g.start.theta = theta0.rem_euclid(std::f64::consts::TAU);
    for p in &mut g.samples {
        p.theta = theta0 + sign * p.theta;
        p.dtheta *= sign;
    }
    g
}

fn recorded(surface: &ModelSurface, t_a: f64, psi: f64, dtheta: f64, length: f64) -> ModelGeodesic {
    let mut samples = Vec::new();
    shoot(surface, t_a, psi, dtheta, length + 1e-6, DEFAULT_STEP, Some(&mut samples));
    let length = samples.last().map(|p| p.s).unwrap_or(0.0);
    ModelGeodesic {
        start: ModelPoint { t: t_a, theta: 0.0 },
        psi,
        nu: surface.f(t_a) * psi.sin(),
        samples,
        length,
        step: DEFAULT_STEP,
    }
}

/// Path through the vertex: meridian in, opposite meridian out.
fn through_vertex(t_a: f64, t_b: f64) -> ModelGeodesic {
    let n = ((t_a + t_b) / DEFAULT_STEP).ceil().max(2.0) as usize;
    let total = t_a + t_b;
    let samples = (0..=n)
        .map(|k| {
            let s = total * k as f64 / n as f64;
            let (t, theta, dt) = if s <= t_a { (t_a - s, 0.0, -1.0) } else { (s - t_a, PI, 1.0) };
            GeodesicSample { s, t, theta, dt, dtheta: 0.0 }
        })
        .collect();
    ModelGeodesic { start: ModelPoint { t: t_a, theta: 0.0 }, psi: PI, nu: 0.0, samples, length: total, step: DEFAULT_STEP }
}

/// Distance between `a` and `b` and a minimal geodesic realizing it.
pub fn model_distance(surface: &ModelSurface, a: ModelPoint, b: ModelPoint) -> Result<(f64, ModelGeodesic)> {
    for p in [a, b] {
        if p.t <= surface.t_min() || p.t > surface.t_max() {
            return Err(Error::InvalidInput(format!("t = {} outside (t_min, t_max]", p.t)));
        }
    }
    let delta = wrap_angle(b.theta - a.theta);
    let (dtheta, sign) = (delta.abs(), if delta < 0.0 { -1.0 } else { 1.0 });
    if dtheta < 1e-14 {
        let d = (b.t - a.t).abs();
        let psi = if b.t >= a.t { 0.0 } else { PI };
        let g = integrate_geodesic(surface, a, psi, d, DEFAULT_STEP)?;
        return Ok((d, g));
    }
    let connectors = shooting_connectors(surface, a.t, b.t, dtheta);
    let mut best = connectors.first().map(|c| (c.length, Some(c.psi)));
    if PI - dtheta < 1e-12 {
        let through = a.t + b.t;
        if best.map_or(true, |(d, _)| through < d) {
            best = Some((through, None));
        }
    }
    match best {
        Some((d, Some(psi))) => Ok((d, with_sign(recorded(surface, a.t, psi, dtheta, d), a.theta, sign))),
        Some((d, None)) => Ok((d, with_sign(through_vertex(a.t, b.t), a.theta, sign))),
        None => Err(Error::ShootingFailed { residual: f64::INFINITY }),
    }
}
