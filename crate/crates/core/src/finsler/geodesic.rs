//! Chart geodesics, directed distances by shooting, and the symmetrized
//! quantities `L_m` and `d_m`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::chart::{FinslerChart, Vector};
use crate::numeric::directions::unit_directions;
use crate::numeric::hermite;
use crate::numeric::ode::rk4_step_dyn;

/// Default RK4 step (in arclength) for chart geodesics.
pub const CHART_STEP: f64 = 2e-3;
/// Endpoint residual accepted by the shooting solver.
pub const ENDPOINT_TOL: f64 = 1e-6;
/// Initial velocities closer than this (in `g_v`-norm) are the same connector.
pub const CONNECTOR_CLUSTER: f64 = 1e-3;
/// Connectors whose lengths agree to this are all minimal.
pub const LENGTH_TIE: f64 = 1e-6;
const COARSE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSample {
    pub s: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// A sampled geodesic of a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartGeodesic {
    pub samples: Vec<ChartSample>,
    pub length: f64,
    /// False when the path is traversed against its parametrization.
    pub forward: bool,
}

impl ChartGeodesic {
    pub fn start(&self) -> Vector {
        Vector::from_vec(self.samples[0].x.clone())
    }

    pub fn end(&self) -> Vector {
        Vector::from_vec(self.samples.last().expect("non-empty").x.clone())
    }

    pub fn start_velocity(&self) -> Vector {
        Vector::from_vec(self.samples[0].v.clone())
    }

    pub fn end_velocity(&self) -> Vector {
        Vector::from_vec(self.samples.last().expect("non-empty").v.clone())
    }

    /// Position and velocity at parameter `s`, by cubic Hermite interpolation.
    pub fn at(&self, s: f64) -> (Vector, Vector) {
        let n = self.samples.len();
        let s = s.clamp(self.samples[0].s, self.samples[n - 1].s);
        let i = match self.samples.binary_search_by(|p| p.s.total_cmp(&s)) {
            Ok(i) => return (Vector::from_vec(self.samples[i].x.clone()), Vector::from_vec(self.samples[i].v.clone())),
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.s - a.s;
        let tau = s - a.s;
        let dim = a.x.len();
        let x = Vector::from_iterator(dim, (0..dim).map(|k| hermite(a.x[k], a.v[k], b.x[k], b.v[k], h, tau)));
        let v = Vector::from_iterator(dim, (0..dim).map(|k| crate::numeric::hermite_slope(a.x[k], a.v[k], b.x[k], b.v[k], h, tau)));
        (x, v)
    }

    /// `max_s |F(x(s), ẋ(s)) - F(x(0), ẋ(0))|`.
    pub fn speed_drift(&self, chart: &FinslerChart) -> f64 {
        let speed = |p: &ChartSample| chart.norm(&Vector::from_vec(p.x.clone()), &Vector::from_vec(p.v.clone()));
        let f0 = speed(&self.samples[0]);
        self.samples.iter().map(|p| (speed(p) - f0).abs()).fold(0.0, f64::max)
    }
}

fn rhs(chart: &FinslerChart, y: &Vector) -> Vector {
    let n = chart.dim();
    let x = y.rows(0, n).into_owned();
    let v = y.rows(n, n).into_owned();
    let g = chart.spray(&x, &v).unwrap_or_else(|_| Vector::from_element(n, f64::NAN));
    let mut out = Vector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&v);
    out.rows_mut(n, n).copy_from(&(g * -2.0));
    out
}

fn pack(n: usize, x: &Vector, v: &Vector) -> Vector {
    let mut y = Vector::zeros(2 * n);
    y.rows_mut(0, n).copy_from(x);
    y.rows_mut(n, n).copy_from(v);
    y
}

/// Integrates `steps` RK4 steps of size `h` from `(x0, v0)`. Returns the samples
/// and, if the path left the domain, the parameter where it did.
fn trace(chart: &FinslerChart, x0: &Vector, v0: &Vector, h: f64, steps: usize, record: bool) -> (Vec<ChartSample>, Option<f64>) {
    let n = chart.dim();
    let mut y = pack(n, x0, v0);
    let mut samples = Vec::with_capacity(if record { steps + 1 } else { 1 });
    let sample = |s: f64, y: &Vector| ChartSample { s, x: y.rows(0, n).iter().copied().collect(), v: y.rows(n, n).iter().copied().collect() };
    samples.push(sample(0.0, &y));
    for k in 1..=steps {
        y = rk4_step_dyn(|z| rhs(chart, z), &y, h);
        let s = k as f64 * h;
        let x = y.rows(0, n).into_owned();
        if !x.iter().all(|c| c.is_finite()) || !chart.contains(&x) {
            return (samples, Some(s));
        }
        if record || k == steps {
            samples.push(sample(s, &y));
        }
    }
    (samples, None)
}

/// Integrates the geodesic from `x0` with initial velocity `v0` (normalized to
/// `F = 1` within `1e-8`) for arclength `length`.
pub fn integrate_geodesic(chart: &FinslerChart, x0: &Vector, v0: &Vector, length: f64, step: f64) -> Result<ChartGeodesic> {
    let speed = chart.norm(x0, v0);
    if (speed - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!("initial velocity has F = {speed}, expected 1")));
    }
    if !chart.contains(x0) {
        return Err(Error::LeftDomain { s: 0.0 });
    }
    let steps = ((length / step).ceil() as usize).max(1);
    let (samples, exit) = trace(chart, x0, v0, length / steps as f64, steps, true);
    if let Some(s) = exit {
        return Err(Error::LeftDomain { s });
    }
    Ok(ChartGeodesic { samples, length, forward: true })
}

/// A minimal geodesic from `from` to `to`, together with every other
/// connector found of the same length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalConnector {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub path: ChartGeodesic,
    pub d: f64,
    pub residual: f64,
    pub all_connectors: Vec<ChartGeodesic>,
}

/// Endpoint after unit parameter time from `a` with velocity `w`.
fn endpoint(chart: &FinslerChart, a: &Vector, w: &Vector, steps: usize) -> Option<Vector> {
    let (samples, exit) = trace(chart, a, w, 1.0 / steps as f64, steps, false);
    if exit.is_some() {
        return None;
    }
    Some(Vector::from_vec(samples.last()?.x.clone()))
}

fn step_count(length: f64, step: f64) -> usize {
    ((length / step).ceil() as usize).max(16)
}

/// Newton iteration on the initial velocity `w` with `exp_a(w) = b`.
fn newton(chart: &FinslerChart, a: &Vector, b: &Vector, mut w: Vector, step: f64) -> Option<(Vector, f64)> {
    let n = chart.dim();
    let mut steps = step_count(chart.norm(a, &w), step);
    for _ in 0..40 {
        let e = endpoint(chart, a, &w, steps)?;
        let r = &e - b;
        if r.norm() < 1e-11 {
            let fresh = step_count(chart.norm(a, &w), step);
            if fresh == steps {
                break;
            }
            steps = fresh;
            continue;
        }
        let eps = 1e-7 * w.norm().max(1e-3);
        let mut jac = crate::finsler::chart::Matrix::zeros(n, n);
        for k in 0..n {
            let mut wp = w.clone();
            wp[k] += eps;
            let col = (endpoint(chart, a, &wp, steps)? - &e) / eps;
            jac.set_column(k, &col);
        }
        let dw = jac.lu().solve(&r)?;
        // damp steps that would more than double or halve the speed
        let scale = (0.5 * w.norm() / dw.norm().max(1e-300)).min(1.0);
        w -= dw * scale;
        if !w.iter().all(|c| c.is_finite()) {
            return None;
        }
    }
    let fresh = step_count(chart.norm(a, &w), step);
    let e = endpoint(chart, a, &w, fresh)?;
    Some((w, (&e - b).norm()))
}

fn meridian(t0: f64, t1: f64, theta: f64, step: f64) -> ChartGeodesic {
    let length = (t1 - t0).abs();
    let sign = (t1 - t0).signum();
    let steps = ((length / step).ceil() as usize).max(1);
    let samples = (0..=steps)
        .map(|k| {
            let s = length * k as f64 / steps as f64;
            ChartSample { s, x: vec![t0 + sign * s, theta], v: vec![sign, 0.0] }
        })
        .collect();
    ChartGeodesic { samples, length, forward: true }
}

/// The unit-speed straight segment from `a` to `b`.
fn segment(chart: &FinslerChart, a: &Vector, b: &Vector, step: f64) -> ChartGeodesic {
    let chord = b - a;
    let length = chart.norm(a, &chord);
    let u = &chord / length;
    let steps = ((length / step).ceil() as usize).max(1);
    let samples = (0..=steps)
        .map(|k| {
            let tau = k as f64 / steps as f64;
            ChartSample { s: length * tau, x: (a + &chord * tau).iter().copied().collect(), v: u.iter().copied().collect() }
        })
        .collect();
    ChartGeodesic { samples, length, forward: true }
}

/// Initial velocities to try: the coordinate chord and a fan around it.
fn initial_guesses(chart: &FinslerChart, a: &Vector, b: &Vector) -> Vec<Vector> {
    let chord = b - a;
    let n = chart.dim();
    let mut out = vec![chord.clone()];
    match n {
        2 => {
            for k in 1..=12 {
                let ang = TAU * k as f64 / 24.0 * if k % 2 == 0 { 1.0 } else { -1.0 } * 0.5;
                let (s, c) = ang.sin_cos();
                out.push(Vector::from_vec(vec![c * chord[0] - s * chord[1], s * chord[0] + c * chord[1]]));
            }
        }
        _ => {
            let len = chord.norm();
            for d in unit_directions(n, 12) {
                let d = Vector::from_vec(d);
                out.push(&chord + d * (0.4 * len));
            }
        }
    }
    out
}

/// Directed distance `d(a, b)` by multi-start shooting.
pub fn distance(chart: &FinslerChart, a: &Vector, b: &Vector) -> Result<MinimalConnector> {
    distance_with_step(chart, a, b, CHART_STEP)
}

pub fn distance_with_step(chart: &FinslerChart, a: &Vector, b: &Vector, step: f64) -> Result<MinimalConnector> {
    let to_vec = |x: &Vector| x.iter().copied().collect::<Vec<f64>>();
    if chart.is_pole(a) || chart.is_pole(b) {
        let (t0, t1, theta) = if chart.is_pole(a) { (0.0, b[0], b[1]) } else { (a[0], 0.0, a[1]) };
        let path = meridian(t0, t1, theta, step);
        return Ok(MinimalConnector { from: to_vec(a), to: to_vec(b), d: path.length, residual: 0.0, all_connectors: vec![path.clone()], path });
    }
    if (a - b).norm() == 0.0 {
        return Err(Error::InvalidInput("distance needs distinct points".into()));
    }
    if chart.is_translation_invariant() {
        let path = segment(chart, a, b, step);
        return Ok(MinimalConnector { from: to_vec(a), to: to_vec(b), d: path.length, residual: 0.0, all_connectors: vec![path.clone()], path });
    }
    // the fan converges on a coarse grid; distinct candidates are then refined
    let coarse = COARSE_FACTOR * step;
    let mut candidates: Vec<(Vector, f64)> = Vec::new();
    let mut best_residual = f64::INFINITY;
    for guess in initial_guesses(chart, a, b) {
        let Some((w, residual)) = newton(chart, a, b, guess, coarse) else { continue };
        best_residual = best_residual.min(residual);
        if residual > ENDPOINT_TOL || !is_new(chart, a, &candidates, &w) {
            continue;
        }
        let len = chart.norm(a, &w);
        candidates.push((w, len));
    }
    let shortest = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let mut found: Vec<(Vector, f64, f64)> = Vec::new();
    for (w, len) in candidates {
        if len > shortest + 1e-3 {
            continue;
        }
        let Some((w, residual)) = newton(chart, a, b, w, step) else { continue };
        best_residual = best_residual.min(residual);
        if residual > ENDPOINT_TOL || !is_new(chart, a, &found.iter().map(|f| (f.0.clone(), f.1)).collect::<Vec<_>>(), &w) {
            continue;
        }
        let len = chart.norm(a, &w);
        found.push((w, len, residual));
    }
    if found.is_empty() {
        return Err(Error::ShootingFailed { residual: best_residual });
    }
    found.sort_by(|x, y| x.1.total_cmp(&y.1));
    let d = found[0].1;
    let mut all = Vec::new();
    for (w, len, _) in found.iter().filter(|c| c.1 <= d + LENGTH_TIE) {
        let u = w / *len;
        let steps = step_count(*len, step);
        let (samples, _) = trace(chart, a, &u, len / steps as f64, steps, true);
        all.push(ChartGeodesic { samples, length: *len, forward: true });
    }
    Ok(MinimalConnector { from: to_vec(a), to: to_vec(b), path: all[0].clone(), d, residual: found[0].2, all_connectors: all })
}

/// Whether `w` starts in a direction not yet in `known` (up to [`CONNECTOR_CLUSTER`]).
fn is_new(chart: &FinslerChart, a: &Vector, known: &[(Vector, f64)], w: &Vector) -> bool {
    let u = w / chart.norm(a, w);
    let g = chart.jet(a, &u).g;
    known.iter().all(|(w2, _)| {
        let d = &u - w2 / chart.norm(a, w2);
        (d.transpose() * &g * &d)[(0, 0)].sqrt() > CONNECTOR_CLUSTER
    })
}

/// `L_m(c) = ∫ max{F(ċ), F(-ċ)} ds` by the trapezoidal rule on the samples
/// with a Simpson correction on uniform grids.
pub fn reversed_length(chart: &FinslerChart, path: &ChartGeodesic) -> f64 {
    let vals: Vec<f64> = path
        .samples
        .iter()
        .map(|p| {
            let (x, v) = (Vector::from_vec(p.x.clone()), Vector::from_vec(p.v.clone()));
            chart.norm(&x, &v).max(chart.norm(&x, &(-&v)))
        })
        .collect();
    let s: Vec<f64> = path.samples.iter().map(|p| p.s).collect();
    let m = vals.len();
    if m < 2 {
        return 0.0;
    }
    let h = s[1] - s[0];
    let uniform = s.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.max(1.0));
    if uniform && m % 2 == 1 {
        let mut acc = vals[0] + vals[m - 1];
        for (i, v) in vals.iter().enumerate().take(m - 1).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    } else {
        s.windows(2).zip(vals.windows(2)).map(|(s, v)| 0.5 * (s[1] - s[0]) * (v[0] + v[1])).sum()
    }
}

/// `d_m(a, b) = max{d(a, b), d(b, a)}`.
pub fn dm(chart: &FinslerChart, a: &Vector, b: &Vector) -> Result<f64> {
    let ab = distance(chart, a, b)?.d;
    if chart.is_reversible() {
        return Ok(ab);
    }
    Ok(ab.max(distance(chart, b, a)?.d))
}

/// Result of [`reverse_geodesic_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReverseCheck {
    pub is_geodesic: bool,
    pub residual: f64,
}

/// Integrates the spray from the end of `path` with velocity `-ċ(l)` and
/// compares with `c(l - s)`. Geodesics have constant speed, so if the
/// reversed curve is a geodesic it is reproduced with this parametrization.
pub fn reverse_geodesic_check(chart: &FinslerChart, path: &ChartGeodesic) -> ReverseCheck {
    let end = path.end();
    let back = -path.end_velocity();
    let len = path.length;
    let steps = path.samples.len().saturating_sub(1).max(16);
    let (samples, exit) = trace(chart, &end, &back, len / steps as f64, steps, true);
    if exit.is_some() {
        return ReverseCheck { is_geodesic: false, residual: f64::INFINITY };
    }
    let residual = samples
        .iter()
        .map(|p| {
            let (x, _) = path.at(len - p.s);
            (Vector::from_vec(p.x.clone()) - x).norm()
        })
        .fold(0.0, f64::max);
    ReverseCheck { is_geodesic: residual <= 1e-6, residual }
}
