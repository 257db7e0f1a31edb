//! Warp functions `f` of model metrics `dt^2 + f(t)^2 dθ^2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::curvature::RadialCurvature;
use crate::numeric::dd::Dd;
use crate::numeric::{fd, hermite, ode::rk4_step};

/// Closed-form warp families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticWarp {
    /// `f(t) = t`, the Euclidean plane.
    Flat,
    /// `f(t) = sinh(k t) / k`, constant curvature `-k^2`.
    Sinh { k: f64 },
    /// `f(t) = t / sqrt(1 + t^2 / a^2)`, curvature `3 / (a^2 (1 + t^2/a^2)^2)`.
    ///
    /// Positively curved with `G` decreasing to zero and `f` saturating at `a`,
    /// the qualitative shape of a paraboloid of revolution.
    Paraboloid { a: f64 },
    /// `f(t) = exp(-t^2) tanh(t)`: von Mangoldt, `G(0+) = 8`, `G -> -inf`.
    GaussTanh,
}

impl AnalyticWarp {
    /// `(f, f', f'')` at `t`.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            AnalyticWarp::Flat => (t, 1.0, 0.0),
            AnalyticWarp::Sinh { k } => {
                let (s, c) = ((k * t).sinh(), (k * t).cosh());
                (s / k, c, k * s)
            }
            AnalyticWarp::Paraboloid { a } => {
                let q = 1.0 + t * t / (a * a);
                let f = t / q.sqrt();
                let f1 = q.powf(-1.5);
                let f2 = -3.0 * t / (a * a) * q.powf(-2.5);
                (f, f1, f2)
            }
            AnalyticWarp::GaussTanh => {
                let u = (-t * t).exp();
                let v = t.tanh();
                let sech2 = 1.0 - v * v;
                let du = -2.0 * t * u;
                let ddu = (4.0 * t * t - 2.0) * u;
                let dv = sech2;
                let ddv = -2.0 * v * sech2;
                (u * v, du * v + u * dv, ddu * v + 2.0 * du * dv + u * ddv)
            }
        }
    }

    /// Closed-form radial curvature `-f''/f`, with the pole limit at `t = 0`.
    pub fn curvature(&self, t: f64) -> f64 {
        match *self {
            AnalyticWarp::Flat => 0.0,
            AnalyticWarp::Sinh { k } => -k * k,
            AnalyticWarp::Paraboloid { a } => {
                let q = 1.0 + t * t / (a * a);
                3.0 / (a * a * q * q)
            }
            AnalyticWarp::GaussTanh => {
                if t < 1e-8 {
                    return 8.0;
                }
                // -(u''/u + 2 (u'/u)(v'/v) + v''/v) with u = e^{-t^2}, v = tanh t
                let v = t.tanh();
                let sech2 = 1.0 - v * v;
                -(4.0 * t * t - 2.0) + 4.0 * t * sech2 / v + 2.0 * sech2
            }
        }
    }

    /// [`AnalyticWarp::curvature`] in double-double arithmetic.
    pub fn curvature_dd(&self, t: Dd) -> Dd {
        match *self {
            AnalyticWarp::Flat => Dd::ZERO,
            AnalyticWarp::Sinh { k } => Dd::new(-k * k),
            AnalyticWarp::Paraboloid { a } => {
                let a2 = Dd::new(a) * Dd::new(a);
                let q = Dd::ONE + t.sqr() / a2;
                Dd::new(3.0) / (a2 * q.sqr())
            }
            AnalyticWarp::GaussTanh => {
                if t.hi == 0.0 {
                    return Dd::new(8.0);
                }
                // with e = exp(-2t): sech^2 = 4e/(1+e)^2 and sech^2/tanh = 4e/(1-e^2)
                let e = (t * -2.0).exp();
                let one = Dd::ONE;
                let sech2 = e * 4.0 / (one + e).sqr();
                let ratio = e * 4.0 / (one - e.sqr());
                Dd::new(2.0) - t.sqr() * 4.0 + t * ratio * 4.0 + sech2 * 2.0
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticWarp::Flat => "flat",
            AnalyticWarp::Sinh { .. } => "sinh",
            AnalyticWarp::Paraboloid { .. } => "paraboloid",
            AnalyticWarp::GaussTanh => "gauss_tanh",
        }
    }
}

/// Tabulated ODE solution of `f'' + G f = 0`, interpolated by cubic Hermite splines.
#[derive(Debug)]
pub struct WarpGrid {
    h: f64,
    f: Vec<f64>,
    df: Vec<f64>,
    curvature: RadialCurvature,
}

impl WarpGrid {
    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    fn derivs(&self, t: f64) -> (f64, f64, f64) {
        let last = self.f.len() - 2;
        let i = ((t / self.h).floor().max(0.0) as usize).min(last);
        let tau = t - i as f64 * self.h;
        let (t0, t1) = (i as f64 * self.h, (i + 1) as f64 * self.h);
        let dd0 = -self.curvature.eval(t0) * self.f[i];
        let dd1 = -self.curvature.eval(t1) * self.f[i + 1];
        let f = hermite(self.f[i], self.df[i], self.f[i + 1], self.df[i + 1], self.h, tau);
        let df = hermite(self.df[i], dd0, self.df[i + 1], dd1, self.h, tau);
        (f, df, -self.curvature.eval(t) * f)
    }
}

#[derive(Clone)]
enum WarpSource {
    Analytic(AnalyticWarp),
    Grid(Arc<WarpGrid>),
    Sampled(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A positive warp function on `(0, t_max]` with first and second derivatives.
#[derive(Clone)]
pub struct WarpFunction {
    source: WarpSource,
    t_max: f64,
}

impl fmt::Debug for WarpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = match &self.source {
            WarpSource::Analytic(a) => format!("{a:?}"),
            WarpSource::Grid(g) => format!("Grid(h = {}, nodes = {})", g.h, g.f.len()),
            WarpSource::Sampled(_) => "Sampled".to_string(),
        };
        f.debug_struct("WarpFunction").field("source", &src).field("t_max", &self.t_max).finish()
    }
}

impl WarpFunction {
    pub fn analytic(family: AnalyticWarp, t_max: f64) -> Self {
        WarpFunction { source: WarpSource::Analytic(family), t_max }
    }

    /// A warp known only through point evaluations; derivatives come from
    /// five-point central differences.
    pub fn sampled<F>(f: F, t_max: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WarpFunction { source: WarpSource::Sampled(Arc::new(f)), t_max }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn analytic_family(&self) -> Option<AnalyticWarp> {
        match self.source {
            WarpSource::Analytic(a) => Some(a),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&WarpGrid> {
        match &self.source {
            WarpSource::Grid(g) => Some(g),
            _ => None,
        }
    }

    /// `(f, f', f'')` at `t`.
    pub fn derivs(&self, t: f64) -> (f64, f64, f64) {
        match &self.source {
            WarpSource::Analytic(a) => a.derivs(t),
            WarpSource::Grid(g) => g.derivs(t),
            WarpSource::Sampled(f) => {
                let h = 1e-3f64.min(0.25 * t).max(1e-6);
                (f(t), fd::d1(|s| f(s), t, h), fd::d2(|s| f(s), t, h))
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match &self.source {
            WarpSource::Analytic(a) => a.derivs(t).0,
            WarpSource::Sampled(f) => f(t),
            WarpSource::Grid(_) => self.derivs(t).0,
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        self.derivs(t).1
    }

    /// Checks positivity on a grid and the `f(t)/t -> 1` pole behaviour.
    pub fn check_invariants(&self, t_min: f64, grid_points: usize) -> Result<()> {
        for k in 1..=grid_points {
            let t = t_min + (self.t_max - t_min) * k as f64 / grid_points as f64;
            if self.value(t) <= 0.0 {
                return Err(Error::WarpVanishes { t });
            }
        }
        for t in [1e-3, 1e-4] {
            let ratio = self.value(t) / t;
            if (ratio - 1.0).abs() > 0.01 {
                return Err(Error::InvalidInput(format!(
                    "f(t)/t = {ratio} at t = {t}: warp is not the odd extension with f'(0) = 1"
                )));
            }
        }
        Ok(())
    }
}

/// Solves `f'' + G f = 0`, `f(0) = 0`, `f'(0) = 1` by RK4 on a grid of spacing `<= step`.
pub fn warp_from_curvature(curvature: &RadialCurvature, t_max: f64, step: f64) -> Result<WarpFunction> {
    if !(step > 0.0) || !(t_max > 0.0) {
        return Err(Error::InvalidInput(format!("need step > 0 and t_max > 0, got {step}, {t_max}")));
    }
    let n = (t_max / step).ceil() as usize;
    let h = t_max / n as f64;
    let (f, df) = match curvature.eval_dd(Dd::ZERO) {
        Some(_) => solve_dd(curvature, h, n)?,
        None => solve_f64(curvature, h, n)?,
    };
    let grid = WarpGrid { h, f, df, curvature: curvature.clone() };
    Ok(WarpFunction { source: WarpSource::Grid(Arc::new(grid)), t_max })
}

fn vanishing_point(t0: f64, h: f64, f0: f64, f1: f64) -> Error {
    // linear estimate of the zero inside the last step
    let t = if f0 > 0.0 { t0 + h * f0 / (f0 - f1) } else { t0 };
    Error::WarpVanishes { t }
}

fn solve_f64(curvature: &RadialCurvature, h: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut f = Vec::with_capacity(n + 1);
    let mut df = Vec::with_capacity(n + 1);
    let mut y = [0.0, 1.0, 0.0];
    f.push(0.0);
    df.push(1.0);
    // state (f, f', t) keeps the right-hand side autonomous
    let rhs = |y: &[f64; 3]| [y[1], -curvature.eval(y[2]) * y[0], 1.0];
    for i in 1..=n {
        let prev = y;
        y = rk4_step(rhs, &y, h);
        y[2] = i as f64 * h;
        if y[0] <= 0.0 {
            return Err(vanishing_point((i - 1) as f64 * h, h, prev[0], y[0]));
        }
        f.push(y[0]);
        df.push(y[1]);
    }
    Ok((f, df))
}

/// Substep counts of the extrapolation sequence.
const GBS_SEQUENCE: [usize; 6] = [2, 4, 6, 8, 10, 12];

/// One Gragg-Bulirsch-Stoer step of `(f, f')' = (f', -G f)` in double-double.
fn gbs_step(curvature: &RadialCurvature, t0: Dd, y: [Dd; 2], big_h: Dd) -> [Dd; 2] {
    let rhs = |t: Dd, z: [Dd; 2]| -> [Dd; 2] {
        let g = curvature.eval_dd(t).unwrap_or_else(|| Dd::new(curvature.eval(t.to_f64())));
        [z[1], -(g * z[0])]
    };
    let mut prev_row: Vec<[Dd; 2]> = Vec::new();
    for (k, &n) in GBS_SEQUENCE.iter().enumerate() {
        let h = big_h / Dd::new(n as f64);
        let mut z_prev = y;
        let d = rhs(t0, y);
        let mut z = [y[0] + h * d[0], y[1] + h * d[1]];
        for m in 1..n {
            let d = rhs(t0 + h * Dd::new(m as f64), z);
            let next = [z_prev[0] + h * d[0] * 2.0, z_prev[1] + h * d[1] * 2.0];
            z_prev = z;
            z = next;
        }
        let d = rhs(t0 + big_h, z);
        let half = Dd::new(0.5);
        let mut row = Vec::with_capacity(k + 1);
        row.push([(z[0] + z_prev[0] + h * d[0]) * half, (z[1] + z_prev[1] + h * d[1]) * half]);
        // Neville extrapolation in h^2
        for j in 1..=k {
            let m = GBS_SEQUENCE[k - j];
            let denom = Dd::new((n * n) as f64) / Dd::new((m * m) as f64) - Dd::ONE;
            let (cur, lower) = (row[j - 1], prev_row[j - 1]);
            row.push([cur[0] + (cur[0] - lower[0]) / denom, cur[1] + (cur[1] - lower[1]) / denom]);
        }
        prev_row = row;
    }
    prev_row[GBS_SEQUENCE.len() - 1]
}

fn solve_dd(curvature: &RadialCurvature, h: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut f = Vec::with_capacity(n + 1);
    let mut df = Vec::with_capacity(n + 1);
    let mut y = [Dd::ZERO, Dd::ONE];
    f.push(0.0);
    df.push(1.0);
    let big_h = Dd::new(h);
    for i in 1..=n {
        let prev = y;
        y = gbs_step(curvature, Dd::new(h) * Dd::new((i - 1) as f64), y, big_h);
        if y[0].hi <= 0.0 {
            return Err(vanishing_point((i - 1) as f64 * h, h, prev[0].to_f64(), y[0].to_f64()));
        }
        f.push(y[0].to_f64());
        df.push(y[1].to_f64());
    }
    Ok((f, df))
}
