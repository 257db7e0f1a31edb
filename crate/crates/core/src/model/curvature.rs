//! Radial curvature `G(t)` of a model surface.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::warp::{AnalyticWarp, WarpFunction};
use crate::numeric::dd::Dd;

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Analytic(AnalyticWarp),
    FromWarp(WarpFunction),
    Bump { base: Arc<RadialCurvature>, amplitude: f64, inner: f64, outer: f64, ramp: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A radial curvature function with a pole-exclusion radius.
///
/// [`RadialCurvature::at`] enforces the exclusion radius; [`RadialCurvature::eval`]
/// does not and is what the ODE solvers call, since they start at the pole.
#[derive(Clone)]
pub struct RadialCurvature {
    kind: Kind,
    t_min: f64,
}

impl fmt::Debug for RadialCurvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(c) => write!(f, "Constant({c})"),
            Kind::Analytic(a) => write!(f, "Analytic({a:?})"),
            Kind::FromWarp(w) => write!(f, "FromWarp({w:?})"),
            Kind::Bump { base, amplitude, inner, outer, ramp } => {
                write!(f, "Bump({base:?} + {amplitude} on [{inner}, {outer}], ramp {ramp})")
            }
            Kind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Quintic smoothstep: `C^2`, 0 below 0, 1 above 1.
fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

fn smootherstep_dd(x: Dd) -> Dd {
    if x.hi <= 0.0 {
        return Dd::ZERO;
    }
    if x.hi >= 1.0 {
        return Dd::ONE;
    }
    x * x * x * (x * (x * 6.0 - Dd::new(15.0)) + Dd::new(10.0))
}

fn bump_weight(t: f64, inner: f64, outer: f64, ramp: f64) -> f64 {
    if ramp > 0.0 {
        smootherstep((t - inner) / ramp) * smootherstep((outer - t) / ramp)
    } else if (inner..=outer).contains(&t) {
        1.0
    } else {
        0.0
    }
}

impl RadialCurvature {
    pub const DEFAULT_T_MIN: f64 = 1e-3;

    fn new(kind: Kind) -> Self {
        RadialCurvature { kind, t_min: Self::DEFAULT_T_MIN }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Kind::Constant(c))
    }

    pub fn analytic(family: AnalyticWarp) -> Self {
        Self::new(Kind::Analytic(family))
    }

    pub fn custom<F>(g: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(Kind::Custom(Arc::new(g)))
    }

    /// `base + amplitude` on `[inner, outer]`, blended in and out over `ramp`
    /// with a `C^2` smoothstep so that the warp stays `C^4`.
    pub fn with_bump(&self, amplitude: f64, inner: f64, outer: f64, ramp: f64) -> Self {
        RadialCurvature {
            kind: Kind::Bump { base: Arc::new(self.clone()), amplitude, inner, outer, ramp },
            t_min: self.t_min,
        }
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = t_min;
        self
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// `G(t)` with no pole check.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::Analytic(a) => a.curvature(t),
            Kind::FromWarp(w) => {
                // difference quotients lose all accuracy next to the pole
                let t = t.max(self.t_min);
                let (f, _, f2) = w.derivs(t);
                -f2 / f
            }
            Kind::Bump { base, amplitude, inner, outer, ramp } => {
                base.eval(t) + amplitude * bump_weight(t, *inner, *outer, *ramp)
            }
            Kind::Custom(g) => g(t),
        }
    }

    /// `G(t)` in double-double arithmetic, for the kinds that have an exact formula.
    pub fn eval_dd(&self, t: Dd) -> Option<Dd> {
        match &self.kind {
            Kind::Constant(c) => Some(Dd::new(*c)),
            Kind::Analytic(a) => Some(a.curvature_dd(t)),
            Kind::Bump { base, amplitude, inner, outer, ramp } => {
                let base = base.eval_dd(t)?;
                let w = if *ramp > 0.0 {
                    let r = Dd::new(*ramp);
                    smootherstep_dd((t - Dd::new(*inner)) / r) * smootherstep_dd((Dd::new(*outer) - t) / r)
                } else {
                    Dd::new(bump_weight(t.to_f64(), *inner, *outer, *ramp))
                };
                Some(base + w * *amplitude)
            }
            Kind::FromWarp(_) | Kind::Custom(_) => None,
        }
    }

    /// `G(t)`, refusing evaluation inside the pole-exclusion disc.
    pub fn at(&self, t: f64) -> Result<f64> {
        if t < self.t_min {
            return Err(Error::PoleTooClose { t, t_min: self.t_min });
        }
        Ok(self.eval(t))
    }

    /// Whether `G` is non-increasing on `grid` up to `tol`.
    pub fn is_non_increasing(&self, grid: &[f64], tol: f64) -> bool {
        grid.windows(2).all(|w| self.eval(w[1]) <= self.eval(w[0]) + tol)
    }
}

/// `G = -f''/f`, using the family's closed form when one exists.
pub fn curvature_from_warp(warp: &WarpFunction) -> RadialCurvature {
    match warp.analytic_family() {
        Some(a) => RadialCurvature::analytic(a),
        None => RadialCurvature::new(Kind::FromWarp(warp.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::warp::warp_from_curvature;

    #[test]
    fn gauss_tanh_example_values() {
        let w = WarpFunction::analytic(AnalyticWarp::GaussTanh, 10.0);
        let g = curvature_from_warp(&w);
        let g0 = g.at(1e-3).unwrap();
        assert!((g0 - 8.0).abs() <= 0.08, "{g0}");
        assert!(g.at(3.0).unwrap() < 0.0);
        let grid: Vec<f64> = (0..10_000).map(|i| 0.01 + 3.99 * i as f64 / 9_999.0).collect();
        assert!(g.is_non_increasing(&grid, 1e-9));
        assert!(matches!(g.at(1e-4), Err(Error::PoleTooClose { .. })));
    }

    #[test]
    fn sampled_warp_curvature_matches_closed_form() {
        let w = WarpFunction::sampled(|t| (-t * t).exp() * t.tanh(), 10.0);
        let g = curvature_from_warp(&w);
        for &t in &[0.05, 0.5, 1.0, 2.0, 3.0] {
            let exact = AnalyticWarp::GaussTanh.curvature(t);
            assert!((g.eval(t) - exact).abs() < 1e-4 * (1.0 + exact.abs()), "t = {t}");
        }
    }

    #[test]
    fn roundtrip_builtin_warps() {
        for fam in [AnalyticWarp::Flat, AnalyticWarp::Sinh { k: 1.0 }, AnalyticWarp::GaussTanh] {
            let w = WarpFunction::analytic(fam, 5.0);
            let back = warp_from_curvature(&curvature_from_warp(&w), 5.0, 1e-3).unwrap();
            for k in 0..=1000 {
                let t = 0.01 + 4.99 * k as f64 / 1000.0;
                let rel = (back.value(t) - w.value(t)).abs() / w.value(t);
                assert!(rel <= 1e-5, "{fam:?} at {t}: {rel}");
            }
        }
    }

    #[test]
    fn bump_is_localized() {
        let g = RadialCurvature::constant(-1.0).with_bump(0.2, 1.0, 2.0, 0.25);
        assert_eq!(g.eval(0.5), -1.0);
        assert_eq!(g.eval(2.5), -1.0);
        assert!((g.eval(1.5) + 0.8).abs() < 1e-15);
        assert!(g.eval(1.1) > -1.0 && g.eval(1.1) < -0.8);
    }
}
