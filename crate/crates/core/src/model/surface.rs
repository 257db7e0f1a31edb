//! Model surfaces: a warp, its curvature and the von Mangoldt classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::curvature::{curvature_from_warp, RadialCurvature};
use crate::model::warp::{warp_from_curvature, AnalyticWarp, WarpFunction};
use crate::numeric::roots::bisect;

/// Builtin surface families, addressable by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SurfaceFamily {
    Flat,
    Sinh {
        #[serde(default = "one")]
        k: f64,
    },
    Paraboloid {
        #[serde(default = "one")]
        a: f64,
    },
    GaussTanh,
    /// The curvature of `base` raised by `amplitude` on `[inner, outer]`,
    /// with the warp recomputed from the curvature ODE.
    Bumped {
        base: Box<SurfaceFamily>,
        amplitude: f64,
        inner: f64,
        outer: f64,
        #[serde(default = "default_ramp")]
        ramp: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn default_ramp() -> f64 {
    0.1
}

impl SurfaceFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SurfaceFamily::Flat => "flat",
            SurfaceFamily::Sinh { .. } => "sinh",
            SurfaceFamily::Paraboloid { .. } => "paraboloid",
            SurfaceFamily::GaussTanh => "gauss_tanh",
            SurfaceFamily::Bumped { .. } => "bumped",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            SurfaceFamily::Flat => "f(t) = t",
            SurfaceFamily::Sinh { .. } => "f(t) = sinh(k t)/k",
            SurfaceFamily::Paraboloid { .. } => "f(t) = t/sqrt(1 + t^2/a^2), G(t) = 3/(a^2 (1 + t^2/a^2)^2)",
            SurfaceFamily::GaussTanh => "f(t) = e^{-t^2} tanh t",
            SurfaceFamily::Bumped { .. } => "G(t) = G_base(t) + amplitude * bump(t), f solves f'' + G f = 0",
        }
    }

    fn analytic(&self) -> Option<AnalyticWarp> {
        match *self {
            SurfaceFamily::Flat => Some(AnalyticWarp::Flat),
            SurfaceFamily::Sinh { k } => Some(AnalyticWarp::Sinh { k }),
            SurfaceFamily::Paraboloid { a } => Some(AnalyticWarp::Paraboloid { a }),
            SurfaceFamily::GaussTanh => Some(AnalyticWarp::GaussTanh),
            SurfaceFamily::Bumped { .. } => None,
        }
    }

    fn curvature(&self) -> Result<RadialCurvature> {
        match self {
            SurfaceFamily::Bumped { base, amplitude, inner, outer, ramp } => {
                if !(inner < outer) || *ramp < 0.0 {
                    return Err(Error::InvalidInput(format!("bump needs inner < outer and ramp >= 0, got [{inner}, {outer}], {ramp}")));
                }
                Ok(base.curvature()?.with_bump(*amplitude, *inner, *outer, *ramp))
            }
            other => Ok(RadialCurvature::analytic(other.analytic().expect("analytic family"))),
        }
    }
}

/// Serializable description of a model surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(flatten)]
    pub family: SurfaceFamily,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
}

fn default_t_max() -> f64 {
    10.0
}

fn default_t_min() -> f64 {
    RadialCurvature::DEFAULT_T_MIN
}

impl SurfaceSpec {
    pub fn new(family: SurfaceFamily) -> Self {
        SurfaceSpec { family, t_max: default_t_max(), t_min: default_t_min() }
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }
}

/// Result of [`classify_model`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub von_mangoldt: bool,
    pub critical_radius: Option<f64>,
    pub g_at_rho: Option<f64>,
}

/// A point `(t, θ)` in geodesic polar coordinates about the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub t: f64,
    pub theta: f64,
}

impl ModelPoint {
    pub fn new(t: f64, theta: f64) -> Self {
        ModelPoint { t, theta: theta.rem_euclid(std::f64::consts::TAU) }
    }
}

/// Grid size used for the sampled von Mangoldt certificate.
pub const CLASSIFY_GRID: usize = 10_000;
/// Slack allowed in the monotonicity check of `G`.
pub const MONOTONE_TOL: f64 = 1e-9;

/// A surface of revolution `dt^2 + f(t)^2 dθ^2` with vertex at `t = 0`.
#[derive(Debug, Clone)]
pub struct ModelSurface {
    pub spec: SurfaceSpec,
    pub warp: WarpFunction,
    pub curvature: RadialCurvature,
    pub classification: Classification,
}

impl ModelSurface {
    pub fn build(spec: &SurfaceSpec) -> Result<Self> {
        if !(spec.t_min > 0.0 && spec.t_min < spec.t_max) {
            return Err(Error::InvalidInput(format!("need 0 < t_min < t_max, got {} and {}", spec.t_min, spec.t_max)));
        }
        let (warp, curvature) = match spec.family.analytic() {
            Some(a) => {
                let w = WarpFunction::analytic(a, spec.t_max);
                let g = curvature_from_warp(&w);
                (w, g)
            }
            None => {
                let g = spec.family.curvature()?;
                (warp_from_curvature(&g, spec.t_max, 1e-3)?, g)
            }
        };
        let curvature = curvature.with_t_min(spec.t_min);
        warp.check_invariants(spec.t_min, CLASSIFY_GRID)?;
        let mut surface = ModelSurface {
            spec: spec.clone(),
            warp,
            curvature,
            classification: Classification { von_mangoldt: false, critical_radius: None, g_at_rho: None },
        };
        let grid = surface.default_grid();
        let residual = surface.compatibility_residual(&grid);
        if residual > 1e-6 {
            return Err(Error::InvalidInput(format!("warp and curvature disagree: |f'' + G f| = {residual:e}")));
        }
        surface.classification = classify_model(&surface, &grid)?;
        Ok(surface)
    }

    pub fn flat() -> Self {
        Self::build(&SurfaceSpec::new(SurfaceFamily::Flat)).expect("flat plane")
    }

    pub fn gauss_tanh() -> Self {
        Self::build(&SurfaceSpec::new(SurfaceFamily::GaussTanh)).expect("gauss_tanh")
    }

    pub fn t_max(&self) -> f64 {
        self.spec.t_max
    }

    pub fn t_min(&self) -> f64 {
        self.spec.t_min
    }

    pub fn f(&self, t: f64) -> f64 {
        self.warp.value(t)
    }

    /// `(f, f')` at `t`.
    pub fn f_df(&self, t: f64) -> (f64, f64) {
        let (f, df, _) = self.warp.derivs(t);
        (f, df)
    }

    pub fn g(&self, t: f64) -> f64 {
        self.curvature.eval(t)
    }

    pub fn rho(&self) -> Option<f64> {
        self.classification.critical_radius
    }

    /// `CLASSIFY_GRID` evenly spaced radii on `[t_min, t_max]`.
    pub fn default_grid(&self) -> Vec<f64> {
        let (a, b) = (self.t_min(), self.t_max());
        (0..CLASSIFY_GRID).map(|i| a + (b - a) * i as f64 / (CLASSIFY_GRID - 1) as f64).collect()
    }

    /// `max |f'' + G f| / (1 + |f|)` on `grid`.
    pub fn compatibility_residual(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&t| {
                let (f, _, f2) = self.warp.derivs(t);
                (f2 + self.curvature.eval(t) * f).abs() / (1.0 + f.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Finds the critical radius (unique zero of `f'`) and checks that `G` is non-increasing.
pub fn classify_model(surface: &ModelSurface, grid: &[f64]) -> Result<Classification> {
    let von_mangoldt = surface.curvature.is_non_increasing(grid, MONOTONE_TOL);
    let slope = |t: f64| surface.warp.slope(t);
    let mut brackets = Vec::new();
    for w in grid.windows(2) {
        let (s0, s1) = (slope(w[0]), slope(w[1]));
        if s0 == 0.0 || s0.signum() != s1.signum() && s1 != 0.0 {
            brackets.push((w[0], w[1]));
        }
    }
    if brackets.len() > 1 {
        return Err(Error::MultipleCriticalRadii { count: brackets.len() });
    }
    let critical_radius = brackets.first().map(|&(a, b)| bisect(slope, a, b, 1e-15, 200).expect("bracketed"));
    Ok(Classification {
        von_mangoldt,
        critical_radius,
        g_at_rho: critical_radius.map(|r| surface.curvature.eval(r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_tanh_classification() {
        let s = ModelSurface::gauss_tanh();
        let c = s.classification;
        assert!(c.von_mangoldt);
        let rho = c.critical_radius.unwrap();
        assert!(s.warp.slope(rho).abs() <= 1e-10);
        assert!(rho > 0.5 && rho < 0.7, "{rho}");
        assert!(c.g_at_rho.unwrap() != 0.0);
    }

    #[test]
    fn flat_and_sinh_have_no_critical_radius() {
        for fam in [SurfaceFamily::Flat, SurfaceFamily::Sinh { k: 1.0 }] {
            let s = ModelSurface::build(&SurfaceSpec::new(fam).with_t_max(5.0)).unwrap();
            assert!(s.classification.von_mangoldt);
            assert!(s.classification.critical_radius.is_none());
        }
    }

    #[test]
    fn paraboloid_is_von_mangoldt() {
        let s = ModelSurface::build(&SurfaceSpec::new(SurfaceFamily::Paraboloid { a: 1.0 })).unwrap();
        assert!(s.classification.von_mangoldt);
        assert!(s.rho().is_none());
    }

    #[test]
    fn spec_roundtrips_through_toml() {
        let spec = SurfaceSpec {
            family: SurfaceFamily::Bumped {
                base: Box::new(SurfaceFamily::GaussTanh),
                amplitude: 0.2,
                inner: 1.2,
                outer: 2.4,
                ramp: 0.1,
            },
            t_max: 3.0,
            t_min: 1e-3,
        };
        let text = toml::to_string(&spec).unwrap();
        let back: SurfaceSpec = toml::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let plain: SurfaceSpec = toml::from_str("family = \"gauss_tanh\"").unwrap();
        assert_eq!(plain.t_max, 10.0);
        assert!(toml::from_str::<SurfaceSpec>("family = \"torus\"").is_err());
    }
}
