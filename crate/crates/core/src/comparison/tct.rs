//! Numerical check of the triangle comparison theorem on a single forward triangle.

use serde::{Deserialize, Serialize};

use crate::comparison::critical::connector_velocities;
use crate::comparison::triangle::{build_comparison_triangle, build_forward_triangle, ComparisonTriangle, ForwardTriangle};
use crate::error::{Error, Result};
use crate::finsler::{reverse_geodesic_check, tangent_curvature, uniform_convexity_margin, ChartGeodesic, ConvexityMode, FinslerChart, Vector};
use crate::model::ModelSurface;
use crate::numeric::directions::unit_directions;

/// Sample densities and pass thresholds for the hypothesis checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TctOptions {
    pub along_c: usize,
    pub w_per_point: usize,
    pub tube_radius: f64,
    /// Every `tube_stride`-th point along `c` also gets tube offsets.
    pub tube_stride: usize,
    pub convexity_tol: f64,
    pub tangent_tol: f64,
    pub reverse_tol: f64,
}

impl Default for TctOptions {
    fn default() -> Self {
        Self { along_c: 32, w_per_point: 64, tube_radius: 0.05, tube_stride: 4, convexity_tol: 1e-9, tangent_tol: 1e-5, reverse_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TctHypotheses {
    pub outside_ball: bool,
    /// `min d(p, c(s))` over the samples, to compare with `ρ`.
    pub min_distance_to_p: f64,
    pub convexity_mode: ConvexityMode,
    pub convexity_margin: f64,
    pub tangent_curvature_max: f64,
    pub reverse_geodesic_residual: f64,
    pub sampled_points: usize,
}

impl TctHypotheses {
    pub fn pass(&self, opts: &TctOptions) -> bool {
        self.outside_ball
            && self.convexity_margin >= -opts.convexity_tol
            && self.tangent_curvature_max <= opts.tangent_tol
            && self.reverse_geodesic_residual <= opts.reverse_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TctReport {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub d_px: f64,
    pub d_py: f64,
    pub d_xy: f64,
    pub lm_xy: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub rho: f64,
    pub hypotheses: TctHypotheses,
    /// All hypothesis checks passed and a comparison triangle was built.
    pub admissible: bool,
    pub comparison: Option<ComparisonTriangle>,
    pub margin_x: Option<f64>,
    pub margin_y: Option<f64>,
    pub options: TctOptions,
}

/// Unit Euclidean normals to `v` in the chart.
fn normals(v: &Vector) -> Vec<Vector> {
    let u = v.normalize();
    if u.len() == 2 {
        return vec![Vector::from_vec(vec![-u[1], u[0]])];
    }
    let pick = if u[0].abs() < 0.9 { Vector::from_vec(vec![1.0, 0.0, 0.0]) } else { Vector::from_vec(vec![0.0, 1.0, 0.0]) };
    let a = (&pick - &u * pick.dot(&u)).normalize();
    let b = u.cross(&a);
    vec![a, b]
}

/// Points of `c` and of the surrounding tube where conditions (2) and (3)
/// are sampled; the flag marks points on `c` itself.
fn sample_points(chart: &FinslerChart, c: &ChartGeodesic, opts: &TctOptions) -> Vec<(Vector, bool)> {
    let n = opts.along_c.max(2);
    let mut out = Vec::new();
    for k in 0..n {
        let s = c.length * k as f64 / (n - 1) as f64;
        let (z, v) = c.at(s);
        if opts.tube_radius > 0.0 && opts.tube_stride > 0 && k % opts.tube_stride == 0 {
            for nrm in normals(&v) {
                for sign in [1.0, -1.0] {
                    let q = &z + &nrm * (sign * opts.tube_radius);
                    if chart.contains(&q) && !chart.is_pole(&q) {
                        out.push((q, false));
                    }
                }
            }
        }
        out.push((z, true));
    }
    out
}

fn check_hypotheses(chart: &FinslerChart, model: &ModelSurface, p: &Vector, c: &ChartGeodesic, rho: f64, opts: &TctOptions) -> Result<TctHypotheses> {
    let mode = match model.classification.g_at_rho {
        Some(g) if g.abs() < 1e-9 => ConvexityMode::NormDominates,
        _ => ConvexityMode::TensorDominates,
    };
    let ws: Vec<Vector> = unit_directions(chart.dim(), opts.w_per_point).into_iter().map(Vector::from_vec).collect();
    let points = sample_points(chart, c, opts);
    let mut min_d = f64::INFINITY;
    let mut convexity = f64::INFINITY;
    let mut tangent: f64 = 0.0;
    for (z, on_c) in &points {
        let (d, vs) = connector_velocities(chart, p, z)?;
        if *on_c {
            min_d = min_d.min(d);
        }
        for v in &vs {
            convexity = convexity.min(uniform_convexity_margin(chart, z, v, &ws, mode));
            for w in &ws {
                tangent = tangent.max(tangent_curvature(chart, z, v, w)?.abs());
            }
        }
    }
    let reverse = reverse_geodesic_check(chart, c);
    Ok(TctHypotheses {
        outside_ball: min_d > rho,
        min_distance_to_p: min_d,
        convexity_mode: mode,
        convexity_margin: convexity,
        tangent_curvature_max: tangent,
        reverse_geodesic_residual: reverse.residual,
        sampled_points: points.len(),
    })
}

/// Builds the forward triangle, checks the hypotheses along `c`, and when
/// they hold compares both angles with the model's comparison triangle.
pub fn verify_tct(chart: &FinslerChart, model: &ModelSurface, p: &Vector, x: &Vector, y: &Vector) -> Result<TctReport> {
    verify_tct_with(chart, model, p, x, y, &TctOptions::default())
}

pub fn verify_tct_with(chart: &FinslerChart, model: &ModelSurface, p: &Vector, x: &Vector, y: &Vector, opts: &TctOptions) -> Result<TctReport> {
    let rho = model.rho().ok_or_else(|| Error::HypothesisViolated("model has no critical radius".into()))?;
    let tri = build_forward_triangle(chart, p, x, y)?;
    let hyp = check_hypotheses(chart, model, p, &tri.c, rho, opts)?;
    let mut report = report_shell(&tri, rho, hyp, opts);
    if report.hypotheses.pass(opts) {
        let cmp = build_comparison_triangle(model, tri.d_px, tri.d_py, tri.lm_xy)?;
        report.margin_x = Some(tri.angle_x - cmp.angle_x);
        report.margin_y = Some(tri.angle_y - cmp.angle_y);
        report.comparison = Some(cmp);
        report.admissible = true;
    }
    Ok(report)
}

fn report_shell(tri: &ForwardTriangle, rho: f64, hypotheses: TctHypotheses, opts: &TctOptions) -> TctReport {
    TctReport {
        p: tri.p.clone(),
        x: tri.x.clone(),
        y: tri.y.clone(),
        d_px: tri.d_px,
        d_py: tri.d_py,
        d_xy: tri.d_xy,
        lm_xy: tri.lm_xy,
        angle_x: tri.angle_x,
        angle_y: tri.angle_y,
        rho,
        hypotheses,
        admissible: false,
        comparison: None,
        margin_x: None,
        margin_y: None,
        options: *opts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::{ChartFamily, ChartSpec, Domain};
    use crate::model::{SurfaceFamily, SurfaceSpec};

    fn gauss_chart() -> FinslerChart {
        FinslerChart::build(&ChartSpec {
            family: ChartFamily::WarpedPolar { surface: SurfaceSpec::new(SurfaceFamily::GaussTanh).with_t_max(3.0) },
            domain: Domain::new(vec![0.05, -10.0], vec![3.0, 10.0]),
        })
        .unwrap()
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    #[test]
    fn self_comparison_is_equality() {
        let chart = gauss_chart();
        let model = chart.model().unwrap().clone();
        let p = v(&[0.0, 0.0]);
        let r = verify_tct(&chart, &model, &p, &v(&[1.0, 0.0]), &v(&[1.3, 0.4])).unwrap();
        assert!(r.admissible, "{:?}", r.hypotheses);
        assert!(r.margin_x.unwrap().abs() <= 1e-3, "{:?}", r.margin_x);
        assert!(r.margin_y.unwrap().abs() <= 1e-3, "{:?}", r.margin_y);
        assert!(r.hypotheses.convexity_margin.abs() <= 1e-7);
    }

    #[test]
    fn ball_entry_is_reported_without_margins() {
        let chart = gauss_chart();
        let model = chart.model().unwrap().clone();
        let r = verify_tct(&chart, &model, &v(&[0.0, 0.0]), &v(&[0.9, 0.0]), &v(&[0.4, 1.0])).unwrap();
        assert!(!r.hypotheses.outside_ball, "{}", r.hypotheses.min_distance_to_p);
        assert!(!r.admissible && r.margin_x.is_none() && r.margin_y.is_none());
    }

    #[test]
    fn model_without_critical_radius_is_rejected() {
        let e = FinslerChart::euclidean(2, 5.0);
        let r = verify_tct(&e, &ModelSurface::flat(), &v(&[0.0, 0.0]), &v(&[1.0, 0.0]), &v(&[0.0, 1.0]));
        assert!(matches!(r, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn raised_curvature_gives_nonnegative_margins() {
        let bumped = SurfaceFamily::Bumped { base: Box::new(SurfaceFamily::GaussTanh), amplitude: 0.2, inner: 1.0, outer: 1.6, ramp: 0.1 };
        let chart = FinslerChart::build(&ChartSpec {
            family: ChartFamily::WarpedPolar { surface: SurfaceSpec::new(bumped).with_t_max(1.8) },
            domain: Domain::new(vec![0.05, -10.0], vec![1.8, 10.0]),
        })
        .unwrap();
        let model = ModelSurface::gauss_tanh();
        let p = v(&[0.0, 0.0]);
        for (x, y) in [([1.1, 0.0], [1.5, 0.3]), ([1.5, 0.0], [1.2, 0.8]), ([1.3, 0.0], [1.3, 1.5])] {
            let r = verify_tct(&chart, &model, &p, &v(&x), &v(&y)).unwrap();
            assert!(r.admissible, "{:?}", r.hypotheses);
            eprintln!("{:?} {:?} {:?}", r.margin_x, r.margin_y, r.comparison.as_ref().map(|c| c.delta_theta));
            assert!(r.margin_x.unwrap() >= -1e-3 && r.margin_y.unwrap() >= -1e-3);
        }
    }
}
