//! Forward triangles in a chart and their comparison triangles on a model.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::{backward_angle, distance, forward_angle, reversed_length, ChartGeodesic, FinslerChart, Vector};
use crate::model::{model_distance, ModelGeodesic, ModelPoint, ModelSurface};
use crate::numeric::roots::illinois;

/// Side lengths realized by a comparison triangle must match the inputs to this.
pub const SIDE_TOL: f64 = 1e-6;

/// A geodesic triangle `p̃ x̃ ỹ` on a model with `x̃ = (t_x, 0)` and `ỹ = (t_y, Δθ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTriangle {
    pub t_x: f64,
    pub t_y: f64,
    pub side_xy: f64,
    pub delta_theta: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub angle_p: f64,
    /// `d̃(x̃, ỹ)` re-measured at the solved `Δθ`.
    pub realized_side: f64,
}

/// Interior angles at both ends of a model geodesic, measured against the
/// meridians through the vertex.
pub(crate) fn end_angles(surface: &ModelSurface, g: &ModelGeodesic) -> (f64, f64) {
    let a = g.samples[0];
    let b = g.end();
    let angle_x = (surface.f(a.t) * a.dtheta.abs()).atan2(-a.dt);
    let angle_y = (surface.f(b.t) * b.dtheta.abs()).atan2(b.dt);
    (angle_x, angle_y)
}

/// Places `x̃ = (t_x, 0)` and solves for `Δθ ∈ [0, π]` with
/// `d̃(x̃, (t_y, Δθ)) = side_xy`, using that the distance is non-decreasing in `Δθ`.
pub fn build_comparison_triangle(model: &ModelSurface, t_x: f64, t_y: f64, side_xy: f64) -> Result<ComparisonTriangle> {
    for t in [t_x, t_y] {
        if t <= model.t_min() || t > model.t_max() {
            return Err(Error::InvalidInput(format!("side t = {t} outside (t_min, t_max]")));
        }
    }
    let radial = (t_y - t_x).abs();
    if side_xy < radial - 1e-9 {
        return Err(Error::NotAdmissible(format!("side {side_xy} shorter than |t_y - t_x| = {radial}")));
    }
    if side_xy <= radial + 1e-12 {
        if radial == 0.0 {
            return Err(Error::NotAdmissible("x̃ and ỹ coincide".into()));
        }
        let (angle_x, angle_y) = if t_y > t_x { (PI, 0.0) } else { (0.0, PI) };
        return Ok(ComparisonTriangle { t_x, t_y, side_xy, delta_theta: 0.0, angle_x, angle_y, angle_p: 0.0, realized_side: radial });
    }
    let x = ModelPoint::new(t_x, 0.0);
    let measure = |dtheta: f64| model_distance(model, x, ModelPoint { t: t_y, theta: dtheta });
    let far = measure(PI)?.0;
    if side_xy > far + 1e-9 {
        return Err(Error::NotAdmissible(format!("side {side_xy} exceeds the largest distance {far} at Δθ = π")));
    }
    let dtheta = if side_xy >= far {
        PI
    } else {
        let residual = |th: f64| measure(th).map(|r| r.0 - side_xy).unwrap_or(f64::NAN);
        let root = illinois(residual, 0.0, radial - side_xy, PI, far - side_xy, 1e-15, 1e-13, 200)
            .ok_or_else(|| Error::NotAdmissible("Δθ search did not converge".into()))?;
        root.x
    };
    let (realized_side, g) = measure(dtheta)?;
    if (realized_side - side_xy).abs() > SIDE_TOL {
        return Err(Error::NotAdmissible(format!("realized side {realized_side} misses {side_xy}")));
    }
    let (angle_x, angle_y) = end_angles(model, &g);
    Ok(ComparisonTriangle { t_x, t_y, side_xy, delta_theta: dtheta, angle_x, angle_y, angle_p: dtheta, realized_side })
}

/// `(p, x, y; γ, σ, c)` with its interior angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardTriangle {
    pub p: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub gamma: ChartGeodesic,
    pub sigma: ChartGeodesic,
    pub c: ChartGeodesic,
    pub d_px: f64,
    pub d_py: f64,
    pub d_xy: f64,
    pub lm_xy: f64,
    pub angle_x: f64,
    pub angle_y: f64,
}

pub fn build_forward_triangle(chart: &FinslerChart, p: &Vector, x: &Vector, y: &Vector) -> Result<ForwardTriangle> {
    if p == x || p == y || x == y {
        return Err(Error::InvalidInput("triangle vertices must be distinct".into()));
    }
    let gamma = distance(chart, p, x)?;
    let sigma = distance(chart, p, y)?;
    let c = distance(chart, x, y)?;
    let lm_xy = reversed_length(chart, &c.path);
    let angle_x = forward_angle(chart, p, &c.path, 0.0)?;
    let angle_y = backward_angle(chart, p, &c.path, c.path.length)?;
    Ok(ForwardTriangle {
        p: p.iter().copied().collect(),
        x: x.iter().copied().collect(),
        y: y.iter().copied().collect(),
        gamma: gamma.path,
        sigma: sigma.path,
        c: c.path,
        d_px: gamma.d,
        d_py: sigma.d,
        d_xy: c.d,
        lm_xy,
        angle_x,
        angle_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::{ChartFamily, ChartSpec, Domain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    #[test]
    fn flat_right_triangle() {
        let tri = build_comparison_triangle(&ModelSurface::flat(), 3.0, 4.0, 5.0).unwrap();
        assert!((tri.angle_p - PI / 2.0).abs() <= 1e-8);
        assert!((tri.angle_x - (0.6f64).acos()).abs() <= 1e-8);
        let tri = build_comparison_triangle(&ModelSurface::flat(), 3.0, 5.0, 4.0).unwrap();
        assert!((tri.angle_x - PI / 2.0).abs() <= 1e-8);
    }

    #[test]
    fn flat_law_of_cosines_on_random_triples() {
        let flat = ModelSurface::flat();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (a, b): (f64, f64) = (rng.gen_range(0.5..4.0), rng.gen_range(0.5..4.0));
            let c = rng.gen_range((a - b).abs() + 0.05..a + b - 0.05);
            let tri = build_comparison_triangle(&flat, a, b, c).unwrap();
            let want_x = ((a * a + c * c - b * b) / (2.0 * a * c)).acos();
            let want_y = ((b * b + c * c - a * a) / (2.0 * b * c)).acos();
            let want_p = ((a * a + b * b - c * c) / (2.0 * a * b)).acos();
            assert!((tri.angle_x - want_x).abs() <= 1e-8, "{} vs {want_x}", tri.angle_x);
            assert!((tri.angle_y - want_y).abs() <= 1e-8);
            assert!((tri.angle_p - want_p).abs() <= 1e-8);
        }
    }

    #[test]
    fn degenerate_and_inadmissible_sides() {
        let flat = ModelSurface::flat();
        let tri = build_comparison_triangle(&flat, 1.0, 2.5, 1.5).unwrap();
        assert_eq!((tri.delta_theta, tri.angle_x, tri.angle_y), (0.0, PI, 0.0));
        assert!(matches!(build_comparison_triangle(&flat, 1.0, 2.5, 1.0), Err(Error::NotAdmissible(_))));
        assert!(matches!(build_comparison_triangle(&flat, 1.0, 2.5, 3.6), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn gauss_tanh_triangle_is_self_consistent() {
        let s = ModelSurface::gauss_tanh();
        let (far, _) = model_distance(&s, ModelPoint::new(1.2, 0.0), ModelPoint::new(1.5, PI)).unwrap();
        let side = 0.5 * (0.3 + far);
        let tri = build_comparison_triangle(&s, 1.2, 1.5, side).unwrap();
        assert!((tri.realized_side - side).abs() <= 1e-6);
        let (d, _) = model_distance(&s, ModelPoint::new(1.2, 0.0), ModelPoint::new(1.5, tri.delta_theta)).unwrap();
        assert!((d - side).abs() <= 1e-6);
        assert!(tri.angle_x > 0.0 && tri.angle_x < PI && tri.angle_y > 0.0 && tri.angle_y < PI);
    }

    #[test]
    fn euclidean_forward_triangle() {
        let e = FinslerChart::euclidean(2, 10.0);
        let t = build_forward_triangle(&e, &v(&[0.0, 0.0]), &v(&[3.0, 0.0]), &v(&[0.0, 4.0])).unwrap();
        assert!((t.angle_x - (0.6f64).acos()).abs() <= 1e-4);
        assert!((t.angle_y - (0.8f64).acos()).abs() <= 1e-4);
        assert!((t.lm_xy - t.d_xy).abs() <= 1e-8);
    }

    #[test]
    fn randers_forward_triangle_reversed_length() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Randers { alpha: vec![vec![1.0, 0.0], vec![0.0, 1.0]], b: vec![0.3, -0.2], db: None },
            domain: Domain::cube(2, 5.0),
        })
        .unwrap();
        let t = build_forward_triangle(&c, &v(&[0.0, 0.0]), &v(&[2.0, 0.0]), &v(&[0.5, 2.0])).unwrap();
        let chord = v(&[-1.5, 2.0]);
        let bu = (0.3 * chord[0] - 0.2 * chord[1]) / chord.norm();
        assert!(t.lm_xy > t.d_xy);
        assert!((t.lm_xy - (1.0 + f64::abs(bu)) * chord.norm()).abs() <= 1e-8);
    }
}
