//! One-sided angles at a point of a geodesic, seen from a base point `p`,
//! from difference quotients of `d(p, ·)` normalized by `d_m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::chart::{FinslerChart, Vector};
use crate::finsler::geodesic::{distance, ChartGeodesic};

/// Largest step of the difference quotients.
pub const ANGLE_H0: f64 = 1e-2;
/// Spread of the extrapolated sequence that triggers [`Error::AngleUnstable`].
pub const ANGLE_SPREAD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Towards the end of the path.
    Forward,
    /// Towards the start of the path.
    Backward,
}

fn d_from(chart: &FinslerChart, p: &Vector, q: &Vector) -> Result<f64> {
    Ok(distance(chart, p, q)?.d)
}

/// `d_m(c(s0), c(s1))` for `s0 < s1` on a minimal unit-speed geodesic: the
/// forward distance is the arclength, only the reverse one needs shooting.
fn dm_along(chart: &FinslerChart, c: &ChartGeodesic, s0: f64, s1: f64) -> Result<f64> {
    let forward = s1 - s0;
    if chart.is_reversible() {
        return Ok(forward);
    }
    let (a, _) = c.at(s0);
    let (b, _) = c.at(s1);
    Ok(forward.max(d_from(chart, &b, &a)?))
}

/// Signed difference quotient at step `h`: the one whose limit is the
/// cosine for the backward angle and minus the cosine for the forward one.
pub fn difference_quotient(chart: &FinslerChart, p: &Vector, c: &ChartGeodesic, s: f64, h: f64, side: Side) -> Result<f64> {
    let (x, _) = c.at(s);
    let d0 = d_from(chart, p, &x)?;
    match side {
        Side::Forward => {
            let (y, _) = c.at(s + h);
            Ok((d_from(chart, p, &y)? - d0) / dm_along(chart, c, s, s + h)?)
        }
        Side::Backward => {
            let (y, _) = c.at(s - h);
            Ok((d0 - d_from(chart, p, &y)?) / dm_along(chart, c, s - h, s)?)
        }
    }
}

/// One-sided angle with Richardson extrapolation over `h0, h0/2, h0/4`.
pub fn angle(chart: &FinslerChart, p: &Vector, c: &ChartGeodesic, s: f64, h0: f64, side: Side) -> Result<f64> {
    let room = match side {
        Side::Forward => c.length - s,
        Side::Backward => s,
    };
    if !(room > 0.0) {
        return Err(Error::InvalidInput(format!("no room for a one-sided quotient at s = {s}")));
    }
    let h0 = h0.min(room);
    let q = [h0, 0.5 * h0, 0.25 * h0].map(|h| difference_quotient(chart, p, c, s, h, side));
    let [q0, q1, q2] = [q[0].clone()?, q[1].clone()?, q[2].clone()?];
    let r1 = 2.0 * q1 - q0;
    let r2 = 2.0 * q2 - q1;
    let spread = (r2 - r1).abs();
    if spread > ANGLE_SPREAD {
        return Err(Error::AngleUnstable { spread });
    }
    let limit = (4.0 * r2 - r1) / 3.0;
    let cos = match side {
        Side::Forward => -limit,
        Side::Backward => limit,
    };
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// `→∠(p c(s) c(l))`.
pub fn forward_angle(chart: &FinslerChart, p: &Vector, c: &ChartGeodesic, s: f64) -> Result<f64> {
    angle(chart, p, c, s, ANGLE_H0, Side::Forward)
}

/// `←∠(p c(s) c(0))`.
pub fn backward_angle(chart: &FinslerChart, p: &Vector, c: &ChartGeodesic, s: f64) -> Result<f64> {
    angle(chart, p, c, s, ANGLE_H0, Side::Backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::chart::{ChartFamily, ChartSpec, Domain};
    use crate::finsler::geodesic::{integrate_geodesic, CHART_STEP};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    #[test]
    fn euclidean_angles_match_inner_products() {
        let e = FinslerChart::euclidean(2, 10.0);
        let p = v(&[0.0, 0.0]);
        let dir = v(&[-0.6, 0.8]);
        let c = integrate_geodesic(&e, &v(&[3.0, 0.0]), &dir, 4.0, CHART_STEP).unwrap();
        for s in [0.0, 1.3, 2.5] {
            let (x, _) = c.at(s);
            let to_p = (&p - &x).normalize();
            let fwd = to_p.dot(&dir).acos();
            assert!((forward_angle(&e, &p, &c, s).unwrap() - fwd).abs() <= 1e-4);
        }
        for s in [1.3, 4.0] {
            let (x, _) = c.at(s);
            let to_p = (&p - &x).normalize();
            let bwd = to_p.dot(&(-&dir)).acos();
            assert!((backward_angle(&e, &p, &c, s).unwrap() - bwd).abs() <= 1e-4);
        }
    }

    #[test]
    fn radial_extension_gives_pi() {
        let e = FinslerChart::euclidean(2, 10.0);
        let c = integrate_geodesic(&e, &v(&[1.0, 1.0]), &v(&[0.6, 0.8]), 2.0, CHART_STEP).unwrap();
        let a = forward_angle(&e, &v(&[0.4, 0.2]), &c, 0.5).unwrap();
        assert!((a - std::f64::consts::PI).abs() <= 1e-3, "{a}");
    }

    #[test]
    fn randers_angle_matches_small_step_quotient() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Randers { alpha: vec![vec![1.0, 0.0], vec![0.0, 1.0]], b: vec![0.3, -0.2], db: None },
            domain: Domain::cube(2, 5.0),
        })
        .unwrap();
        let p = v(&[0.0, 0.0]);
        let x = v(&[2.0, 0.5]);
        let dir = v(&[-0.2, 1.0]);
        let u = &dir / c.norm(&x, &dir);
        let path = integrate_geodesic(&c, &x, &u, 1.5, CHART_STEP).unwrap();
        let a = forward_angle(&c, &p, &path, 0.0).unwrap();
        let q = difference_quotient(&c, &p, &path, 0.0, 1e-5, Side::Forward).unwrap();
        assert!((a - (-q).clamp(-1.0, 1.0).acos()).abs() <= 1e-4);
        let b = backward_angle(&c, &p, &path, 1.5).unwrap();
        let q = difference_quotient(&c, &p, &path, 1.5, 1e-5, Side::Backward).unwrap();
        assert!((b - q.clamp(-1.0, 1.0).acos()).abs() <= 1e-4);
    }
}
