//! Adjacent comparison triangles along a subdivided segment, the broken
//! geodesic they span on the model, and the single geodesic passing under it.
//!
//! Panel geodesics are represented as `t`-monotone Clairaut arcs, with
//! lengths carried as an excess over `|Δt|` so that chains reaching radii
//! where `f` is far below machine resolution keep their information.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::comparison::triangle::build_comparison_triangle;
use crate::error::{Error, Result};
use crate::model::clairaut::{arc_excess, arc_nu_for_excess, arc_nu_for_theta, arc_t_at_theta, arc_theta, inverse_square_integral};
use crate::model::ModelSurface;

/// Allowed excess of a hinge angle sum over π.
pub const HINGE_TOL: f64 = 1e-6;
/// Allowed excess of `L(η̃)` over `L(ξ̂)`, and of `t(η̃)` over `t(ξ̂)` at matched θ.
pub const CHAIN_TOL: f64 = 1e-6;
/// Points of the shared θ grid for the passing-under check.
pub const UNDER_GRID: usize = 64;
const SAMPLES_PER_PANEL: usize = 16;

/// One panel `(t_{l-1}, t_l, side_l)`. `excess`, when given, is
/// `side - |t_l - t_{l-1}|` at full precision and takes precedence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelSide {
    pub t0: f64,
    pub t1: f64,
    pub side: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excess: Option<f64>,
}

impl PanelSide {
    pub fn new(t0: f64, t1: f64, side: f64) -> Self {
        Self { t0, t1, side, excess: None }
    }

    fn excess(&self) -> f64 {
        self.excess.unwrap_or(self.side - (self.t1 - self.t0).abs()).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelMethod {
    /// `t`-monotone arc solved from the side excess.
    MonotoneArc,
    /// Bisection in `Δθ` on the model distance.
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainPanel {
    pub t0: f64,
    pub t1: f64,
    pub side: f64,
    pub excess: f64,
    pub nu: f64,
    pub theta_start: f64,
    pub delta_theta: f64,
    pub angle_x: f64,
    pub angle_y: f64,
    pub angle_p: f64,
    pub method: PanelMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    pub t: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnderPassing {
    pub nu: f64,
    pub length: f64,
    pub excess: f64,
    /// Angle between `η̃'(0)` and `∂_t`.
    pub start_angle: f64,
    /// `π - ∠x̃` of the first panel, which the start angle should equal.
    pub start_angle_from_panel: f64,
    pub samples: Vec<ChainSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClairautEstimate {
    pub t_x: f64,
    pub r: f64,
    /// `4 t_x`.
    pub lhs: f64,
    /// `ν² ∫_{t_x}^{r} f⁻²`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// Arclength parameters `s_0 = 0 < s_1 < ... < s_k` of the subdivision.
    pub subdivision: Vec<f64>,
    pub panels: Vec<ChainPanel>,
    /// `∠ỹ` of panel `l` plus `∠x̃` of panel `l + 1`, at each interior vertex.
    pub hinge_sums: Vec<f64>,
    pub xi: Vec<ChainSample>,
    pub eta: UnderPassing,
    pub length_xi: f64,
    pub length_eta: f64,
    /// `L(ξ̂) - L(η̃)`, from the excesses.
    pub length_gap: f64,
    /// `min (t(ξ̂) - t(η̃))` at matched θ.
    pub under_margin: f64,
    pub passes_under: bool,
    pub estimate: ClairautEstimate,
}

fn monotone_panel(model: &ModelSurface, p: &PanelSide) -> Option<(f64, f64)> {
    let excess = p.excess();
    if excess == 0.0 {
        return Some((0.0, 0.0));
    }
    let nu = arc_nu_for_excess(model, p.t0, p.t1, excess)?;
    Some((nu, arc_theta(model, nu, p.t0, p.t1)))
}

fn build_panel(model: &ModelSurface, p: &PanelSide, theta_start: f64) -> Result<ChainPanel> {
    if p.t0 == p.t1 {
        return Err(Error::NotAdmissible("panels must change t".into()));
    }
    let outward = p.t1 > p.t0;
    if let Some((nu, dtheta)) = monotone_panel(model, p) {
        let a0 = (nu / model.f(p.t0)).clamp(0.0, 1.0).asin();
        let a1 = (nu / model.f(p.t1)).clamp(0.0, 1.0).asin();
        let (angle_x, angle_y) = if outward { (PI - a0, a1) } else { (a0, PI - a1) };
        return Ok(ChainPanel {
            t0: p.t0,
            t1: p.t1,
            side: p.side,
            excess: p.excess(),
            nu,
            theta_start,
            delta_theta: dtheta,
            angle_x,
            angle_y,
            angle_p: dtheta,
            method: PanelMethod::MonotoneArc,
        });
    }
    let tri = build_comparison_triangle(model, p.t0, p.t1, p.side)?;
    let nu = model.f(p.t0) * tri.angle_x.sin();
    Ok(ChainPanel {
        t0: p.t0,
        t1: p.t1,
        side: p.side,
        excess: p.excess(),
        nu,
        theta_start,
        delta_theta: tri.delta_theta,
        angle_x: tri.angle_x,
        angle_y: tri.angle_y,
        angle_p: tri.angle_p,
        method: PanelMethod::Bisection,
    })
}

/// `(t, θ)` along a monotone arc at `n + 1` radii.
fn arc_samples(model: &ModelSurface, nu: f64, t0: f64, t1: f64, theta0: f64, n: usize) -> Vec<ChainSample> {
    let mut out = vec![ChainSample { t: t0, theta: theta0 }];
    let mut theta = theta0;
    for k in 1..=n {
        let a = t0 + (t1 - t0) * (k - 1) as f64 / n as f64;
        let b = t0 + (t1 - t0) * k as f64 / n as f64;
        theta += arc_theta(model, nu, a, b);
        out.push(ChainSample { t: b, theta });
    }
    out
}

/// Lays the panels side by side about `p̃`, checks the hinges, and compares
/// the broken geodesic with the single monotone geodesic between its ends.
pub fn broken_geodesic_chain(model: &ModelSurface, panel_sides: &[PanelSide]) -> Result<ChainReport> {
    if panel_sides.is_empty() {
        return Err(Error::InvalidInput("a chain needs at least one panel".into()));
    }
    if panel_sides.windows(2).any(|w| w[0].t1 != w[1].t0) {
        return Err(Error::InvalidInput("consecutive panels must share a vertex".into()));
    }
    let mut panels = Vec::with_capacity(panel_sides.len());
    let mut theta = 0.0;
    for p in panel_sides {
        let panel = build_panel(model, p, theta)?;
        theta += panel.delta_theta;
        panels.push(panel);
    }
    let mut hinge_sums = Vec::new();
    for (l, w) in panels.windows(2).enumerate() {
        let sum = w[0].angle_y + w[1].angle_x;
        if sum > PI + HINGE_TOL {
            return Err(Error::HingeViolated { index: l + 1, sum });
        }
        hinge_sums.push(sum);
    }

    let t_x = panel_sides[0].t0;
    let r = panel_sides[panel_sides.len() - 1].t1;
    let total_theta = theta;
    let monotone = panel_sides.iter().all(|p| (p.t1 > p.t0) == (r > t_x));
    if !monotone || t_x == r {
        return Err(Error::InvalidInput("chains must be monotone in t".into()));
    }
    let eta_nu = if total_theta == 0.0 {
        0.0
    } else {
        arc_nu_for_theta(model, t_x, r, total_theta).ok_or_else(|| Error::NotAdmissible("no monotone geodesic sweeps the chain's angle".into()))?
    };
    let eta_excess = arc_excess(model, eta_nu, t_x, r);
    let xi_excess: f64 = panels.iter().map(|p| p.excess).sum();
    let dt = (r - t_x).abs();
    let start_angle = {
        let a = (eta_nu / model.f(t_x)).clamp(0.0, 1.0).asin();
        if r > t_x { a } else { PI - a }
    };

    let mut xi = Vec::new();
    let mut subdivision = vec![0.0];
    for p in &panels {
        let mut s = arc_samples(model, p.nu, p.t0, p.t1, p.theta_start, SAMPLES_PER_PANEL);
        if !xi.is_empty() {
            s.remove(0);
        }
        xi.extend(s);
        subdivision.push(subdivision.last().copied().unwrap_or(0.0) + p.side);
    }
    let eta_samples = arc_samples(model, eta_nu, t_x, r, 0.0, SAMPLES_PER_PANEL * panels.len());

    let mut under_margin = f64::INFINITY;
    if total_theta > 0.0 {
        for k in 1..UNDER_GRID {
            let th = total_theta * k as f64 / UNDER_GRID as f64;
            let t_eta = arc_t_at_theta(model, eta_nu, t_x, r, th);
            let l = panels.iter().rposition(|p| p.theta_start <= th).unwrap_or(0);
            let p = &panels[l];
            let t_xi = if p.nu == 0.0 { p.t0 } else { arc_t_at_theta(model, p.nu, p.t0, p.t1, th - p.theta_start) };
            let sign = if r > t_x { 1.0 } else { -1.0 };
            under_margin = under_margin.min(sign * (t_xi - t_eta));
        }
    }

    let rhs = eta_nu * eta_nu * inverse_square_integral(model, t_x, r);
    let lhs = 4.0 * t_x;
    Ok(ChainReport {
        subdivision,
        hinge_sums,
        xi,
        eta: UnderPassing {
            nu: eta_nu,
            length: dt + eta_excess,
            excess: eta_excess,
            start_angle,
            start_angle_from_panel: PI - panels[0].angle_x,
            samples: eta_samples,
        },
        panels,
        length_xi: dt + xi_excess,
        length_eta: dt + eta_excess,
        length_gap: xi_excess - eta_excess,
        passes_under: under_margin >= -CHAIN_TOL,
        under_margin,
        estimate: ClairautEstimate { t_x, r, lhs, rhs, holds: lhs >= rhs },
    })
}

/// Panels cut from the monotone model geodesic from `(t_x, 0)` to
/// `(r, θ_end)` at `count` equal steps in `t`, with exact side excesses.
pub fn geodesic_panels(model: &ModelSurface, t_x: f64, r: f64, theta_end: f64, count: usize) -> Result<(f64, Vec<PanelSide>)> {
    if count == 0 {
        return Err(Error::InvalidInput("need at least one panel".into()));
    }
    let nu = arc_nu_for_theta(model, t_x, r, theta_end).ok_or_else(|| Error::NotAdmissible(format!("no monotone geodesic from t = {t_x} to {r} sweeps {theta_end}")))?;
    let panels = (0..count)
        .map(|k| {
            let a = t_x + (r - t_x) * k as f64 / count as f64;
            let b = t_x + (r - t_x) * (k + 1) as f64 / count as f64;
            let excess = arc_excess(model, nu, a, b);
            PanelSide { t0: a, t1: b, side: (b - a).abs() + excess, excess: Some(excess) }
        })
        .collect();
    Ok((nu, panels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{model_distance, ModelPoint, SurfaceFamily, SurfaceSpec};

    #[test]
    fn flat_colinear_panels_form_a_segment() {
        let flat = ModelSurface::flat();
        // the line y = 1 in the plane, cut at x = 0.5, 1, 2, 3
        let xs = [0.5f64, 1.0, 2.0, 3.0];
        let ts: Vec<f64> = xs.iter().map(|x| x.hypot(1.0)).collect();
        let panels: Vec<PanelSide> = (0..3).map(|k| PanelSide::new(ts[k], ts[k + 1], xs[k + 1] - xs[k])).collect();
        let r = broken_geodesic_chain(&flat, &panels).unwrap();
        assert!((r.eta.nu - 1.0).abs() <= 1e-8, "{}", r.eta.nu);
        assert!(r.length_gap.abs() <= 1e-8);
        assert!((r.length_eta - 2.5).abs() <= 1e-8);
        for h in &r.hinge_sums {
            assert!((h - PI).abs() <= 1e-8);
        }
        assert!(r.passes_under && r.under_margin.abs() <= 1e-6);
        let want = (1.0f64).atan2(3.0) - (1.0f64).atan2(0.5);
        let swept: f64 = r.panels.iter().map(|p| p.delta_theta).sum();
        assert!((swept + want).abs() <= 1e-8);
    }

    #[test]
    fn subdivided_geodesic_is_reproduced() {
        let s = ModelSurface::gauss_tanh();
        let (nu, panels) = geodesic_panels(&s, 1.2, 2.5, 0.5, 6).unwrap();
        let r = broken_geodesic_chain(&s, &panels).unwrap();
        assert!((r.eta.nu - nu).abs() <= 1e-6 * nu);
        let end = r.xi.last().unwrap();
        assert!((end.theta - 0.5).abs() <= 1e-4 && (end.t - 2.5).abs() <= 1e-12);
        assert!(r.length_gap.abs() <= 1e-6 && r.under_margin.abs() <= 1e-4);
        assert!((r.eta.start_angle - r.eta.start_angle_from_panel).abs() <= 1e-8);
    }

    #[test]
    fn monotone_panel_matches_bisection() {
        let s = ModelSurface::gauss_tanh();
        let p = PanelSide::new(1.2, 1.6, 0.45);
        let arc = build_panel(&s, &p, 0.0).unwrap();
        let tri = build_comparison_triangle(&s, 1.2, 1.6, 0.45).unwrap();
        assert_eq!(arc.method, PanelMethod::MonotoneArc);
        assert!((arc.delta_theta - tri.delta_theta).abs() <= 1e-6);
        assert!((arc.angle_x - tri.angle_x).abs() <= 1e-6);
        assert!((arc.angle_y - tri.angle_y).abs() <= 1e-6);
        let (d, _) = model_distance(&s, ModelPoint::new(1.2, 0.0), ModelPoint::new(1.6, arc.delta_theta)).unwrap();
        assert!((d - 0.45).abs() <= 1e-6);
    }

    #[test]
    fn bent_chain_is_shortcut_from_below() {
        let s = ModelSurface::gauss_tanh();
        // ν grows from panel to panel, so every hinge is strictly below π
        let panels = [PanelSide::new(1.2, 1.5, 0.3 + 1e-6), PanelSide::new(1.5, 1.8, 0.3 + 1e-4), PanelSide::new(1.8, 2.1, 0.3 + 1e-3)];
        let r = broken_geodesic_chain(&s, &panels).unwrap();
        assert!(r.hinge_sums.iter().all(|h| *h < PI));
        assert!(r.length_gap > 0.0, "{}", r.length_gap);
        assert!(r.passes_under && r.under_margin > 0.0);
        assert!(r.estimate.holds);
    }

    #[test]
    fn shrinking_clairaut_constant_breaks_a_hinge() {
        let s = ModelSurface::gauss_tanh();
        let panels = [PanelSide::new(1.2, 1.5, 0.32), PanelSide::new(1.5, 1.8, 0.3 + 1e-5)];
        assert!(matches!(broken_geodesic_chain(&s, &panels), Err(Error::HingeViolated { index: 1, .. })));
    }

    #[test]
    fn clairaut_constant_decays_with_the_far_end() {
        let s = ModelSurface::build(&SurfaceSpec::new(SurfaceFamily::GaussTanh).with_t_max(9.0)).unwrap();
        let mut last = f64::INFINITY;
        for r_end in [3.0, 5.0, 8.0] {
            let (_, panels) = geodesic_panels(&s, 1.2, r_end, 0.5, 8).unwrap();
            let r = broken_geodesic_chain(&s, &panels).unwrap();
            assert!(r.estimate.holds);
            assert!(r.eta.nu < last);
            assert!(r.length_gap >= -CHAIN_TOL && r.passes_under);
            last = r.eta.nu;
        }
    }

    #[test]
    fn discontinuous_panels_are_rejected() {
        let s = ModelSurface::gauss_tanh();
        let panels = [PanelSide::new(1.2, 1.5, 0.32), PanelSide::new(1.6, 1.8, 0.3)];
        assert!(matches!(broken_geodesic_chain(&s, &panels), Err(Error::InvalidInput(_))));
    }
}
