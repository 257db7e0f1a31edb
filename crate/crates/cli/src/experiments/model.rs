use std::f64::consts::{PI, TAU};

use toponogov::comparison::{broken_geodesic_chain, geodesic_panels};
use toponogov::model::clairaut::length_lower_bound;
use toponogov::model::{cut_locus, first_conjugate_point, integrate_geodesic, warp_from_curvature, CutLocus, ModelPoint, ModelSurface};

use super::{max_of, min_of, surface, Ctx};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};
use crate::scenario::{ChainDemo, CutExpectation, GeodesicTrace, ModelBuild, Scenario};

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

pub fn model_build(sc: &Scenario, cfg: &ModelBuild, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let s = surface(sc)?;
    let mut out = Outcome::default();

    let mut profile = Table::new("profile", &["t", "f", "df", "G"]);
    for t in linspace(s.t_min(), s.t_max(), cfg.profile_points) {
        let (f, df) = s.f_df(t);
        profile.push(vec![t.into(), f.into(), df.into(), s.g(t).into()]);
    }
    out.tables.push(profile);

    let mut summary = Table::new("model_summary", &["quantity", "value"]);
    summary.push(vec!["von_mangoldt".into(), s.classification.von_mangoldt.into()]);
    summary.push(vec!["rho".into(), s.rho().into()]);
    summary.push(vec!["G_at_rho".into(), s.classification.g_at_rho.into()]);

    if let Some(c) = &cfg.curvature_limit {
        let g = s.g(c.t);
        summary.push(vec![format!("G({})", c.t).into(), g.into()]);
        out.check(Check::at_most("curvature_limit", &format!("|G({}) - {}| / {}", c.t, c.expected, c.expected), ((g - c.expected) / c.expected).abs(), ctx.tol(c.rel_tol)));
    }
    if let Some(m) = &cfg.monotone {
        let gs: Vec<f64> = linspace(m.lo, m.hi, m.points).map(|t| s.g(t)).collect();
        let rise = max_of(gs.windows(2).map(|w| w[1] - w[0]));
        out.check(Check::at_most("curvature_non_increasing", &format!("max G(t_i+1) - G(t_i) on {} points over [{}, {}]", m.points, m.lo, m.hi), rise, ctx.tol(m.tol)));
    }
    if let Some(t) = cfg.negative_at {
        out.check(Check::below("curvature_sign_change", &format!("G({t}) < 0"), s.g(t), 0.0));
    }
    if let Some(expect) = cfg.expect_von_mangoldt {
        out.check(Check::holds("von_mangoldt", &format!("von Mangoldt classification is {expect}"), s.classification.von_mangoldt == expect));
        if expect && s.f_df(s.t_max()).1 < 0.0 {
            out.check(Check::holds("critical_radius_found", "f' has a zero in the domain", s.rho().is_some()));
        }
    }
    if let Some(r) = &cfg.roundtrip {
        let w = warp_from_curvature(&s.curvature, r.hi, r.step)?;
        let mut table = Table::new("roundtrip", &["t", "f_reference", "f_from_curvature", "rel_error"]);
        let mut worst: f64 = 0.0;
        for t in linspace(r.lo, r.hi, r.points) {
            let (a, b) = (s.f(t), w.value(t));
            let rel = ((b - a) / a).abs();
            worst = if rel.is_nan() { f64::NAN } else { worst.max(rel) };
            table.push(vec![t.into(), a.into(), b.into(), rel.into()]);
        }
        out.tables.push(table);
        out.check(Check::at_most("warp_roundtrip", &format!("max relative error of f rebuilt from G on [{}, {}]", r.lo, r.hi), worst, ctx.tol(r.rel_tol)));
    }
    if let Some(c) = &cfg.cut_locus {
        let x = ModelPoint::new(c.x_t, 0.0);
        let cut = cut_locus(&s, x)?;
        let conj = first_conjugate_point(&s, c.x_t)?;
        let (kind, theta_opp, t_cut) = match cut {
            CutLocus::Empty => ("empty", f64::NAN, f64::NAN),
            CutLocus::Ray { theta_opposite, t_cut } => ("ray", theta_opposite, t_cut),
        };
        // the Jacobi field runs through the vertex, so its zero at arclength s
        // sits at radius s - t_x on the opposite meridian
        let conj_t = conj.map(|s_star| s_star - c.x_t);
        let mut table = Table::new("cut_locus", &["x_t", "kind", "theta_opposite", "t_cut", "conjugate_t"]);
        table.push(vec![c.x_t.into(), kind.into(), theta_opp.into(), t_cut.into(), conj_t.into()]);
        out.tables.push(table);
        match c.expect {
            CutExpectation::Empty => out.check(Check::holds("cut_locus_empty", &format!("cut locus of (t = {}) is empty", c.x_t), kind == "empty")),
            CutExpectation::Ray => {
                out.check(Check::holds("cut_locus_ray", &format!("cut locus of (t = {}) is a ray on the opposite meridian", c.x_t), kind == "ray" && (theta_opp - PI).abs() < 1e-12));
                let gap = match conj_t {
                    Some(ct) if kind == "ray" => (t_cut - ct).abs(),
                    _ => f64::NAN,
                };
                out.check(Check::at_most("cut_matches_conjugate", "|t_cut - first conjugate radius|", gap, ctx.tol(c.conjugate_tol)));
            }
        }
    }
    out.tables.push(summary);
    Ok(out)
}

/// `ψ` with `f(t0) |sin ψ| = ν`, pointing outwards or inwards and to either side.
fn psi_for(s: &ModelSurface, t0: f64, nu: f64, outward: bool, positive: bool) -> f64 {
    let a = (nu / s.f(t0)).clamp(-1.0, 1.0).asin();
    let psi = if outward { a } else { PI - a };
    if positive {
        psi
    } else {
        -psi
    }
}

pub fn geodesic_trace(sc: &Scenario, cfg: &GeodesicTrace, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let s = surface(sc)?;
    let mut out = Outcome::default();
    let tol = ctx.tol(cfg.clairaut_tol);
    let mut table = Table::new("clairaut_drift", &["index", "t0", "theta0", "psi", "nu", "length", "drift", "tolerance", "passed"]);
    let mut drifts = Vec::new();
    for i in 0..cfg.count {
        let t0 = ctx.uniform(cfg.t_range[0], cfg.t_range[1]);
        let theta0 = ctx.uniform(0.0, TAU);
        let nu = ctx.uniform(cfg.nu_min, 0.999 * s.f(t0));
        let psi = psi_for(&s, t0, nu, ctx.uniform(0.0, 1.0) < 0.5, ctx.uniform(0.0, 1.0) < 0.5);
        let length = ctx.uniform(0.0, cfg.max_length);
        match integrate_geodesic(&s, ModelPoint::new(t0, theta0), psi, length, cfg.step) {
            Ok(g) => {
                let d = g.clairaut_drift(&s);
                drifts.push(d);
                table.push(vec![i.into(), t0.into(), theta0.into(), psi.into(), g.nu.into(), g.length.into(), d.into(), tol.into(), (d <= tol).into()]);
            }
            Err(e) => out.error(format!("geodesic {i}"), e),
        }
    }
    out.tables.push(table);
    out.check(Check::at_least("geodesics_traced", &format!("geodesics integrated out of {}", cfg.count), drifts.len() as f64, cfg.count as f64));
    out.check(Check::at_most("clairaut_drift", "max |f(t)^2 |θ'| - ν| over all samples", max_of(drifts), tol));

    let ltol = ctx.tol(cfg.length_tol);
    let mut table = Table::new("length_bound", &["index", "t_start", "t_end", "nu", "length", "lower_bound", "margin", "tolerance", "passed"]);
    let mut margins = Vec::new();
    for i in 0..cfg.monotone_segments {
        let t0 = ctx.uniform(cfg.t_range[0], cfg.t_range[1]);
        let nu = ctx.uniform(cfg.nu_min, 0.999 * s.f(t0));
        let psi = psi_for(&s, t0, nu, ctx.uniform(0.0, 1.0) < 0.5, true);
        let length = ctx.uniform(0.0, cfg.max_length);
        let g = match integrate_geodesic(&s, ModelPoint::new(t0, 0.0), psi, length, cfg.step) {
            Ok(g) => g,
            Err(e) => {
                out.error(format!("segment {i}"), e);
                continue;
            }
        };
        // keep the t-monotone stretch, stopping short of the turning point
        // where the bound's integrand is singular
        let dir = g.samples[0].dt.signum();
        let mut j = g.samples.iter().position(|p| p.dt * dir <= 0.0).unwrap_or(g.samples.len()).saturating_sub(1);
        while j > 0 && s.f(g.samples[j].t) - g.nu < 1e-6 {
            j -= 1;
        }
        if j == 0 {
            out.error(format!("segment {i}"), "no monotone stretch away from the turning point");
            continue;
        }
        let (ta, tb) = (t0, g.samples[j].t);
        let len = g.samples[j].s;
        match length_lower_bound(&s, g.nu, ta.min(tb), ta.max(tb)) {
            Ok(bound) => {
                let m = len - bound;
                margins.push(m);
                table.push(vec![i.into(), ta.into(), tb.into(), g.nu.into(), len.into(), bound.into(), m.into(), ltol.into(), (m >= -ltol).into()]);
            }
            Err(e) => out.error(format!("segment {i}"), e),
        }
    }
    out.tables.push(table);
    out.check(Check::at_least("segments_measured", &format!("t-monotone segments measured out of {}", cfg.monotone_segments), margins.len() as f64, cfg.monotone_segments as f64));
    out.check(Check::not_below("length_lower_bound", "min (length - Clairaut lower bound)", min_of(margins), ltol));
    Ok(out)
}

pub fn chain_demo(sc: &Scenario, cfg: &ChainDemo, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let s = surface(sc)?;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "chain",
        &["t_end", "nu", "estimate_lhs", "estimate_rhs", "estimate_holds", "max_hinge_sum", "length_xi", "length_eta", "length_gap", "under_margin", "passes_under"],
    );
    let mut panels_table = Table::new("chain_panels", &["t_end", "panel", "t0", "t1", "side", "nu", "theta_start", "delta_theta", "angle_x", "angle_y", "angle_p"]);
    let mut nus = Vec::new();
    let (mut est, mut hinge, mut gap, mut under) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &r in &cfg.ends {
        let report = geodesic_panels(&s, cfg.t_x, r, cfg.theta_end, cfg.panels).and_then(|(_, panels)| broken_geodesic_chain(&s, &panels));
        let rep = match report {
            Ok(rep) => rep,
            Err(e) => {
                out.error(format!("t_end = {r}"), e);
                nus.push(f64::NAN);
                continue;
            }
        };
        let max_hinge = max_of(rep.hinge_sums.iter().copied());
        nus.push(rep.eta.nu);
        est.push(rep.estimate.lhs - rep.estimate.rhs);
        hinge.push(max_hinge - PI);
        gap.push(rep.length_gap);
        under.push(rep.under_margin);
        for (k, p) in rep.panels.iter().enumerate() {
            panels_table.push(vec![r.into(), k.into(), p.t0.into(), p.t1.into(), p.side.into(), p.nu.into(), p.theta_start.into(), p.delta_theta.into(), p.angle_x.into(), p.angle_y.into(), p.angle_p.into()]);
        }
        table.push(vec![
            r.into(),
            rep.eta.nu.into(),
            rep.estimate.lhs.into(),
            rep.estimate.rhs.into(),
            rep.estimate.holds.into(),
            max_hinge.into(),
            rep.length_xi.into(),
            rep.length_eta.into(),
            rep.length_gap.into(),
            rep.under_margin.into(),
            rep.passes_under.into(),
        ]);
    }
    out.tables.push(table);
    out.tables.push(panels_table);
    out.check(Check::at_least("chains_built", &format!("chains built out of {}", cfg.ends.len()), est.len() as f64, cfg.ends.len() as f64));
    out.check(Check::at_least("clairaut_estimate", "min over ends of 4 t_x - ν^2 ∫ f^-2", min_of(est), 0.0));
    let rise = if nus.len() > 1 { max_of(nus.windows(2).map(|w| w[1] - w[0])) } else { f64::NAN };
    out.check(Check::below("nu_decreasing", "max ν(next end) - ν(this end) over consecutive ends", rise, 0.0));
    out.check(Check::at_most("hinge_sum", "max hinge angle sum - π", max_of(hinge), ctx.tol(cfg.hinge_tol)));
    out.check(Check::not_below("length_gap", "min L(ξ) - L(η)", min_of(gap), ctx.tol(cfg.length_tol)));
    out.check(Check::not_below("passes_under", "min t(ξ) - t(η) at matched θ", min_of(under), ctx.tol(cfg.under_tol)));
    Ok(out)
}
