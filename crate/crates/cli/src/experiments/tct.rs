use toponogov::comparison::{verify_tct_with, TctReport};
use toponogov::finsler::{radial_bound_check, Vector};
use toponogov::parallel;

use super::{chart, max_of, min_of, surface, vector, Ctx};
use crate::error::CliError;
use crate::output::{Cell, Check, Outcome, Table};
use crate::scenario::{MarginMode, Scenario, TctBatch};

fn coords(v: &[f64]) -> Cell {
    v.iter().map(|x| format!("{x:.15e}")).collect::<Vec<_>>().join(";").into()
}

fn row(attempt: usize, r: &TctReport) -> Vec<Cell> {
    let h = &r.hypotheses;
    let cmp = r.comparison.as_ref();
    vec![
        attempt.into(),
        coords(&r.x),
        coords(&r.y),
        r.d_px.into(),
        r.d_py.into(),
        r.d_xy.into(),
        r.lm_xy.into(),
        r.angle_x.into(),
        r.angle_y.into(),
        cmp.map(|c| c.angle_x).into(),
        cmp.map(|c| c.angle_y).into(),
        r.margin_x.into(),
        r.margin_y.into(),
        r.admissible.into(),
        h.outside_ball.into(),
        h.min_distance_to_p.into(),
        h.convexity_margin.into(),
        h.tangent_curvature_max.into(),
        h.reverse_geodesic_residual.into(),
    ]
}

const COLUMNS: [&str; 19] = [
    "attempt",
    "x",
    "y",
    "d_px",
    "d_py",
    "d_xy",
    "lm_xy",
    "angle_x",
    "angle_y",
    "model_angle_x",
    "model_angle_y",
    "margin_x",
    "margin_y",
    "admissible",
    "outside_ball",
    "min_distance_to_p",
    "convexity_margin",
    "tangent_curvature_max",
    "reverse_residual",
];

pub fn tct_batch(sc: &Scenario, cfg: &TctBatch, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let model = surface(sc)?;
    let ch = chart(sc)?;
    let p = vector(&cfg.p);
    let opts = cfg.hypotheses;
    let mut out = Outcome::default();
    let mut table = Table::new("tct", &COLUMNS);
    let mut accepted: Vec<TctReport> = Vec::new();
    let mut attempts = 0;
    // candidates are drawn in rounds so the sample sequence, and hence the
    // accepted set, does not depend on how the work is scheduled
    while accepted.len() < cfg.count && attempts < cfg.max_attempts {
        let round = (cfg.count - accepted.len()).max(4).min(cfg.max_attempts - attempts);
        let pairs: Vec<(Vector, Vector)> = (0..round).map(|_| (ctx.point_in(&cfg.sample_lo, &cfg.sample_hi), ctx.point_in(&cfg.sample_lo, &cfg.sample_hi))).collect();
        let results = parallel::map(&pairs, |(x, y)| verify_tct_with(&ch, &model, &p, x, y, &opts));
        for r in results {
            let attempt = attempts;
            attempts += 1;
            match r {
                Ok(rep) => {
                    table.push(row(attempt, &rep));
                    if rep.admissible && accepted.len() < cfg.count {
                        accepted.push(rep);
                    }
                }
                Err(e) => out.error(format!("attempt {attempt}"), e),
            }
        }
    }
    out.tables.push(table);

    let tol = ctx.tol(cfg.margin_tol);
    out.check(Check::at_least("admissible_triangles", &format!("admissible triangles found in {attempts} attempts"), accepted.len() as f64, cfg.count as f64));
    let margins: Vec<f64> = accepted.iter().flat_map(|r| [r.margin_x.unwrap_or(f64::NAN), r.margin_y.unwrap_or(f64::NAN)]).collect();
    match cfg.mode {
        MarginMode::Equality => out.check(Check::at_most("angle_margin", "max |forward angle - model angle|", max_of(margins.iter().map(|m| m.abs())), tol)),
        MarginMode::Inequality => out.check(Check::not_below("angle_margin", "min (forward angle - model angle)", min_of(margins.iter().copied()), tol)),
    }
    let hyp = accepted.iter().map(|r| &r.hypotheses);
    out.check(Check::holds("outside_ball", "every accepted triangle keeps c outside the closed ball of radius ρ", hyp.clone().all(|h| h.outside_ball)));
    out.check(Check::not_below("convexity_margin", "min uniform-convexity margin over the accepted samples", min_of(hyp.clone().map(|h| h.convexity_margin)), opts.convexity_tol));
    out.check(Check::at_most("tangent_curvature", "max |T| over the accepted samples", max_of(hyp.clone().map(|h| h.tangent_curvature_max)), opts.tangent_tol));
    out.check(Check::at_most("reverse_geodesic", "max reverse-geodesic residual over the accepted triangles", max_of(hyp.map(|h| h.reverse_geodesic_residual)), opts.reverse_tol));

    if let Some(rb) = &cfg.radial_bound {
        let rtol = ctx.tol(rb.tol);
        match radial_bound_check(&ch, &model, &p, &rb.t_samples, rb.w_per_point) {
            Ok(bound) => {
                let mut t = Table::new("radial_bound", &["ray", "t", "w", "flag_curvature", "model_curvature", "margin"]);
                for s in &bound.samples {
                    t.push(vec![s.ray.into(), s.t.into(), coords(&s.w), s.flag_curvature.into(), s.model_curvature.into(), s.margin.into()]);
                }
                out.tables.push(t);
                out.check(Check::not_below("radial_curvature_bound", "min K(γ', w) - G(t) along radial geodesics", bound.min_margin, rtol));
            }
            Err(e) => out.error("radial bound", e),
        }
    }
    Ok(out)
}
