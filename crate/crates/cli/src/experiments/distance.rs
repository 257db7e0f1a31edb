use std::f64::consts::PI;

use toponogov::comparison::build_comparison_triangle;
use toponogov::finsler::geodesic::CHART_STEP;
use toponogov::finsler::{backward_angle, distance, forward_angle, integrate_geodesic, FinslerChart, Vector};
use toponogov::model::{model_distance, ModelPoint};
use toponogov::parallel;

use super::{chart, max_of, surface, Ctx};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};
use crate::scenario::{AngleCheck, ChartVsModel, DistanceCheck, LawOfCosines, Scenario};

pub fn distance_check(sc: &Scenario, cfg: &DistanceCheck, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    if let Some(c) = &cfg.chart_vs_model {
        chart_vs_model(sc, c, ctx, &mut out)?;
    }
    if let Some(c) = &cfg.law_of_cosines {
        law_of_cosines(sc, c, ctx, &mut out)?;
    }
    if let Some(c) = &cfg.angles {
        angles(c, ctx, &mut out);
    }
    Ok(out)
}

fn chart_vs_model(sc: &Scenario, cfg: &ChartVsModel, ctx: &mut Ctx, out: &mut Outcome) -> Result<(), CliError> {
    let s = surface(sc)?;
    let ch = chart(sc)?;
    let pairs: Vec<(f64, f64, f64)> = (0..cfg.count)
        .map(|_| (ctx.uniform(cfg.t_range[0], cfg.t_range[1]), ctx.uniform(cfg.t_range[0], cfg.t_range[1]), ctx.uniform(-cfg.dtheta_max, cfg.dtheta_max)))
        .collect();
    let results = parallel::map(&pairs, |&(ta, tb, dth)| -> Result<(f64, f64), toponogov::Error> {
        let dc = distance(&ch, &Vector::from_vec(vec![ta, 0.0]), &Vector::from_vec(vec![tb, dth]))?.d;
        let (dm, _) = model_distance(&s, ModelPoint::new(ta, 0.0), ModelPoint::new(tb, dth))?;
        Ok((dc, dm))
    });
    let tol = ctx.tol(cfg.tol);
    let mut table = Table::new("chart_vs_model", &["index", "t_a", "t_b", "dtheta", "d_chart", "d_model", "abs_error", "tolerance"]);
    let mut errs = Vec::new();
    for (i, (&(ta, tb, dth), r)) in pairs.iter().zip(results).enumerate() {
        match r {
            Ok((dc, dm)) => {
                errs.push((dc - dm).abs());
                table.push(vec![i.into(), ta.into(), tb.into(), dth.into(), dc.into(), dm.into(), (dc - dm).abs().into(), tol.into()]);
            }
            Err(e) => out.error(format!("pair {i}"), e),
        }
    }
    out.tables.push(table);
    out.check(Check::at_least("chart_model_pairs", &format!("pairs measured out of {}", cfg.count), errs.len() as f64, cfg.count as f64));
    out.check(Check::at_most("chart_matches_model", "max |d_chart - d_model|", max_of(errs), tol));
    Ok(())
}

fn law_of_cosines(sc: &Scenario, cfg: &LawOfCosines, ctx: &mut Ctx, out: &mut Outcome) -> Result<(), CliError> {
    let s = surface(sc)?;
    let tol = ctx.tol(cfg.tol);
    let mut table = Table::new("law_of_cosines", &["index", "t_x", "t_y", "side", "angle_p", "angle_x", "angle_y", "max_error", "tolerance"]);
    let mut errs = Vec::new();
    let [lo, hi] = cfg.side_range;
    for i in 0..cfg.count {
        let (tx, ty) = (ctx.uniform(lo, hi), ctx.uniform(lo, hi));
        let side = ctx.uniform((tx - ty).abs(), tx + ty);
        match build_comparison_triangle(&s, tx, ty, side) {
            Ok(tri) => {
                let angle = |a: f64, b: f64, opposite: f64| ((a * a + b * b - opposite * opposite) / (2.0 * a * b)).clamp(-1.0, 1.0).acos();
                let e = [
                    (tri.angle_p - angle(tx, ty, side)).abs(),
                    (tri.angle_x - angle(tx, side, ty)).abs(),
                    (tri.angle_y - angle(ty, side, tx)).abs(),
                ];
                let e = max_of(e);
                errs.push(e);
                table.push(vec![i.into(), tx.into(), ty.into(), side.into(), tri.angle_p.into(), tri.angle_x.into(), tri.angle_y.into(), e.into(), tol.into()]);
            }
            Err(e) => out.error(format!("triple {i}"), e),
        }
    }
    out.tables.push(table);
    out.check(Check::at_least("triples_built", &format!("comparison triangles built out of {}", cfg.count), errs.len() as f64, cfg.count as f64));
    out.check(Check::at_most("law_of_cosines", "max angle error against the law of cosines", max_of(errs), tol));
    Ok(())
}

fn inner_angle(a: &Vector, b: &Vector) -> f64 {
    (a.dot(b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
}

/// Euclidean distance from the origin to the segment `x + s u`, `s ∈ [0, len]`.
fn segment_clearance(x: &Vector, u: &Vector, len: f64) -> f64 {
    let s = (-x.dot(u)).clamp(0.0, len);
    (x + u * s).norm()
}

fn angles(cfg: &AngleCheck, ctx: &mut Ctx, out: &mut Outcome) {
    let e = FinslerChart::euclidean(2, cfg.half_width);
    let p = Vector::zeros(2);
    let inner = 0.5 * cfg.half_width;
    let tol = ctx.tol(cfg.tol);
    let mut table = Table::new("angles", &["index", "kind", "x0", "x1", "u0", "u1", "s", "computed", "expected", "abs_error", "tolerance"]);
    let mut errs = Vec::new();
    let mut failures = 0;
    for i in 0..cfg.count {
        let (x, u, len) = loop {
            let x = ctx.point_in(&[-inner, -inner], &[inner, inner]);
            let u = ctx.unit(2);
            let len = ctx.uniform(1.0, 2.0);
            if segment_clearance(&x, &u, len) >= 0.5 {
                break (x, u, len);
            }
        };
        let sf = ctx.uniform(0.0, len - 0.1);
        let sb = ctx.uniform(0.1, len);
        let path = match integrate_geodesic(&e, &x, &u, len, CHART_STEP) {
            Ok(c) => c,
            Err(err) => {
                out.error(format!("triangle {i}"), err);
                failures += 1;
                continue;
            }
        };
        for (kind, s) in [("forward", sf), ("backward", sb)] {
            let (cs, _) = path.at(s);
            let to_p = &p - &cs;
            let (got, want) = if kind == "forward" {
                (forward_angle(&e, &p, &path, s), inner_angle(&to_p, &u))
            } else {
                (backward_angle(&e, &p, &path, s), inner_angle(&to_p, &(-&u)))
            };
            match got {
                Ok(a) => {
                    errs.push((a - want).abs());
                    table.push(vec![i.into(), kind.into(), x[0].into(), x[1].into(), u[0].into(), u[1].into(), s.into(), a.into(), want.into(), (a - want).abs().into(), tol.into()]);
                }
                Err(err) => {
                    out.error(format!("triangle {i} {kind}"), err);
                    failures += 1;
                }
            }
        }
    }
    let rtol = ctx.tol(cfg.radial_tol);
    let mut radial = Vec::new();
    for i in 0..cfg.radial_count {
        let u = ctx.unit(2);
        let x = &u * ctx.uniform(0.5, 2.0);
        let len = ctx.uniform(1.0, 2.0);
        let s = ctx.uniform(0.0, len - 0.1);
        let a = integrate_geodesic(&e, &x, &u, len, CHART_STEP).and_then(|path| forward_angle(&e, &p, &path, s));
        match a {
            Ok(a) => {
                radial.push((a - PI).abs());
                table.push(vec![i.into(), "radial".into(), x[0].into(), x[1].into(), u[0].into(), u[1].into(), s.into(), a.into(), PI.into(), (a - PI).abs().into(), rtol.into()]);
            }
            Err(err) => {
                out.error(format!("radial {i}"), err);
                failures += 1;
            }
        }
    }
    out.tables.push(table);
    out.check(Check::at_most("angle_failures", "angle evaluations that returned an error", failures as f64, 0.0));
    out.check(Check::at_most("angles_match_inner_products", "max |one-sided angle - Euclidean angle|", max_of(errs), tol));
    out.check(Check::at_most("radial_angle_is_pi", "max |forward angle - π| along radial extensions", max_of(radial), rtol));
}
