use toponogov::finsler::{flag_curvature, tangent_curvature, uniform_convexity_margin, ConvexityMode, Vector};
use toponogov::numeric::directions::unit_directions;
use toponogov::parallel;

use super::{chart, max_of, Ctx};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};
use crate::scenario::{CurvatureProbe, Scenario};

struct Probe {
    x: Vector,
    v: Vector,
    w: Vector,
}

pub fn curvature_probe(sc: &Scenario, cfg: &CurvatureProbe, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let ch = chart(sc)?;
    let n = ch.dim();
    let mut out = Outcome::default();
    let probes: Vec<Probe> = (0..cfg.samples)
        .map(|_| {
            let x = ctx.point_in(&cfg.sample_lo, &cfg.sample_hi);
            let v = ctx.unit(n);
            let w = loop {
                let w = ctx.unit(n);
                if w.dot(&v).abs() < 0.95 {
                    break w;
                }
            };
            Probe { x, v, w }
        })
        .collect();
    let ws: Vec<Vector> = unit_directions(n, cfg.convexity_directions).into_iter().map(Vector::from_vec).collect();
    let oracle = |x: &Vector| if ch.is_riemannian() { ch.sectional_oracle(x) } else if ch.is_translation_invariant() { Some(0.0) } else { None };
    let results = parallel::map(&probes, |pr| -> Result<(f64, f64, f64), toponogov::Error> {
        let k = flag_curvature(&ch, &pr.x, &pr.v, &pr.w)?;
        let t = tangent_curvature(&ch, &pr.x, &pr.v, &pr.w)?;
        let m = uniform_convexity_margin(&ch, &pr.x, &pr.v, &ws, ConvexityMode::TensorDominates);
        Ok((k, t, m))
    });

    let (flag_tol, tan_tol) = (ctx.tol(cfg.flag_tol), ctx.tol(cfg.tangent_tol));
    let mut table = Table::new("curvature_probe", &["index", "x", "v", "w", "flag_curvature", "oracle", "abs_error", "tangent_curvature", "convexity_margin"]);
    let join = |v: &Vector| v.iter().map(|c| format!("{c:.15e}")).collect::<Vec<_>>().join(";");
    let (mut kerr, mut terr, mut merr) = (Vec::new(), Vec::new(), Vec::new());
    for (i, (pr, r)) in probes.iter().zip(results).enumerate() {
        match r {
            Ok((k, t, m)) => {
                let o = oracle(&pr.x);
                let e = o.map(|o| (k - o).abs());
                if let Some(e) = e {
                    kerr.push(e);
                }
                terr.push(t.abs());
                merr.push(m.abs());
                table.push(vec![i.into(), join(&pr.x).into(), join(&pr.v).into(), join(&pr.w).into(), k.into(), o.into(), e.into(), t.into(), m.into()]);
            }
            Err(e) => out.error(format!("sample {i}"), e),
        }
    }
    out.tables.push(table);
    out.check(Check::at_least("samples_evaluated", &format!("curvature samples evaluated out of {}", cfg.samples), terr.len() as f64, cfg.samples as f64));
    if oracle(&probes.first().map(|p| p.x.clone()).unwrap_or_else(|| Vector::zeros(n))).is_some() {
        out.check(Check::at_most("flag_curvature", "max |K(v, w) - closed-form curvature|", max_of(kerr), flag_tol));
    }
    out.check(Check::at_most("tangent_curvature", "max |T(v, w)|", max_of(terr), tan_tol));
    if let Some(ct) = cfg.convexity_tol {
        out.check(Check::at_most("convexity_margin", "max |uniform-convexity margin|", max_of(merr), ctx.tol(ct)));
    }

    if let Some(model) = ch.model() {
        let mut radial = Table::new("radial_flag_curvature", &["t", "flag_curvature", "G", "abs_error"]);
        let mut errs = Vec::new();
        for pr in &probes {
            let (e_t, e_theta) = (Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![0.0, 1.0]));
            match flag_curvature(&ch, &pr.x, &e_t, &e_theta) {
                Ok(k) => {
                    let g = model.g(pr.x[0]);
                    errs.push((k - g).abs());
                    radial.push(vec![pr.x[0].into(), k.into(), g.into(), (k - g).abs().into()]);
                }
                Err(e) => out.error(format!("radial flag at t = {}", pr.x[0]), e),
            }
        }
        out.tables.push(radial);
        out.check(Check::at_most("radial_flag_curvature", "max |K(∂t, ∂θ) - G(t)|", max_of(errs), flag_tol));
    }
    Ok(out)
}
