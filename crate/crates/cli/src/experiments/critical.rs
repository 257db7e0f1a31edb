use std::f64::consts::PI;

use toponogov::comparison::{critical_scan as scan, diameter_growth, is_forward_critical};
use toponogov::finsler::Vector;
use toponogov::numeric::directions::unit_directions;
use toponogov::parallel;

use super::{chart, max_of, vector, Ctx};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};
use crate::scenario::{CriticalScan, Growth, Scenario};

/// Number of scan points re-checked against the dense direction set.
const BRUTE_FORCE_POINTS: usize = 20;

pub fn critical_scan(sc: &Scenario, cfg: &CriticalScan, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let ch = chart(sc)?;
    let p = vector(&cfg.p);
    let mut out = Outcome::default();
    let report = scan(&ch, ch.model(), &p, &cfg.radii, cfg.points_per_shell, cfg.w_samples)?;
    let mut table = Table::new("critical_scan", &["radius", "point", "connectors", "critical", "witness_value"]);
    for v in &report.verdicts {
        let point = v.point.iter().map(|x| format!("{x:.15e}")).collect::<Vec<_>>().join(";");
        table.push(vec![v.radius.into(), point.into(), v.connectors.into(), v.critical.into(), v.witness_value.into()]);
    }
    out.tables.push(table);
    for f in &report.failures {
        out.error(format!("shell {} point {}", f.radius, f.index), &f.error);
    }
    let expected = cfg.radii.len() * cfg.points_per_shell;
    out.check(Check::at_least("points_scanned", &format!("shell points classified out of {expected}"), report.verdicts.len() as f64, expected as f64));
    let n_critical = report.verdicts.iter().filter(|v| v.critical).count() as f64;
    if cfg.expect_critical {
        out.check(Check::at_least("critical_points", "forward critical points found", n_critical, 1.0));
    } else {
        out.check(Check::at_most("critical_points", "forward critical points found", n_critical, 0.0));
    }

    let ws: Vec<Vector> = unit_directions(ch.dim(), cfg.w_samples).into_iter().map(Vector::from_vec).collect();
    if cfg.synthetic_pair {
        let x = report.verdicts.first().map(|v| vector(&v.point)).unwrap_or_else(|| &p + Vector::from_element(ch.dim(), 1.0));
        let u = ctx.unit(ch.dim());
        let pair = [u.clone(), -u];
        match is_forward_critical(&ch, &p, &x, &ws, Some(&pair)) {
            Ok(v) => out.check(Check::at_most("synthetic_pair_critical", "witness value for the connector set {v, -v}", v.witness_value, toponogov::comparison::critical::CRITICAL_TOL)),
            Err(e) => out.error("synthetic pair", e),
        }
    }
    if let Some(dense) = cfg.brute_force_directions {
        let dense: Vec<Vector> = unit_directions(ch.dim(), dense).into_iter().map(Vector::from_vec).collect();
        let n = report.verdicts.len();
        let picks: Vec<usize> = (0..BRUTE_FORCE_POINTS.min(n)).map(|k| k * n / BRUTE_FORCE_POINTS.min(n)).collect();
        let results = parallel::map(&picks, |&i| is_forward_critical(&ch, &p, &vector(&report.verdicts[i].point), &dense, None));
        let mut mismatches = 0;
        let mut compared = 0;
        let mut bt = Table::new("brute_force", &["radius", "scan_critical", "dense_critical", "scan_witness_value", "dense_witness_value"]);
        for (&i, r) in picks.iter().zip(results) {
            let v = &report.verdicts[i];
            match r {
                Ok(d) => {
                    compared += 1;
                    if d.critical != v.critical {
                        mismatches += 1;
                    }
                    bt.push(vec![v.radius.into(), v.critical.into(), d.critical.into(), v.witness_value.into(), d.witness_value.into()]);
                }
                Err(e) => out.error(format!("dense check {i}"), e),
            }
        }
        out.tables.push(bt);
        out.check(Check::at_least("brute_force_compared", "points re-checked with dense directions", compared as f64, picks.len() as f64));
        out.check(Check::at_most("brute_force_agreement", "verdicts that differ from the dense-direction brute force", mismatches as f64, 0.0));
    }
    Ok(out)
}

pub fn growth(sc: &Scenario, cfg: &Growth, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let ch = chart(sc)?;
    let p = vector(&cfg.p);
    let mut out = Outcome::default();
    let report = diameter_growth(&ch, &p, &cfg.t_list, cfg.samples_per_shell)?;
    let mut table = Table::new("growth", &["t", "diameter", "points", "pairs", "failed_pairs"]);
    for r in &report.rows {
        table.push(vec![r.t.into(), r.diameter.into(), r.points.into(), r.pairs.into(), r.failed_pairs.into()]);
        if r.failed_pairs > 0 {
            out.error(format!("shell t = {}", r.t), format!("{} of {} pairs failed", r.failed_pairs, r.pairs));
        }
    }
    out.tables.push(table);
    let mut fit = Table::new("growth_fit", &["alpha", "alpha_stderr", "band_lo", "band_hi"]);
    fit.push(vec![report.alpha.into(), report.alpha_stderr.into(), report.alpha_band.map(|b| b.0).into(), report.alpha_band.map(|b| b.1).into()]);
    out.tables.push(fit);
    let alpha = report.alpha.unwrap_or(f64::NAN);
    if let (Some(want), Some(tol)) = (cfg.alpha_expected, cfg.alpha_tol) {
        out.check(Check::at_most("growth_exponent", &format!("|α - {want}|"), (alpha - want).abs(), ctx.tol(tol)));
    }
    if let Some(max) = cfg.alpha_max {
        let slack = ctx.tol(cfg.alpha_tol.unwrap_or(0.0));
        out.check(Check::at_most("growth_exponent_bound", &format!("α - {max}"), alpha - max, slack));
    }
    if let Some(tol) = cfg.half_circle_tol {
        match ch.model() {
            Some(m) => {
                let excess = max_of(report.rows.iter().map(|r| r.diameter - PI * m.f(r.t)));
                out.check(Check::at_most("diameter_half_circle", "max diam(S_t) - π f(t)", excess, ctx.tol(tol)));
            }
            None => out.error("half circle", "chart has no model surface"),
        }
    }
    Ok(out)
}
