//! Forward-critical points of `d(p, ·)` and the growth of distance spheres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::geodesic::CHART_STEP;
use crate::finsler::{distance, integrate_geodesic, ChartGeodesic, FinslerChart, Vector};
use crate::model::ModelSurface;
use crate::numeric::directions::unit_directions;
use crate::parallel;

/// `g_v(v, w)` at or below this counts as non-positive.
pub const CRITICAL_TOL: f64 = 1e-9;

/// `d(p, z)` and the terminal velocities at `z` of the minimal connectors from `p`.
pub fn connector_velocities(chart: &FinslerChart, p: &Vector, z: &Vector) -> Result<(f64, Vec<Vector>)> {
    if chart.is_pole(p) {
        let mut e = Vector::zeros(chart.dim());
        e[0] = 1.0;
        return Ok((z[0], vec![e]));
    }
    let m = distance(chart, p, z)?;
    Ok((m.d, m.all_connectors.iter().map(ChartGeodesic::end_velocity).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalVerdict {
    pub critical: bool,
    /// The `w` with the largest `min_v g_v(v, w)`; a counterexample when not critical.
    pub witness: Vec<f64>,
    pub witness_value: f64,
    pub connectors: usize,
}

/// Checks that every sampled `w` (plus the connector velocities themselves)
/// has some `v ∈ G_p(x)` with `g_v(v, w) ≤ 0`.
pub fn is_forward_critical(chart: &FinslerChart, p: &Vector, x: &Vector, w_samples: &[Vector], connector_set: Option<&[Vector]>) -> Result<CriticalVerdict> {
    if p == x {
        return Err(Error::InvalidInput("criticality needs x != p".into()));
    }
    let vs = match connector_set {
        Some(vs) => vs.to_vec(),
        None => connector_velocities(chart, p, x)?.1,
    };
    if vs.is_empty() {
        return Err(Error::InvalidInput("empty connector set".into()));
    }
    // g_v(v, ·) is the Legendre dual of v; one row per connector
    let duals: Vec<Vector> = vs.iter().map(|v| chart.jet(x, v).g * v).collect();
    let mut worst = (f64::NEG_INFINITY, &vs[0]);
    for w in w_samples.iter().chain(vs.iter()) {
        let best = duals.iter().map(|d| d.dot(w)).fold(f64::INFINITY, f64::min);
        if best > worst.0 {
            worst = (best, w);
        }
    }
    Ok(CriticalVerdict {
        critical: worst.0 <= CRITICAL_TOL,
        witness: worst.1.iter().copied().collect(),
        witness_value: worst.0,
        connectors: vs.len(),
    })
}

/// Points of the forward sphere `∂B_t⁺(p)`. About a `warped_polar` vertex
/// these are spread over a half-turn `θ ∈ [-π/2, π/2]`: the chart is a strip
/// in θ, and by rotational symmetry every separation up to π still occurs.
/// Otherwise they are geodesic endpoints, and directions whose geodesic
/// leaves the chart are reported as errors.
pub fn shell_points(chart: &FinslerChart, p: &Vector, t: f64, count: usize) -> Vec<Result<Vector>> {
    if chart.is_pole(p) {
        let half = std::f64::consts::FRAC_PI_2;
        return (0..count)
            .map(|k| {
                let th = if count > 1 { -half + 2.0 * half * k as f64 / (count - 1) as f64 } else { 0.0 };
                let mut x = vec![t, th];
                x.extend(std::iter::repeat(0.0).take(chart.dim() - 2));
                let x = Vector::from_vec(x);
                if chart.contains(&x) {
                    Ok(x)
                } else {
                    Err(Error::LeftDomain { s: t })
                }
            })
            .collect();
    }
    unit_directions(chart.dim(), count)
        .into_iter()
        .map(|u| {
            let u = Vector::from_vec(u);
            let u = &u / chart.norm(p, &u);
            Ok(integrate_geodesic(chart, p, &u, t, CHART_STEP)?.end())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub radius: f64,
    pub point: Vec<f64>,
    pub connectors: usize,
    pub critical: bool,
    pub witness: Vec<f64>,
    pub witness_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub radius: f64,
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalScanReport {
    pub p: Vec<f64>,
    pub radii: Vec<f64>,
    pub rho: Option<f64>,
    pub points_per_shell: usize,
    pub w_samples: usize,
    pub verdicts: Vec<ScanPoint>,
    pub failures: Vec<ScanFailure>,
    /// Smallest connector count seen on each shell (0 if every point failed).
    pub min_connectors_per_shell: Vec<usize>,
    pub outermost_critical_radius: Option<f64>,
}

/// Runs [`is_forward_critical`] on `points_per_shell` points of each
/// sphere `∂B_t⁺(p)`, `t ∈ radii`.
pub fn critical_scan(chart: &FinslerChart, model: Option<&ModelSurface>, p: &Vector, radii: &[f64], points_per_shell: usize, w_count: usize) -> Result<CriticalScanReport> {
    if radii.windows(2).any(|r| r[1] <= r[0]) || radii.iter().any(|&r| r <= 0.0) {
        return Err(Error::InvalidInput("radii must be positive and increasing".into()));
    }
    let ws: Vec<Vector> = unit_directions(chart.dim(), w_count).into_iter().map(Vector::from_vec).collect();
    let jobs: Vec<(f64, usize)> = radii.iter().flat_map(|&r| (0..points_per_shell).map(move |k| (r, k))).collect();
    let shells: Vec<Vec<Result<Vector>>> = radii.iter().map(|&r| shell_points(chart, p, r, points_per_shell)).collect();
    let results = parallel::map(&jobs, |&(r, k)| {
        let shell = radii.iter().position(|&x| x == r).expect("radius from list");
        let x = shells[shell][k].clone()?;
        let v = is_forward_critical(chart, p, &x, &ws, None)?;
        Ok::<_, Error>(ScanPoint { radius: r, point: x.iter().copied().collect(), connectors: v.connectors, critical: v.critical, witness: v.witness, witness_value: v.witness_value })
    });
    let mut verdicts = Vec::new();
    let mut failures = Vec::new();
    for (&(radius, index), res) in jobs.iter().zip(results) {
        match res {
            Ok(v) => verdicts.push(v),
            Err(e) => failures.push(ScanFailure { radius, index, error: e.to_string() }),
        }
    }
    let min_connectors_per_shell = radii
        .iter()
        .map(|&r| verdicts.iter().filter(|v| v.radius == r).map(|v| v.connectors).min().unwrap_or(0))
        .collect();
    let outermost_critical_radius = verdicts.iter().filter(|v| v.critical).map(|v| v.radius).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    Ok(CriticalScanReport {
        p: p.iter().copied().collect(),
        radii: radii.to_vec(),
        rho: model.and_then(ModelSurface::rho),
        points_per_shell,
        w_samples: w_count,
        verdicts,
        failures,
        min_connectors_per_shell,
        outermost_critical_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub t: f64,
    pub diameter: f64,
    pub points: usize,
    pub pairs: usize,
    pub failed_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Slope of `log diam` against `log t`; `None` with fewer than two usable radii.
    pub alpha: Option<f64>,
    pub alpha_stderr: Option<f64>,
    /// `alpha ± 2 stderr`.
    pub alpha_band: Option<(f64, f64)>,
}

/// Least-squares slope with its standard error (zero for two points).
pub fn fit_exponent(rows: &[GrowthRow]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.diameter > 0.0 && r.t > 0.0).map(|r| (r.t.ln(), r.diameter.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let se = if pts.len() > 2 {
        let ssr: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some((slope, se))
}

/// Estimates `diam ∂B_t⁺(p) = sup d(q₁, q₂)` over sampled boundary pairs and
/// fits the growth exponent.
pub fn diameter_growth(chart: &FinslerChart, p: &Vector, t_list: &[f64], samples_per_shell: usize) -> Result<GrowthReport> {
    if t_list.windows(2).any(|t| t[1] <= t[0]) {
        return Err(Error::InvalidInput("t_list must be increasing".into()));
    }
    let symmetric = chart.is_reversible();
    let mut rows = Vec::new();
    for &t in t_list {
        let pts: Vec<Vector> = shell_points(chart, p, t, samples_per_shell).into_iter().filter_map(Result::ok).collect();
        let pairs: Vec<(usize, usize)> = (0..pts.len())
            .flat_map(|i| (0..pts.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| if symmetric { i < j } else { i != j })
            .collect();
        let ds = parallel::map(&pairs, |&(i, j)| distance(chart, &pts[i], &pts[j]).map(|m| m.d));
        let failed_pairs = ds.iter().filter(|d| d.is_err()).count();
        let diameter = ds.iter().filter_map(|d| d.as_ref().ok()).copied().fold(0.0, f64::max);
        rows.push(GrowthRow { t, diameter, points: pts.len(), pairs: pairs.len(), failed_pairs });
    }
    let fit = fit_exponent(&rows);
    Ok(GrowthReport {
        alpha: fit.map(|f| f.0),
        alpha_stderr: fit.map(|f| f.1),
        alpha_band: fit.map(|(a, se)| (a - 2.0 * se, a + 2.0 * se)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finsler::{ChartFamily, ChartSpec, Domain};
    use crate::model::{SurfaceFamily, SurfaceSpec};

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    fn gauss_chart(t_max: f64) -> FinslerChart {
        FinslerChart::build(&ChartSpec {
            family: ChartFamily::WarpedPolar { surface: SurfaceSpec::new(SurfaceFamily::GaussTanh).with_t_max(t_max) },
            domain: Domain::new(vec![0.05, -10.0], vec![t_max, 10.0]),
        })
        .unwrap()
    }

    fn dirs(n: usize) -> Vec<Vector> {
        unit_directions(2, n).into_iter().map(Vector::from_vec).collect()
    }

    #[test]
    fn euclidean_points_are_not_critical() {
        let e = FinslerChart::euclidean(2, 10.0);
        let p = v(&[0.0, 0.0]);
        let x = v(&[1.0, 2.0]);
        let r = is_forward_critical(&e, &p, &x, &dirs(64), None).unwrap();
        assert!(!r.critical);
        assert_eq!(r.connectors, 1);
        let u = x.normalize();
        let singleton = [u.clone()];
        let r = is_forward_critical(&e, &p, &x, &[u.clone()], Some(&singleton)).unwrap();
        assert!(!r.critical);
        assert!((r.witness_value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn antipodal_connector_pair_is_critical() {
        let e = FinslerChart::euclidean(2, 10.0);
        let u = v(&[0.6, 0.8]);
        let pair = [u.clone(), -u];
        let r = is_forward_critical(&e, &v(&[0.0, 0.0]), &v(&[1.0, 1.0]), &dirs(256), Some(&pair)).unwrap();
        assert!(r.critical);
    }

    #[test]
    fn euclidean_scan_is_empty() {
        let e = FinslerChart::euclidean(2, 10.0);
        let r = critical_scan(&e, None, &v(&[0.0, 0.0]), &[1.0, 2.0, 3.0, 4.0, 5.0], 8, 64).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.verdicts.len(), 40);
        assert!(r.outermost_critical_radius.is_none());
        assert!(r.min_connectors_per_shell.iter().all(|&c| c >= 1));
    }

    #[test]
    fn gauss_scan_matches_dense_directions() {
        let chart = gauss_chart(3.0);
        let p = v(&[0.0, 0.0]);
        let r = critical_scan(&chart, chart.model(), &p, &[1.0, 1.5, 2.0, 2.5], 5, 64).unwrap();
        assert!(r.outermost_critical_radius.is_none());
        let dense = dirs(1000);
        for s in &r.verdicts {
            let b = is_forward_critical(&chart, &p, &v(&s.point), &dense, None).unwrap();
            assert_eq!(b.critical, s.critical);
        }
    }

    #[test]
    fn euclidean_diameter_is_linear() {
        let e = FinslerChart::euclidean(2, 10.0);
        let r = diameter_growth(&e, &v(&[0.0, 0.0]), &[1.0, 2.0, 4.0], 8).unwrap();
        for row in &r.rows {
            assert!((row.diameter - 2.0 * row.t).abs() <= 1e-6, "{row:?}");
        }
        assert!((r.alpha.unwrap() - 1.0).abs() <= 1e-6);
        let single = diameter_growth(&e, &v(&[0.0, 0.0]), &[2.0], 4).unwrap();
        assert!(single.alpha.is_none() && single.alpha_band.is_none());
    }

    #[test]
    fn gauss_diameter_is_below_half_circle() {
        let chart = gauss_chart(4.0);
        let model = chart.model().unwrap().clone();
        let r = diameter_growth(&chart, &v(&[0.0, 0.0]), &[1.0, 1.5, 2.0, 2.5], 6).unwrap();
        for row in &r.rows {
            assert!(row.diameter <= std::f64::consts::PI * model.f(row.t) + 1e-6, "{row:?}");
            assert!(row.diameter > 0.0);
        }
        assert!(r.alpha.unwrap() <= 0.0);
    }
}
