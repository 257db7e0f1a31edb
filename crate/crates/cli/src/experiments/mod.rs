//! One driver per experiment kind. Each turns a scenario into checks and tables.

mod critical;
mod curvature;
mod distance;
mod model;
mod tct;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toponogov::finsler::{FinslerChart, Vector};
use toponogov::model::ModelSurface;

use crate::error::CliError;
use crate::output::Outcome;
use crate::scenario::{Experiment, Scenario};

/// Per-run state handed to every driver.
pub struct Ctx {
    pub rng: ChaCha8Rng,
    pub tolerance_scale: f64,
}

impl Ctx {
    pub fn new(seed: u64, tolerance_scale: f64) -> Self {
        Ctx { rng: ChaCha8Rng::seed_from_u64(seed), tolerance_scale }
    }

    /// A scenario tolerance after applying `--tolerance-scale`.
    pub fn tol(&self, t: f64) -> f64 {
        t * self.tolerance_scale
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi > lo {
            self.rng.gen_range(lo..hi)
        } else {
            lo
        }
    }

    pub fn point_in(&mut self, lo: &[f64], hi: &[f64]) -> Vector {
        Vector::from_vec(lo.iter().zip(hi).map(|(&a, &b)| self.uniform(a, b)).collect())
    }

    /// A uniformly random Euclidean unit vector.
    pub fn unit(&mut self, dim: usize) -> Vector {
        loop {
            let v = Vector::from_vec((0..dim).map(|_| self.uniform(-1.0, 1.0)).collect());
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                return v / n;
            }
        }
    }
}

fn surface(sc: &Scenario) -> Result<ModelSurface, CliError> {
    let spec = sc.surface.as_ref().ok_or_else(|| CliError::config("surface", "missing".into()))?;
    Ok(ModelSurface::build(spec)?)
}

fn chart(sc: &Scenario) -> Result<FinslerChart, CliError> {
    let spec = sc.chart.as_ref().ok_or_else(|| CliError::config("chart", "missing".into()))?;
    Ok(FinslerChart::build(spec)?)
}

fn vector(xs: &[f64]) -> Vector {
    Vector::from_vec(xs.to_vec())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn min_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::INFINITY, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.min(b) })
}

/// Runs the scenario's experiment. Setup failures (a surface that does not
/// build, say) come back as an item error with no checks, so the run fails.
pub fn execute(sc: &Scenario, ctx: &mut Ctx) -> Outcome {
    let result = match &sc.experiment {
        Experiment::ModelBuild(e) => model::model_build(sc, e, ctx),
        Experiment::GeodesicTrace(e) => model::geodesic_trace(sc, e, ctx),
        Experiment::ChainDemo(e) => model::chain_demo(sc, e, ctx),
        Experiment::DistanceCheck(e) => distance::distance_check(sc, e, ctx),
        Experiment::TctBatch(e) => tct::tct_batch(sc, e, ctx),
        Experiment::CriticalScan(e) => critical::critical_scan(sc, e, ctx),
        Experiment::Growth(e) => critical::growth(sc, e, ctx),
        Experiment::CurvatureProbe(e) => curvature::curvature_probe(sc, e, ctx),
    };
    result.unwrap_or_else(|e| {
        let mut o = Outcome::default();
        o.error("setup", e);
        o
    })
}
