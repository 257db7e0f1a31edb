//! Scenario files: one experiment on one surface and/or chart, with every
//! tolerance spelled out.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toponogov::comparison::TctOptions;
use toponogov::finsler::ChartSpec;
use toponogov::model::SurfaceSpec;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSpec>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    ModelBuild(ModelBuild),
    GeodesicTrace(GeodesicTrace),
    DistanceCheck(DistanceCheck),
    TctBatch(TctBatch),
    CriticalScan(CriticalScan),
    Growth(Growth),
    ChainDemo(ChainDemo),
    CurvatureProbe(CurvatureProbe),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ModelBuild(_) => "model-build",
            Experiment::GeodesicTrace(_) => "geodesic-trace",
            Experiment::DistanceCheck(_) => "distance-check",
            Experiment::TctBatch(_) => "tct-batch",
            Experiment::CriticalScan(_) => "critical-scan",
            Experiment::Growth(_) => "growth",
            Experiment::ChainDemo(_) => "chain-demo",
            Experiment::CurvatureProbe(_) => "curvature-probe",
        }
    }
}

pub const KINDS: [&str; 8] = ["model-build", "geodesic-trace", "distance-check", "tct-batch", "critical-scan", "growth", "chain-demo", "curvature-probe"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBuild {
    /// Radii at which `(t, f, f', G)` is tabulated.
    pub profile_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curvature_limit: Option<CurvatureLimit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<MonotoneCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<Roundtrip>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_von_mangoldt: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_locus: Option<CutLocusCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureLimit {
    pub t: f64,
    pub expected: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotoneCheck {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Roundtrip {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub step: f64,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutExpectation {
    Empty,
    Ray,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutLocusCheck {
    pub x_t: f64,
    pub expect: CutExpectation,
    /// Agreement of the ray start with the first conjugate point.
    pub conjugate_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicTrace {
    pub count: usize,
    pub t_range: [f64; 2],
    /// Clairaut constants are drawn from `[nu_min, f(t0))`, keeping paths off the vertex.
    pub nu_min: f64,
    pub max_length: f64,
    pub step: f64,
    pub clairaut_tol: f64,
    pub monotone_segments: usize,
    pub length_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceCheck {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart_vs_model: Option<ChartVsModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law_of_cosines: Option<LawOfCosines>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<AngleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartVsModel {
    pub count: usize,
    pub t_range: [f64; 2],
    pub dtheta_max: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawOfCosines {
    pub count: usize,
    pub side_range: [f64; 2],
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleCheck {
    pub count: usize,
    pub radial_count: usize,
    /// Half-width of the box triangle vertices are drawn from.
    pub half_width: f64,
    pub tol: f64,
    pub radial_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginMode {
    /// `|margin| <= margin_tol`.
    Equality,
    /// `margin >= -margin_tol`.
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TctBatch {
    pub count: usize,
    pub max_attempts: usize,
    pub p: Vec<f64>,
    /// Triangle vertices `x`, `y` are drawn uniformly from this box.
    pub sample_lo: Vec<f64>,
    pub sample_hi: Vec<f64>,
    pub mode: MarginMode,
    pub margin_tol: f64,
    pub hypotheses: TctOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial_bound: Option<RadialBoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialBoundCheck {
    pub t_samples: Vec<f64>,
    pub w_per_point: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalScan {
    pub p: Vec<f64>,
    pub radii: Vec<f64>,
    pub points_per_shell: usize,
    pub w_samples: usize,
    pub expect_critical: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_force_directions: Option<usize>,
    #[serde(default)]
    pub synthetic_pair: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Growth {
    pub p: Vec<f64>,
    pub t_list: Vec<f64>,
    pub samples_per_shell: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    /// Check `diam <= π f(t) + tol` on a `warped_polar` chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_circle_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDemo {
    pub t_x: f64,
    pub theta_end: f64,
    pub ends: Vec<f64>,
    pub panels: usize,
    pub hinge_tol: f64,
    pub length_tol: f64,
    pub under_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureProbe {
    pub samples: usize,
    pub sample_lo: Vec<f64>,
    pub sample_hi: Vec<f64>,
    pub flag_tol: f64,
    pub tangent_tol: f64,
    /// Riemannian charts only: `|margin| <= convexity_tol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convexity_tol: Option<f64>,
    pub convexity_directions: usize,
}

const SURFACE_FAMILIES: [&str; 5] = ["flat", "sinh", "paraboloid", "gauss_tanh", "bumped"];
const CHART_FAMILIES: [&str; 5] = ["euclidean", "riemannian", "warped_polar", "randers", "minkowski"];

/// Names the offending field for the errors a reader is most likely to make
/// before handing the document to serde.
fn precheck(doc: &toml::Value) -> Result<(), CliError> {
    let get = |path: &[&str]| path.iter().try_fold(doc, |v, k| v.get(k));
    let check = |path: &[&str], allowed: &[&str]| -> Result<(), CliError> {
        match get(path) {
            Some(toml::Value::String(s)) if allowed.contains(&s.as_str()) => Ok(()),
            Some(other) => Err(CliError::config(&path.join("."), format!("unknown value {other}, expected one of {}", allowed.join(", ")))),
            None => Ok(()),
        }
    };
    check(&["surface", "family"], &SURFACE_FAMILIES)?;
    check(&["chart", "family"], &CHART_FAMILIES)?;
    check(&["chart", "surface", "family"], &SURFACE_FAMILIES)?;
    if get(&["experiment"]).is_none() {
        return Err(CliError::config("experiment", "missing table".into()));
    }
    match get(&["experiment", "kind"]) {
        None => Err(CliError::config("experiment.kind", "missing".into())),
        Some(_) => check(&["experiment", "kind"], &KINDS),
    }
}

/// Pulls a field name out of a serde message such as "missing field `count`".
fn field_from_message(msg: &str) -> String {
    for marker in ["field `", "variant `"] {
        if let Some(i) = msg.find(marker) {
            let rest = &msg[i + marker.len()..];
            if let Some(j) = rest.find('`') {
                return rest[..j].to_string();
            }
        }
    }
    "document".into()
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let doc: toml::Value = text.parse().map_err(|e: toml::de::Error| CliError::config("document", e.message().to_string()))?;
        precheck(&doc)?;
        let sc: Scenario = toml::from_str(text).map_err(|e| CliError::config(&field_from_message(e.message()), e.message().to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn need_surface(&self) -> Result<(), CliError> {
        self.surface.as_ref().map(|_| ()).ok_or_else(|| CliError::config("surface", format!("required by {}", self.experiment.kind())))
    }

    fn need_chart(&self) -> Result<(), CliError> {
        self.chart.as_ref().map(|_| ()).ok_or_else(|| CliError::config("chart", format!("required by {}", self.experiment.kind())))
    }

    fn validate(&self) -> Result<(), CliError> {
        match &self.experiment {
            Experiment::ModelBuild(_) | Experiment::GeodesicTrace(_) | Experiment::ChainDemo(_) => self.need_surface(),
            Experiment::DistanceCheck(d) => {
                if d.chart_vs_model.is_some() {
                    self.need_surface()?;
                    self.need_chart()?;
                }
                if d.law_of_cosines.is_some() {
                    self.need_surface()?;
                }
                Ok(())
            }
            Experiment::TctBatch(t) => {
                self.need_surface()?;
                self.need_chart()?;
                if t.sample_lo.len() != t.sample_hi.len() || t.p.len() != t.sample_lo.len() {
                    return Err(CliError::config("experiment.sample_lo", "p, sample_lo and sample_hi need one entry per chart dimension".into()));
                }
                Ok(())
            }
            Experiment::CriticalScan(_) | Experiment::Growth(_) | Experiment::CurvatureProbe(_) => self.need_chart(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"
name = "chain"
seed = 3

[surface]
family = "gauss_tanh"
t_max = 9.0

[experiment]
kind = "chain-demo"
t_x = 1.2
theta_end = 0.5
ends = [3.0, 5.0, 8.0]
panels = 8
hinge_tol = 1e-6
length_tol = 1e-6
under_tol = 1e-6
"#;

    #[test]
    fn roundtrip_is_lossless() {
        let sc = Scenario::from_toml(CHAIN).unwrap();
        assert_eq!(Scenario::from_toml(&sc.to_toml()).unwrap(), sc);
    }

    #[test]
    fn unknown_family_names_the_field() {
        let bad = CHAIN.replace("gauss_tanh", "torus");
        match Scenario::from_toml(&bad) {
            Err(CliError::ConfigInvalid { field, .. }) => assert_eq!(field, "surface.family"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_tolerance_is_rejected() {
        let bad = CHAIN.replace("hinge_tol = 1e-6\n", "");
        match Scenario::from_toml(&bad) {
            Err(CliError::ConfigInvalid { field, .. }) => assert_eq!(field, "hinge_tol"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_surface_is_rejected() {
        let bad = CHAIN.replace("[surface]\nfamily = \"gauss_tanh\"\nt_max = 9.0\n", "");
        assert!(matches!(Scenario::from_toml(&bad), Err(CliError::ConfigInvalid { field, .. }) if field == "surface"));
    }
}
