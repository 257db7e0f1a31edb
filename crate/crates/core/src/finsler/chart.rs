//! Chart descriptions and the pointwise quantities of a Finsler metric:
//! `F`, the fundamental tensor and the geodesic spray.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSurface, SurfaceSpec};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Smallest eigenvalue accepted for a fundamental tensor.
pub const MIN_EIGENVALUE: f64 = 1e-10;

/// Axis-aligned coordinate box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Domain { lo, hi }
    }

    pub fn cube(dim: usize, half_width: f64) -> Self {
        Domain { lo: vec![-half_width; dim], hi: vec![half_width; dim] }
    }

    pub fn contains(&self, x: &Vector) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Longest edge of the box.
    pub fn scale(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    fn corners(&self) -> Vec<Vector> {
        let n = self.lo.len();
        (0..1usize << n)
            .map(|mask| Vector::from_iterator(n, (0..n).map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })))
            .collect()
    }
}

/// Riemannian metrics with closed-form `g_ij(x)` and first derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiemannianMetric {
    /// A constant positive definite matrix.
    Constant { matrix: Vec<Vec<f64>> },
    /// Stereographic chart of the round sphere of curvature `k`: `g = 4/(1 + k|x|^2)^2 δ`.
    Sphere { dimension: usize, curvature: f64 },
    /// Graph of `h(x, y) = (a x^2 + b y^2)/2` with the induced metric `δ + ∇h ∇hᵀ`.
    Graph { a: f64, b: f64 },
}

/// Minkowski norms, independent of the base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MinkowskiNorm {
    /// `F = (Σ v_i^4)^{1/4}`. Not strongly convex along the axes.
    Quartic { dimension: usize },
    /// `F^4 = (1 - λ)|v|^4 + λ Σ v_i^4`, strongly convex for `0 <= λ < 1`.
    QuarticBlend { dimension: usize, lambda: f64 },
}

/// Finsler metric families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChartFamily {
    Euclidean {
        dimension: usize,
    },
    Riemannian {
        metric: RiemannianMetric,
    },
    /// The model surface in polar coordinates `(t, θ)`, metric `diag(1, f(t)^2)`.
    /// The point `t = 0` is the vertex and is handled analytically.
    WarpedPolar {
        surface: SurfaceSpec,
    },
    /// `F = sqrt(vᵀ A v) + β(x)·v` with `β(x) = b + B x`.
    Randers {
        alpha: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default)]
        db: Option<Vec<Vec<f64>>>,
    },
    Minkowski {
        norm: MinkowskiNorm,
    },
}

impl ChartFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChartFamily::Euclidean { .. } => "euclidean",
            ChartFamily::Riemannian { .. } => "riemannian",
            ChartFamily::WarpedPolar { .. } => "warped_polar",
            ChartFamily::Randers { .. } => "randers",
            ChartFamily::Minkowski { .. } => "minkowski",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ChartFamily::Euclidean { dimension } => *dimension,
            ChartFamily::Riemannian { metric } => match metric {
                RiemannianMetric::Constant { matrix } => matrix.len(),
                RiemannianMetric::Sphere { dimension, .. } => *dimension,
                RiemannianMetric::Graph { .. } => 2,
            },
            ChartFamily::WarpedPolar { .. } => 2,
            ChartFamily::Randers { b, .. } => b.len(),
            ChartFamily::Minkowski { norm } => match norm {
                MinkowskiNorm::Quartic { dimension } | MinkowskiNorm::QuarticBlend { dimension, .. } => *dimension,
            },
        }
    }
}

/// Serializable chart: a family plus its coordinate box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    #[serde(flatten)]
    pub family: ChartFamily,
    pub domain: Domain,
}

#[derive(Debug, Clone)]
enum Kind {
    Constant(Matrix),
    Sphere(f64),
    Graph(f64, f64),
    Warped(ModelSurface),
    Randers { a: Matrix, b: Vector, db: Matrix },
    Quartic(f64),
}

/// Value, first and second derivatives of `L = F^2/2` at `(x, v)`.
///
/// `h_vx[(l, k)] = ∂²L/∂v^l ∂x^k`.
#[derive(Debug, Clone)]
pub struct Jet {
    pub f: f64,
    pub l_x: Vector,
    pub g: Matrix,
    pub h_vx: Matrix,
}

/// A validated chart.
#[derive(Debug, Clone)]
pub struct FinslerChart {
    pub spec: ChartSpec,
    dim: usize,
    kind: Kind,
}

fn matrix(rows: &[Vec<f64>], n: usize, what: &str) -> Result<Matrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!("{what} must be {n}x{n}")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl FinslerChart {
    pub fn build(spec: &ChartSpec) -> Result<Self> {
        let dim = spec.family.dimension();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("dimension must be 2 or 3, got {dim}")));
        }
        if spec.domain.lo.len() != dim || spec.domain.hi.len() != dim || spec.domain.lo.iter().zip(&spec.domain.hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidInput("domain must be a non-empty box of the chart dimension".into()));
        }
        let kind = match &spec.family {
            ChartFamily::Euclidean { .. } => Kind::Constant(Matrix::identity(dim, dim)),
            ChartFamily::Riemannian { metric } => match metric {
                RiemannianMetric::Constant { matrix: m } => Kind::Constant(matrix(m, dim, "metric")?),
                RiemannianMetric::Sphere { curvature, .. } => Kind::Sphere(*curvature),
                RiemannianMetric::Graph { a, b } => Kind::Graph(*a, *b),
            },
            ChartFamily::WarpedPolar { surface } => {
                let model = ModelSurface::build(surface)?;
                if spec.domain.lo[0] < model.t_min() || spec.domain.hi[0] > model.t_max() {
                    return Err(Error::InvalidInput(format!(
                        "warped_polar domain t-range must lie in [{}, {}]",
                        model.t_min(),
                        model.t_max()
                    )));
                }
                Kind::Warped(model)
            }
            ChartFamily::Randers { alpha, b, db } => {
                let a = matrix(alpha, dim, "alpha")?;
                let db = match db {
                    Some(m) => matrix(m, dim, "db")?,
                    None => Matrix::zeros(dim, dim),
                };
                Kind::Randers { a, b: Vector::from_vec(b.clone()), db }
            }
            ChartFamily::Minkowski { norm } => match norm {
                MinkowskiNorm::Quartic { .. } => Kind::Quartic(1.0),
                MinkowskiNorm::QuarticBlend { lambda, .. } => {
                    if !(0.0..=1.0).contains(lambda) {
                        return Err(Error::InvalidInput(format!("lambda must lie in [0, 1], got {lambda}")));
                    }
                    Kind::Quartic(*lambda)
                }
            },
        };
        match &kind {
            Kind::Constant(m) | Kind::Randers { a: m, .. } => {
                if m.clone().cholesky().is_none() || (m - m.transpose()).abs().max() > 1e-14 {
                    return Err(Error::InvalidInput("metric matrix must be symmetric positive definite".into()));
                }
            }
            _ => {}
        }
        let chart = FinslerChart { spec: spec.clone(), dim, kind };
        if let Kind::Randers { a, .. } = &chart.kind {
            // ‖β‖_α is convex in x, so the corners bound it on the box
            let inv = a.clone().try_inverse().expect("positive definite");
            for c in spec.domain.corners() {
                let beta = chart.beta(&c);
                let norm = (beta.transpose() * &inv * &beta)[(0, 0)].sqrt();
                if norm >= 1.0 {
                    return Err(Error::InvalidInput(format!("Randers one-form has α-norm {norm} >= 1 on the domain")));
                }
            }
        }
        Ok(chart)
    }

    pub fn euclidean(dim: usize, half_width: f64) -> Self {
        Self::build(&ChartSpec { family: ChartFamily::Euclidean { dimension: dim }, domain: Domain::cube(dim, half_width) }).expect("euclidean chart")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &Domain {
        &self.spec.domain
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.spec.domain.contains(x)
    }

    /// The model surface behind a `warped_polar` chart.
    pub fn model(&self) -> Option<&ModelSurface> {
        match &self.kind {
            Kind::Warped(m) => Some(m),
            _ => None,
        }
    }

    /// Whether `x` is the vertex `t = 0` of a `warped_polar` chart.
    pub fn is_pole(&self, x: &Vector) -> bool {
        matches!(self.kind, Kind::Warped(_)) && x[0] == 0.0
    }

    /// `F(x, -v) = F(x, v)` for every family except Randers with `β ≠ 0`.
    pub fn is_reversible(&self) -> bool {
        match &self.kind {
            Kind::Randers { b, db, .. } => b.amax() == 0.0 && db.amax() == 0.0,
            _ => true,
        }
    }

    /// Coefficients independent of the base point, so geodesics are straight lines.
    pub fn is_translation_invariant(&self) -> bool {
        match &self.kind {
            Kind::Constant(_) | Kind::Quartic(_) => true,
            Kind::Randers { db, .. } => db.amax() == 0.0,
            _ => false,
        }
    }

    pub fn is_riemannian(&self) -> bool {
        matches!(self.kind, Kind::Constant(_) | Kind::Sphere(_) | Kind::Graph(..) | Kind::Warped(_))
    }

    /// Sectional curvature oracle for Riemannian families, evaluated from the
    /// closed-form Gaussian curvature of each metric.
    pub fn sectional_oracle(&self, x: &Vector) -> Option<f64> {
        match &self.kind {
            Kind::Constant(_) => Some(0.0),
            Kind::Sphere(k) => Some(*k),
            Kind::Graph(a, b) => Some(a * b / (1.0 + a * a * x[0] * x[0] + b * b * x[1] * x[1]).powi(2)),
            Kind::Warped(m) => Some(m.g(x[0])),
            _ => None,
        }
    }

    fn beta(&self, x: &Vector) -> Vector {
        match &self.kind {
            Kind::Randers { b, db, .. } => b + db * x,
            _ => Vector::zeros(self.dim),
        }
    }

    /// Riemannian metric and its coordinate derivatives `∂_k g`.
    fn metric(&self, x: &Vector) -> Option<(Matrix, Vec<Matrix>)> {
        let n = self.dim;
        match &self.kind {
            Kind::Constant(m) => Some((m.clone(), vec![Matrix::zeros(n, n); n])),
            Kind::Sphere(k) => {
                let lam = 2.0 / (1.0 + k * x.norm_squared());
                let g = Matrix::identity(n, n) * (lam * lam);
                let dg = (0..n).map(|i| Matrix::identity(n, n) * (-2.0 * lam.powi(3) * k * x[i])).collect();
                Some((g, dg))
            }
            Kind::Graph(a, b) => {
                let grad = Vector::from_vec(vec![a * x[0], b * x[1]]);
                let g = Matrix::identity(2, 2) + &grad * grad.transpose();
                let hess = [*a, *b];
                let dg = (0..2)
                    .map(|k| {
                        let mut e = Vector::zeros(2);
                        e[k] = hess[k];
                        &e * grad.transpose() + &grad * e.transpose()
                    })
                    .collect();
                Some((g, dg))
            }
            Kind::Warped(m) => {
                let (f, df, _) = m.warp.derivs(x[0]);
                let g = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, f * f]));
                let dg_t = Matrix::from_diagonal(&Vector::from_vec(vec![0.0, 2.0 * f * df]));
                Some((g, vec![dg_t, Matrix::zeros(2, 2)]))
            }
            _ => None,
        }
    }

    /// `F(x, v)`.
    pub fn norm(&self, x: &Vector, v: &Vector) -> f64 {
        match &self.kind {
            Kind::Randers { a, .. } => (v.transpose() * a * v)[(0, 0)].sqrt() + self.beta(x).dot(v),
            Kind::Quartic(lambda) => {
                let s2 = v.norm_squared();
                let s4: f64 = v.iter().map(|c| c.powi(4)).sum();
                ((1.0 - lambda) * s2 * s2 + lambda * s4).sqrt().sqrt()
            }
            _ => {
                let (g, _) = self.metric(x).expect("riemannian");
                (v.transpose() * g * v)[(0, 0)].max(0.0).sqrt()
            }
        }
    }

    /// Closed-form jet of `L = F^2/2`. Requires `v ≠ 0`.
    pub fn jet(&self, x: &Vector, v: &Vector) -> Jet {
        let n = self.dim;
        match &self.kind {
            Kind::Randers { a, db, .. } => {
                let av = a * v;
                let alpha = v.dot(&av).sqrt();
                let beta = self.beta(x);
                let f = alpha + beta.dot(v);
                let ell = &av / alpha + &beta;
                let g = (a - &av * av.transpose() / (alpha * alpha)) * (f / alpha) + &ell * ell.transpose();
                let dbeta_v = db.transpose() * v;
                let l_x = &dbeta_v * f;
                let h_vx = &ell * dbeta_v.transpose() + db * f;
                Jet { f, l_x, g, h_vx }
            }
            Kind::Quartic(lambda) => {
                let s2 = v.norm_squared();
                let s4: f64 = v.iter().map(|c| c.powi(4)).sum();
                let p = (1.0 - lambda) * s2 * s2 + lambda * s4;
                let cube = v.map(|c| c * c * c);
                let dp = v * (4.0 * (1.0 - lambda) * s2) + cube * (4.0 * lambda);
                let d2p = (Matrix::identity(n, n) * s2 + v * v.transpose() * 2.0) * (4.0 * (1.0 - lambda))
                    + Matrix::from_diagonal(&v.map(|c| 12.0 * lambda * c * c));
                let root = p.sqrt();
                let g = d2p / (4.0 * root) - &dp * dp.transpose() / (8.0 * p * root);
                Jet { f: root.sqrt(), l_x: Vector::zeros(n), g, h_vx: Matrix::zeros(n, n) }
            }
            _ => {
                let (g, dg) = self.metric(x).expect("riemannian");
                let f = (v.transpose() * &g * v)[(0, 0)].max(0.0).sqrt();
                let l_x = Vector::from_iterator(n, dg.iter().map(|d| 0.5 * (v.transpose() * d * v)[(0, 0)]));
                let mut h_vx = Matrix::zeros(n, n);
                for (k, d) in dg.iter().enumerate() {
                    h_vx.set_column(k, &(d * v));
                }
                Jet { f, l_x, g, h_vx }
            }
        }
    }

    /// Geodesic spray `G^i(x, y)`, with geodesics solving `ẍ + 2 G(x, ẋ) = 0`.
    pub fn spray(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        if y.amax() == 0.0 {
            return Ok(Vector::zeros(self.dim));
        }
        let jet = self.jet(x, y);
        let rhs = (&jet.h_vx * y - &jet.l_x) * 0.5;
        match jet.g.clone().cholesky() {
            Some(ch) => Ok(ch.solve(&rhs)),
            None => Err(Error::DegenerateTensor { min_eigenvalue: min_eigenvalue(&jet.g) }),
        }
    }
}

pub(crate) fn min_eigenvalue(g: &Matrix) -> f64 {
    g.clone().symmetric_eigen().eigenvalues.min()
}

/// `g_v` at base `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalTensorValue {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
}

impl FundamentalTensorValue {
    pub fn matrix(&self) -> Matrix {
        let n = self.g.len();
        Matrix::from_fn(n, n, |i, j| self.g[i][j])
    }

    /// `g_v(a, b)`.
    pub fn inner(&self, a: &Vector, b: &Vector) -> f64 {
        (a.transpose() * self.matrix() * b)[(0, 0)]
    }
}

/// How the fundamental tensor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorMethod {
    /// Closed-form family formulas.
    Analytic,
    /// Central second differences of `F^2/2` in `v` with step `1e-4 F(v)`.
    FiniteDifference,
}

fn pack(x: &Vector, v: &Vector, g: Matrix) -> Result<FundamentalTensorValue> {
    let min_eigenvalue = min_eigenvalue(&g);
    if !(min_eigenvalue > MIN_EIGENVALUE) {
        return Err(Error::DegenerateTensor { min_eigenvalue });
    }
    let n = g.nrows();
    Ok(FundamentalTensorValue {
        x: x.iter().copied().collect(),
        v: v.iter().copied().collect(),
        g: (0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect(),
        min_eigenvalue,
    })
}

/// The `v`-Hessian of `F^2/2` at `(x, v)`.
pub fn fundamental_tensor(chart: &FinslerChart, x: &Vector, v: &Vector, method: TensorMethod) -> Result<FundamentalTensorValue> {
    if v.amax() == 0.0 {
        return Err(Error::InvalidInput("fundamental tensor needs v != 0".into()));
    }
    let g = match method {
        TensorMethod::Analytic => chart.jet(x, v).g,
        TensorMethod::FiniteDifference => {
            let n = chart.dim();
            let h = 1e-4 * chart.norm(x, v);
            let l = |w: &Vector| 0.5 * chart.norm(x, w).powi(2);
            let mut g = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let shifted = |si: f64, sj: f64| {
                        let mut w = v.clone();
                        w[i] += si * h;
                        w[j] += sj * h;
                        l(&w)
                    };
                    let val = if i == j {
                        (shifted(1.0, 0.0) - 2.0 * l(v) + shifted(-1.0, 0.0)) / (h * h)
                    } else {
                        (shifted(1.0, 1.0) - shifted(1.0, -1.0) - shifted(-1.0, 1.0) + shifted(-1.0, -1.0)) / (4.0 * h * h)
                    };
                    g[(i, j)] = val;
                    g[(j, i)] = val;
                }
            }
            g
        }
    };
    pack(x, v, g)
}

/// Which side of the uniform-convexity inequality is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityMode {
    /// `g_v(w, w) - F(w)^2`.
    TensorDominates,
    /// `F(w)^2 - g_v(w, w)`.
    NormDominates,
}

/// `min_w (g_v(w,w) - F(x,w)^2)` over the samples, or the reversed difference.
pub fn uniform_convexity_margin(chart: &FinslerChart, x: &Vector, v: &Vector, w_samples: &[Vector], mode: ConvexityMode) -> f64 {
    let g = chart.jet(x, v).g;
    w_samples
        .iter()
        .map(|w| {
            let gw = (w.transpose() * &g * w)[(0, 0)];
            let fw = chart.norm(x, w).powi(2);
            match mode {
                ConvexityMode::TensorDominates => gw - fw,
                ConvexityMode::NormDominates => fw - gw,
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Homogeneity, positivity and convexity checks on `samples` base/direction pairs.
pub fn check_invariants(chart: &FinslerChart, samples: &[(Vector, Vector)]) -> Result<()> {
    for (x, v) in samples {
        let f = chart.norm(x, v);
        if !(f > 0.0) {
            return Err(Error::InvalidInput(format!("F(x, v) = {f} is not positive")));
        }
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = chart.norm(x, &(v * lambda));
            if (scaled - lambda * f).abs() > 1e-9 * lambda.max(1.0) * f.max(1.0) {
                return Err(Error::InvalidInput(format!("F not 1-homogeneous at λ = {lambda}")));
            }
        }
        fundamental_tensor(chart, x, v, TensorMethod::Analytic)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SurfaceFamily;
    use num_dual::{hessian, Dual2DVec64, DualNum};

    pub(crate) fn randers(db: Option<Vec<Vec<f64>>>) -> FinslerChart {
        FinslerChart::build(&ChartSpec {
            family: ChartFamily::Randers { alpha: vec![vec![1.0, 0.0], vec![0.0, 1.0]], b: vec![0.3, -0.1], db },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap()
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_vec(xs.to_vec())
    }

    /// `L = F^2/2` through num-dual, independent of the closed forms above.
    fn ad_hessian(chart: &FinslerChart, x: &Vector, dir: &Vector) -> Matrix {
        let n = chart.dim();
        let spec = chart.spec.family.clone();
        let x = x.clone();
        let lag = move |w: DVector<Dual2DVec64>| -> Dual2DVec64 {
            match &spec {
                ChartFamily::Randers { alpha, b, db } => {
                    let mut aa = Dual2DVec64::from(0.0);
                    for i in 0..n {
                        for j in 0..n {
                            aa += w[i].clone() * w[j].clone() * alpha[i][j];
                        }
                    }
                    let mut beta = Dual2DVec64::from(0.0);
                    for i in 0..n {
                        let mut bi = b[i];
                        if let Some(db) = db {
                            for k in 0..n {
                                bi += db[i][k] * x[k];
                            }
                        }
                        beta += w[i].clone() * bi;
                    }
                    let f = aa.sqrt() + beta;
                    f.clone() * f * 0.5
                }
                ChartFamily::Minkowski { norm: MinkowskiNorm::QuarticBlend { lambda, .. } } => {
                    let mut s2 = Dual2DVec64::from(0.0);
                    let mut s4 = Dual2DVec64::from(0.0);
                    for i in 0..n {
                        s2 += w[i].powi(2);
                        s4 += w[i].powi(4);
                    }
                    (s2.clone() * s2 * (1.0 - lambda) + s4 * *lambda).sqrt() * 0.5
                }
                _ => unreachable!(),
            }
        };
        hessian(lag, dir).2
    }

    #[test]
    fn euclidean_tensor_is_identity() {
        let c = FinslerChart::euclidean(3, 5.0);
        let t = fundamental_tensor(&c, &v(&[0.1, 0.2, 0.3]), &v(&[1.0, -2.0, 0.5]), TensorMethod::FiniteDifference).unwrap();
        assert!((t.matrix() - Matrix::identity(3, 3)).abs().max() <= 1e-7);
    }

    #[test]
    fn riemannian_tensor_is_direction_independent() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Riemannian { metric: RiemannianMetric::Graph { a: 0.7, b: -0.4 } },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap();
        let x = v(&[0.3, -0.2]);
        let (g, _) = c.metric(&x).unwrap();
        for dir in [v(&[1.0, 0.0]), v(&[0.3, 0.8]), v(&[-2.0, 1.0])] {
            let t = fundamental_tensor(&c, &x, &dir, TensorMethod::FiniteDifference).unwrap();
            assert!((t.matrix() - &g).abs().max() <= 1e-7);
        }
    }

    #[test]
    fn randers_tensor_matches_automatic_differentiation() {
        let c = randers(Some(vec![vec![0.1, 0.2], vec![-0.05, 0.1]]));
        let x = v(&[0.2, -0.4]);
        for dir in [v(&[1.0, 0.0]), v(&[0.3, 0.8]), v(&[-2.0, 1.0])] {
            let closed = fundamental_tensor(&c, &x, &dir, TensorMethod::Analytic).unwrap().matrix();
            let fd = fundamental_tensor(&c, &x, &dir, TensorMethod::FiniteDifference).unwrap().matrix();
            let ad = ad_hessian(&c, &x, &dir);
            assert!((&closed - &ad).abs().max() <= 1e-12);
            assert!((&fd - &ad).abs().max() <= 1e-5);
        }
    }

    #[test]
    fn randers_jet_spatial_derivatives() {
        let c = randers(Some(vec![vec![0.1, 0.2], vec![-0.05, 0.1]]));
        let (x, dir) = (v(&[0.2, -0.4]), v(&[0.6, 0.8]));
        let jet = c.jet(&x, &dir);
        let h = 1e-5;
        for k in 0..2 {
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            let l = |y: &Vector, w: &Vector| 0.5 * c.norm(y, w).powi(2);
            assert!(((l(&xp, &dir) - l(&xm, &dir)) / (2.0 * h) - jet.l_x[k]).abs() < 1e-9);
            let grad = |y: &Vector| c.jet(y, &dir).g * &dir;
            let col = (grad(&xp) - grad(&xm)) / (2.0 * h);
            assert!((col - jet.h_vx.column(k)).abs().max() < 1e-9);
        }
    }

    #[test]
    fn quartic_blend_tensor_matches_automatic_differentiation() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Minkowski { norm: MinkowskiNorm::QuarticBlend { dimension: 3, lambda: 0.5 } },
            domain: Domain::cube(3, 1.0),
        })
        .unwrap();
        let x = Vector::zeros(3);
        for dir in [v(&[1.0, 0.0, 0.0]), v(&[0.3, 0.8, -0.2])] {
            let closed = fundamental_tensor(&c, &x, &dir, TensorMethod::Analytic).unwrap().matrix();
            assert!((closed - ad_hessian(&c, &x, &dir)).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn pure_quartic_is_degenerate_on_the_axes() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Minkowski { norm: MinkowskiNorm::Quartic { dimension: 2 } },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap();
        let err = fundamental_tensor(&c, &v(&[0.0, 0.0]), &v(&[1.0, 0.0]), TensorMethod::Analytic).unwrap_err();
        assert!(matches!(err, Error::DegenerateTensor { .. }));
    }

    #[test]
    fn euler_relation() {
        let c = randers(Some(vec![vec![0.1, 0.2], vec![-0.05, 0.1]]));
        let x = v(&[0.5, 0.5]);
        for dir in crate::numeric::directions::unit_directions(2, 16) {
            let d = Vector::from_vec(dir);
            let g = c.jet(&x, &d).g;
            assert!(((d.transpose() * g * &d)[(0, 0)] - c.norm(&x, &d).powi(2)).abs() <= 1e-7);
        }
    }

    #[test]
    fn spray_is_two_homogeneous() {
        let c = randers(Some(vec![vec![0.1, 0.2], vec![-0.05, 0.1]]));
        let (x, y) = (v(&[0.1, 0.3]), v(&[0.4, -0.7]));
        let g1 = c.spray(&x, &y).unwrap();
        let g2 = c.spray(&x, &(&y * 2.0)).unwrap();
        assert!((g2 - g1 * 4.0).abs().max() <= 1e-6);
    }

    #[test]
    fn minkowski_spray_vanishes() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Minkowski { norm: MinkowskiNorm::QuarticBlend { dimension: 2, lambda: 0.4 } },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap();
        assert!(c.spray(&v(&[0.1, 0.2]), &v(&[0.3, 1.0])).unwrap().amax() <= 1e-7);
    }

    #[test]
    fn riemannian_spray_matches_christoffel_symbols() {
        // Christoffel symbols from finite differences of g, independent of the analytic ∂g
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Riemannian { metric: RiemannianMetric::Sphere { dimension: 3, curvature: 1.0 } },
            domain: Domain::cube(3, 1.0),
        })
        .unwrap();
        let (x, y) = (v(&[0.2, -0.1, 0.4]), v(&[0.5, 0.3, -0.8]));
        let h = 1e-5;
        let n = 3;
        let dg: Vec<Matrix> = (0..n)
            .map(|k| {
                let mut xp = x.clone();
                xp[k] += h;
                let mut xm = x.clone();
                xm[k] -= h;
                (c.metric(&xp).unwrap().0 - c.metric(&xm).unwrap().0) / (2.0 * h)
            })
            .collect();
        let ginv = c.metric(&x).unwrap().0.try_inverse().unwrap();
        let mut oracle = Vector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut gamma = 0.0;
                    for l in 0..n {
                        gamma += 0.5 * ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    }
                    oracle[i] += 0.5 * gamma * y[j] * y[k];
                }
            }
        }
        assert!((c.spray(&x, &y).unwrap() - oracle).abs().max() <= 1e-5);
    }

    #[test]
    fn convexity_margins() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Riemannian { metric: RiemannianMetric::Sphere { dimension: 2, curvature: 1.0 } },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap();
        let ws: Vec<Vector> = crate::numeric::directions::unit_directions(2, 32).into_iter().map(Vector::from_vec).collect();
        let m = uniform_convexity_margin(&c, &v(&[0.3, 0.1]), &v(&[1.0, 0.5]), &ws, ConvexityMode::TensorDominates);
        assert!(m.abs() <= 1e-7);
    }

    #[test]
    fn quartic_convexity_margin_matches_dense_grid() {
        let c = FinslerChart::build(&ChartSpec {
            family: ChartFamily::Minkowski { norm: MinkowskiNorm::QuarticBlend { dimension: 2, lambda: 0.9 } },
            domain: Domain::cube(2, 1.0),
        })
        .unwrap();
        let (x, dir) = (Vector::zeros(2), v(&[1.0, 0.0]));
        let coarse: Vec<Vector> = crate::numeric::directions::unit_directions(2, 64).into_iter().map(Vector::from_vec).collect();
        let dense: Vec<Vector> = (0..20_000)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 20_000.0;
                v(&[a.cos(), a.sin()])
            })
            .collect();
        let m = uniform_convexity_margin(&c, &x, &dir, &coarse, ConvexityMode::TensorDominates);
        let oracle = uniform_convexity_margin(&c, &x, &dir, &dense, ConvexityMode::TensorDominates);
        assert_eq!(m.signum(), oracle.signum());
        assert!(oracle < 0.0);
    }

    #[test]
    fn randers_rejects_large_one_form() {
        let spec = ChartSpec {
            family: ChartFamily::Randers { alpha: vec![vec![1.0, 0.0], vec![0.0, 1.0]], b: vec![0.9, 0.0], db: Some(vec![vec![0.5, 0.0], vec![0.0, 0.0]]) },
            domain: Domain::cube(2, 1.0),
        };
        assert!(FinslerChart::build(&spec).is_err());
    }

    #[test]
    fn homogeneity_invariants() {
        let c = randers(None);
        let samples: Vec<(Vector, Vector)> = crate::numeric::directions::unit_directions(2, 8).into_iter().map(|d| (v(&[0.1, 0.1]), Vector::from_vec(d))).collect();
        check_invariants(&c, &samples).unwrap();
    }

    #[test]
    fn warped_polar_spec_roundtrip() {
        let spec = ChartSpec {
            family: ChartFamily::WarpedPolar { surface: SurfaceSpec::new(SurfaceFamily::GaussTanh).with_t_max(3.0) },
            domain: Domain::new(vec![0.01, -7.0], vec![3.0, 7.0]),
        };
        let text = toml::to_string(&spec).unwrap();
        assert_eq!(toml::from_str::<ChartSpec>(&text).unwrap(), spec);
        assert!(FinslerChart::build(&spec).unwrap().model().is_some());
    }
}
