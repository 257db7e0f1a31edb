//! Flag curvature from the spray and tangent curvature from the Chern
//! connection, both by nested finite differences of closed-form quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::chart::{FinslerChart, Matrix, Vector};
use crate::finsler::geodesic::integrate_geodesic;
use crate::model::ModelSurface;
use crate::numeric::directions::unit_directions;
use crate::numeric::fd::D1_STENCIL;

/// Step for derivatives in the base point.
pub const X_STEP: f64 = 1e-3;
/// Relative step for derivatives in the direction.
pub const Y_STEP: f64 = 1e-3;
/// Flags with a smaller Gram determinant are rejected.
pub const FLAG_TOL: f64 = 1e-12;

/// Five-point derivative of a vector-valued function along `dir` at step `h`.
fn directional<F: Fn(&Vector) -> Result<Vector>>(f: F, at: &Vector, dir: &Vector, h: f64) -> Result<Vector> {
    let mut acc = Vector::zeros(0);
    for &(off, w) in D1_STENCIL.iter() {
        let val = f(&(at + dir * (off * h)))? * (w / h);
        acc = if acc.is_empty() { val } else { acc + val };
    }
    Ok(acc)
}

fn basis(n: usize, k: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[k] = 1.0;
    e
}

/// Jacobian of a vector field, column `k` the derivative along `e_k`.
fn jacobian<F: Fn(&Vector) -> Result<Vector>>(f: F, at: &Vector, h: f64) -> Result<Matrix> {
    let n = at.len();
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        m.set_column(k, &directional(&f, at, &basis(n, k), h)?);
    }
    Ok(m)
}

/// The Riemann curvature operator `R^i_k(x, y)` of the spray,
/// `R^i_k = 2∂_k G^i - y^j ∂_j ∂_{y^k} G^i + 2 G^j ∂_{y^j} ∂_{y^k} G^i - ∂_{y^j} G^i ∂_{y^k} G^j`.
pub fn riemann_operator(chart: &FinslerChart, x: &Vector, y: &Vector) -> Result<Matrix> {
    let n = chart.dim();
    let hy = Y_STEP * y.norm();
    let g0 = chart.spray(x, y)?;
    let jx = jacobian(|z| chart.spray(z, y), x, X_STEP)?;
    let jy = jacobian(|w| chart.spray(x, w), y, hy)?;
    // D(x, y) = y^j ∂_j G(x, y) with y frozen in the direction; then
    // y^j ∂_j ∂_{y^k} G = ∂_{y^k} D - ∂_k G.
    let dir_x = |w: &Vector| {
        let ynorm = w.norm();
        directional(|z| chart.spray(z, w), x, &(w / ynorm), X_STEP).map(|d| d * ynorm)
    };
    let ddy = jacobian(dir_x, y, hy)?;
    let mixed = ddy - &jx;
    // G^j ∂_{y^j} ∂_{y^k} G^i, the derivative of ∂_y G along the frozen vector G(x, y)
    let second = if g0.norm() > 0.0 {
        let gn = g0.norm();
        let u = &g0 / gn;
        let mut acc = Matrix::zeros(n, n);
        for &(off, w) in D1_STENCIL.iter() {
            let shifted = y + &u * (off * hy);
            acc += jacobian(|v| chart.spray(x, v), &shifted, hy)? * (w / hy);
        }
        acc * gn
    } else {
        Matrix::zeros(n, n)
    };
    Ok(jx * 2.0 - mixed + second * 2.0 - &jy * &jy)
}

/// Flag curvature `K(v, w) = g_v(R_v(w), w) / (g_v(v,v) g_v(w,w) - g_v(v,w)^2)`.
pub fn flag_curvature(chart: &FinslerChart, x: &Vector, v: &Vector, w: &Vector) -> Result<f64> {
    let g = chart.jet(x, v).g;
    let gvv = (v.transpose() * &g * v)[(0, 0)];
    let gww = (w.transpose() * &g * w)[(0, 0)];
    let gvw = (v.transpose() * &g * w)[(0, 0)];
    let denominator = gvv * gww - gvw * gvw;
    if denominator < FLAG_TOL * gvv.max(1.0) * gww.max(1.0) {
        return Err(Error::FlagDegenerate { denominator });
    }
    let r = riemann_operator(chart, x, v)?;
    let rw = r * w;
    Ok((rw.transpose() * &g * w)[(0, 0)] / denominator)
}

/// Chern connection coefficients `Γ^i_{jk}(x, y)`, returned as `n` matrices
/// indexed by `i`.
pub fn chern_connection(chart: &FinslerChart, x: &Vector, y: &Vector) -> Result<Vec<Matrix>> {
    let n = chart.dim();
    let hy = Y_STEP * y.norm();
    let g = chart.jet(x, y).g;
    let ginv = g.clone().try_inverse().ok_or(Error::DegenerateTensor { min_eigenvalue: 0.0 })?;
    let nonlinear = jacobian(|w| chart.spray(x, w), y, hy)?;
    let dgx: Vec<Matrix> = (0..n).map(|k| tensor_derivative(|z| chart.jet(z, y).g, x, &basis(n, k), X_STEP)).collect();
    let dgy: Vec<Matrix> = (0..n).map(|m| tensor_derivative(|w| chart.jet(x, w).g, y, &basis(n, m), hy)).collect();
    // δ_j g = ∂_{x^j} g - N^m_j ∂_{y^m} g
    let delta: Vec<Matrix> = (0..n)
        .map(|j| {
            let mut d = dgx[j].clone();
            for (m, dg) in dgy.iter().enumerate() {
                d -= dg * nonlinear[(m, j)];
            }
            d
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            Matrix::from_fn(n, n, |j, k| {
                (0..n).map(|l| 0.5 * ginv[(i, l)] * (delta[j][(l, k)] + delta[k][(j, l)] - delta[l][(j, k)])).sum()
            })
        })
        .collect())
}

fn tensor_derivative<F: Fn(&Vector) -> Matrix>(f: F, at: &Vector, dir: &Vector, h: f64) -> Matrix {
    let mut acc = Matrix::zeros(at.len(), at.len());
    for &(off, w) in D1_STENCIL.iter() {
        acc += f(&(at + dir * (off * h))) * (w / h);
    }
    acc
}

/// Extension of a tangent vector to a vector field near the base point.
#[derive(Debug, Clone, PartialEq)]
pub enum Extension {
    /// Constant coefficients in the chart.
    Constant,
    /// `Y(z) = w + A (z - x)`.
    Linear(Matrix),
}

impl Extension {
    fn field(&self, x: &Vector, w: &Vector, z: &Vector) -> Vector {
        match self {
            Extension::Constant => w.clone(),
            Extension::Linear(a) => w + a * (z - x),
        }
    }
}

/// `D^Z_W W` at `x` for the extension of `w`, with reference vector `z`.
fn covariant(chart: &FinslerChart, x: &Vector, w: &Vector, z: &Vector, ext: &Extension) -> Result<Vector> {
    let n = chart.dim();
    let grad = jacobian(|p| Ok(ext.field(x, w, p)), x, X_STEP)?;
    let gamma = chern_connection(chart, x, z)?;
    let mut out = grad * w;
    for i in 0..n {
        out[i] += (w.transpose() * &gamma[i] * w)[(0, 0)];
    }
    Ok(out)
}

/// Tangent curvature `T(v, w) = g_v(D^W_W W - D^V_W W, V)` with the given
/// extension of `w` (the extension of `v` only enters through `v` itself).
pub fn tangent_curvature_with(chart: &FinslerChart, x: &Vector, v: &Vector, w: &Vector, ext: &Extension) -> Result<f64> {
    if v.amax() == 0.0 || w.amax() == 0.0 {
        return Err(Error::InvalidInput("tangent curvature needs v, w != 0".into()));
    }
    let diff = covariant(chart, x, w, w, ext)? - covariant(chart, x, w, v, ext)?;
    let g = chart.jet(x, v).g;
    Ok((diff.transpose() * g * v)[(0, 0)])
}

/// Tangent curvature with coordinate-constant extensions.
pub fn tangent_curvature(chart: &FinslerChart, x: &Vector, v: &Vector, w: &Vector) -> Result<f64> {
    tangent_curvature_with(chart, x, v, w, &Extension::Constant)
}

/// One row of a [`RadialBound`] report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBoundSample {
    pub ray: usize,
    pub t: f64,
    pub w: Vec<f64>,
    pub flag_curvature: f64,
    pub model_curvature: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBound {
    pub samples: Vec<RadialBoundSample>,
    pub min_margin: f64,
}

/// Number of radial geodesics sampled from `p`.
pub const RADIAL_RAYS: usize = 4;

/// Compares `K(γ̇(t), w)` with `G(t)` along radial geodesics from `p`.
pub fn radial_bound_check(chart: &FinslerChart, model: &ModelSurface, p: &Vector, t_samples: &[f64], w_per_point: usize) -> Result<RadialBound> {
    let n = chart.dim();
    let t_end = t_samples.iter().copied().fold(0.0, f64::max);
    let ws: Vec<Vector> = unit_directions(n, w_per_point).into_iter().map(Vector::from_vec).collect();
    let mut samples = Vec::new();
    for ray in 0..RADIAL_RAYS {
        let points: Vec<(f64, Vector, Vector)> = if chart.is_pole(p) {
            let theta = std::f64::consts::TAU * ray as f64 / RADIAL_RAYS as f64;
            t_samples.iter().map(|&t| (t, Vector::from_vec(vec![t, theta]), Vector::from_vec(vec![1.0, 0.0]))).collect()
        } else {
            let dir = Vector::from_vec(unit_directions(n, RADIAL_RAYS)[ray].clone());
            let u = &dir / chart.norm(p, &dir);
            let path = integrate_geodesic(chart, p, &u, t_end, crate::finsler::geodesic::CHART_STEP)?;
            t_samples
                .iter()
                .map(|&t| {
                    let (x, v) = path.at(t);
                    (t, x, v)
                })
                .collect()
        };
        for (t, x, v) in points {
            for w in &ws {
                let cos = w.dot(&v) / (w.norm() * v.norm());
                if cos.abs() > 0.99 {
                    continue;
                }
                let k = flag_curvature(chart, &x, &v, w)?;
                let g = model.g(t);
                samples.push(RadialBoundSample { ray, t, w: w.iter().copied().collect(), flag_curvature: k, model_curvature: g, margin: k - g });
            }
        }
    }
    let min_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    Ok(RadialBound { samples, min_margin })
}
