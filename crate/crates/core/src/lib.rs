//! Numerical workbench for comparison geometry on Finsler manifolds.
//!
//! * [`model`]: surfaces of revolution `dt^2 + f(t)^2 dθ^2`, their radial
//!   curvature, Clairaut geodesics, distances, conjugate points and cut loci.
//! * [`finsler`]: coordinate charts carrying a Finsler metric `F(x, v)`, with the
//!   fundamental tensor, spray, geodesics, directed distances, one-sided angles,
//!   flag curvature and tangent curvature.
//! * [`comparison`]: forward triangles, comparison triangles on a model,
//!   triangle-comparison checks, critical-point scans, diameter growth and the
//!   broken-geodesic chain construction.

pub mod comparison;
pub mod error;
pub mod finsler;
pub mod model;
pub mod numeric;
pub mod parallel;

pub use error::{Error, Result};
