//! Model surfaces of revolution `dt^2 + f(t)^2 dθ^2`.

pub mod clairaut;
pub mod conjugate;
pub mod curvature;
pub mod distance;
pub mod geodesic;
pub mod surface;
pub mod warp;

pub use conjugate::{check_angle_lemma, cut_locus, first_conjugate_point, parallel_circle_residual, AngleLemma, CutLocus};
pub use curvature::{curvature_from_warp, RadialCurvature};
pub use distance::{model_distance, shooting_connectors, Connector};
pub use geodesic::{clairaut_constant, integrate_geodesic, GeodesicSample, ModelGeodesic};
pub use surface::{classify_model, Classification, ModelPoint, ModelSurface, SurfaceFamily, SurfaceSpec};
pub use warp::{warp_from_curvature, AnalyticWarp, WarpFunction};
