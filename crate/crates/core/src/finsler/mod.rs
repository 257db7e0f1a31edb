//! Finsler metrics on coordinate charts.

pub mod angle;
pub mod chart;
pub mod curvature;
pub mod geodesic;

pub use chart::{
    fundamental_tensor, uniform_convexity_margin, ChartFamily, ChartSpec, ConvexityMode, Domain, FinslerChart, FundamentalTensorValue,
    Matrix, MinkowskiNorm, RiemannianMetric, TensorMethod, Vector,
};
pub use geodesic::{distance, dm, integrate_geodesic, reverse_geodesic_check, reversed_length, ChartGeodesic, ChartSample, MinimalConnector, ReverseCheck};
pub use angle::{backward_angle, forward_angle, Side};
pub use curvature::{flag_curvature, radial_bound_check, tangent_curvature, RadialBound};
