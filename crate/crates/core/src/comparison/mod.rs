//! Triangle comparison on top of the model and chart numerics.

pub mod chain;
pub mod critical;
pub mod tct;
pub mod triangle;

pub use chain::{broken_geodesic_chain, geodesic_panels, ChainPanel, ChainReport, ChainSample, ClairautEstimate, PanelMethod, PanelSide, UnderPassing};
pub use critical::{critical_scan, diameter_growth, is_forward_critical, shell_points, CriticalScanReport, CriticalVerdict, GrowthReport, GrowthRow, ScanFailure, ScanPoint};
pub use tct::{verify_tct, verify_tct_with, TctHypotheses, TctOptions, TctReport};
pub use triangle::{build_comparison_triangle, build_forward_triangle, ComparisonTriangle, ForwardTriangle};
