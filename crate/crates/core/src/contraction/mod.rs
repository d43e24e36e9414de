//! Distortion coefficients and the explicit geodesic selections whose
//! pushforwards realize the contraction property on the two spaces.

mod distortion;
mod plan;
mod selection;

pub use distortion::{mcp_bound, s_k, sigma, DistortionParams};
pub use plan::{bin_rect, build_contraction, row, selected_path, target_cells, Cell, ContractionPlan, PlanEntry, Rect};
pub use selection::{
    analytic_density_ratio, classify_x, classify_y, equidistant_slice, in_x, in_y, select, select_geodesic_x,
    select_geodesic_y, select_x, select_y, spread_height, spreads, CaseLabel,
};
