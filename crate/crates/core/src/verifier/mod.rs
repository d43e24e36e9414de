//! Certification suites. Every suite returns a [`CheckReport`] whose
//! margins follow one convention: a check passes when each margin is at
//! most its tolerance.

mod cd;
mod density;
mod diameter;
mod dimension;
mod geodesicity;
mod lemma;
mod mcp;
mod report;
mod sampling;
mod tangent;

pub use cd::{band_control, cd_failure_search, default_candidates, midpoint_certificate, CdCandidate, CdOptions, MidpointCertificate};
pub use density::{corner_paths, empirical_density_ratio, empirical_density_ratio_cached, BinRecord, DensityField, ReferenceCache};
pub use report::{CheckReport, MarginRecord, Metric, Verdict, Witness};
pub use mcp::{default_configs, default_params, verify_mcp, McpConfig, McpOptions};
pub use lemma::{f_check, f_l, f_l_second, hitting_time, large_l_chain_check, LemmaGrid};
pub use diameter::{diameter, diameter_check};
pub use dimension::{default_radii, dimension_check, dimension_exponent, dimension_probes};
pub use geodesicity::geodesicity_suite;
pub use tangent::{default_scales, sampled_distance, tangent_blowup_compare, PointedBall};
