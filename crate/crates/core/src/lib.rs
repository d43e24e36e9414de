//! Constructions and numerical certificates for two measure-contraction
//! counterexamples in the plane with the sup-norm metric.
//!
//! * [`spaces::ConeSpace`]: a weighted cone glued to a half-line. It satisfies
//!   `MCP(0,3)`, contains a line, and does not split.
//! * [`spaces::SuspensionSpace`]: a weighted lens glued to two segments. It
//!   satisfies `MCP(2,3)`, has diameter `pi`, and is not a spherical suspension.
//!
//! The [`contraction`] module encodes the explicit geodesic selections that
//! realize the contraction property together with their density ratios, and
//! [`verifier`] turns every inequality behind the two constructions into a
//! sampled check that produces a [`verifier::CheckReport`].

pub mod contraction;
pub mod error;
pub mod geometry;
pub mod spaces;
pub mod verifier;

pub use error::{Error, Result};
pub use geometry::{dist_linf, GeodesicPath, PlanarSpace, Point};
pub use spaces::{ConeSpace, ModelSpace, SpaceTag, SuspensionSpace};
