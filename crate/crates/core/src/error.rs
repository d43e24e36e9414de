use crate::geometry::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("path needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("path has zero total length")]
    DegeneratePath,
    #[error("point ({}, {}) is not in the space", .0.x, .0.y)]
    OutsideSpace(Point),
    #[error("argument {name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid distortion parameters K = {k}, N = {n}")]
    InvalidParams { k: f64, n: f64 },
    #[error("target set has no reference mass inside the space")]
    EmptyTarget,
    #[error("geodesic from ({}, {}) to ({}, {}) failed validation", .source_point.x, .source_point.y, .target.x, .target.y)]
    NotGeodesic { source_point: Point, target: Point },
    #[error("transported mass {mass} landed in a bin with no reference mass near ({}, {})", .at.x, .at.y)]
    MassEscaped { mass: f64, at: Point },
    #[error("radius {radius} reaches the gluing locus at distance {limit}")]
    StraddlesGluing { radius: f64, limit: f64 },
    #[error("transport problem is infeasible")]
    Infeasible,
    #[error("{0}")]
    Invalid(String),
}

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}
