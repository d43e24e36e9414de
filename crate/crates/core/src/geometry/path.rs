use serde::{Deserialize, Serialize};

use super::{dist_linf, PlanarSpace, Point, MEMBERSHIP_TOL};
use crate::error::{Error, Result};

/// A polyline traversed on `[0, 1]` with constant sup-norm speed.
///
/// The stored `length` is the sup-norm arclength of the polyline. It equals
/// the distance between the endpoints exactly when the path is a geodesic,
/// which [`is_geodesic`] checks rather than assumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    vertices: Vec<Point>,
    /// Cumulative arclength fraction at each vertex; starts at 0, ends at 1.
    breakpoints: Vec<f64>,
    length: f64,
}

impl GeodesicPath {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        constant_speed_reparam(&vertices)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    /// `gamma(t)` for `t` clamped into `[0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        let t = t.clamp(0.0, 1.0);
        // first breakpoint >= t
        let idx = self.breakpoints.partition_point(|&b| b < t).clamp(1, self.vertices.len() - 1);
        let (b0, b1) = (self.breakpoints[idx - 1], self.breakpoints[idx]);
        let s = if b1 > b0 { (t - b0) / (b1 - b0) } else { 1.0 };
        self.vertices[idx - 1].lerp(self.vertices[idx], s)
    }

    /// Mirror image under `(x, y) -> (-x, y)`.
    pub fn reflect_x(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| p.reflect_x()).collect(),
            breakpoints: self.breakpoints.clone(),
            length: self.length,
        }
    }
}

/// Builds the constant-speed parametrization of a polyline. Zero-length legs
/// are dropped; a polyline with zero total length is rejected.
pub fn constant_speed_reparam(vertices: &[Point]) -> Result<GeodesicPath> {
    if vertices.len() < 2 {
        return Err(Error::TooFewVertices(vertices.len()));
    }
    if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
        return Err(Error::OutsideSpace(*p));
    }
    let mut kept = vec![vertices[0]];
    let mut cumulative = vec![0.0];
    for &v in &vertices[1..] {
        let last = *kept.last().unwrap();
        let leg = dist_linf(last, v);
        if leg > 0.0 {
            cumulative.push(cumulative.last().unwrap() + leg);
            kept.push(v);
        }
    }
    let length = *cumulative.last().unwrap();
    if kept.len() < 2 || length <= 0.0 {
        return Err(Error::DegeneratePath);
    }
    let mut breakpoints: Vec<f64> = cumulative.iter().map(|c| c / length).collect();
    *breakpoints.last_mut().unwrap() = 1.0;
    Ok(GeodesicPath {
        vertices: kept,
        breakpoints,
        length,
    })
}

/// Checks the geodesic identity `d(gamma_s, gamma_t) = |s - t| * length` on
/// `samples` equally spaced times (plus the vertex times) and membership of
/// every sampled point.
pub fn is_geodesic(space: &PlanarSpace, path: &GeodesicPath, samples: usize, tol: f64) -> bool {
    let samples = samples.max(2);
    let mut times: Vec<f64> = (0..samples).map(|k| k as f64 / (samples - 1) as f64).collect();
    times.extend_from_slice(path.breakpoints());
    let pts: Vec<Point> = times.iter().map(|&t| path.point_at(t)).collect();
    if pts.iter().any(|&p| !space.contains(p, MEMBERSHIP_TOL)) {
        return false;
    }
    let scale = path.length().max(1.0);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let expected = (times[i] - times[j]).abs() * path.length();
            if (dist_linf(pts[i], pts[j]) - expected).abs() > tol * scale {
                return false;
            }
        }
    }
    true
}
