//! Sup-norm planar geometry: points, constant-speed polylines, glued
//! weighted spaces, a grid shortest-path oracle and ball measures.

mod intrinsic;
mod measure;
mod path;
pub mod polygon;
mod space;

pub use intrinsic::intrinsic_dist;
pub use measure::{ball_measure, gauss_legendre};
pub use path::{constant_speed_reparam, is_geodesic, GeodesicPath};
pub use space::{LinearDensity, PlanarSpace, Region2D, Segment1D, Stratum};

use serde::{Deserialize, Serialize};

/// Absolute membership tolerance used when sampling paths.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point on the straight segment `self -> other` at parameter `s`.
    pub fn lerp(self, other: Point, s: f64) -> Point {
        if s == 1.0 {
            return other;
        }
        Point::new(
            self.x + s * (other.x - self.x),
            self.y + s * (other.y - self.y),
        )
    }

    pub fn reflect_x(self) -> Point {
        Point::new(-self.x, self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// The sup-norm distance `max(|x1 - x2|, |y1 - y2|)`.
#[inline]
pub fn dist_linf(p: Point, q: Point) -> f64 {
    (p.x - q.x).abs().max((p.y - q.y).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn dist_examples() {
        assert_eq!(dist_linf(Point::new(0.0, 0.0), Point::new(3.0, 4.0)), 4.0);
        assert_eq!(dist_linf(Point::new(-3.0, 0.5), Point::new(-3.0, -0.5)), 1.0);
        assert_eq!(dist_linf(Point::new(-PI / 2.0, 0.0), Point::new(PI / 2.0, 0.0)), PI);
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // Integer-valued coordinates keep every comparison exact.
        let mut draw = || Point::new(rng.gen_range(-1000..1000) as f64, rng.gen_range(-1000..1000) as f64);
        for _ in 0..10_000 {
            let (a, b, c) = (draw(), draw(), draw());
            assert!(dist_linf(a, b) >= 0.0);
            assert_eq!(dist_linf(a, b), dist_linf(b, a));
            assert!(dist_linf(a, c) <= dist_linf(a, b) + dist_linf(b, c));
            assert_eq!(dist_linf(a, a), 0.0);
        }
    }

    proptest! {
        #[test]
        fn triangle_inequality(ax in -1e3..1e3f64, ay in -1e3..1e3f64,
                               bx in -1e3..1e3f64, by in -1e3..1e3f64,
                               cx in -1e3..1e3f64, cy in -1e3..1e3f64) {
            let (a, b, c) = (Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy));
            prop_assert!(dist_linf(a, c) <= dist_linf(a, b) + dist_linf(b, c) + 1e-9);
        }
    }
}
