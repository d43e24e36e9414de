//! The two weighted spaces: a cone glued to a half-line, and a lens glued to
//! two segments. Both carry a reference measure whose density is constant on
//! vertical slices, so everything is determined by the slice mass per unit
//! `x` and the slice height.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{domain, Result};
use crate::geometry::{LinearDensity, PlanarSpace, Point, Region2D, Segment1D};

/// Half-width of the lens `D` along the axis.
pub const LENS_TIP: f64 = 0.25;
/// `D = {9|y| <= 1/4 - |x|}`.
pub const LENS_SLOPE: f64 = 1.0 / 9.0;
/// `C = {x <= -3|y|}`: `|y| <= CONE_SLOPE * (-x)`.
pub const CONE_SLOPE: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Cone,
    Suspension,
}

impl SpaceTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceTag::Cone => "cone",
            SpaceTag::Suspension => "suspension",
        }
    }
}

impl std::fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SpaceTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cone" => Ok(SpaceTag::Cone),
            "suspension" => Ok(SpaceTag::Suspension),
            other => Err(format!("unknown space '{other}' (expected cone or suspension)")),
        }
    }
}

/// The cone `{x <= -|y|/slope}` truncated to `x >= -x_min`, with slice mass
/// 1 per unit `x`, glued at its apex to the half-line `[0, x_max] x {0}`
/// with linear density 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSpace {
    x_min: f64,
    x_max: f64,
    slope: f64,
    space: PlanarSpace,
}

impl ConeSpace {
    /// Both extents default to 10.
    pub fn standard() -> Self {
        Self::new(10.0, 10.0).expect("default extents are valid")
    }

    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        Self::with_opening(x_min, x_max, CONE_SLOPE)
    }

    /// A cone of boundary slope `slope`; the areal density becomes
    /// `1 / (2 slope (-x))`, keeping the projection Lebesgue.
    pub fn with_opening(x_min: f64, x_max: f64, slope: f64) -> Result<Self> {
        for (name, v) in [("x_min", x_min), ("x_max", x_max), ("slope", slope)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(name, v, "must be positive and finite"));
            }
        }
        let cone = Region2D::new(
            vec![
                Point::ORIGIN,
                Point::new(-x_min, -slope * x_min),
                Point::new(-x_min, slope * x_min),
            ],
            LinearDensity::Constant(1.0),
        );
        let ray = Segment1D::horizontal(0.0, x_max, 0.0, LinearDensity::Constant(1.0));
        Ok(Self {
            x_min,
            x_max,
            slope,
            space: PlanarSpace::new(vec![cone], vec![ray]),
        })
    }

    pub fn space(&self) -> &PlanarSpace {
        &self.space
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    /// `3 / (-2x)` for the standard opening; zero outside the cone.
    pub fn areal_density(&self, p: Point) -> f64 {
        if p.x < 0.0 && self.space.regions()[0].contains(p, 0.0) {
            1.0 / (2.0 * self.slope * -p.x)
        } else {
            0.0
        }
    }

    pub fn linear_density(&self, p: Point) -> f64 {
        if self.space.segments()[0].contains(p, 0.0) {
            1.0
        } else {
            0.0
        }
    }
}

/// `Y = D ∪ L` with `D` the lens `{9|y| <= 1/4 - |x|}` and
/// `L = ([-pi/2, -1/4] ∪ [1/4, pi/2]) x {0}`; projected density `cos^2 x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSpace {
    space: PlanarSpace,
}

impl Default for SuspensionSpace {
    fn default() -> Self {
        Self::new()
    }
}

impl SuspensionSpace {
    pub fn new() -> Self {
        let half = LENS_SLOPE * LENS_TIP;
        let lens = Region2D::new(
            vec![
                Point::new(-LENS_TIP, 0.0),
                Point::new(0.0, -half),
                Point::new(LENS_TIP, 0.0),
                Point::new(0.0, half),
            ],
            LinearDensity::CosSquared,
        );
        let left = Segment1D::horizontal(-FRAC_PI_2, -LENS_TIP, 0.0, LinearDensity::CosSquared);
        let right = Segment1D::horizontal(LENS_TIP, FRAC_PI_2, 0.0, LinearDensity::CosSquared);
        Self {
            space: PlanarSpace::new(vec![lens], vec![left, right]),
        }
    }

    pub fn space(&self) -> &PlanarSpace {
        &self.space
    }

    /// `cos^2(x) * 9 / (2 (1/4 - |x|))` inside the lens.
    pub fn areal_density(&self, p: Point) -> f64 {
        if p.x.abs() < LENS_TIP && self.space.regions()[0].contains(p, 0.0) {
            p.x.cos().powi(2) / lens_height(p.x)
        } else {
            0.0
        }
    }

    pub fn linear_density(&self, p: Point) -> f64 {
        if self.space.segments().iter().any(|s| s.contains(p, 0.0)) {
            p.x.cos().powi(2)
        } else {
            0.0
        }
    }
}

/// Height of the lens slice at `x`: `2 (1/4 - |x|) / 9`, zero outside.
pub fn lens_height(x: f64) -> f64 {
    2.0 * LENS_SLOPE * (LENS_TIP - x.abs()).max(0.0)
}

/// Height of the standard cone slice at `x`: `2(-x)/3`, zero for `x >= 0`.
pub fn cone_height(x: f64) -> f64 {
    2.0 * CONE_SLOPE * (-x).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelSpace {
    Cone(ConeSpace),
    Suspension(SuspensionSpace),
}

impl ModelSpace {
    pub fn from_tag(tag: SpaceTag) -> Self {
        match tag {
            SpaceTag::Cone => ModelSpace::Cone(ConeSpace::standard()),
            SpaceTag::Suspension => ModelSpace::Suspension(SuspensionSpace::new()),
        }
    }

    pub fn tag(&self) -> SpaceTag {
        match self {
            ModelSpace::Cone(_) => SpaceTag::Cone,
            ModelSpace::Suspension(_) => SpaceTag::Suspension,
        }
    }

    pub fn space(&self) -> &PlanarSpace {
        match self {
            ModelSpace::Cone(c) => c.space(),
            ModelSpace::Suspension(s) => s.space(),
        }
    }
}

/// Lebesgue measure of the region slice above `x`; zero on pure segments.
pub fn slice_height(space: &PlanarSpace, x: f64) -> f64 {
    space.slice_height(x)
}

/// Density of the first-coordinate pushforward of the reference measure.
pub fn projected_density(space: &PlanarSpace, x: f64) -> f64 {
    space.projected_density(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cone_examples() {
        let x = ConeSpace::standard();
        assert!((x.areal_density(Point::new(-3.0, 0.5)) - 0.5).abs() < 1e-15);
        assert!((slice_height(x.space(), -3.0) - 2.0).abs() < 1e-15);
        assert_eq!(x.linear_density(Point::new(2.0, 0.0)), 1.0);
        assert!(x.space().contains(Point::new(-3.0, 1.0), 0.0));
        assert!(!x.space().contains(Point::new(-3.0, 1.01), 0.0));
        for k in 0..100 {
            let xx = -10.0 + 0.1 * k as f64 + 0.05;
            assert!((slice_height(x.space(), xx) * x.areal_density(Point::new(xx, 0.0)) - 1.0).abs() < 1e-12);
            assert_eq!(projected_density(x.space(), xx), 1.0);
            assert_eq!(projected_density(x.space(), -xx), 1.0);
        }
    }

    #[test]
    fn cone_density_increases_toward_apex() {
        let x = ConeSpace::standard();
        let mut prev = 0.0;
        for k in 1..200 {
            let xx = -10.0 + 0.05 * k as f64;
            let d = x.areal_density(Point::new(xx, 0.0));
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn cone_rejects_bad_extent() {
        assert!(ConeSpace::new(0.0, 1.0).is_err());
        assert!(ConeSpace::with_opening(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn suspension_examples() {
        let y = SuspensionSpace::new();
        assert!((y.areal_density(Point::ORIGIN) - 18.0).abs() < 1e-12);
        assert!(y.linear_density(Point::new(PI / 2.0, 0.0)) < 1e-30);
        assert!((slice_height(y.space(), 0.0) - 1.0 / 18.0).abs() < 1e-15);
        assert_eq!(slice_height(y.space(), 0.25), 0.0);
        assert_eq!(projected_density(y.space(), 0.0), 1.0);
        assert!((projected_density(y.space(), PI / 3.0) - 0.25).abs() < 1e-15);
        assert!(y.space().contains(Point::new(0.0, 1.0 / 36.0), 0.0));
        assert!((y.space().total_mass(1e-3) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn suspension_slice_mass_is_cos_squared() {
        let y = SuspensionSpace::new();
        for k in 0..1000 {
            let x = -PI / 2.0 + PI * (k as f64 + 0.5) / 1000.0;
            let slice = if x.abs() < LENS_TIP {
                slice_height(y.space(), x) * y.areal_density(Point::new(x, 0.0))
            } else {
                y.linear_density(Point::new(x, 0.0))
            };
            assert!((slice - x.cos().powi(2)).abs() < 1e-10, "{x}");
            assert!((projected_density(y.space(), x) - x.cos().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn suspension_symmetry() {
        let y = SuspensionSpace::new();
        for (a, b) in [(0.1, 0.01), (0.2, -0.003), (-0.05, 0.02)] {
            let d = y.areal_density(Point::new(a, b));
            assert_eq!(d, y.areal_density(Point::new(-a, b)));
            assert_eq!(d, y.areal_density(Point::new(a, -b)));
            assert!(d > 0.0);
        }
    }

    #[test]
    fn tags_round_trip() {
        for tag in [SpaceTag::Cone, SpaceTag::Suspension] {
            assert_eq!(tag.as_str().parse::<SpaceTag>().unwrap(), tag);
            assert_eq!(ModelSpace::from_tag(tag).tag(), tag);
        }
        assert!("torus".parse::<SpaceTag>().is_err());
    }
}
