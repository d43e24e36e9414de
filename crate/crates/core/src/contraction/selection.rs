use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeodesicPath, Point, MEMBERSHIP_TOL};
use crate::spaces::{cone_height, lens_height, SpaceTag, CONE_SLOPE, LENS_SLOPE, LENS_TIP};
use std::f64::consts::FRAC_PI_2;

/// Transport cases. The cone cases are ordered as in the case analysis of
/// the cone space; ties at case boundaries go to the earlier case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Source and target on the ray.
    XRay,
    /// Source on the ray, target in the cone: through the apex.
    XRayToCone,
    /// Both in the cone, target no closer to the apex than the source.
    XInward,
    /// Target between the source slice and half of it: straight.
    XOutwardNear,
    /// Target beyond half the source abscissa: via the radial line.
    XOutwardFar,
    /// Source in the cone, target on the ray: spread, contract, exit.
    XConeToRay,
    /// Both on the segments.
    YSegments,
    /// Source on a segment, target in the lens.
    YSegmentToLens,
    /// Source in the lens, target before the equidistant slice: straight.
    YLensNear,
    /// Source in the lens, target past the equidistant slice, still in the lens.
    YLensFar,
    /// Source in the lens, target on the far segment.
    YLensToSegment,
}

impl CaseLabel {
    pub const CONE: [CaseLabel; 6] = [
        CaseLabel::XRay,
        CaseLabel::XRayToCone,
        CaseLabel::XInward,
        CaseLabel::XOutwardNear,
        CaseLabel::XOutwardFar,
        CaseLabel::XConeToRay,
    ];
    pub const SUSPENSION: [CaseLabel; 5] = [
        CaseLabel::YSegments,
        CaseLabel::YSegmentToLens,
        CaseLabel::YLensNear,
        CaseLabel::YLensFar,
        CaseLabel::YLensToSegment,
    ];

    pub fn all(tag: SpaceTag) -> &'static [CaseLabel] {
        match tag {
            SpaceTag::Cone => &Self::CONE,
            SpaceTag::Suspension => &Self::SUSPENSION,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::XRay => "x-i",
            CaseLabel::XRayToCone => "x-ii",
            CaseLabel::XInward => "x-iii",
            CaseLabel::XOutwardNear => "x-iv",
            CaseLabel::XOutwardFar => "x-v",
            CaseLabel::XConeToRay => "x-vi",
            CaseLabel::YSegments => "y-1",
            CaseLabel::YSegmentToLens => "y-2",
            CaseLabel::YLensNear => "y-3a",
            CaseLabel::YLensFar => "y-3b",
            CaseLabel::YLensToSegment => "y-3c",
        }
    }

    pub fn space(&self) -> SpaceTag {
        if Self::CONE.contains(self) {
            SpaceTag::Cone
        } else {
            SpaceTag::Suspension
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

fn on_ray(p: Point) -> bool {
    p.x >= -MEMBERSHIP_TOL && p.y.abs() <= MEMBERSHIP_TOL
}

fn in_cone(p: Point) -> bool {
    p.x <= MEMBERSHIP_TOL && p.y.abs() <= CONE_SLOPE * -p.x + 2.0 * MEMBERSHIP_TOL
}

/// Membership in the untruncated cone-plus-ray space.
pub fn in_x(p: Point) -> bool {
    p.is_finite() && (on_ray(p) || in_cone(p))
}

/// Membership in the lens-plus-segments space.
pub fn in_y(p: Point) -> bool {
    let lens = p.y.abs() <= LENS_SLOPE * (LENS_TIP - p.x.abs()) + 2.0 * MEMBERSHIP_TOL;
    let segment = p.x.abs() >= LENS_TIP - MEMBERSHIP_TOL
        && p.x.abs() <= FRAC_PI_2 + MEMBERSHIP_TOL
        && p.y.abs() <= MEMBERSHIP_TOL;
    p.is_finite() && (lens || segment)
}

/// Case of a cone-space pair.
pub fn classify_x(source: Point, target: Point) -> Result<CaseLabel> {
    for p in [source, target] {
        if !in_x(p) {
            return Err(Error::OutsideSpace(p));
        }
    }
    let (xs, x) = (source.x, target.x);
    Ok(if xs >= 0.0 && x >= 0.0 {
        CaseLabel::XRay
    } else if x < 0.0 && xs >= 0.0 {
        CaseLabel::XRayToCone
    } else if x <= xs {
        CaseLabel::XInward
    } else if x <= xs / 2.0 {
        CaseLabel::XOutwardNear
    } else if x < 0.0 {
        CaseLabel::XOutwardFar
    } else {
        CaseLabel::XConeToRay
    })
}

/// The selected cone-space geodesic. `u` in `[0, 1]` picks the point of the
/// spreading slice used by the cone-to-ray case and is ignored otherwise.
pub fn select_x(source: Point, target: Point, u: f64) -> Result<(GeodesicPath, CaseLabel)> {
    let case = classify_x(source, target)?;
    let (xs, x, y) = (source.x, target.x, target.y);
    let vertices = match case {
        CaseLabel::XRay | CaseLabel::XInward | CaseLabel::XOutwardNear => vec![source, target],
        CaseLabel::XRayToCone => vec![source, Point::ORIGIN, target],
        CaseLabel::XOutwardFar => vec![source, Point::new(xs / 2.0, xs * y / (2.0 * x)), target],
        CaseLabel::XConeToRay => {
            let q = Point::new(xs / 2.0, 0.5 * CONE_SLOPE * xs * (1.0 - 2.0 * u));
            vec![source, q, Point::ORIGIN, target]
        }
        _ => unreachable!(),
    };
    Ok((GeodesicPath::new(vertices)?, case))
}

/// Pair mirrored so that the source abscissa is at most the target's.
fn normalize_y(source: Point, target: Point) -> (Point, Point, bool) {
    if source.x > target.x {
        (source.reflect_x(), target.reflect_x(), true)
    } else {
        (source, target, false)
    }
}

/// `max(0, (1/4 + 4 x_s) / 5)`: the slice of the lens equidistant from a
/// lens source, clamped at the axis of symmetry.
pub fn equidistant_slice(xs: f64) -> f64 {
    ((LENS_TIP + 4.0 * xs) / 5.0).max(0.0)
}

/// Case of a suspension-space pair.
pub fn classify_y(source: Point, target: Point) -> Result<CaseLabel> {
    for p in [source, target] {
        if !in_y(p) {
            return Err(Error::OutsideSpace(p));
        }
    }
    let (s, t, _) = normalize_y(source, target);
    Ok(classify_y_normalized(s.x, t.x))
}

fn classify_y_normalized(xs: f64, x: f64) -> CaseLabel {
    if xs.abs() >= LENS_TIP && x.abs() >= LENS_TIP {
        CaseLabel::YSegments
    } else if xs.abs() >= LENS_TIP {
        CaseLabel::YSegmentToLens
    } else if x <= equidistant_slice(xs) {
        CaseLabel::YLensNear
    } else if x < LENS_TIP {
        CaseLabel::YLensFar
    } else {
        CaseLabel::YLensToSegment
    }
}

/// The selected suspension-space geodesic; `u` parametrizes the spreading
/// slice where the plan spreads.
pub fn select_y(source: Point, target: Point, u: f64) -> Result<(GeodesicPath, CaseLabel)> {
    let case = classify_y(source, target)?;
    let (s, t, mirrored) = normalize_y(source, target);
    let (xs, x, y) = (s.x, t.x, t.y);
    let left_tip = Point::new(-LENS_TIP, 0.0);
    let right_tip = Point::new(LENS_TIP, 0.0);
    let vertices = match case {
        CaseLabel::YSegments => {
            if xs <= -LENS_TIP && x >= LENS_TIP {
                let mid = Point::new(0.0, (2.0 * u - 1.0) * LENS_SLOPE * LENS_TIP);
                vec![s, left_tip, mid, right_tip, t]
            } else {
                vec![s, t]
            }
        }
        CaseLabel::YSegmentToLens => {
            if x <= 0.0 {
                vec![s, left_tip, t]
            } else {
                let mid = Point::new(0.0, y * LENS_TIP / (LENS_TIP - x));
                vec![s, left_tip, mid, t]
            }
        }
        CaseLabel::YLensNear => vec![s, t],
        CaseLabel::YLensFar => {
            let b = equidistant_slice(xs);
            vec![s, Point::new(b, y * (LENS_TIP - b) / (LENS_TIP - x)), t]
        }
        CaseLabel::YLensToSegment => {
            let b = equidistant_slice(xs);
            let q = Point::new(b, (2.0 * u - 1.0) * LENS_SLOPE * (LENS_TIP - b));
            vec![s, q, right_tip, t]
        }
        _ => unreachable!(),
    };
    let path = GeodesicPath::new(vertices)?;
    Ok((if mirrored { path.reflect_x() } else { path }, case))
}

/// Whether the plan spreads the source over a slice before contracting.
pub fn spreads(case: CaseLabel, source: Point, target: Point) -> bool {
    match case {
        CaseLabel::XConeToRay | CaseLabel::YLensToSegment => true,
        CaseLabel::YSegments => {
            let (s, t, _) = normalize_y(source, target);
            s.x <= -LENS_TIP && t.x >= LENS_TIP
        }
        _ => false,
    }
}

/// Height of the slice the plan spreads over (zero when it does not spread).
pub fn spread_height(case: CaseLabel, source: Point, target: Point) -> f64 {
    if !spreads(case, source, target) {
        return 0.0;
    }
    match case {
        CaseLabel::XConeToRay => cone_height(source.x / 2.0),
        CaseLabel::YSegments => lens_height(0.0),
        CaseLabel::YLensToSegment => {
            let (s, _, _) = normalize_y(source, target);
            lens_height(equidistant_slice(s.x))
        }
        _ => 0.0,
    }
}

/// Geodesic and case for either space.
pub fn select(tag: SpaceTag, source: Point, target: Point, u: f64) -> Result<(GeodesicPath, CaseLabel)> {
    match tag {
        SpaceTag::Cone => select_x(source, target, u),
        SpaceTag::Suspension => select_y(source, target, u),
    }
}

/// The selection with the spreading parameter at the middle of the slice.
pub fn select_geodesic_x(source: Point, target: Point) -> Result<(GeodesicPath, CaseLabel)> {
    select_x(source, target, 0.5)
}

pub fn select_geodesic_y(source: Point, target: Point) -> Result<(GeodesicPath, CaseLabel)> {
    select_y(source, target, 0.5)
}

/// Ratio `(dμ_t/dref)(γ_t) / (dμ_1/dref)(γ_1)` of the selected transport.
///
/// Exact except for the near outward cone case, where the returned value is
/// the linear upper bound `(1 + (2(x_s - x)/x_s)(1 - t)) / t^2`.
pub fn analytic_density_ratio(tag: SpaceTag, case: CaseLabel, source: Point, target: Point, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(crate::error::domain("t", t, "must lie in (0, 1]"));
    }
    if case.space() != tag {
        return Err(Error::Invalid(format!("case {case} does not belong to the {tag} space")));
    }
    let (s, q, _) = match tag {
        SpaceTag::Cone => (source, target, false),
        SpaceTag::Suspension => normalize_y(source, target),
    };
    let (xs, x) = (s.x, q.x);
    let xt = xs + t * (x - xs);
    let cos2 = |v: f64| v.cos().powi(2);
    let r = match case {
        CaseLabel::XRay | CaseLabel::XRayToCone => 1.0 / t,
        CaseLabel::XInward => xt / (x * t * t),
        CaseLabel::XOutwardNear => (1.0 + 2.0 * (xs - x) / xs * (1.0 - t)) / (t * t),
        CaseLabel::XOutwardFar | CaseLabel::XConeToRay => {
            let k = 2.0 * (x - xs) / -xs;
            if t * k >= 1.0 {
                1.0 / t
            } else {
                (2.0 - k * t) / (k * t * t)
            }
        }
        CaseLabel::YSegments | CaseLabel::YSegmentToLens => cos2(x) / (t * cos2(xt)),
        CaseLabel::YLensNear => lens_height(xt) / (t * t * lens_height(x)) * cos2(x) / cos2(xt),
        CaseLabel::YLensFar | CaseLabel::YLensToSegment => {
            let b = equidistant_slice(xs);
            let t0 = (b - xs) / (x - xs);
            if t < t0 {
                cos2(x) * lens_height(xt) * t0 / (t * t * lens_height(b) * cos2(xt))
            } else {
                cos2(x) / (t * cos2(xt))
            }
        }
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_geodesic;
    use crate::spaces::{ConeSpace, SuspensionSpace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn cone_examples() {
        let (g, c) = select_geodesic_x(p(2.0, 0.0), p(5.0, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::XRay);
        assert_eq!(g.vertices(), &[p(2.0, 0.0), p(5.0, 0.0)]);

        let (g, c) = select_geodesic_x(p(1.0, 0.0), p(-3.0, 1.0)).unwrap();
        assert_eq!(c, CaseLabel::XRayToCone);
        assert_eq!(g.vertices(), &[p(1.0, 0.0), Point::ORIGIN, p(-3.0, 1.0)]);
        assert_eq!(g.length(), 4.0);

        let (g, c) = select_geodesic_x(p(-4.0, 0.0), p(-1.0, 0.2)).unwrap();
        assert_eq!(c, CaseLabel::XOutwardFar);
        assert_eq!(g.vertices()[1], p(-2.0, 0.4));
    }

    #[test]
    fn suspension_examples() {
        let (g, c) = select_geodesic_y(p(0.3, 0.0), p(1.2, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::YSegments);
        assert_eq!(g.vertices().len(), 2);

        let (g, c) = select_geodesic_y(p(0.5, 0.0), p(0.0, 1.0 / 36.0)).unwrap();
        assert_eq!(c, CaseLabel::YSegmentToLens);
        assert_eq!(g.vertices(), &[p(0.5, 0.0), p(0.25, 0.0), p(0.0, 1.0 / 36.0)]);

        let (g, c) = select_geodesic_y(p(-0.125, 0.0), p(-0.05, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::YLensNear);
        assert_eq!(g.vertices().len(), 2);
        // the equidistant slice is clamped at the axis of symmetry
        let (_, c) = select_geodesic_y(p(-0.125, 0.0), p(-0.049, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::YLensNear);
        let (_, c) = select_geodesic_y(p(-0.125, 0.0), p(0.01, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::YLensFar);
        let (_, c) = select_geodesic_y(p(0.0, 0.0), p(0.051, 0.0)).unwrap();
        assert_eq!(c, CaseLabel::YLensFar);
    }

    #[test]
    fn spreading_slices() {
        let (g, c) = select_x(p(-4.0, 0.0), p(1.0, 0.0), 0.0).unwrap();
        assert_eq!(c, CaseLabel::XConeToRay);
        assert_eq!(g.vertices()[1], p(-2.0, -2.0 / 3.0));
        let (g, _) = select_x(p(-4.0, 0.0), p(1.0, 0.0), 1.0).unwrap();
        assert_eq!(g.vertices()[1], p(-2.0, 2.0 / 3.0));
        assert_eq!(spread_height(c, p(-4.0, 0.0), p(1.0, 0.0)), 4.0 / 3.0);
        let (g, c) = select_y(p(-0.125, 0.0), p(0.35, 0.0), 1.0).unwrap();
        assert_eq!(c, CaseLabel::YLensToSegment);
        assert_eq!(g.vertices()[2], p(0.25, 0.0));
    }

    #[test]
    fn outside_points_rejected() {
        assert!(select_geodesic_x(p(-3.0, 1.1), p(1.0, 0.0)).is_err());
        assert!(select_geodesic_y(p(0.1, 0.1), p(1.0, 0.0)).is_err());
    }

    fn random_x(rng: &mut ChaCha8Rng) -> Point {
        if rng.gen_bool(0.3) {
            p(rng.gen_range(0.0..6.0), 0.0)
        } else {
            let x = rng.gen_range(-8.0..0.0);
            p(x, rng.gen_range(-1.0..=1.0) * CONE_SLOPE * -x)
        }
    }

    fn random_y(rng: &mut ChaCha8Rng) -> Point {
        let x = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
        if x.abs() < LENS_TIP {
            p(x, rng.gen_range(-0.5..=0.5) * lens_height(x))
        } else {
            p(x, 0.0)
        }
    }

    #[test]
    fn random_selections_are_geodesics() {
        let x_space = ConeSpace::new(9.0, 7.0).unwrap();
        let y_space = SuspensionSpace::new();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let (a, b, u) = (random_x(&mut rng), random_x(&mut rng), rng.gen_range(0.0..=1.0));
            if a == b {
                continue;
            }
            let (g, _) = select_x(a, b, u).unwrap();
            assert!(is_geodesic(x_space.space(), &g, 17, 1e-8), "{a:?} -> {b:?}");
            let (a, b) = (random_y(&mut rng), random_y(&mut rng));
            if a == b {
                continue;
            }
            let (g, _) = select_y(a, b, u).unwrap();
            assert!(is_geodesic(y_space.space(), &g, 17, 1e-8), "{a:?} -> {b:?}");
        }
    }

    #[test]
    fn case_partition_covers_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..10_000 {
            seen.insert(classify_x(random_x(&mut rng), random_x(&mut rng)).unwrap());
            seen.insert(classify_y(random_y(&mut rng), random_y(&mut rng)).unwrap());
        }
        assert_eq!(seen.len(), 11);
    }

    #[test]
    fn boundary_ties_agree_in_length() {
        // x = x_s / 2 is both near and far outward; x = x_s is inward and near
        for (a, b) in [(p(-4.0, 0.3), p(-2.0, 0.5)), (p(-4.0, 1.0), p(-4.0, -1.0))] {
            let (g, _) = select_geodesic_x(a, b).unwrap();
            let far = GeodesicPath::new(vec![a, p(a.x / 2.0, a.x * b.y / (2.0 * b.x)), b]).unwrap();
            assert!((g.length() - far.length()).abs() < 1e-12 || b.x == a.x);
        }
        let a = p(-0.125, 0.005);
        let b = p(equidistant_slice(a.x), 0.002);
        let (near, c) = select_geodesic_y(a, b).unwrap();
        assert_eq!(c, CaseLabel::YLensNear);
        let bend = GeodesicPath::new(vec![a, p(b.x, b.y), b]).unwrap();
        assert!((near.length() - bend.length()).abs() < 1e-12);
    }

    #[test]
    fn ratios_at_endpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let (a, b) = (random_x(&mut rng), random_x(&mut rng));
            if a.x == b.x {
                continue;
            }
            let c = classify_x(a, b).unwrap();
            let r = analytic_density_ratio(SpaceTag::Cone, c, a, b, 1.0).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "{c} {r}");
            let (a, b) = (random_y(&mut rng), random_y(&mut rng));
            let c = classify_y(a, b).unwrap();
            let r = analytic_density_ratio(SpaceTag::Suspension, c, a, b, 1.0).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "{c} {r}");
        }
    }

    #[test]
    fn cone_ratio_examples() {
        let r = analytic_density_ratio(SpaceTag::Cone, CaseLabel::XOutwardNear, p(-4.0, 0.0), p(-2.0, 0.5), 0.5).unwrap();
        assert!((r - 6.0).abs() < 1e-12);
        for k in 1..=50 {
            let t = k as f64 / 50.0;
            let r = analytic_density_ratio(SpaceTag::Cone, CaseLabel::XOutwardFar, p(-4.0, 0.0), p(-1.0, 0.2), t).unwrap();
            if t >= 2.0 / 3.0 {
                assert!((r - 1.0 / t).abs() < 1e-12);
            }
            let near = analytic_density_ratio(SpaceTag::Cone, CaseLabel::XOutwardNear, p(-4.0, 0.0), p(-2.5, 0.1), t).unwrap();
            assert!(near <= (2.0 - t) / (t * t) + 1e-12);
            assert!((2.0 - t) / (t * t) <= 1.0 / t.powi(3) + 1e-12);
        }
        assert!(analytic_density_ratio(SpaceTag::Cone, CaseLabel::XRay, p(1.0, 0.0), p(2.0, 0.0), 0.0).is_err());
        assert!(analytic_density_ratio(SpaceTag::Suspension, CaseLabel::XRay, p(1.0, 0.0), p(2.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn near_case_bound_is_exact_on_the_boundary() {
        // the exact ratio x_t/(x t^2) meets the linear bound when x = x_s/2
        let (a, b) = (p(-4.0, 0.0), p(-2.0, 0.0));
        for k in 1..=20 {
            let t = k as f64 / 20.0;
            let xt = a.x + t * (b.x - a.x);
            let exact = xt / (b.x * t * t);
            let r = analytic_density_ratio(SpaceTag::Cone, CaseLabel::XOutwardNear, a, b, t).unwrap();
            assert!((r - exact).abs() < 1e-12);
        }
    }
}
