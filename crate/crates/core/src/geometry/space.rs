use serde::{Deserialize, Serialize};

use super::measure::gauss_legendre;
use super::polygon;
use super::{dist_linf, Point};

/// A density along the horizontal coordinate. Used both for the linear
/// density of segments and for the slice mass (mass per unit `x`) of regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearDensity {
    Constant(f64),
    /// `cos^2(x)`
    CosSquared,
}

impl LinearDensity {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            LinearDensity::Constant(c) => c,
            LinearDensity::CosSquared => x.cos().powi(2),
        }
    }

    fn antiderivative(&self, x: f64) -> f64 {
        match *self {
            LinearDensity::Constant(c) => c * x,
            LinearDensity::CosSquared => 0.5 * x + 0.25 * (2.0 * x).sin(),
        }
    }

    /// Exact integral over `[a, b]` (zero when `b <= a`).
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            0.0
        } else {
            self.antiderivative(b) - self.antiderivative(a)
        }
    }
}

/// A convex weighted region whose reference density is constant on every
/// vertical slice: the slice `{x} x [lo(x), hi(x)]` carries mass
/// `slice_mass(x)` per unit `x`, spread uniformly in `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region2D {
    outline: Vec<Point>,
    slice_mass: LinearDensity,
}

impl Region2D {
    /// `outline` must be convex; orientation is normalized to counter-clockwise.
    pub fn new(mut outline: Vec<Point>, slice_mass: LinearDensity) -> Self {
        if polygon::signed_area(&outline) < 0.0 {
            outline.reverse();
        }
        Self { outline, slice_mass }
    }

    pub fn outline(&self) -> &[Point] {
        &self.outline
    }

    pub fn slice_mass(&self) -> LinearDensity {
        self.slice_mass
    }

    pub fn x_range(&self) -> (f64, f64) {
        let (x0, x1, _, _) = polygon::bounding_box(&self.outline);
        (x0, x1)
    }

    pub fn vertical_extent(&self, x: f64) -> Option<(f64, f64)> {
        polygon::vertical_extent(&self.outline, x)
    }

    pub fn slice_height(&self, x: f64) -> f64 {
        self.vertical_extent(x).map_or(0.0, |(lo, hi)| hi - lo)
    }

    /// Mass per unit area at `p` (infinite on zero-height slices).
    pub fn areal_density(&self, p: Point) -> f64 {
        let h = self.slice_height(p.x);
        let m = self.slice_mass.value(p.x);
        if h > 0.0 {
            m / h
        } else if m > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        polygon::contains_linf(&self.outline, p, tol)
    }

    /// Reference mass of `region ∩ [x0, x1] x [y0, y1]`.
    ///
    /// Integrated slice by slice: in `y` the overlap fraction is exact, in `x`
    /// a Gauss-Legendre rule is applied on pieces between every kink of the
    /// integrand, each piece further cut to width at most `resolution`.
    pub fn mass_in_rect(&self, x0: f64, x1: f64, y0: f64, y1: f64, resolution: f64) -> f64 {
        let (rx0, rx1) = self.x_range();
        let (a, b) = (x0.max(rx0), x1.min(rx1));
        if b <= a || y1 <= y0 {
            return 0.0;
        }
        let mut cuts = vec![a, b];
        for v in &self.outline {
            if v.x > a && v.x < b {
                cuts.push(v.x);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // crossings of y0 / y1 with the boundary lines inside each piece
        let mut all = cuts.clone();
        for w in cuts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (Some((lp, hp)), Some((lq, hq))) = (self.vertical_extent(p), self.vertical_extent(q)) else {
                continue;
            };
            for (fp, fq) in [(lp, lq), (hp, hq)] {
                for yy in [y0, y1] {
                    let (dp, dq) = (fp - yy, fq - yy);
                    if dp * dq < 0.0 {
                        all.push(p + (q - p) * dp / (dp - dq));
                    }
                }
            }
        }
        all.sort_by(f64::total_cmp);
        all.dedup();
        let integrand = |x: f64| {
            let Some((lo, hi)) = self.vertical_extent(x) else {
                return 0.0;
            };
            let m = self.slice_mass.value(x);
            if hi - lo <= 0.0 {
                // zero-height slice: all of its mass sits at lo
                return if lo >= y0 && lo <= y1 { m } else { 0.0 };
            }
            let overlap = (hi.min(y1) - lo.max(y0)).max(0.0);
            m * overlap / (hi - lo)
        };
        all.windows(2)
            .map(|w| {
                let pieces = ((w[1] - w[0]) / resolution).ceil().max(1.0) as usize;
                gauss_legendre(integrand, w[0], w[1], pieces)
            })
            .sum()
    }
}

/// A horizontal weighted segment from `start` to `end` (`start.x <= end.x`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment1D {
    start: Point,
    end: Point,
    density: LinearDensity,
}

impl Segment1D {
    pub fn horizontal(x0: f64, x1: f64, y: f64, density: LinearDensity) -> Self {
        let (a, b) = if x0 <= x1 { (x0, x1) } else { (x1, x0) };
        Self {
            start: Point::new(a, y),
            end: Point::new(b, y),
            density,
        }
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn end(&self) -> Point {
        self.end
    }

    pub fn y(&self) -> f64 {
        self.start.y
    }

    pub fn density(&self) -> LinearDensity {
        self.density
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.start.x - tol && p.x <= self.end.x + tol && (p.y - self.start.y).abs() <= tol
    }

    /// Mass of the part of the segment with `x` in `[a, b]`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        self.density.integral(a.max(self.start.x), b.min(self.end.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum {
    Region(usize),
    Segment(usize),
}

/// A closed union of convex weighted regions and weighted horizontal
/// segments, with the restriction of the sup-norm metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarSpace {
    regions: Vec<Region2D>,
    segments: Vec<Segment1D>,
}

impl PlanarSpace {
    pub fn new(regions: Vec<Region2D>, segments: Vec<Segment1D>) -> Self {
        Self { regions, segments }
    }

    pub fn regions(&self) -> &[Region2D] {
        &self.regions
    }

    pub fn segments(&self) -> &[Segment1D] {
        &self.segments
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.regions.iter().any(|r| r.contains(p, tol)) || self.segments.iter().any(|s| s.contains(p, tol))
    }

    /// Bit set of the pieces containing `p`: regions first, then segments.
    pub fn pieces(&self, p: Point, tol: f64) -> u64 {
        let mut mask = 0u64;
        for (i, r) in self.regions.iter().enumerate() {
            if r.contains(p, tol) {
                mask |= 1 << i;
            }
        }
        let off = self.regions.len();
        for (j, s) in self.segments.iter().enumerate() {
            if s.contains(p, tol) {
                mask |= 1 << (off + j);
            }
        }
        mask
    }

    /// The stratum carrying the reference measure near `p`: a region when `p`
    /// lies in a region slice of positive height, else a segment.
    pub fn locate(&self, p: Point, tol: f64) -> Option<Stratum> {
        for (i, r) in self.regions.iter().enumerate() {
            if r.slice_height(p.x) > 0.0 && r.contains(p, tol) {
                return Some(Stratum::Region(i));
            }
        }
        self.segments.iter().position(|s| s.contains(p, tol)).map(Stratum::Segment)
    }

    /// Total height of region slices above `x`.
    pub fn slice_height(&self, x: f64) -> f64 {
        self.regions.iter().map(|r| r.slice_height(x)).sum()
    }

    /// Density of the first-coordinate pushforward of the reference measure.
    pub fn projected_density(&self, x: f64) -> f64 {
        let covering: Vec<&Region2D> = self
            .regions
            .iter()
            .filter(|r| {
                let (a, b) = r.x_range();
                x >= a && x <= b
            })
            .collect();
        if !covering.is_empty() {
            return covering.iter().map(|r| r.slice_mass().value(x)).sum();
        }
        self.segments
            .iter()
            .filter(|s| x >= s.start().x && x <= s.end().x)
            .map(|s| s.density().value(x))
            .sum()
    }

    /// Areal density if `p` lies in a region slice, else the linear density.
    pub fn reference_density(&self, p: Point) -> f64 {
        match self.locate(p, 1e-12) {
            Some(Stratum::Region(i)) => self.regions[i].areal_density(p),
            Some(Stratum::Segment(j)) => self.segments[j].density().value(p.x),
            None => 0.0,
        }
    }

    pub fn total_mass(&self, resolution: f64) -> f64 {
        let r: f64 = self
            .regions
            .iter()
            .map(|r| {
                let (x0, x1, y0, y1) = polygon::bounding_box(r.outline());
                r.mass_in_rect(x0, x1, y0, y1, resolution)
            })
            .sum();
        r + self.segments.iter().map(|s| s.mass_between(s.start().x, s.end().x)).sum::<f64>()
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut pts: Vec<Point> = self.regions.iter().flat_map(|r| r.outline().iter().copied()).collect();
        for s in &self.segments {
            pts.push(s.start());
            pts.push(s.end());
        }
        polygon::bounding_box(&pts)
    }

    /// Outline vertices and segment endpoints.
    pub fn extreme_points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = self.regions.iter().flat_map(|r| r.outline().iter().copied()).collect();
        for s in &self.segments {
            pts.push(s.start());
            pts.push(s.end());
        }
        pts.dedup_by(|a, b| dist_linf(*a, *b) == 0.0);
        pts
    }

    /// Points where a segment meets a region: the gluing locus.
    pub fn junctions(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for s in &self.segments {
            for p in [s.start(), s.end()] {
                if self.regions.iter().any(|r| r.contains(p, 1e-12)) && !out.iter().any(|q| dist_linf(*q, p) == 0.0) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cos_squared_integral() {
        let d = LinearDensity::CosSquared;
        let pi = std::f64::consts::PI;
        assert!((d.integral(-pi / 2.0, pi / 2.0) - pi / 2.0).abs() < 1e-15);
        assert_eq!(d.integral(1.0, 0.0), 0.0);
    }

    #[test]
    fn unit_square_mass() {
        let sq = Region2D::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            LinearDensity::Constant(2.0),
        );
        assert!((sq.mass_in_rect(0.25, 0.75, 0.0, 0.5, 0.1) - 0.5).abs() < 1e-14);
        assert!((sq.areal_density(Point::new(0.5, 0.5)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_partial_mass_matches_area_fraction() {
        // constant areal density 1 on the triangle below y = x over [0, 1]
        let tri = Region2D::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
            LinearDensity::Constant(1.0),
        );
        // slice mass is 1 per unit x, so the areal density is 1/x: the mass of
        // the sub-rectangle [0.5,1] x [0,0.25] is the integral of 0.25/x
        let m = tri.mass_in_rect(0.5, 1.0, 0.0, 0.25, 0.05);
        assert!((m - 0.25 * 2f64.ln()).abs() < 1e-12, "{m}");
    }
}
