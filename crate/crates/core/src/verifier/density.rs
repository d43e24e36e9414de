use std::collections::{BTreeMap, HashMap};

use crate::contraction::{bin_rect, row, selected_path, sigma, Cell, ContractionPlan, DistortionParams, PlanEntry};
use crate::error::{Error, Result};
use crate::geometry::{gauss_legendre, polygon, GeodesicPath, PlanarSpace, Point, Region2D, Stratum};
use crate::spaces::ModelSpace;

/// Deepest subdivision of a cell whose corners disagree on the geodesic leg.
const MAX_DEPTH: u32 = 5;
/// Largest gap, in bins, between the image of the vertex mean and the mean
/// of the vertex images before a cell is treated as curved.
const AFFINE_TOL: f64 = 0.01;
/// Largest max/min ratio of the source density over a deposited polygon, minus 1.
const DENSITY_SPREAD: f64 = 0.01;
/// Deposits below this into a bin without reference mass are rounding noise.
const ESCAPE_NOISE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinRecord {
    /// `ς`-weighted transported mass, `m(A) ς(l) dπ`.
    pub transported: f64,
    /// Unweighted mass of `μ_t`.
    pub raw: f64,
    pub reference: f64,
}

impl BinRecord {
    pub fn quotient(&self) -> f64 {
        if self.reference > 0.0 {
            self.transported / self.reference
        } else if self.transported > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

/// Binned comparison of `(e_t)♯(ς m(A) π)` with the reference measure.
/// Bins are squares of side `bin`, rows centered on `y = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub bin: f64,
    pub t: f64,
    pub bins: BTreeMap<(i64, i64), BinRecord>,
    /// Total unweighted mass of `μ_t`, 1 up to rounding.
    pub total_raw: f64,
}

impl DensityField {
    /// Largest bin quotient and its bin.
    pub fn max_quotient(&self) -> (f64, (i64, i64)) {
        self.bins
            .iter()
            .map(|(k, r)| (r.quotient(), *k))
            .fold((0.0, (0, 0)), |acc, v| if v.0 > acc.0 { v } else { acc })
    }

    pub fn bin_center(&self, key: (i64, i64)) -> Point {
        let r = bin_rect(key.0, key.1, self.bin);
        Point::new(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1))
    }
}

/// Reference mass of a bin, cached across times.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    masses: HashMap<(i64, i64), f64>,
}

impl ReferenceCache {
    pub fn mass(&mut self, space: &PlanarSpace, key: (i64, i64), h: f64) -> f64 {
        *self.masses.entry(key).or_insert_with(|| {
            let r = bin_rect(key.0, key.1, h);
            let area: f64 = space
                .regions()
                .iter()
                .map(|g| g.mass_in_rect(r.x0, r.x1, r.y0, r.y1, h))
                .sum();
            let line: f64 = space
                .segments()
                .iter()
                .filter(|s| s.y() >= r.y0 && s.y() < r.y1)
                .map(|s| s.mass_between(r.x0, r.x1))
                .sum();
            area + line
        })
    }
}

/// Parameter-space description of a (piece of a) plan entry: target cell
/// times a range of the spreading parameter.
#[derive(Debug, Clone)]
enum Piece {
    Polygon(Vec<Point>, f64),
    Interval(Point, Point, f64),
    Spread(Point, Point, f64, f64),
}

impl Piece {
    fn from_entry(e: &PlanEntry) -> Piece {
        match &e.cell {
            Cell::Polygon(p) => Piece::Polygon(p.clone(), e.u()),
            Cell::Interval(a, b) if e.u_range.0 < e.u_range.1 => Piece::Spread(*a, *b, e.u_range.0, e.u_range.1),
            Cell::Interval(a, b) => Piece::Interval(*a, *b, e.u()),
        }
    }

    fn corners(&self) -> Vec<(Point, f64)> {
        match self {
            Piece::Polygon(p, u) => p.iter().map(|q| (*q, *u)).collect(),
            Piece::Interval(a, b, u) => vec![(*a, *u), (*b, *u)],
            Piece::Spread(a, b, u0, u1) => vec![(*a, *u0), (*b, *u0), (*b, *u1), (*a, *u1)],
        }
    }

    fn vertex_mean(&self) -> (Point, f64) {
        let c = self.corners();
        let n = c.len() as f64;
        let (sx, sy, su) = c.iter().fold((0.0, 0.0, 0.0), |a, (p, u)| (a.0 + p.x, a.1 + p.y, a.2 + u));
        (Point::new(sx / n, sy / n), su / n)
    }

    fn center(&self) -> (Point, f64) {
        match self {
            Piece::Polygon(p, u) => (Cell::Polygon(p.clone()).centroid(), *u),
            Piece::Interval(a, b, u) => (a.lerp(*b, 0.5), *u),
            Piece::Spread(a, b, u0, u1) => (a.lerp(*b, 0.5), 0.5 * (u0 + u1)),
        }
    }

    /// Four sub-pieces with their mass fractions.
    fn split(&self) -> Vec<(Piece, f64)> {
        match self {
            Piece::Polygon(p, u) => {
                let total = polygon::area(p);
                let (x0, x1, y0, y1) = polygon::bounding_box(p);
                let (mx, my) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
                let mut out = Vec::new();
                for (a, b, c, d) in [(x0, mx, y0, my), (mx, x1, y0, my), (x0, mx, my, y1), (mx, x1, my, y1)] {
                    let q = polygon::clip_rect(p, a, b, c, d);
                    let area = polygon::area(&q);
                    if q.len() >= 3 && area > 0.0 {
                        out.push((Piece::Polygon(q, *u), area / total));
                    }
                }
                out
            }
            Piece::Interval(a, b, u) => {
                let m = a.lerp(*b, 0.5);
                vec![(Piece::Interval(*a, m, *u), 0.5), (Piece::Interval(m, *b, *u), 0.5)]
            }
            Piece::Spread(a, b, u0, u1) => {
                let m = a.lerp(*b, 0.5);
                let um = 0.5 * (u0 + u1);
                vec![
                    (Piece::Spread(*a, m, *u0, um), 0.25),
                    (Piece::Spread(m, *b, *u0, um), 0.25),
                    (Piece::Spread(*a, m, um, *u1), 0.25),
                    (Piece::Spread(m, *b, um, *u1), 0.25),
                ]
            }
        }
    }
}

/// For a four-corner piece, whether the image splits across each diagonal
/// in the same proportions as the parameter cell, as an affine map would.
fn untwisted(piece: &Piece, images: &[Point]) -> bool {
    let params: Vec<Point> = match piece {
        Piece::Spread(a, b, u0, u1) => {
            let (la, lb) = (0.0, crate::geometry::dist_linf(*a, *b));
            vec![Point::new(la, *u0), Point::new(lb, *u0), Point::new(lb, *u1), Point::new(la, *u1)]
        }
        _ => piece.corners().into_iter().map(|c| c.0).collect(),
    };
    let tri = |p: &[Point], i: usize, j: usize, k: usize| polygon::area(&[p[i], p[j], p[k]]);
    [(0, 1, 2, 0, 2, 3), (0, 1, 3, 1, 2, 3)].iter().all(|&(a, b, c, d, e, f)| {
        let (p1, p2) = (tri(&params, a, b, c), tri(&params, d, e, f));
        let (q1, q2) = (tri(images, a, b, c), tri(images, d, e, f));
        let (pt, qt) = (p1 + p2, q1 + q2);
        if pt <= 0.0 || qt <= 0.0 {
            return true;
        }
        (p1 / pt - q1 / qt).abs() <= AFFINE_TOL
    })
}

fn region_density(region: &Region2D, x: f64) -> f64 {
    let h = region.slice_height(x);
    if h > 0.0 {
        region.slice_mass().value(x) / h
    } else {
        f64::INFINITY
    }
}

/// Reference mass of a polygon inside one region slice by slice.
fn polygon_mass(region: &Region2D, poly: &[Point]) -> f64 {
    let mut xs: Vec<f64> = poly.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.windows(2)
        .map(|w| {
            gauss_legendre(
                |x| {
                    let ext = polygon::vertical_extent(poly, x).map_or(0.0, |(lo, hi)| hi - lo);
                    let h = region.slice_height(x);
                    if h > 0.0 { region.slice_mass().value(x) * ext / h } else { 0.0 }
                },
                w[0],
                w[1],
                1,
            )
        })
        .sum()
}

/// Where a geodesic sits at time `t`: the point and the index of its leg.
fn locate(path: &Option<GeodesicPath>, source: Point, t: f64) -> (Point, usize) {
    match path {
        None => (source, 0),
        Some(g) => {
            let leg = g.breakpoints().partition_point(|&b| b < t);
            (g.point_at(t), leg)
        }
    }
}

struct Pusher<'a> {
    model: &'a ModelSpace,
    source: Point,
    h: f64,
    t: f64,
    deposits: HashMap<(i64, i64), (f64, f64)>,
    total_raw: (f64, f64),
}

impl Pusher<'_> {
    /// Neumaier-compensated running total of deposited mass.
    fn accumulate(&mut self, mass: f64) {
        let (sum, comp) = self.total_raw;
        let next = sum + mass;
        let comp = if sum.abs() >= mass.abs() { comp + (sum - next) + mass } else { comp + (mass - next) + sum };
        self.total_raw = (next, comp);
    }

    fn add(&mut self, key: (i64, i64), mass: f64, scale: f64) {
        let slot = self.deposits.entry(key).or_insert((0.0, 0.0));
        slot.0 += mass * scale;
        slot.1 += mass;
    }

    fn deposit_point(&mut self, p: Point, mass: f64, scale: f64) {
        self.accumulate(mass);
        self.add(((p.x / self.h).floor() as i64, row(p.y, self.h)), mass, scale);
    }

    fn deposit_interval(&mut self, xa: f64, xb: f64, y: f64, mass: f64, scale: f64) {
        let (xa, xb) = (xa.min(xb), xa.max(xb));
        let len = xb - xa;
        if len <= 1e-15 * (1.0 + xa.abs()) {
            return self.deposit_point(Point::new(0.5 * (xa + xb), y), mass, scale);
        }
        self.accumulate(mass);
        let j = row(y, self.h);
        for i in (xa / self.h).floor() as i64..=(xb / self.h).floor() as i64 {
            let (c0, c1) = ((i as f64 * self.h).max(xa), ((i + 1) as f64 * self.h).min(xb));
            if c1 > c0 {
                self.add((i, j), mass * (c1 - c0) / len, scale);
            }
        }
    }

    fn deposit_polygon(&mut self, poly: &[Point], area: f64, mass: f64, scale: f64) {
        self.accumulate(mass);
        let (x0, x1, y0, y1) = polygon::bounding_box(poly);
        let h = self.h;
        for i in (x0 / h).floor() as i64..=(x1 / h).floor() as i64 {
            for j in row(y0, h)..=row(y1, h) {
                let r = bin_rect(i, j, h);
                let q = polygon::clip_rect(poly, r.x0, r.x1, r.y0, r.y1);
                if q.len() >= 3 {
                    let a = polygon::area(&q);
                    if a > 0.0 {
                        self.add((i, j), mass * a / area, scale);
                    }
                }
            }
        }
    }

    /// Region slice density at the vertices of a polygon piece, as max/min.
    fn density_spread(&self, piece: &Piece) -> f64 {
        let Piece::Polygon(p, _) = piece else { return 1.0 };
        let Some(region) = self.region_of(p) else { return 1.0 };
        let d: Vec<f64> = p.iter().map(|q| region_density(region, q.x)).collect();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |a, &v| (a.0.min(v), a.1.max(v)));
        if lo > 0.0 { hi / lo } else { f64::INFINITY }
    }

    fn region_of(&self, poly: &[Point]) -> Option<&Region2D> {
        let n = poly.len() as f64;
        let c = poly.iter().fold(Point::ORIGIN, |a, q| Point::new(a.x + q.x / n, a.y + q.y / n));
        match self.model.space().locate(c, 1e-9) {
            Some(Stratum::Region(i)) => Some(&self.model.space().regions()[i]),
            _ => None,
        }
    }

    /// Sub-pieces weighted by reference mass rather than parameter area.
    fn split_by_mass(&self, piece: &Piece) -> Vec<(Piece, f64)> {
        let parts = piece.split();
        let Piece::Polygon(p, _) = piece else { return parts };
        let Some(region) = self.region_of(p) else { return parts };
        let masses: Vec<f64> = parts
            .iter()
            .map(|(q, _)| match q {
                Piece::Polygon(q, _) => polygon_mass(region, q),
                _ => 0.0,
            })
            .collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return parts;
        }
        parts.into_iter().zip(masses).map(|((q, _), m)| (q, m / total)).collect()
    }

    fn nearly_affine(&self, piece: &Piece, images: &[Point]) -> Result<bool> {
        if self.density_spread(piece) > 1.0 + DENSITY_SPREAD {
            return Ok(false);
        }
        if images.len() == 4 && !untwisted(piece, images) {
            return Ok(false);
        }
        let (c, u) = piece.vertex_mean();
        let (path, _) = selected_path(self.model.tag(), self.source, c, u)?;
        let (p, _) = locate(&path, self.source, self.t);
        let n = images.len() as f64;
        let mean = images.iter().fold(Point::ORIGIN, |a, q| Point::new(a.x + q.x / n, a.y + q.y / n));
        Ok(crate::geometry::dist_linf(p, mean) <= AFFINE_TOL * self.h)
    }

    fn push(&mut self, piece: &Piece, paths: &[Option<GeodesicPath>], mass: f64, scale: f64, depth: u32) -> Result<()> {
        let located: Vec<(Point, usize)> = paths.iter().map(|p| locate(p, self.source, self.t)).collect();
        let legs_agree = located.windows(2).all(|w| w[0].1 == w[1].1)
            && paths.windows(2).all(|w| {
                w[0].as_ref().map(|g| g.vertices().len()) == w[1].as_ref().map(|g| g.vertices().len())
            });
        let pts: Vec<Point> = located.iter().map(|l| l.0).collect();
        let legs_agree = legs_agree && (depth >= MAX_DEPTH || self.nearly_affine(piece, &pts)?);
        if legs_agree {
            let (x0, x1, y0, y1) = polygon::bounding_box(&pts);
            let scale_len = (x1 - x0).max(y1 - y0);
            if y1 - y0 <= 1e-12 {
                // the image lies on a horizontal segment
                self.deposit_interval(x0, x1, 0.5 * (y0 + y1), mass, scale);
                return Ok(());
            }
            if pts.len() >= 3 {
                let poly = polygon::order_ccw(pts.clone());
                let area = polygon::area(&poly);
                if area > 1e-9 * scale_len * scale_len {
                    self.deposit_polygon(&poly, area, mass, scale);
                    return Ok(());
                }
            }
        }
        if depth < MAX_DEPTH {
            for (sub, frac) in self.split_by_mass(piece) {
                let sub_paths = sub
                    .corners()
                    .into_iter()
                    .map(|(q, u)| selected_path(self.model.tag(), self.source, q, u).map(|r| r.0))
                    .collect::<Result<Vec<_>>>()?;
                self.push(&sub, &sub_paths, mass * frac, scale, depth + 1)?;
            }
            return Ok(());
        }
        let (c, u) = piece.center();
        let (path, _) = selected_path(self.model.tag(), self.source, c, u)?;
        let (p, _) = locate(&path, self.source, self.t);
        self.deposit_point(p, mass, scale);
        Ok(())
    }
}

/// Corner geodesics of every plan entry, reusable across times.
pub fn corner_paths(model: &ModelSpace, plan: &ContractionPlan) -> Result<Vec<Vec<Option<GeodesicPath>>>> {
    plan.entries
        .iter()
        .map(|e| {
            Piece::from_entry(e)
                .corners()
                .into_iter()
                .map(|(q, u)| selected_path(model.tag(), plan.source, q, u).map(|r| r.0))
                .collect()
        })
        .collect()
}

/// Pushes every cell of the plan to time `t` and deposits its mass, scaled
/// by `m(A) ς(l)`, into square bins by exact area (or length) overlap of
/// the image. Cells whose corners sit on different legs of their geodesics
/// are subdivided; past the depth limit the cell center is deposited.
pub fn empirical_density_ratio(
    model: &ModelSpace,
    plan: &ContractionPlan,
    params: DistortionParams,
    t: f64,
    bin: f64,
) -> Result<DensityField> {
    let corners = corner_paths(model, plan)?;
    let mut cache = ReferenceCache::default();
    empirical_density_ratio_cached(model, plan, &corners, &mut cache, params, t, bin)
}

pub fn empirical_density_ratio_cached(
    model: &ModelSpace,
    plan: &ContractionPlan,
    corners: &[Vec<Option<GeodesicPath>>],
    cache: &mut ReferenceCache,
    params: DistortionParams,
    t: f64,
    bin: f64,
) -> Result<DensityField> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(crate::error::domain("t", t, "must lie in (0, 1]"));
    }
    let mut pusher = Pusher {
        model,
        source: plan.source,
        h: bin,
        t,
        deposits: HashMap::new(),
        total_raw: (0.0, 0.0),
    };
    for (entry, paths) in plan.entries.iter().zip(corners) {
        let scale = plan.mass * sigma(params, t, entry.length())?;
        pusher.push(&Piece::from_entry(entry), paths, entry.weight, scale, 0)?;
    }
    let mut bins = BTreeMap::new();
    for (key, (transported, raw)) in pusher.deposits {
        let reference = cache.mass(model.space(), key, bin);
        if reference <= 0.0 && transported > ESCAPE_NOISE {
            let r = bin_rect(key.0, key.1, bin);
            return Err(Error::MassEscaped {
                mass: raw,
                at: Point::new(0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)),
            });
        }
        bins.insert(
            key,
            BinRecord {
                transported,
                raw,
                reference,
            },
        );
    }
    Ok(DensityField {
        bin,
        t,
        bins,
        total_raw: pusher.total_raw.0 + pusher.total_raw.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{build_contraction, Rect};
    use crate::spaces::{ConeSpace, SuspensionSpace};

    fn flat() -> DistortionParams {
        DistortionParams::new(0.0, 3.0).unwrap()
    }

    #[test]
    fn ray_plan_quotients() {
        let x = ModelSpace::Cone(ConeSpace::standard());
        let plan = build_contraction(&x, Point::new(2.0, 0.0), Rect::new(3.0, 4.0, -1.0, 1.0), 0.01).unwrap();
        let f1 = empirical_density_ratio(&x, &plan, flat(), 1.0, 0.01).unwrap();
        let (q1, _) = f1.max_quotient();
        assert!((q1 - 1.0).abs() < 1e-9, "{q1}");
        // case-(i) ratio 1/t times t^3
        let f = empirical_density_ratio(&x, &plan, flat(), 0.5, 0.01).unwrap();
        let (q, _) = f.max_quotient();
        assert!((q - 0.25).abs() < 1e-9, "{q}");
        assert!((f.total_raw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quotients_vanish_as_time_shrinks() {
        let x = ModelSpace::Cone(ConeSpace::standard());
        let plan = build_contraction(&x, Point::new(1.0, 0.0), Rect::band(-3.01, -2.99), 0.0025).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.4, 0.1, 0.02] {
            let f = empirical_density_ratio(&x, &plan, flat(), t, 0.0025).unwrap();
            let (q, _) = f.max_quotient();
            assert!(q < prev);
            prev = q;
            assert!((f.total_raw - 1.0).abs() < 1e-12);
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn cone_far_case_stays_below_one() {
        let x = ModelSpace::Cone(ConeSpace::standard());
        let plan = build_contraction(&x, Point::new(-2.0, 0.3), Rect::band(-0.5, -0.49), 0.0025).unwrap();
        for k in [10, 25, 40, 49, 50] {
            let f = empirical_density_ratio(&x, &plan, flat(), k as f64 / 50.0, 0.0025).unwrap();
            assert!(f.max_quotient().0 <= 1.05, "{k}: {:?}", f.max_quotient());
            assert!((f.total_raw - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spreading_plan_in_the_lens() {
        let y = ModelSpace::Suspension(SuspensionSpace::new());
        let params = DistortionParams::new(2.0, 3.0).unwrap();
        let plan = build_contraction(&y, Point::new(-0.125, 0.004), Rect::band(0.4, 0.41), 0.0025).unwrap();
        for k in [3, 10, 30, 50] {
            let f = empirical_density_ratio(&y, &plan, params, k as f64 / 50.0, 0.0025).unwrap();
            assert!(f.max_quotient().0 <= 1.05, "{k}: {:?}", f.max_quotient());
            assert!((f.total_raw - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_time() {
        let x = ModelSpace::Cone(ConeSpace::standard());
        let plan = build_contraction(&x, Point::new(2.0, 0.0), Rect::new(3.0, 4.0, -1.0, 1.0), 0.01).unwrap();
        assert!(empirical_density_ratio(&x, &plan, flat(), 0.0, 0.01).is_err());
    }
}
