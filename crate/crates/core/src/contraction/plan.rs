use serde::{Deserialize, Serialize};

use super::selection::{select, spread_height, spreads};
use super::CaseLabel;
use crate::error::{Error, Result};
use crate::geometry::{is_geodesic, polygon, GeodesicPath, Point};
use crate::spaces::{ModelSpace, SpaceTag};

/// Samples used when validating plan geodesics.
const VALIDATION_SAMPLES: usize = 9;
const VALIDATION_TOL: f64 = 1e-8;

/// Axis-aligned closed rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    /// The vertical band `[x0, x1] x R` (clipped to a generous height).
    pub fn band(x0: f64, x1: f64) -> Self {
        Self::new(x0, x1, -1e6, 1e6)
    }
}

/// The part of the target set carried by one plan entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    /// A convex piece of a region, counter-clockwise.
    Polygon(Vec<Point>),
    /// A piece of a horizontal segment.
    Interval(Point, Point),
}

impl Cell {
    pub fn centroid(&self) -> Point {
        match self {
            Cell::Polygon(p) => {
                let n = p.len() as f64;
                Point::new(p.iter().map(|q| q.x).sum::<f64>() / n, p.iter().map(|q| q.y).sum::<f64>() / n)
            }
            Cell::Interval(a, b) => a.lerp(*b, 0.5),
        }
    }
}

/// One weighted geodesic of a plan. Entries of spreading cases carry a
/// range of the spreading parameter `u` and split their cell's mass evenly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub target: Point,
    pub weight: f64,
    /// Reference mass transported by this entry.
    pub mass: f64,
    pub u_range: (f64, f64),
    pub case: CaseLabel,
    /// `None` when the target coincides with the source.
    pub geodesic: Option<GeodesicPath>,
    pub cell: Cell,
}

impl PlanEntry {
    pub fn length(&self) -> f64 {
        self.geodesic.as_ref().map_or(0.0, |g| g.length())
    }

    pub fn u(&self) -> f64 {
        0.5 * (self.u_range.0 + self.u_range.1)
    }
}

/// Discretized Dirac-to-set transport: weights sum to one and are
/// proportional to the reference mass of each target cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionPlan {
    pub tag: SpaceTag,
    pub source: Point,
    pub target_set: Rect,
    pub resolution: f64,
    /// Reference mass of the target set.
    pub mass: f64,
    pub entries: Vec<PlanEntry>,
}

impl ContractionPlan {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    pub fn cases(&self) -> std::collections::BTreeSet<CaseLabel> {
        self.entries.iter().map(|e| e.case).collect()
    }
}

fn col(x: f64, h: f64) -> i64 {
    (x / h).floor() as i64
}

/// Row index with rows centered on `y = 0`, so horizontal segments at
/// `y = 0` fall in the middle of row 0.
pub fn row(y: f64, h: f64) -> i64 {
    (y / h + 0.5).floor() as i64
}

pub fn bin_rect(i: i64, j: i64, h: f64) -> Rect {
    Rect::new(i as f64 * h, (i + 1) as f64 * h, (j as f64 - 0.5) * h, (j as f64 + 0.5) * h)
}

/// Target cells of `A ∩ space`: bin-aligned pieces of every region and segment.
pub fn target_cells(model: &ModelSpace, a: Rect, h: f64) -> Vec<(Cell, f64)> {
    let space = model.space();
    let mut cells = Vec::new();
    for region in space.regions() {
        let (rx0, rx1) = region.x_range();
        let (x0, x1) = (a.x0.max(rx0), a.x1.min(rx1));
        if x1 <= x0 {
            continue;
        }
        for i in col(x0, h)..=col(x1, h) {
            let (cx0, cx1) = ((i as f64 * h).max(x0), ((i + 1) as f64 * h).min(x1));
            if cx1 <= cx0 {
                continue;
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut probe = vec![cx0, cx1];
            probe.extend(region.outline().iter().map(|v| v.x).filter(|&x| x > cx0 && x < cx1));
            for x in probe {
                if let Some((l, u)) = region.vertical_extent(x) {
                    lo = lo.min(l);
                    hi = hi.max(u);
                }
            }
            let (lo, hi) = (lo.max(a.y0), hi.min(a.y1));
            if hi < lo {
                continue;
            }
            for j in row(lo, h)..=row(hi, h) {
                let b = bin_rect(i, j, h);
                let (y0, y1) = (b.y0.max(a.y0), b.y1.min(a.y1));
                let poly = polygon::clip_rect(region.outline(), cx0, cx1, y0, y1);
                if poly.len() < 3 || polygon::area(&poly) <= 0.0 {
                    continue;
                }
                let mass = region.mass_in_rect(cx0, cx1, y0, y1, h);
                if mass > 0.0 {
                    cells.push((Cell::Polygon(poly), mass));
                }
            }
        }
    }
    for seg in space.segments() {
        if seg.y() < a.y0 || seg.y() > a.y1 {
            continue;
        }
        let (x0, x1) = (a.x0.max(seg.start().x), a.x1.min(seg.end().x));
        if x1 <= x0 {
            continue;
        }
        for i in col(x0, h)..=col(x1, h) {
            let (cx0, cx1) = ((i as f64 * h).max(x0), ((i + 1) as f64 * h).min(x1));
            if cx1 <= cx0 {
                continue;
            }
            let mass = seg.mass_between(cx0, cx1);
            if mass > 0.0 {
                cells.push((Cell::Interval(Point::new(cx0, seg.y()), Point::new(cx1, seg.y())), mass));
            }
        }
    }
    cells
}

/// Selected geodesic, or `None` for a target equal to the source.
pub fn selected_path(tag: SpaceTag, source: Point, target: Point, u: f64) -> Result<(Option<GeodesicPath>, CaseLabel)> {
    match select(tag, source, target, u) {
        Ok((g, c)) => Ok((Some(g), c)),
        Err(Error::DegeneratePath) => {
            let c = match tag {
                SpaceTag::Cone => super::selection::classify_x(source, target)?,
                SpaceTag::Suspension => super::selection::classify_y(source, target)?,
            };
            Ok((None, c))
        }
        Err(e) => Err(e),
    }
}

/// Discretizes `A ∩ space` into bins of side `resolution`, weights them by
/// reference mass, and attaches the selected geodesic from `source` to each
/// bin's centroid. Spreading cases get one entry per slice piece of height
/// at most `resolution`. Every geodesic is validated.
pub fn build_contraction(model: &ModelSpace, source: Point, a: Rect, resolution: f64) -> Result<ContractionPlan> {
    if !(resolution > 0.0) {
        return Err(crate::error::domain("resolution", resolution, "must be positive"));
    }
    let tag = model.tag();
    if !model.space().contains(source, crate::geometry::MEMBERSHIP_TOL) {
        return Err(Error::OutsideSpace(source));
    }
    let cells = target_cells(model, a, resolution);
    let total: f64 = cells.iter().map(|(_, m)| m).sum();
    if cells.is_empty() || total <= 0.0 {
        return Err(Error::EmptyTarget);
    }
    let mut entries = Vec::with_capacity(cells.len());
    for (cell, mass) in cells {
        let target = cell.centroid();
        let (_, case) = selected_path(tag, source, target, 0.5)?;
        let pieces = if spreads(case, source, target) {
            (spread_height(case, source, target) / resolution).ceil().max(1.0) as usize
        } else {
            1
        };
        for k in 0..pieces {
            let u_range = if pieces == 1 && !spreads(case, source, target) {
                (0.5, 0.5)
            } else {
                (k as f64 / pieces as f64, (k + 1) as f64 / pieces as f64)
            };
            let u = 0.5 * (u_range.0 + u_range.1);
            let (geodesic, case) = selected_path(tag, source, target, u)?;
            if let Some(g) = &geodesic {
                if !is_geodesic(model.space(), g, VALIDATION_SAMPLES, VALIDATION_TOL) {
                    return Err(Error::NotGeodesic {
                        source_point: source,
                        target,
                    });
                }
            }
            let m = mass / pieces as f64;
            entries.push(PlanEntry {
                target,
                weight: m / total,
                mass: m,
                u_range,
                case,
                geodesic,
                cell: cell.clone(),
            });
        }
    }
    Ok(ContractionPlan {
        tag,
        source,
        target_set: a,
        resolution,
        mass: total,
        entries,
    })
}
