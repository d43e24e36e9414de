//! Small convex-polygon toolkit: areas, vertical slices, sup-norm
//! tolerance membership and Sutherland-Hodgman clipping.

use super::Point;

/// Unsigned shoelace area.
pub fn area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc.abs()
}

pub fn signed_area(poly: &[Point]) -> f64 {
    let mut acc = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

pub fn bounding_box(poly: &[Point]) -> (f64, f64, f64, f64) {
    poly.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(x0, x1, y0, y1), p| (x0.min(p.x), x1.max(p.x), y0.min(p.y), y1.max(p.y)),
    )
}

/// `[ylo, yhi]` where the vertical line at `x` meets the convex polygon.
pub fn vertical_extent(poly: &[Point], x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let (a, b) = if p.x <= q.x { (*p, q) } else { (q, *p) };
        if x < a.x || x > b.x {
            continue;
        }
        if b.x == a.x {
            lo = lo.min(a.y.min(b.y));
            hi = hi.max(a.y.max(b.y));
        } else {
            let y = a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Whether `p` lies within sup-norm distance `tol` of the convex polygon
/// (given counter-clockwise). Exact: the test is against the Minkowski sum of
/// the polygon with the square of half-side `tol`.
pub fn contains_linf(poly: &[Point], p: Point, tol: f64) -> bool {
    let (x0, x1, y0, y1) = bounding_box(poly);
    if p.x < x0 - tol || p.x > x1 + tol || p.y < y0 - tol || p.y > y1 + tol {
        return false;
    }
    for (i, a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        // outward normal of a ccw edge
        let (nx, ny) = (b.y - a.y, a.x - b.x);
        let scale = nx.abs() + ny.abs();
        if scale == 0.0 {
            continue;
        }
        let excess = nx * (p.x - a.x) + ny * (p.y - a.y);
        // relative slack keeps exact boundary points inside despite rounding
        if excess > tol * scale + 1e-14 * scale * (1.0 + a.x.abs().max(a.y.abs())) {
            return false;
        }
    }
    true
}

fn clip_half_plane(poly: &[Point], inside: impl Fn(Point) -> f64) -> Vec<Point> {
    // `inside(p) >= 0` keeps p; the boundary is where it vanishes (affine).
    let mut out = Vec::with_capacity(poly.len() + 4);
    if poly.is_empty() {
        return out;
    }
    for (i, &cur) in poly.iter().enumerate() {
        let prev = poly[(i + poly.len() - 1) % poly.len()];
        let fc = inside(cur);
        let fp = inside(prev);
        if fc >= 0.0 {
            if fp < 0.0 {
                out.push(prev.lerp(cur, fp / (fp - fc)));
            }
            out.push(cur);
        } else if fp >= 0.0 {
            out.push(prev.lerp(cur, fp / (fp - fc)));
        }
    }
    out
}

/// Intersection of a polygon with an axis-aligned rectangle.
pub fn clip_rect(poly: &[Point], x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<Point> {
    let p = clip_half_plane(poly, |q| q.x - x0);
    let p = clip_half_plane(&p, |q| x1 - q.x);
    let p = clip_half_plane(&p, |q| q.y - y0);
    clip_half_plane(&p, |q| y1 - q.y)
}

/// Intersection of a polygon with a convex counter-clockwise polygon.
pub fn clip_convex(poly: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = poly.to_vec();
    for (i, &a) in clip.iter().enumerate() {
        let b = clip[(i + 1) % clip.len()];
        out = clip_half_plane(&out, |q| (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x));
        if out.is_empty() {
            break;
        }
    }
    out
}

/// Re-orders a quadrilateral image so it is a simple polygon when possible,
/// i.e. sorts vertices by angle around their centroid.
pub fn order_ccw(mut pts: Vec<Point>) -> Vec<Point> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a.y - cy).atan2(a.x - cx);
        let tb = (b.y - cy).atan2(b.x - cx);
        ta.total_cmp(&tb)
    });
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn area_and_clip() {
        let sq = unit_square();
        assert_eq!(area(&sq), 1.0);
        let c = clip_rect(&sq, 0.5, 2.0, -1.0, 0.25);
        assert!((area(&c) - 0.125).abs() < 1e-15);
        let tri = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let c = clip_convex(&sq, &tri);
        assert!((area(&c) - 0.5).abs() < 1e-15);
        assert!(clip_rect(&sq, 2.0, 3.0, 0.0, 1.0).is_empty() || area(&clip_rect(&sq, 2.0, 3.0, 0.0, 1.0)) == 0.0);
    }

    #[test]
    fn vertical_extent_of_triangle() {
        let tri = vec![Point::new(0.0, 0.0), Point::new(-3.0, -1.0), Point::new(-3.0, 1.0)];
        let tri = if signed_area(&tri) < 0.0 { tri.into_iter().rev().collect() } else { tri };
        let (lo, hi) = vertical_extent(&tri, -1.5).unwrap();
        assert!((lo + 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        assert!(vertical_extent(&tri, 0.5).is_none());
        assert_eq!(vertical_extent(&tri, 0.0), Some((0.0, 0.0)));
    }

    #[test]
    fn linf_membership_at_apex() {
        let tri = vec![Point::new(0.0, 0.0), Point::new(-3.0, 1.0), Point::new(-3.0, -1.0)];
        assert!(signed_area(&tri) > 0.0);
        assert!(contains_linf(&tri, Point::new(-3.0, 1.0), 0.0));
        assert!(!contains_linf(&tri, Point::new(-3.0, 1.01), 0.0));
        assert!(contains_linf(&tri, Point::new(0.05, 0.0), 0.05));
        assert!(!contains_linf(&tri, Point::new(0.06, 0.0), 0.05));
        // diagonal offset from the apex: sup-distance 0.05 to (0,0)
        assert!(contains_linf(&tri, Point::new(0.05, 0.05), 0.05));
        assert!(!contains_linf(&tri, Point::new(0.05, 0.06), 0.05));
    }
}
