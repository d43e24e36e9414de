use super::{CheckReport, Metric};
use crate::error::{domain, Error, Result};
use crate::geometry::{ball_measure, dist_linf, PlanarSpace, Point, Stratum};
use crate::spaces::SpaceTag;

/// Least-squares slope of `log m(B(p, r))` against `log r`.
pub fn dimension_exponent(space: &PlanarSpace, p: Point, radii: &[f64]) -> Result<f64> {
    if radii.len() < 2 {
        return Err(domain("radii", radii.len() as f64, "need at least two radii"));
    }
    if space.locate(p, 1e-12).is_none() {
        return Err(Error::OutsideSpace(p));
    }
    let limit = space
        .junctions()
        .iter()
        .map(|&j| dist_linf(p, j))
        .fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    if r_max >= limit {
        return Err(Error::StraddlesGluing { radius: r_max, limit });
    }
    let mut pts = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(domain("radius", r, "must be positive"));
        }
        let m = ball_measure(space, p, r, r / 64.0);
        if !(m > 0.0) {
            return Err(domain("radius", r, "ball has no mass"));
        }
        pts.push((r.ln(), m.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, q| (a.0 + q.0 / n, a.1 + q.1 / n));
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Largest `r` with the ball around `p` inside the piece carrying `p` and
/// short of the gluing locus.
fn clean_radius(space: &PlanarSpace, p: Point) -> Option<f64> {
    let to_junction = space
        .junctions()
        .iter()
        .map(|&j| dist_linf(p, j))
        .fold(f64::INFINITY, f64::min);
    let inside = match space.locate(p, 1e-12)? {
        Stratum::Segment(j) => {
            let s = &space.segments()[j];
            (p.x - s.start().x).min(s.end().x - p.x)
        }
        Stratum::Region(i) => {
            let r = &space.regions()[i];
            let fits = |h: f64| {
                [(-h, -h), (h, -h), (h, h), (-h, h)]
                    .iter()
                    .all(|(dx, dy)| r.contains(Point::new(p.x + dx, p.y + dy), 0.0))
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if fits(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    Some(to_junction.min(inside))
}

/// Six radii halving down from half the clean radius at `p`.
pub fn default_radii(space: &PlanarSpace, p: Point) -> Result<Vec<f64>> {
    let r = clean_radius(space, p).ok_or(Error::OutsideSpace(p))?;
    let top = 0.5 * r.min(1.0);
    Ok((0..6).map(|k| top * 0.5f64.powi(k)).collect())
}

/// Probe points: five on segments (exponent near 1) and five inside
/// regions (exponent near 2).
pub fn dimension_probes(tag: SpaceTag) -> (Vec<Point>, Vec<Point>) {
    let p = Point::new;
    match tag {
        SpaceTag::Cone => (
            vec![p(1.0, 0.0), p(2.0, 0.0), p(3.5, 0.0), p(6.0, 0.0), p(9.0, 0.0)],
            vec![p(-1.0, 0.0), p(-3.0, 0.5), p(-5.0, -1.0), p(-7.0, 1.5), p(-9.0, 0.0)],
        ),
        SpaceTag::Suspension => (
            vec![p(-1.2, 0.0), p(-0.5, 0.0), p(0.4, 0.0), p(0.9, 0.0), p(1.4, 0.0)],
            vec![p(0.0, 0.0), p(-0.1, 0.005), p(0.12, -0.004), p(-0.18, 0.0), p(0.05, 0.01)],
        ),
    }
}

fn band_metric(name: String, v: f64, lo: f64, hi: f64) -> Metric {
    Metric::new(name, v, (lo - v).max(v - hi), 0.0)
}

/// Exponents in `[0.9, 1.1]` on segments and `[1.9, 2.1]` inside regions.
pub fn dimension_check(space: &PlanarSpace, tag: SpaceTag) -> Result<CheckReport> {
    let (segs, regs) = dimension_probes(tag);
    let mut metrics = Vec::new();
    for (pts, lo, hi, kind) in [(segs, 0.9, 1.1, "segment"), (regs, 1.9, 2.1, "region")] {
        for p in pts {
            let e = dimension_exponent(space, p, &default_radii(space, p)?)?;
            metrics.push(band_metric(format!("{kind} ({}, {})", p.x, p.y), e, lo, hi));
        }
    }
    Ok(CheckReport::from_metrics("dimension", metrics).with_grid("radii", 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{ConeSpace, SuspensionSpace};

    #[test]
    fn exponent_examples() {
        let x = ConeSpace::standard();
        let radii = [0.2, 0.1, 0.05, 0.025];
        let e = dimension_exponent(x.space(), Point::new(2.0, 0.0), &radii).unwrap();
        assert!((e - 1.0).abs() < 1e-9, "{e}");
        let e = dimension_exponent(x.space(), Point::new(-3.0, 0.0), &radii).unwrap();
        assert!((e - 2.0).abs() < 0.02, "{e}");
        let y = SuspensionSpace::new();
        // the lens density grows away from the axis, bending the fit slightly
        let e = dimension_exponent(y.space(), Point::ORIGIN, &[0.02, 0.01, 0.005]).unwrap();
        assert!((e - 2.0).abs() < 0.05, "{e}");
    }

    #[test]
    fn straddling_the_apex_is_flagged() {
        let x = ConeSpace::standard();
        let r = dimension_exponent(x.space(), Point::new(0.5, 0.0), &[1.0, 0.5, 0.25]);
        assert!(matches!(r, Err(Error::StraddlesGluing { .. })));
    }

    #[test]
    fn both_spaces_split_in_dimension() {
        let x = ConeSpace::standard();
        let y = SuspensionSpace::new();
        assert!(dimension_check(x.space(), SpaceTag::Cone).unwrap().passed());
        assert!(dimension_check(y.space(), SpaceTag::Suspension).unwrap().passed());
    }
}
