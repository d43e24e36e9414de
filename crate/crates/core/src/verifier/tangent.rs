//! Blow-ups of the suspension space against a cone glued to a half-line.
//!
//! Both pointed unit balls have a reference measure that is uniform on every
//! vertical slice, so each is described by its slice interval and its
//! projected density on `[-1, 1]`. The two balls are matched by the
//! Knothe-Rosenblatt map (quantiles of the first marginal, then affine on
//! slices), which pushes one normalized measure onto the other; half the
//! metric distortion of that correspondence on farthest-point nets bounds
//! the measured distance from above.

use super::{CheckReport, Metric, Witness};
use crate::error::{domain, Result};
use crate::geometry::{dist_linf, Point};
use crate::spaces::{LENS_SLOPE, LENS_TIP};

const NET_SIZE: usize = 200;
const GRID: usize = 61;
const CDF_STEPS: usize = 20_000;

/// A pointed unit ball: slice interval and unclipped projected density at
/// each abscissa in `[-1, 1]`.
pub struct PointedBall {
    slice: Box<dyn Fn(f64) -> Option<(f64, f64)> + Send + Sync>,
    density: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl PointedBall {
    /// The cone `{|y| <= slope (-x)}` with slice mass 1, glued at the apex to
    /// a half-line of density 1.
    pub fn cone(slope: f64) -> Self {
        Self {
            slice: Box::new(move |x: f64| Some(if x < 0.0 { (slope * x, -slope * x) } else { (0.0, 0.0) })),
            density: Box::new(|_| 1.0),
        }
    }

    /// The suspension space around `(base_x, 0)` blown up by `1/scale`,
    /// mirrored when `base_x < 0` so the lens lies on the negative side.
    pub fn suspension(base_x: f64, scale: f64) -> Self {
        let sign = if base_x < 0.0 { -1.0 } else { 1.0 };
        let to_x = move |u: f64| base_x + sign * scale * u;
        Self {
            slice: Box::new(move |u: f64| {
                let x = to_x(u);
                if x.abs() < LENS_TIP {
                    let h = LENS_SLOPE * (LENS_TIP - x.abs()) / scale;
                    Some((-h, h))
                } else if x.abs() <= std::f64::consts::FRAC_PI_2 {
                    Some((0.0, 0.0))
                } else {
                    None
                }
            }),
            density: Box::new(move |u: f64| to_x(u).cos().powi(2)),
        }
    }

    /// Slice clipped to the unit ball.
    fn clipped(&self, x: f64) -> Option<(f64, f64)> {
        (self.slice)(x).map(|(lo, hi)| (lo.max(-1.0), hi.min(1.0)))
    }

    /// Projected density of the clipped ball.
    fn marginal(&self, x: f64) -> f64 {
        match ((self.slice)(x), self.clipped(x)) {
            (Some((lo, hi)), Some((a, b))) if hi > lo => (self.density)(x) * (b - a) / (hi - lo),
            (Some(_), Some(_)) => (self.density)(x),
            _ => 0.0,
        }
    }

    /// Grid points of the ball: a lattice on 2D slices and the axis on 1D ones.
    fn grid(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..GRID {
            let x = -1.0 + 2.0 * i as f64 / (GRID - 1) as f64;
            let Some((lo, hi)) = self.clipped(x) else { continue };
            for j in 0..GRID {
                let y = -1.0 + 2.0 * j as f64 / (GRID - 1) as f64;
                if y >= lo - 1e-12 && y <= hi + 1e-12 {
                    out.push(Point::new(x, y));
                }
            }
        }
        out
    }
}

/// Normalized cumulative distribution of a marginal on `[-1, 1]`.
struct Cdf {
    values: Vec<f64>,
}

impl Cdf {
    fn new(ball: &PointedBall) -> Self {
        let dx = 2.0 / CDF_STEPS as f64;
        let mut values = Vec::with_capacity(CDF_STEPS + 1);
        let mut acc = 0.0;
        let mut prev = ball.marginal(-1.0);
        values.push(0.0);
        for k in 1..=CDF_STEPS {
            let cur = ball.marginal(-1.0 + k as f64 * dx);
            acc += 0.5 * (prev + cur) * dx;
            values.push(acc);
            prev = cur;
        }
        let total = acc;
        values.iter_mut().for_each(|v| *v /= total);
        Self { values }
    }

    fn at(&self, x: f64) -> f64 {
        let s = ((x + 1.0) / 2.0 * CDF_STEPS as f64).clamp(0.0, CDF_STEPS as f64);
        let k = (s.floor() as usize).min(CDF_STEPS - 1);
        let f = s - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    fn inverse(&self, q: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < q).clamp(1, CDF_STEPS);
        let (a, b) = (self.values[k - 1], self.values[k]);
        let f = if b > a { ((q - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
        -1.0 + 2.0 * (k as f64 - 1.0 + f) / CDF_STEPS as f64
    }
}

/// The Knothe-Rosenblatt map from one ball to the other.
fn kr_map(from: &PointedBall, from_cdf: &Cdf, to: &PointedBall, to_cdf: &Cdf, p: Point) -> Point {
    let x = to_cdf.inverse(from_cdf.at(p.x));
    let (lo, hi) = from.clipped(p.x).unwrap_or((0.0, 0.0));
    let (a, b) = to.clipped(x).unwrap_or((0.0, 0.0));
    let s = if hi > lo { (p.y - lo) / (hi - lo) } else { 0.5 };
    Point::new(x, a + s * (b - a))
}

/// Farthest-point sampling from the base point.
fn farthest_points(points: &[Point], n: usize) -> Vec<Point> {
    let mut net = vec![Point::ORIGIN];
    let mut gap: Vec<f64> = points.iter().map(|&p| dist_linf(p, Point::ORIGIN)).collect();
    while net.len() < n.min(points.len()) {
        let (k, _) = gap
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |a, (i, &g)| if g > a.1 { (i, g) } else { a });
        let p = points[k];
        net.push(p);
        for (g, q) in gap.iter_mut().zip(points) {
            *g = g.min(dist_linf(p, *q));
        }
    }
    net
}

fn half_distortion(net: &[Point], image: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..net.len() {
        for j in i + 1..net.len() {
            worst = worst.max((dist_linf(net[i], net[j]) - dist_linf(image[i], image[j])).abs());
        }
    }
    0.5 * worst
}

/// Sampled measured distance between two pointed unit balls. Both balls
/// are geodesic for the restricted sup-norm, so distances are extrinsic.
pub fn sampled_distance(a: &PointedBall, b: &PointedBall) -> f64 {
    let (ca, cb) = (Cdf::new(a), Cdf::new(b));
    let mut worst: f64 = 0.0;
    for (from, fc, to, tc) in [(a, &ca, b, &cb), (b, &cb, a, &ca)] {
        let net = farthest_points(&from.grid(), NET_SIZE);
        let image: Vec<Point> = net.iter().map(|&p| kr_map(from, fc, to, tc, p)).collect();
        worst = worst.max(half_distortion(&net, &image));
    }
    worst
}

/// Blow-ups of the suspension at `(1/4, 0)` against the cone of matching
/// opening; the control blows up at `(0, 0)`.
pub fn tangent_blowup_compare(scales: &[f64]) -> Result<CheckReport> {
    if scales.len() < 2 || scales.windows(2).any(|w| !(w[1] < w[0])) || scales.iter().any(|&s| !(s > 0.0)) {
        return Err(domain("scales", scales.len() as f64, "need at least two positive, decreasing scales"));
    }
    let model = PointedBall::cone(LENS_SLOPE);
    let positive: Vec<f64> = scales
        .iter()
        .map(|&s| sampled_distance(&PointedBall::suspension(LENS_TIP, s), &model))
        .collect();
    let mirrored: Vec<f64> = scales
        .iter()
        .map(|&s| sampled_distance(&PointedBall::suspension(-LENS_TIP, s), &model))
        .collect();
    let control: Vec<f64> = scales
        .iter()
        .map(|&s| sampled_distance(&PointedBall::suspension(0.0, s), &model))
        .collect();
    let steps = positive.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let (first, last) = (positive[0], positive[positive.len() - 1]);
    let mirror_gap = positive
        .iter()
        .zip(&mirrored)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let control_min = control.iter().copied().fold(f64::INFINITY, f64::min);
    let metrics = vec![
        Metric::new("strict_decrease", steps, steps, -1e-15),
        Metric::at_most("final_over_initial", last, 0.5 * first, 0.0),
        Metric::at_least("control_separation", control_min, 5.0 * last, 0.0),
        Metric::at_most("mirror_symmetry", mirror_gap, 0.0, 1e-9),
    ];
    let mut w = Witness::new("blow-up distances", vec![Point::new(LENS_TIP, 0.0), Point::ORIGIN]);
    for (k, &s) in scales.iter().enumerate() {
        w = w
            .with(&format!("scale_{k}"), s)
            .with(&format!("positive_{k}"), positive[k])
            .with(&format!("control_{k}"), control[k]);
    }
    Ok(CheckReport::from_metrics("tangent", metrics)
        .with_grid("net_size", NET_SIZE as f64)
        .with_grid("grid", GRID as f64)
        .with_grid("cone_slope", LENS_SLOPE)
        .with_witness(w))
}

/// Scales `2^-2, ..., 2^-6`.
pub fn default_scales() -> Vec<f64> {
    (2..=6).map(|k| 0.5f64.powi(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_ball_is_at_distance_zero_from_itself() {
        let z = PointedBall::cone(LENS_SLOPE);
        assert!(sampled_distance(&z, &PointedBall::cone(LENS_SLOPE)) < 1e-9);
    }

    #[test]
    fn quantile_map_pushes_marginals() {
        let y = PointedBall::suspension(LENS_TIP, 0.25);
        let z = PointedBall::cone(LENS_SLOPE);
        let (cy, cz) = (Cdf::new(&y), Cdf::new(&z));
        for q in [0.1, 0.37, 0.5, 0.9] {
            let x = cz.inverse(q);
            assert!((cz.at(x) - q).abs() < 1e-9);
            let p = kr_map(&z, &cz, &y, &cy, Point::new(x, 0.0));
            assert!((cy.at(p.x) - q).abs() < 1e-6);
        }
    }

    #[test]
    fn blowups_converge_and_the_control_does_not() {
        let r = tangent_blowup_compare(&default_scales()).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn rejects_increasing_scales() {
        assert!(tangent_blowup_compare(&[0.1, 0.2]).is_err());
    }
}
