use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::sample_point;
use super::{CheckReport, Metric, Witness};
use crate::geometry::{intrinsic_dist, PlanarSpace, Point};

/// Largest intrinsic distance over pairs drawn from the extreme points of
/// the space and `samples` seeded random points, with the pair attaining it.
pub fn diameter(space: &PlanarSpace, samples: usize, resolution: f64, seed: u64) -> (f64, (Point, Point)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extremes = space.extreme_points();
    let randoms: Vec<Point> = (0..samples).map(|_| sample_point(space, &mut rng)).collect();
    let Some(&first) = extremes.first().or(randoms.first()) else {
        return (0.0, (Point::ORIGIN, Point::ORIGIN));
    };
    let mut best = (0.0, (first, first));
    let mut consider = |p: Point, q: Point| {
        let d = intrinsic_dist(space, p, q, resolution);
        if d.is_finite() && d > best.0 {
            best = (d, (p, q));
        }
    };
    for (i, &p) in extremes.iter().enumerate() {
        for &q in &extremes[i + 1..] {
            consider(p, q);
        }
    }
    for &p in &randoms {
        for &q in &extremes {
            consider(p, q);
        }
    }
    best
}

/// The diameter against an expected value `d`: it must lie in
/// `[d - 3 resolution, d + 1e-9]`.
pub fn diameter_check(space: &PlanarSpace, expected: f64, samples: usize, resolution: f64, seed: u64) -> CheckReport {
    let (d, (p, q)) = diameter(space, samples, resolution, seed);
    let metrics = vec![
        Metric::at_least("diameter_lower", d, expected - 3.0 * resolution, 0.0),
        Metric::at_most("diameter_upper", d, expected, 1e-9),
    ];
    CheckReport::from_metrics("diameter", metrics)
        .with_grid("resolution", resolution)
        .with_grid("samples", samples as f64)
        .with_grid("expected", expected)
        .with_witness(Witness::new("farthest pair", vec![p, q]).with("distance", d))
}
