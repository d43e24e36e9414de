use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::sample_point;
use super::{CheckReport, Metric, Witness};
use crate::geometry::{dist_linf, intrinsic_dist, PlanarSpace, Point};

/// Intrinsic over extrinsic distance on seeded random pairs; the space is
/// geodesic for the restricted sup-norm when the ratio stays below
/// `1 + 2 resolution + tol`.
pub fn geodesicity_suite(space: &PlanarSpace, pairs: usize, resolution: f64, tol: f64, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (1.0, Point::ORIGIN, Point::ORIGIN);
    let mut disconnected = 0usize;
    for _ in 0..pairs {
        let p = sample_point(space, &mut rng);
        let q = sample_point(space, &mut rng);
        let e = dist_linf(p, q);
        if e == 0.0 {
            continue;
        }
        let d = intrinsic_dist(space, p, q, resolution);
        if !d.is_finite() {
            disconnected += 1;
        }
        if d / e > worst.0 {
            worst = (d / e, p, q);
        }
    }
    let metrics = vec![
        Metric::at_most("worst_ratio", worst.0, 1.0 + 2.0 * resolution, tol),
        Metric::at_most("disconnected_pairs", disconnected as f64, 0.0, 0.0),
    ];
    CheckReport::from_metrics("geodesicity", metrics)
        .with_grid("pairs", pairs as f64)
        .with_grid("resolution", resolution)
        .with_witness(Witness::new("pair with the largest ratio", vec![worst.1, worst.2]).with("ratio", worst.0))
}
