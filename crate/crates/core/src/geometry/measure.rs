use super::{PlanarSpace, Point};

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre rule on `pieces` equal sub-intervals.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let pieces = pieces.max(1);
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let mid = a + (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            acc += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += acc * half;
    }
    total
}

/// Reference measure of the closed ball `{q in space : d(center, q) <= radius}`.
///
/// The ball of the restricted sup-norm metric is the square of half-side
/// `radius` intersected with the space. Regions are integrated slice by
/// slice at the given resolution, segments exactly.
pub fn ball_measure(space: &PlanarSpace, center: Point, radius: f64, resolution: f64) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    let (x0, x1) = (center.x - radius, center.x + radius);
    let (y0, y1) = (center.y - radius, center.y + radius);
    let area: f64 = space
        .regions()
        .iter()
        .map(|r| r.mass_in_rect(x0, x1, y0, y1, resolution))
        .sum();
    let line: f64 = space
        .segments()
        .iter()
        .filter(|s| s.y() >= y0 && s.y() <= y1)
        .map(|s| s.mass_between(x0, x1))
        .sum();
    area + line
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{ConeSpace, SuspensionSpace};

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let v = gauss_legendre(|x| x.powi(7) - 3.0 * x.powi(2), -1.0, 2.0, 1);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn ball_on_the_half_line() {
        let x = ConeSpace::standard();
        let m = ball_measure(x.space(), Point::new(2.0, 0.0), 0.5, 0.01);
        assert!((m - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ball_vanishes_with_radius() {
        let x = ConeSpace::standard();
        assert_eq!(ball_measure(x.space(), Point::new(-3.0, 0.0), 0.0, 0.01), 0.0);
        let small = ball_measure(x.space(), Point::new(-3.0, 0.0), 1e-6, 1e-7);
        assert!(small < 1e-11);
    }

    #[test]
    fn ball_scales_quadratically_in_the_cone() {
        // ball fully inside C: mass = integral of (2r) * 3/(-2x) over [-3-r, -3+r]
        let x = ConeSpace::standard();
        for r in [0.4f64, 0.1, 0.02] {
            let exact = 3.0 * r * ((3.0 + r) / (3.0 - r)).ln();
            let m = ball_measure(x.space(), Point::new(-3.0, 0.0), r, r / 50.0);
            assert!((m - exact).abs() < 1e-12 * exact.max(1.0), "{r}: {m} vs {exact}");
        }
    }

    #[test]
    fn suspension_total_mass() {
        let y = SuspensionSpace::new();
        let total = y.space().total_mass(1e-3);
        assert!((total - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
