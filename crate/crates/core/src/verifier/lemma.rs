//! The one-variable inequalities behind the suspension estimate.

use std::f64::consts::FRAC_PI_2;

use super::{CheckReport, Metric, Witness};
use crate::contraction::equidistant_slice;
use crate::error::{domain, Result};
use crate::geometry::Point;
use crate::spaces::{lens_height, LENS_TIP};

/// `f_l(t) = (5/4 - t/4) sin^2(tl) - t sin^2(l)`.
pub fn f_l(l: f64, t: f64) -> f64 {
    (1.25 - 0.25 * t) * (t * l).sin().powi(2) - t * l.sin().powi(2)
}

/// `f_l''(t) = -(l/2) sin(2tl) + (5 - t)(l^2/2) cos(2tl)`.
pub fn f_l_second(l: f64, t: f64) -> f64 {
    -0.5 * l * (2.0 * t * l).sin() + (5.0 - t) * 0.5 * l * l * (2.0 * t * l).cos()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaGrid {
    /// Number of `t` intervals; the grid has `t_steps + 1` points.
    pub t_steps: usize,
    pub l_steps: usize,
}

impl Default for LemmaGrid {
    fn default() -> Self {
        Self {
            t_steps: 1000,
            l_steps: 500,
        }
    }
}

fn check_grid(g: &LemmaGrid) -> Result<()> {
    if g.t_steps < 2 {
        return Err(domain("t_steps", g.t_steps as f64, "need at least 2"));
    }
    if g.l_steps < 1 {
        return Err(domain("l_steps", g.l_steps as f64, "need at least 1"));
    }
    Ok(())
}

/// `f_l <= 0` on `[0,1] x (0,1/2]`, its endpoint values and convexity, and
/// the height estimate `h_t <= (5/4 - t/4) h_1` for straight lens transports.
pub fn f_check(grid: &LemmaGrid) -> Result<CheckReport> {
    check_grid(grid)?;
    let n = grid.t_steps;
    let ts: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let mut max_f = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut min_f2 = (f64::INFINITY, 0.0, 0.0);
    let mut endpoint: f64 = 0.0;
    let mut min_diff2 = f64::INFINITY;
    for j in 1..=grid.l_steps {
        let l = 0.5 * j as f64 / grid.l_steps as f64;
        let row: Vec<f64> = ts.iter().map(|&t| f_l(l, t)).collect();
        endpoint = endpoint.max(row[0].abs()).max(row[n].abs());
        for (k, &t) in ts.iter().enumerate() {
            if row[k] > max_f.0 {
                max_f = (row[k], t, l);
            }
            let s = f_l_second(l, t);
            if s < min_f2.0 {
                min_f2 = (s, t, l);
            }
        }
        for w in row.windows(3) {
            min_diff2 = min_diff2.min(w[0] - 2.0 * w[1] + w[2]);
        }
    }
    // a grid function vanishing at both ends with nonnegative second
    // differences cannot be positive inside
    let convex = endpoint <= 1e-14 && min_diff2 >= -1e-14;
    let implied = if convex { max_f.0 } else { f64::INFINITY };

    let (chain, chain_at) = essential_chain(grid);
    let metrics = vec![
        Metric::at_most("max_f", max_f.0, 0.0, 1e-12),
        Metric::at_most("endpoint_abs", endpoint, 0.0, 1e-14),
        Metric::at_least("min_f_second", min_f2.0, 0.0, 1e-12),
        Metric::at_least("min_second_difference", min_diff2, 0.0, 1e-14),
        Metric::at_most("convexity_cross_check", implied, 0.0, 1e-12),
        Metric::at_most("height_link", chain, 0.0, 1e-12),
    ];
    Ok(CheckReport::from_metrics("f-lemma", metrics)
        .with_grid("t_points", (n + 1) as f64)
        .with_grid("l_points", grid.l_steps as f64)
        .with_witness(
            Witness::new("largest f_l(t)", vec![])
                .with("t", max_f.1)
                .with("l", max_f.2)
                .with("f", max_f.0)
                .with("min_f_second", min_f2.0)
                .with("min_f_second_t", min_f2.1)
                .with("min_f_second_l", min_f2.2),
        )
        .with_note(format!(
            "height link worst at source x {:.4}, target x {:.4}, t {:.4}",
            chain_at.0, chain_at.1, chain_at.2
        )))
}

/// Worst `h_t / h_1 - (5/4 - t/4)` over straight transports in the lens
/// (`x <= b*`), with `h` the slice height along the path.
fn essential_chain(grid: &LemmaGrid) -> (f64, (f64, f64, f64)) {
    let mut worst = (f64::NEG_INFINITY, (0.0, 0.0, 0.0));
    let steps = grid.l_steps.min(200);
    for i in 0..=steps {
        let xs = -LENS_TIP + 2.0 * LENS_TIP * i as f64 / steps as f64;
        let b = equidistant_slice(xs);
        for k in 1..=steps {
            let x = xs + (b - xs) * k as f64 / steps as f64;
            let h1 = lens_height(x);
            if x <= xs || h1 <= 0.0 {
                continue;
            }
            for j in 0..=20 {
                let t = j as f64 / 20.0;
                let ht = lens_height(xs + t * (x - xs));
                let m = ht / h1 - (1.25 - 0.25 * t);
                if m > worst.0 {
                    worst = (m, (xs, x, t));
                }
            }
        }
    }
    worst
}

/// `t0 = (b* - xs) / l`, the time a long transport from the lens reaches
/// its bending slice.
pub fn hitting_time(xs: f64, l: f64) -> f64 {
    (equidistant_slice(xs) - xs) / l
}

/// The four-link chain for `t in [0, 1/5]`, `l in (1/2, pi/2 + 1/4]`, and
/// the bound on `t0` over lens sources and targets beyond the tip.
pub fn large_l_chain_check(grid: &LemmaGrid) -> Result<CheckReport> {
    check_grid(grid)?;
    let l_max = FRAC_PI_2 + LENS_TIP;
    let ls: Vec<f64> = (1..=grid.l_steps)
        .map(|j| 0.5 + (l_max - 0.5) * j as f64 / grid.l_steps as f64)
        .collect();
    let ts: Vec<f64> = (0..=grid.t_steps).map(|k| 0.2 * k as f64 / grid.t_steps as f64).collect();
    let mut links = [f64::NEG_INFINITY; 4];
    let mut equality: f64 = 0.0;
    for &l in &ls {
        for &t in &ts {
            let terms = [
                (1.25 - 0.25 * t) * (t * l).sin().powi(2),
                1.25 * (t * l).sin().powi(2),
                1.25 * (t * l).powi(2),
                0.25 * t * l * l,
                t * l.sin().powi(2),
            ];
            for k in 0..4 {
                let m = terms[k] - terms[k + 1];
                links[k] = links[k].max(m);
            }
        }
        let t = 0.2;
        equality = equality.max((1.25 * (t * l).powi(2) - 0.25 * t * l * l).abs());
    }

    // t0 over lens sources and targets past the right tip with l > 1/2
    let mut tail: f64 = f64::NEG_INFINITY;
    let mut first_unclamped: f64 = f64::NEG_INFINITY;
    let mut t0_max = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut f_before_t0 = (f64::NEG_INFINITY, 0.0, 0.0, 0.0);
    let n_src = grid.l_steps.min(200);
    for i in 0..=n_src {
        let xs = -LENS_TIP + 2.0 * LENS_TIP * i as f64 / n_src as f64;
        for j in 1..=grid.l_steps.min(200) {
            let x = LENS_TIP + (FRAC_PI_2 - LENS_TIP) * j as f64 / grid.l_steps.min(200) as f64;
            let l = x - xs;
            if l <= 0.5 {
                continue;
            }
            let t0 = hitting_time(xs, l);
            let expr = ((0.25 + 4.0 * xs) / 5.0 - xs) / l;
            tail = tail.max(expr - 2.0 * (0.25 - xs) / 5.0).max(2.0 * (0.25 - xs) / 5.0 - 0.2);
            if 0.25 + 4.0 * xs >= 0.0 {
                first_unclamped = first_unclamped.max(t0 - expr);
            }
            if t0 > t0_max.0 {
                t0_max = (t0, xs, l);
            }
            for k in 0..=50 {
                let t = t0 * k as f64 / 50.0;
                let f = f_l(l, t);
                if f > f_before_t0.0 {
                    f_before_t0 = (f, t, l, xs);
                }
            }
        }
    }

    let names = ["link_weight", "link_sine", "link_fifth", "link_sinc"];
    let mut metrics: Vec<Metric> = names
        .iter()
        .zip(links)
        .map(|(n, v)| Metric::at_most(*n, v, 0.0, 1e-12))
        .collect();
    metrics.push(Metric::at_most("middle_equality_at_fifth", equality, 0.0, 1e-12));
    metrics.push(Metric::at_most("t0_chain_tail", tail, 0.0, 1e-12));
    metrics.push(Metric::at_most("t0_first_link_unclamped", first_unclamped, 0.0, 1e-12));
    metrics.push(Metric::at_most("t0_bound", t0_max.0, 0.2, 1e-12));
    metrics.push(Metric::at_most("f_before_t0", f_before_t0.0, 0.0, 1e-12));
    let mut report = CheckReport::from_metrics("large-l", metrics)
        .with_grid("t_points", ts.len() as f64)
        .with_grid("l_points", ls.len() as f64)
        .with_witness(
            Witness::new(
                "largest hitting time of the bending slice",
                vec![Point::new(t0_max.1, 0.0), Point::new(t0_max.1 + t0_max.2, 0.0)],
            )
            .with("t0", t0_max.0)
            .with("l", t0_max.2)
            .with("f_before_t0", f_before_t0.0)
            .with("f_before_t0_t", f_before_t0.1)
            .with("f_before_t0_l", f_before_t0.2),
        );
    if t0_max.0 > 0.2 {
        report = report.with_note(
            "t0 exceeds 1/5 where the bending slice is clamped to x = 0 (source x < -1/16); \
             f_before_t0 checks f_l <= 0 up to the actual t0 there",
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_examples() {
        assert_eq!(f_l(0.5, 0.0), 0.0);
        assert!(f_l(0.5, 1.0).abs() < 1e-16);
        // direct evaluation: 1.125 sin^2(0.25) - 0.5 sin^2(0.5)
        let direct = 1.125 * 0.25f64.sin().powi(2) - 0.5 * 0.5f64.sin().powi(2);
        assert_eq!(f_l(0.5, 0.5), direct);
        assert!((f_l(0.5, 0.5) + 0.04607).abs() < 1e-5);
    }

    #[test]
    fn second_derivative_matches_differences() {
        let h = 1e-4;
        for (l, t) in [(0.3, 0.2), (0.5, 0.9), (0.1, 0.5)] {
            let fd = (f_l(l, t + h) - 2.0 * f_l(l, t) + f_l(l, t - h)) / (h * h);
            assert!((fd - f_l_second(l, t)).abs() < 1e-5, "{l} {t}");
        }
    }

    #[test]
    fn small_grids_pass() {
        let g = LemmaGrid { t_steps: 100, l_steps: 50 };
        let r = f_check(&g).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn middle_link_is_tight_at_a_fifth() {
        let r = large_l_chain_check(&LemmaGrid { t_steps: 40, l_steps: 40 }).unwrap();
        assert!(r.metric("middle_equality_at_fifth").unwrap().passes());
        assert!(r.metric("link_fifth").unwrap().value.abs() < 1e-12);
        for m in ["link_weight", "link_sine", "link_sinc", "t0_chain_tail", "t0_first_link_unclamped", "f_before_t0"] {
            assert!(r.metric(m).unwrap().passes(), "{m}");
        }
    }

    #[test]
    fn clamped_sources_reach_the_bend_late() {
        // source at -0.2, target at 0.6: the bend sits at x = 0
        assert!((hitting_time(-0.2, 0.8) - 0.25).abs() < 1e-15);
        assert!(hitting_time(0.0, 0.8) <= 0.2);
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(f_check(&LemmaGrid { t_steps: 0, l_steps: 5 }).is_err());
    }
}
