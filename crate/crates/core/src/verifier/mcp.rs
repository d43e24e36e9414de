use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{corner_paths, empirical_density_ratio_cached, ReferenceCache};
use super::{CheckReport, MarginRecord, Metric, Witness};
use crate::contraction::{
    analytic_density_ratio, build_contraction, equidistant_slice, sigma, CaseLabel, DistortionParams, Rect,
};
use crate::error::Result;
use crate::geometry::Point;
use crate::spaces::{cone_height, lens_height, ModelSpace, SpaceTag, LENS_TIP};

/// A Dirac source and a vertical target band `[x0, x1] x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McpConfig {
    pub source: Point,
    pub band: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McpOptions {
    /// Side of the target cells and of the density bins.
    pub resolution: f64,
    /// Times `k / t_steps`, `k = 1..=t_steps`.
    pub t_steps: usize,
    pub analytic_tol: f64,
    /// Allowed excess of a bin quotient over 1.
    pub empirical_tol: f64,
    pub empirical: bool,
    /// Fewer configurations than this fails the check.
    pub min_configs: usize,
}

impl Default for McpOptions {
    fn default() -> Self {
        Self {
            resolution: 1.0 / 400.0,
            t_steps: 50,
            analytic_tol: 1e-9,
            empirical_tol: 0.05,
            empirical: true,
            min_configs: 200,
        }
    }
}

/// Band of width `4 h` centered on the bin edge nearest `xc`.
fn band(xc: f64, h: f64) -> (f64, f64) {
    let k = (xc / h).round();
    ((k - 2.0) * h, (k + 2.0) * h)
}

fn config(source: Point, xc: f64, h: f64) -> McpConfig {
    McpConfig {
        source,
        band: band(xc, h),
    }
}

/// The default sweep: sources and bands chosen so every transport case of
/// the space is hit by many configurations.
pub fn default_configs(tag: SpaceTag, h: f64) -> Vec<McpConfig> {
    let mut out = Vec::new();
    match tag {
        SpaceTag::Cone => {
            let ray_sources = [3.0, 1.0, 0.0].map(|x| Point::new(x, 0.0));
            let on_ray = [0.3, 0.8, 1.5, 2.2, 2.9, 3.6, 4.4, 5.2, 6.0, 7.1, 8.3, 9.5];
            let in_cone = [-0.1, -0.4, -0.8, -1.2, -1.7, -2.3, -2.9, -3.6, -4.5, -5.5, -6.8, -8.5];
            for s in ray_sources {
                out.extend(on_ray.iter().map(|&x| config(s, x, h)));
                out.extend(in_cone.iter().map(|&x| config(s, x, h)));
            }
            let mut cone_sources = Vec::new();
            for xs in [-0.6, -2.0, -4.5] {
                for f in [0.0, 0.5, -0.95] {
                    cone_sources.push(Point::new(xs, f * cone_height(xs) / 2.0));
                }
            }
            for s in cone_sources {
                let half = -s.x / 2.0;
                for d in [0.05, 0.3, 1.0, 2.5] {
                    out.push(config(s, s.x - d, h));
                }
                for f in [0.15, 0.4, 0.7, 0.93] {
                    out.push(config(s, s.x + f * half, h));
                }
                for f in [0.07, 0.35, 0.65, 0.95] {
                    out.push(config(s, s.x / 2.0 + f * half, h));
                }
                for x in [0.02, 0.6, 2.0, 5.0] {
                    out.push(config(s, x, h));
                }
            }
        }
        SpaceTag::Suspension => {
            let seg_sources = [-1.45, -0.9, -0.4, 0.3, 0.8, 1.5].map(|x| Point::new(x, 0.0));
            let on_segments = [-1.3, -0.75, -0.3, 0.28, 0.7, 1.2];
            let in_lens = [-0.22, -0.12, -0.03, 0.02, 0.11, 0.2];
            for s in seg_sources {
                out.extend(on_segments.iter().map(|&x| config(s, x, h)));
                out.extend(in_lens.iter().map(|&x| config(s, x, h)));
            }
            let mut lens_sources = Vec::new();
            for xs in [-0.2, -0.1, -0.04, 0.0, 0.08, 0.18] {
                for f in [0.0, 0.8] {
                    lens_sources.push(Point::new(xs, f * lens_height(xs) / 2.0));
                }
            }
            for s in lens_sources {
                // both directions, using the mirror symmetry of the space
                for side in [1.0, -1.0] {
                    let xs = side * s.x;
                    let b = equidistant_slice(xs);
                    if b - xs >= 8.0 * h {
                        for f in [0.2, 0.5, 0.85] {
                            out.push(config(s, side * (xs + f * (b - xs)), h));
                        }
                    }
                    if LENS_TIP - b >= 8.0 * h {
                        for f in [0.25, 0.7] {
                            out.push(config(s, side * (b + f * (LENS_TIP - b)), h));
                        }
                    }
                    for x in [0.33, 1.4] {
                        out.push(config(s, side * x, h));
                    }
                }
            }
        }
    }
    out
}

/// Outcome of one configuration.
#[derive(Debug, Clone, PartialEq)]
struct ConfigOutcome {
    config: McpConfig,
    cases: BTreeSet<CaseLabel>,
    /// (margin, t, target) of the worst analytic sample.
    analytic: (f64, f64, Point),
    /// (quotient - 1, t, bin center) of the worst bin.
    empirical: (f64, f64, Point),
    mass_error: f64,
    records: Vec<MarginRecord>,
}

fn run_config(model: &ModelSpace, params: DistortionParams, cfg: McpConfig, opts: &McpOptions) -> Result<ConfigOutcome> {
    let tag = model.tag();
    let h = opts.resolution;
    let plan = build_contraction(model, cfg.source, Rect::band(cfg.band.0, cfg.band.1), h)?;
    let center = Point::new(0.5 * (cfg.band.0 + cfg.band.1), 0.0);
    let label = plan
        .entries
        .iter()
        .min_by(|a, b| (a.target.x - center.x).abs().total_cmp(&(b.target.x - center.x).abs()))
        .map(|e| e.case.as_str())
        .unwrap_or("none")
        .to_string();
    let times: Vec<f64> = (1..=opts.t_steps).map(|k| k as f64 / opts.t_steps as f64).collect();
    let mut analytic = (f64::NEG_INFINITY, 0.0, center);
    let mut empirical = (f64::NEG_INFINITY, 0.0, center);
    let mut mass_error: f64 = 0.0;
    let mut records = Vec::new();
    let corners = if opts.empirical {
        corner_paths(model, &plan)?
    } else {
        Vec::new()
    };
    let mut cache = ReferenceCache::default();
    for &t in &times {
        let mut worst_t = (f64::NEG_INFINITY, center);
        for e in plan.entries.iter().filter(|e| e.geodesic.is_some()) {
            let r = analytic_density_ratio(tag, e.case, cfg.source, e.target, t)?;
            let m = r * sigma(params, t, e.length())? - 1.0;
            if m > worst_t.0 {
                worst_t = (m, e.target);
            }
        }
        if worst_t.0 > analytic.0 {
            analytic = (worst_t.0, t, worst_t.1);
        }
        records.push(MarginRecord {
            check: "mcp-analytic".into(),
            case: label.clone(),
            source: cfg.source,
            target: worst_t.1,
            t,
            margin: worst_t.0,
        });
        if opts.empirical {
            let field = empirical_density_ratio_cached(model, &plan, &corners, &mut cache, params, t, h)?;
            let (q, key) = field.max_quotient();
            mass_error = mass_error.max((field.total_raw - 1.0).abs());
            let at = field.bin_center(key);
            if q - 1.0 > empirical.0 {
                empirical = (q - 1.0, t, at);
            }
            records.push(MarginRecord {
                check: "mcp-empirical".into(),
                case: label.clone(),
                source: cfg.source,
                target: at,
                t,
                margin: q - 1.0,
            });
        }
    }
    Ok(ConfigOutcome {
        config: cfg,
        cases: plan.cases(),
        analytic,
        empirical,
        mass_error,
        records,
    })
}

/// Sweeps the configurations: for each one the plan is built (every
/// geodesic validated), the analytic ratio times `ς` is compared with 1 at
/// every cell and time, and the binned pushforward is compared with the
/// reference measure.
pub fn verify_mcp(model: &ModelSpace, params: DistortionParams, configs: &[McpConfig], opts: &McpOptions) -> Result<CheckReport> {
    let outcomes: Vec<ConfigOutcome> = configs
        .par_iter()
        .map(|&c| run_config(model, params, c, opts))
        .collect::<Result<Vec<_>>>()?;
    let tag = model.tag();
    let covered: BTreeSet<CaseLabel> = outcomes.iter().flat_map(|o| o.cases.iter().copied()).collect();
    let missing = CaseLabel::all(tag).iter().filter(|c| !covered.contains(c)).count();

    // worst first, ties broken by witness coordinates
    let key = |m: f64, p: Point| (m, -p.x, -p.y);
    let cmp = |a: (f64, f64, f64), b: (f64, f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2));
    let worst_analytic = outcomes
        .iter()
        .max_by(|a, b| cmp(key(a.analytic.0, a.config.source), key(b.analytic.0, b.config.source)));
    let worst_empirical = outcomes
        .iter()
        .max_by(|a, b| cmp(key(a.empirical.0, a.config.source), key(b.empirical.0, b.config.source)));

    let mut metrics = vec![
        Metric::at_least("configurations", configs.len() as f64, opts.min_configs as f64, 0.0),
        Metric::new("cases_missing", missing as f64, missing as f64, 0.0),
        Metric::new(
            "analytic_margin",
            worst_analytic.map_or(f64::NAN, |o| o.analytic.0),
            worst_analytic.map_or(f64::INFINITY, |o| o.analytic.0),
            opts.analytic_tol,
        ),
    ];
    if opts.empirical {
        let q = worst_empirical.map_or(f64::INFINITY, |o| o.empirical.0);
        metrics.push(Metric::new("empirical_quotient_excess", q + 1.0, q, opts.empirical_tol));
        let mass = outcomes.iter().map(|o| o.mass_error).fold(0.0, f64::max);
        metrics.push(Metric::at_most("mass_conservation", mass, 0.0, 1e-12));
    }
    let mut report = CheckReport::from_metrics("mcp", metrics)
        .with_grid("resolution", opts.resolution)
        .with_grid("t_steps", opts.t_steps as f64)
        .with_grid("configurations", configs.len() as f64)
        .with_grid("K", params.k())
        .with_grid("N", params.n());
    let pick = match (worst_analytic, worst_empirical) {
        (Some(a), Some(e)) if opts.empirical && e.empirical.0 - opts.empirical_tol > a.analytic.0 - opts.analytic_tol => {
            Some((e, e.empirical, "worst empirical bin quotient"))
        }
        (Some(a), _) => Some((a, a.analytic, "worst analytic ratio")),
        _ => None,
    };
    if let Some((o, (m, t, at), what)) = pick {
        report = report.with_witness(
            Witness::new(format!("{what} ({})", o.cases.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(",")), vec![o.config.source, at])
                .with("t", t)
                .with("margin", m)
                .with("band_x0", o.config.band.0)
                .with("band_x1", o.config.band.1),
        );
    }
    report = report.with_note(format!(
        "cases covered: {}",
        covered.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
    ));
    Ok(report.with_records(outcomes.into_iter().flat_map(|o| o.records).collect()))
}

/// Default distortion parameters for each space: `(0, 3)` and `(2, 3)`.
pub fn default_params(tag: SpaceTag) -> DistortionParams {
    match tag {
        SpaceTag::Cone => DistortionParams::new(0.0, 3.0).expect("valid"),
        SpaceTag::Suspension => DistortionParams::new(2.0, 3.0).expect("valid"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{classify_x, classify_y};

    #[test]
    fn default_sweeps_cover_every_case() {
        for tag in [SpaceTag::Cone, SpaceTag::Suspension] {
            let cfgs = default_configs(tag, 1.0 / 400.0);
            assert!(cfgs.len() >= 200, "{tag}: {}", cfgs.len());
            let mut seen = BTreeSet::new();
            for c in &cfgs {
                let target = Point::new(0.5 * (c.band.0 + c.band.1), 0.0);
                let case = match tag {
                    SpaceTag::Cone => classify_x(c.source, target),
                    SpaceTag::Suspension => classify_y(c.source, target),
                };
                seen.insert(case.unwrap());
            }
            assert_eq!(seen.len(), CaseLabel::all(tag).len());
        }
    }

    #[test]
    fn small_sweep_passes() {
        let model = ModelSpace::from_tag(SpaceTag::Suspension);
        let cfgs: Vec<McpConfig> = default_configs(SpaceTag::Suspension, 0.005).into_iter().step_by(20).collect();
        let opts = McpOptions {
            resolution: 0.005,
            t_steps: 10,
            min_configs: 1,
            ..McpOptions::default()
        };
        let r = verify_mcp(&model, default_params(SpaceTag::Suspension), &cfgs, &opts).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
