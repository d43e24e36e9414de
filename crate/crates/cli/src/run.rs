use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use mcpcheck_core::geometry::ball_measure;
use mcpcheck_core::verifier::{
    cd_failure_search, default_candidates, default_configs, default_params, default_radii, default_scales, diameter_check,
    dimension_check, dimension_probes, f_check, f_l, geodesicity_suite, large_l_chain_check, tangent_blowup_compare,
    verify_mcp, CdOptions, CheckReport, LemmaGrid, McpOptions,
};
use mcpcheck_core::{dist_linf, ModelSpace, SpaceTag};
use serde::Serialize;

use crate::config::{CheckKind, RunConfig};
use crate::svg::{heatmap, scatter, Heatmap, Series};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_RESOLUTION: f64 = 1.0 / 400.0;
pub const DEFAULT_CD_RESOLUTION: f64 = 1.0 / 200.0;
const DIAMETER_SAMPLES: usize = 400;
const GEODESIC_PAIRS: usize = 500;
const HEAT_BINS: usize = 30;

#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub schema_version: u32,
    pub config: &'a RunConfig,
    pub passed: bool,
    pub checks: &'a [CheckReport],
}

/// Runs one check against the configured space.
pub fn run_check(config: &RunConfig, model: &ModelSpace, check: CheckKind) -> mcpcheck_core::Result<CheckReport> {
    let h = config.resolution.unwrap_or(DEFAULT_RESOLUTION);
    let tag = model.tag();
    let grid = LemmaGrid {
        t_steps: config.t_grid.unwrap_or(LemmaGrid::default().t_steps),
        l_steps: config.l_grid.unwrap_or(LemmaGrid::default().l_steps),
    };
    match check {
        CheckKind::Mcp => {
            let defaults = McpOptions::default();
            let opts = McpOptions {
                resolution: h,
                t_steps: config.t_grid.unwrap_or(defaults.t_steps),
                empirical_tol: config.tolerance.unwrap_or(defaults.empirical_tol),
                ..defaults
            };
            verify_mcp(model, default_params(tag), &default_configs(tag, h), &opts)
        }
        CheckKind::FLemma => f_check(&grid),
        CheckKind::LargeL => large_l_chain_check(&grid),
        CheckKind::Diameter => Ok(diameter_check(model.space(), PI, DIAMETER_SAMPLES, h, config.seed)),
        CheckKind::CdFailure => {
            let ModelSpace::Cone(cone) = model else {
                unreachable!("validated: cd-failure runs on the cone")
            };
            let r = config.resolution.unwrap_or(DEFAULT_CD_RESOLUTION);
            let opts = CdOptions {
                resolution: r,
                refined_resolution: r / 2.0,
                ..CdOptions::default()
            };
            cd_failure_search(cone, &default_candidates(), &opts)
        }
        CheckKind::Dimension => dimension_check(model.space(), tag),
        CheckKind::Tangent => tangent_blowup_compare(&default_scales()),
        CheckKind::Geodesicity => Ok(geodesicity_suite(model.space(), GEODESIC_PAIRS, h, 1e-9, config.seed)),
    }
}

pub fn run_all(config: &RunConfig) -> mcpcheck_core::Result<Vec<CheckReport>> {
    let model = ModelSpace::from_tag(config.space);
    config.selected().into_iter().map(|c| run_check(config, &model, c)).collect()
}

/// Writes `report.json`, `margins.csv` and, if asked, the SVG plots.
pub fn write_outputs(config: &RunConfig, reports: &[CheckReport]) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(&config.out)?;
    let passed = reports.iter().all(CheckReport::passed);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config,
        passed,
        checks: reports,
    };
    let mut written = Vec::new();
    let json = config.out.join("report.json");
    fs::write(&json, serde_json::to_string_pretty(&report)? + "\n")?;
    written.push(json);

    let csv_path = config.out.join("margins.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["check", "case", "source_x", "source_y", "target_x", "target_y", "t", "margin"])?;
    for r in reports.iter().flat_map(|r| &r.records) {
        w.write_record([
            r.check.clone(),
            r.case.clone(),
            r.source.x.to_string(),
            r.source.y.to_string(),
            r.target.x.to_string(),
            r.target.y.to_string(),
            r.t.to_string(),
            r.margin.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(csv_path);

    if config.svg {
        for (name, body) in plots(config, reports)? {
            let path = config.out.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
    }
    Ok(written)
}

fn plots(config: &RunConfig, reports: &[CheckReport]) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for r in reports {
        match r.name.as_str() {
            "mcp" => {
                for check in ["mcp-analytic", "mcp-empirical"] {
                    let pts: Vec<(f64, f64, f64)> = r
                        .records
                        .iter()
                        .filter(|m| m.check == check)
                        .map(|m| (m.t, dist_linf(m.source, m.target), m.margin))
                        .collect();
                    if !pts.is_empty() {
                        out.push((format!("{check}.svg"), margin_heatmap(check, &pts)));
                    }
                }
            }
            "f-lemma" => out.push(("f-lemma.svg".into(), f_surface(config))),
            "dimension" => out.push(("dimension.svg".into(), dimension_fits(config.space)?)),
            _ => {}
        }
    }
    Ok(out)
}

/// Worst margin per `(t, l)` bin.
fn margin_heatmap(check: &str, pts: &[(f64, f64, f64)]) -> String {
    let l_max = pts.iter().map(|p| p.1).fold(0.0, f64::max).max(1e-12);
    let mut cells = vec![vec![None::<f64>; HEAT_BINS]; HEAT_BINS];
    for &(t, l, m) in pts {
        let c = ((t * HEAT_BINS as f64) as usize).min(HEAT_BINS - 1);
        let r = ((l / l_max * HEAT_BINS as f64) as usize).min(HEAT_BINS - 1);
        let cell = &mut cells[r][c];
        *cell = Some(cell.map_or(m, |v| v.max(m)));
    }
    heatmap(&Heatmap {
        title: &format!("{check}: worst margin over (t, l)"),
        x_label: "t",
        y_label: "l = d(source, target)",
        x_range: (0.0, 1.0),
        y_range: (0.0, l_max),
        cells,
    })
}

fn f_surface(config: &RunConfig) -> String {
    let (nt, nl) = (config.t_grid.unwrap_or(1000).min(100), config.l_grid.unwrap_or(500).min(100));
    let cells = (1..=nl)
        .map(|j| {
            let l = 0.5 * j as f64 / nl as f64;
            (0..=nt).map(|k| Some(f_l(l, k as f64 / nt as f64))).collect()
        })
        .collect();
    heatmap(&Heatmap {
        title: "f_l(t)",
        x_label: "t",
        y_label: "l",
        x_range: (0.0, 1.0),
        y_range: (0.0, 0.5),
        cells,
    })
}

fn dimension_fits(tag: SpaceTag) -> mcpcheck_core::Result<String> {
    let model = ModelSpace::from_tag(tag);
    let (segs, regs) = dimension_probes(tag);
    let mut series = Vec::new();
    for p in segs.into_iter().chain(regs) {
        let points: Vec<(f64, f64)> = default_radii(model.space(), p)?
            .into_iter()
            .map(|r| (r.ln(), ball_measure(model.space(), p, r, r / 64.0).ln()))
            .collect();
        series.push(Series {
            label: format!("({}, {})", p.x, p.y),
            fit: least_squares(&points),
            points,
        });
    }
    Ok(scatter("ball measure against radius", "log r", "log m(B(p, r))", &series))
}

fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| (sxy / sxx, my - sxy / sxx * mx))
}

/// One line per check for the terminal; failing checks add their witness.
pub fn summary(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!(
            "{:<12} {:<12} worst margin {:+.3e} (tol {:.1e})\n",
            r.name,
            format!("{:?}", r.verdict).to_lowercase(),
            r.worst_margin,
            r.tolerance
        ));
        if !r.passed() {
            for m in r.metrics.iter().filter(|m| !m.passes()) {
                s.push_str(&format!("    {} = {} (margin {:+.3e})\n", m.name, m.value, m.margin));
            }
            if let Some(w) = &r.witness {
                let pts: Vec<String> = w.points.iter().map(|p| format!("({}, {})", p.x, p.y)).collect();
                s.push_str(&format!("    witness: {} at {}\n", w.description, pts.join(" ")));
            }
        }
    }
    s
}
