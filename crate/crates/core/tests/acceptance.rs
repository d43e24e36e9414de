//! Acceptance run: one line per criterion, pass or fail, with the pinned
//! tolerances. Exits nonzero on any failure other than the documented
//! `t0 <= 1/5` gap of criterion 4.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mcpcheck_core::contraction::{sigma, DistortionParams};
use mcpcheck_core::verifier::{
    cd_failure_search, default_candidates, default_configs, default_params, default_scales, diameter_check, dimension_check,
    f_check, geodesicity_suite, large_l_chain_check, tangent_blowup_compare, verify_mcp, CdOptions, CheckReport, LemmaGrid,
    McpOptions,
};
use mcpcheck_core::{ConeSpace, ModelSpace, SpaceTag};

const MCP_BUDGET: Duration = Duration::from_secs(300);
const RES: f64 = 1.0 / 400.0;

struct Line {
    id: u8,
    pass: bool,
    /// Failures that match a recorded analysis do not fail the run.
    documented: bool,
    text: String,
}

fn metric(r: &CheckReport, name: &str) -> f64 {
    r.metric(name).unwrap_or_else(|| panic!("{} has no metric {name}", r.name)).value
}

fn passes(r: &CheckReport, name: &str) -> bool {
    r.metric(name).is_some_and(|m| m.passes())
}

fn mcp(id: u8, tag: SpaceTag, label: &str) -> Line {
    let opts = McpOptions::default();
    let configs = default_configs(tag, opts.resolution);
    let start = Instant::now();
    let r = verify_mcp(&ModelSpace::from_tag(tag), default_params(tag), &configs, &opts).expect("sweep runs");
    let elapsed = start.elapsed();
    let pass = r.passed() && elapsed <= MCP_BUDGET && opts.t_steps == 50;
    Line {
        id,
        pass,
        documented: false,
        text: format!(
            "{label}: {} configurations, cases missing {}, t-grid {}, analytic margin {:.3e} (<= 1e-9), \
             worst bin quotient {:.4} (<= 1.05 at bin 1/400), {:.0} s (<= 300 s)",
            configs.len(),
            metric(&r, "cases_missing"),
            opts.t_steps,
            metric(&r, "analytic_margin"),
            metric(&r, "empirical_quotient_excess"),
            elapsed.as_secs_f64()
        ),
    }
}

fn f_lemma() -> Line {
    let grid = LemmaGrid::default();
    let start = Instant::now();
    let r = f_check(&grid).expect("grid valid");
    let pass = r.passed() && grid.t_steps + 1 == 1001 && grid.l_steps == 500;
    Line {
        id: 3,
        pass,
        documented: false,
        text: format!(
            "f-lemma on 1001x500: max f {:.1e} (<= 1e-12), endpoints {:.1e} (<= 1e-14), min f'' {:.3e} (>= -1e-12), {:.2} s",
            metric(&r, "max_f"),
            metric(&r, "endpoint_abs"),
            metric(&r, "min_f_second"),
            start.elapsed().as_secs_f64()
        ),
    }
}

fn large_l() -> Line {
    let r = large_l_chain_check(&LemmaGrid::default()).expect("grid valid");
    let chain = ["link_weight", "link_sine", "link_fifth", "link_sinc", "middle_equality_at_fifth", "t0_chain_tail"];
    let chain_ok = chain.iter().all(|m| passes(&r, m));
    let t0 = metric(&r, "t0_bound");
    // the bound fails only for sources left of -1/16, where the bend clamps to x = 0
    let documented = chain_ok
        && !passes(&r, "t0_bound")
        && passes(&r, "t0_first_link_unclamped")
        && passes(&r, "f_before_t0")
        && r.witness.as_ref().is_some_and(|w| w.points[0].x < -1.0 / 16.0);
    Line {
        id: 4,
        pass: r.passed(),
        documented,
        text: format!(
            "large-l chain: links ok {chain_ok} (<= 1e-12), middle equality at 1/5 {:.1e} (<= 1e-12); \
             t0 max {t0:.4} vs 1/5: holds where the bend is unclamped, fails for sources left of -1/16; \
             f_l <= 0 up to the actual t0: {:.1e}",
            metric(&r, "middle_equality_at_fifth"),
            metric(&r, "f_before_t0"),
        ),
    }
}

fn diameter() -> Line {
    let model = ModelSpace::from_tag(SpaceTag::Suspension);
    let r = diameter_check(model.space(), PI, 400, RES, 0);
    let w = r.witness.as_ref().expect("witness");
    let ends = w.points.iter().all(|p| p.x.abs() == FRAC_PI_2 && p.y == 0.0);
    let d = metric(&r, "diameter_lower");
    Line {
        id: 5,
        pass: r.passed() && ends && d >= PI - 3.0 * RES && d <= PI + 1e-9,
        documented: false,
        text: format!("diameter(Y) = {d:.12} in [pi - 3/400, pi + 1e-9], witness at x = +-pi/2: {ends}"),
    }
}

fn dimension() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for tag in [SpaceTag::Cone, SpaceTag::Suspension] {
        let r = dimension_check(ModelSpace::from_tag(tag).space(), tag).expect("probes valid");
        let (mut seg, mut reg) = ((f64::INFINITY, f64::NEG_INFINITY), (f64::INFINITY, f64::NEG_INFINITY));
        for m in &r.metrics {
            let b = if m.name.starts_with("segment") { &mut seg } else { &mut reg };
            *b = (b.0.min(m.value), b.1.max(m.value));
        }
        pass &= r.passed() && r.metrics.len() == 10;
        parts.push(format!("{tag} segments [{:.3}, {:.3}] regions [{:.3}, {:.3}]", seg.0, seg.1, reg.0, reg.1));
    }
    Line {
        id: 6,
        pass,
        documented: false,
        text: format!("dimension split, 5+5 probes per space, bands [0.9, 1.1] and [1.9, 2.1]: {}", parts.join("; ")),
    }
}

fn cd() -> Line {
    let opts = CdOptions::default();
    let r = cd_failure_search(&ConeSpace::standard(), &default_candidates(), &opts).expect("search runs");
    let (m0, m1) = (metric(&r, "margin"), metric(&r, "refined_margin"));
    let pass = r.passed() && opts.resolution == 1.0 / 200.0 && opts.refined_resolution == RES && m0 <= -1e-3 && m1 <= m0 * 0.9;
    let k = r.witness.as_ref().and_then(|w| w.params.get("k_threshold").copied()).unwrap_or(f64::NAN);
    Line {
        id: 7,
        pass,
        documented: false,
        text: format!(
            "CD failure: certified margin {m0:.5} at 1/200 (<= -1e-3), {m1:.5} at 1/400 (ratio {:.3} >= 0.9); \
             CD(K, inf) fails for K > {k:.3}",
            m1 / m0
        ),
    }
}

fn tangent() -> Line {
    let scales = default_scales();
    let r = tangent_blowup_compare(&scales).expect("scales valid");
    let w = r.witness.as_ref().expect("witness");
    let seq: Vec<String> = (0..scales.len())
        .map(|k| format!("{:.4}", w.params[&format!("positive_{k}")]))
        .collect();
    let control = (0..scales.len())
        .map(|k| w.params[&format!("control_{k}")])
        .fold(f64::INFINITY, f64::min);
    Line {
        id: 8,
        pass: r.passed() && scales.len() == 5,
        documented: false,
        text: format!(
            "tangent blow-ups at 2^-2..2^-6: [{}] strictly decreasing, last <= first/2; control min {control:.4} >= 5x last",
            seq.join(", ")
        ),
    }
}

fn geodesicity() -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for tag in [SpaceTag::Cone, SpaceTag::Suspension] {
        let r = geodesicity_suite(ModelSpace::from_tag(tag).space(), 500, RES, 1e-9, 0);
        pass &= r.passed();
        parts.push(format!("{tag} worst ratio {:.6}", metric(&r, "worst_ratio")));
    }
    Line {
        id: 9,
        pass,
        documented: false,
        text: format!("geodesicity, 500 pairs per space, ratio <= 1 + 2/400 + 1e-9: {}", parts.join("; ")),
    }
}

fn distortion() -> Line {
    let mut exact = true;
    let mut worst_small: f64 = 0.0;
    for k in [-3.0, -1.0, 0.0, 1.0, 2.0] {
        let p = DistortionParams::new(k, 3.0).expect("valid");
        for d in [0.1, 0.5, 1.0, 1.5] {
            exact &= sigma(p, 1.0, d).expect("in domain") == 1.0 && sigma(p, 0.0, d).expect("in domain") == 0.0;
        }
    }
    for n in [2.0, 3.0, 5.5] {
        let p = DistortionParams::new(0.0, n).expect("valid");
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            exact &= sigma(p, t, 0.7).expect("in domain") == t.powf(n);
        }
    }
    for k in [1e-8, -1e-8] {
        let p = DistortionParams::new(k, 3.0).expect("valid");
        for i in 0..=50 {
            for j in 0..=50 {
                let (t, d) = (i as f64 / 50.0, 3.0 * j as f64 / 50.0);
                worst_small = worst_small.max((sigma(p, t, d).expect("in domain") - t.powi(3)).abs());
            }
        }
    }
    Line {
        id: 10,
        pass: exact && worst_small <= 1e-6,
        documented: false,
        text: format!(
            "distortion identities: sigma(1) = 1, sigma(0) = 0, sigma_(0,N) = t^N exact: {exact}; \
             |sigma_(+-1e-8,3) - t^3| max {worst_small:.1e} (<= 1e-6)"
        ),
    }
}

fn main() -> ExitCode {
    let runs: [(u8, fn() -> Line); 10] = [
        (1, || mcp(1, SpaceTag::Cone, "MCP(0,3) on X")),
        (2, || mcp(2, SpaceTag::Suspension, "MCP(2,3) on Y")),
        (3, f_lemma),
        (4, large_l),
        (5, diameter),
        (6, dimension),
        (7, cd),
        (8, tangent),
        (9, geodesicity),
        (10, distortion),
    ];
    let mut ok = true;
    for (id, run) in runs {
        let line = run();
        assert_eq!(line.id, id);
        let status = match (line.pass, line.documented) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented)",
            (false, false) => "FAIL",
        };
        ok &= line.pass || line.documented;
        println!("criterion {:>2}: {status}: {}", line.id, line.text);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: undocumented failure");
        ExitCode::FAILURE
    }
}
