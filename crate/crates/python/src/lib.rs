//! Python bindings: the distortion coefficients, the lemma function, a few
//! geometric probes, and every certification check as a dict.

use mcpcheck_cli::{run_check as dispatch, CheckKind, Overrides, RunConfig};
use mcpcheck_core::contraction::{self, DistortionParams};
use mcpcheck_core::geometry::intrinsic_dist;
use mcpcheck_core::verifier::{self, default_radii};
use mcpcheck_core::{ModelSpace, Point, SpaceTag};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model(space: &str) -> PyResult<ModelSpace> {
    space.parse::<SpaceTag>().map(ModelSpace::from_tag).map_err(err)
}

fn params(k: f64, n: f64) -> PyResult<DistortionParams> {
    DistortionParams::new(k, n).map_err(err)
}

/// `sigma_{K,N}^{(t)}(d)`.
#[pyfunction]
fn sigma(k: f64, n: f64, t: f64, d: f64) -> PyResult<f64> {
    contraction::sigma(params(k, n)?, t, d).map_err(err)
}

/// The admissible density-ratio ceiling `1 / sigma_{K,N}^{(t)}(l)`.
#[pyfunction]
fn mcp_bound(k: f64, n: f64, t: f64, l: f64) -> PyResult<f64> {
    contraction::mcp_bound(params(k, n)?, t, l).map_err(err)
}

#[pyfunction]
fn f_l(l: f64, t: f64) -> f64 {
    verifier::f_l(l, t)
}

#[pyfunction]
#[pyo3(signature = (space, p, q, resolution = 1.0 / 400.0))]
fn distance(space: &str, p: (f64, f64), q: (f64, f64), resolution: f64) -> PyResult<f64> {
    Ok(intrinsic_dist(model(space)?.space(), Point::new(p.0, p.1), Point::new(q.0, q.1), resolution))
}

/// Sampled diameter and its endpoints.
#[pyfunction]
#[pyo3(signature = (space = "suspension", samples = 400, resolution = 1.0 / 400.0, seed = 0))]
fn diameter(space: &str, samples: usize, resolution: f64, seed: u64) -> PyResult<(f64, ((f64, f64), (f64, f64)))> {
    let (d, (a, b)) = verifier::diameter(model(space)?.space(), samples, resolution, seed);
    Ok((d, ((a.x, a.y), (b.x, b.y))))
}

/// Local dimension exponent at `p` over the default radii.
#[pyfunction]
fn dimension_exponent(space: &str, p: (f64, f64)) -> PyResult<f64> {
    let m = model(space)?;
    let p = Point::new(p.0, p.1);
    let radii = default_radii(m.space(), p).map_err(err)?;
    verifier::dimension_exponent(m.space(), p, &radii).map_err(err)
}

/// Runs one check and returns its report as a dict.
#[pyfunction]
#[pyo3(signature = (space, check, resolution = None, tolerance = None, t_grid = None, l_grid = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn run_check(
    py: Python<'_>,
    space: &str,
    check: &str,
    resolution: Option<f64>,
    tolerance: Option<f64>,
    t_grid: Option<usize>,
    l_grid: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let kind = CheckKind::ALL
        .into_iter()
        .find(|c| c.as_str() == check)
        .ok_or_else(|| err(format!("unknown check '{check}'")))?;
    let config = RunConfig::resolve(
        None,
        Overrides {
            space: Some(space.parse().map_err(err)?),
            checks: vec![kind],
            resolution,
            tolerance,
            t_grid,
            l_grid,
            seed: Some(seed),
            ..Default::default()
        },
    )
    .map_err(err)?;
    let report = dispatch(&config, &ModelSpace::from_tag(config.space), kind).map_err(err)?;
    let json = serde_json::to_string(&report).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

#[pymodule]
fn mcpcheck(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(mcp_bound, m)?)?;
    m.add_function(wrap_pyfunction!(f_l, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(diameter, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    Ok(())
}
