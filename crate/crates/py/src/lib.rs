//! Python bindings for the stripstat core.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use stripstat::cli::{run_criterion, SuiteOptions};
use stripstat::formulas::{self, LaplaceQuery};
use stripstat::kpz::{self, KpzParams};
use stripstat::twolayer::{sample_twolayer_geo, GeoParams, LgParams};
use stripstat::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonConvergence(_) | Error::TailBound { .. } | Error::Collision(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn geo(a: Vec<f64>, c1: f64, c2: f64) -> PyResult<GeoParams> {
    GeoParams::new(a, c1, c2).map_err(py_err)
}

fn lg(alpha: Vec<f64>, u: f64, v: f64) -> PyResult<LgParams> {
    let p = LgParams::new(alpha, u, v).map_err(py_err)?;
    p.validate().map_err(py_err)?;
    Ok(p)
}

/// Normalising constant of the geometric two-layer measure.
#[pyfunction]
fn partition_geo(a: Vec<f64>, c1: f64, c2: f64) -> PyResult<f64> {
    formulas::partition_geo(&geo(a, c1, c2)?).map_err(py_err)
}

#[pyfunction]
fn partition_lg(alpha: Vec<f64>, u: f64, v: f64) -> PyResult<f64> {
    formulas::partition_lg(&lg(alpha, u, v)?).map_err(py_err)
}

/// E[exp(-Σ tᵢ L₁(nᵢ))] for the geometric top walk.
#[pyfunction]
fn laplace_geo(a: Vec<f64>, c1: f64, c2: f64, points: Vec<usize>, t: Vec<f64>) -> PyResult<f64> {
    let q = LaplaceQuery::new(points, t).map_err(py_err)?;
    formulas::laplace_geo(&q, &geo(a, c1, c2)?).map_err(py_err)
}

#[pyfunction]
fn laplace_lg(alpha: Vec<f64>, u: f64, v: f64, points: Vec<usize>, t: Vec<f64>) -> PyResult<f64> {
    let q = LaplaceQuery::new(points, t).map_err(py_err)?;
    formulas::laplace_lg(&q, &lg(alpha, u, v)?).map_err(py_err)
}

#[pyfunction]
fn mean_free_energy(n: usize, alpha: Vec<f64>, u: f64, v: f64) -> PyResult<f64> {
    formulas::mean_free_energy(n, &lg(alpha, u, v)?).map_err(py_err)
}

/// Reduced open-KPZ normaliser at (u, v, L).
#[pyfunction]
#[pyo3(name = "kpz_normaliser")]
fn z_kpz(u: f64, v: f64, length: f64) -> PyResult<f64> {
    kpz::z_kpz(&KpzParams::new(u, v, length).map_err(py_err)?).map_err(py_err)
}

#[pyfunction]
fn growth_rate(u: f64, v: f64, length: f64) -> PyResult<f64> {
    kpz::c_uv(&KpzParams::new(u, v, length).map_err(py_err)?).map_err(py_err)
}

#[pyfunction]
fn phase_limit(u: f64, v: f64) -> f64 {
    kpz::phase_limit(u, v)
}

/// Rows (u, v, L, c, limit, gap) over grid × lengths.
#[pyfunction]
fn phase_scan(grid: Vec<(f64, f64)>, lengths: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64)>> {
    let rows = kpz::phase_scan(&grid, &lengths).map_err(py_err)?;
    Ok(rows.iter().map(|r| (r.u, r.v, r.l, r.c_uv, r.phase_limit, r.gap)).collect())
}

/// Exact draws of the geometric two-layer path, as lists of (λ₁, λ₂).
#[pyfunction]
#[pyo3(signature = (a, c1, c2, count, seed=0))]
fn sample_geo(a: Vec<f64>, c1: f64, c2: f64, count: usize, seed: u64) -> PyResult<Vec<Vec<(i64, i64)>>> {
    let paths = sample_twolayer_geo(&geo(a, c1, c2)?, seed, count).map_err(py_err)?;
    Ok(paths.into_iter().map(|p| p.states.into_iter().map(|s| (s[0], s[1])).collect()).collect())
}

/// Checks of one acceptance criterion as (name, measured, limit, passed).
#[pyfunction]
#[pyo3(signature = (criterion, tol=None, seed=None))]
fn verify(criterion: u8, tol: Option<f64>, seed: Option<u64>) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let mut opts = SuiteOptions { tol, ..SuiteOptions::default() };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let checks = run_criterion(criterion, &opts).map_err(py_err)?;
    Ok(checks.into_iter().map(|c| (c.name, c.measured, c.limit, c.passed)).collect())
}

#[pymodule]
fn stripstat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", stripstat::VERSION)?;
    m.add_function(wrap_pyfunction!(partition_geo, m)?)?;
    m.add_function(wrap_pyfunction!(partition_lg, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_geo, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_lg, m)?)?;
    m.add_function(wrap_pyfunction!(mean_free_energy, m)?)?;
    m.add_function(wrap_pyfunction!(z_kpz, m)?)?;
    m.add_function(wrap_pyfunction!(growth_rate, m)?)?;
    m.add_function(wrap_pyfunction!(phase_limit, m)?)?;
    m.add_function(wrap_pyfunction!(phase_scan, m)?)?;
    m.add_function(wrap_pyfunction!(sample_geo, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
