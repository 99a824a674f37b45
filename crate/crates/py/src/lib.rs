//! Python module `annulus`.

use annulus_core::curves::{ClosedCurve, PlanePoint, Rect};
use annulus_core::fixed_points::{isolate, IsolationConfig};
use annulus_core::index::{lefschetz_index as core_index, lemma_suite as core_lemmas, DEFAULT_MIN_DISP};
use annulus_core::maps::{self, AnnulusPoint};
use annulus_core::nielsen::{self, NielsenReport};
use annulus_core::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidInput(_)
        | Error::UnknownZooEntry(_)
        | Error::ParamOutOfRange { .. }
        | Error::InvalidCurve(_)
        | Error::NotSimple { .. }
        | Error::DegenerateModulus { .. }
        | Error::EmptyReport => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_dumps(py: Python<'_>, value: Option<&Bound<'_, PyAny>>) -> PyResult<serde_json::Value> {
    let Some(value) = value else {
        return Ok(serde_json::json!({}));
    };
    let text: String = py.import("json")?.call_method1("dumps", (value,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn json_loads<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn rect(region: (f64, f64, f64, f64)) -> PyResult<Rect> {
    Rect::new(region.0, region.1, region.2, region.3).map_err(to_py_err)
}

/// A lift `F` of an annulus map to the strip cover, `F(x + 1, y) = F(x, y) + (d, 0)`.
#[pyclass(name = "LiftMap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLiftMap {
    inner: maps::LiftMap,
}

#[pymethods]
impl PyLiftMap {
    /// Builds a zoo entry; `params` is a dict such as `{"d": 3}`.
    #[staticmethod]
    #[pyo3(signature = (name, params=None))]
    fn zoo(py: Python<'_>, name: &str, params: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let params = json_dumps(py, params)?;
        Ok(PyLiftMap {
            inner: maps::zoo(name, &params).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn degree(&self) -> i64 {
        self.inner.degree()
    }

    fn __call__(&self, x: f64, y: f64) -> PyResult<(f64, f64)> {
        let p = self.inner.eval(PlanePoint::new(x, y)).map_err(to_py_err)?;
        Ok((p.x, p.y))
    }

    fn iterate(&self, n: u32) -> PyResult<Self> {
        Ok(PyLiftMap {
            inner: self.inner.iterate(n).map_err(to_py_err)?,
        })
    }

    fn deck_translate(&self, k: i64) -> Self {
        PyLiftMap {
            inner: self.inner.deck_translate(k),
        }
    }

    fn conjugate_by_deck(&self, j: i64) -> Self {
        PyLiftMap {
            inner: self.inner.conjugate_by_deck(j),
        }
    }

    fn __repr__(&self) -> String {
        format!("LiftMap({}, degree={})", self.inner.name(), self.inner.degree())
    }
}

/// Lefschetz index of the induced plane map along a closed polygon given as
/// `[(x, y), ...]` in the punctured plane.
#[pyfunction]
#[pyo3(signature = (map, points, min_disp=DEFAULT_MIN_DISP))]
fn lefschetz_index(py: Python<'_>, map: &PyLiftMap, points: Vec<(f64, f64)>, min_disp: f64) -> PyResult<i64> {
    let curve = ClosedCurve::from_points(points.iter().map(|&(x, y)| PlanePoint::new(x, y)).collect())
        .map_err(to_py_err)?;
    let lift = map.inner.clone();
    py.detach(move || core_index(&lift.plane_map(), &curve, min_disp))
        .map_err(to_py_err)
}

/// Polygon approximating the circle of radius `r` about the origin.
#[pyfunction]
#[pyo3(signature = (r, n=256))]
fn circle(r: f64, n: usize) -> PyResult<Vec<(f64, f64)>> {
    let c = ClosedCurve::circle(PlanePoint::new(0.0, 0.0), r, n).map_err(to_py_err)?;
    Ok(c.samples().iter().map(|p| (p.x, p.y)).collect())
}

/// Certified boxes of `F + (k, 0)` in `region = (x0, x1, y0, y1)`.
#[pyfunction]
#[pyo3(signature = (map, region, resolution=1e-3, k=0))]
fn isolate_fixed_points(
    py: Python<'_>,
    map: &PyLiftMap,
    region: (f64, f64, f64, f64),
    resolution: f64,
    k: i64,
) -> PyResult<Py<PyAny>> {
    let region = rect(region)?;
    let lift = map.inner.clone();
    let iso = py
        .detach(move || isolate(&lift, k, region, &IsolationConfig::with_resolution(resolution)))
        .map_err(to_py_err)?;
    json_loads(py, &iso.certified)
}

/// Nielsen residue of the period-`n` point with angle `theta` (in turns) and height `y`.
#[pyfunction]
fn nielsen_residue(map: &PyLiftMap, theta: f64, y: f64, n: u32) -> PyResult<u64> {
    nielsen::nielsen_residue(&map.inner, AnnulusPoint::new(theta, y), n).map_err(to_py_err)
}

/// Nielsen reports for periods `1..=n_max`, as dicts.
#[pyfunction]
#[pyo3(signature = (map, n_max, region=None, resolution=1e-3))]
fn completeness_check(
    py: Python<'_>,
    map: &PyLiftMap,
    n_max: u32,
    region: Option<(f64, f64, f64, f64)>,
    resolution: f64,
) -> PyResult<Py<PyAny>> {
    let region = region.map(rect).transpose()?;
    let lift = map.inner.clone();
    let reports = py
        .detach(move || nielsen::completeness_check(&lift, n_max, region, resolution))
        .map_err(to_py_err)?;
    json_loads(py, &reports)
}

/// `max_n ln(count_n) / n` over reports returned by `completeness_check`.
#[pyfunction]
fn growth_rate(py: Python<'_>, reports: &Bound<'_, PyAny>) -> PyResult<f64> {
    let value = json_dumps(py, Some(reports))?;
    let reports: Vec<NielsenReport> =
        serde_json::from_value(value).map_err(|e| PyValueError::new_err(format!("not a list of reports: {e}")))?;
    nielsen::growth_rate(&reports).map_err(to_py_err)
}

#[pyfunction]
fn lemma_suite(py: Python<'_>) -> PyResult<Py<PyAny>> {
    json_loads(py, &core_lemmas())
}

#[pyfunction]
fn zoo_entries(py: Python<'_>) -> PyResult<Py<PyAny>> {
    json_loads(py, &maps::zoo_entries())
}

#[pymodule]
fn annulus(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLiftMap>()?;
    m.add_function(wrap_pyfunction!(lefschetz_index, m)?)?;
    m.add_function(wrap_pyfunction!(circle, m)?)?;
    m.add_function(wrap_pyfunction!(isolate_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(nielsen_residue, m)?)?;
    m.add_function(wrap_pyfunction!(completeness_check, m)?)?;
    m.add_function(wrap_pyfunction!(growth_rate, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_suite, m)?)?;
    m.add_function(wrap_pyfunction!(zoo_entries, m)?)?;
    Ok(())
}
