//! Python bindings: datasets, learners, experiment runs and property checks.
//!
//! Structured arguments (marginals, noise specs, configs) are plain Python
//! dicts using the same keys as the JSON config files.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyList;

use halfspace_core::evaluation;
use halfspace_core::experiment::{self, ExperimentConfig, SweepPlan};
use halfspace_core::geometry::{self, Instance};
use halfspace_core::learners::{self, Classifier};
use halfspace_core::synthdata::{self, MarginalSpec, NoiseSpec};
use halfspace_core::Error;

create_exception!(halfspace_py, HalfspaceError, PyValueError);

fn err(e: Error) -> PyErr {
    HalfspaceError::new_err(e.to_string())
}

fn to_json(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.extract::<String>() {
        return Ok(s);
    }
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn from_json<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

fn parse<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    serde_json::from_str(&to_json(obj)?).map_err(|e| err(Error::Parse(e.to_string())))
}

fn check_point(d: usize, x: &[f64]) -> PyResult<()> {
    geometry::check_dims(d, x.len()).map_err(err)
}

/// Unit normal of a homogeneous halfspace.
#[pyclass(name = "Hyperplane", module = "halfspace_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyHyperplane(geometry::Hyperplane);

#[pymethods]
impl PyHyperplane {
    /// Normalizes `w`; fails on the zero vector.
    #[new]
    fn new(w: Vec<f64>) -> PyResult<Self> {
        geometry::normalize(&w).map(PyHyperplane).map_err(err)
    }

    #[staticmethod]
    fn random(d: usize, seed: u64) -> PyResult<Self> {
        if d == 0 {
            return Err(err(Error::InvalidParameter("d must be >= 1".into())));
        }
        Ok(PyHyperplane(synthdata::random_unit(d, seed)))
    }

    #[getter]
    fn w(&self) -> Vec<f64> {
        self.0.to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<i8> {
        check_point(self.0.dim(), &x)?;
        Ok(self.0.predict(&x).as_i8())
    }

    fn angle(&self, other: &PyHyperplane) -> PyResult<f64> {
        geometry::check_dims(self.0.dim(), other.0.dim()).map_err(err)?;
        Ok(geometry::angle(&self.0, &other.0))
    }

    fn __repr__(&self) -> String {
        format!("Hyperplane({:?})", self.0.as_slice())
    }
}

/// A trained classifier: a halfspace or a polynomial threshold.
#[pyclass(name = "Model", module = "halfspace_py", frozen)]
struct PyModel(learners::Model);

#[pymethods]
impl PyModel {
    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn predict(&self, x: Vec<f64>) -> PyResult<i8> {
        check_point(self.0.dim(), &x)?;
        Ok(self.0.predict(&x).as_i8())
    }

    /// `None` for polynomial thresholds.
    fn hyperplane(&self) -> Option<PyHyperplane> {
        self.0.as_hyperplane().cloned().map(PyHyperplane)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        learners::Model::from_json(s).map(PyModel).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.0.to_json())
    }
}

#[pyclass(name = "Dataset", module = "halfspace_py", frozen)]
struct PyDataset(synthdata::Dataset);

#[pymethods]
impl PyDataset {
    /// Labeled points; labels must be -1 or 1.
    #[new]
    fn new(xs: Vec<Vec<f64>>, ys: Vec<i8>) -> PyResult<Self> {
        if xs.len() != ys.len() {
            return Err(err(Error::DimensionMismatch {
                expected: xs.len(),
                got: ys.len(),
            }));
        }
        let d = xs.first().map_or(0, Vec::len);
        let pairs: Vec<(Vec<f64>, i8)> = xs.into_iter().zip(ys).collect();
        synthdata::Dataset::from_pairs(d, &pairs).map(PyDataset).map_err(err)
    }

    /// `n` draws of `marginal` labeled by `w_star` and corrupted by `noise`.
    #[staticmethod]
    #[pyo3(signature = (marginal, w_star, n, seed, noise=None))]
    fn generate(
        marginal: &Bound<'_, PyAny>,
        w_star: &PyHyperplane,
        n: usize,
        seed: u64,
        noise: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let marginal: MarginalSpec = parse(marginal)?;
        let noise: NoiseSpec = match noise {
            Some(n) => parse(n)?,
            None => NoiseSpec::None,
        };
        synthdata::generate(&marginal, &w_star.0, &noise, n, seed)
            .map(PyDataset)
            .map_err(err)
    }

    #[staticmethod]
    fn read_csv(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| err(e.into()))?;
        synthdata::read_csv(std::io::BufReader::new(file)).map(PyDataset).map_err(err)
    }

    fn write_csv(&self, path: &str) -> PyResult<()> {
        let file = std::fs::File::create(path).map_err(|e| err(e.into()))?;
        synthdata::write_csv(&self.0, std::io::BufWriter::new(file)).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn xs(&self) -> Vec<Vec<f64>> {
        self.0.iter().map(|s| s.x.to_vec()).collect()
    }

    #[getter]
    fn ys(&self) -> Vec<i8> {
        self.0.iter().map(|s| s.y.as_i8()).collect()
    }

    /// Fraction of points `model` mislabels.
    fn error(&self, model: &Bound<'_, PyAny>) -> PyResult<f64> {
        if let Ok(m) = model.cast::<PyModel>() {
            evaluation::empirical_error(&m.get().0, &self.0).map_err(err)
        } else {
            let h = model.cast::<PyHyperplane>()?;
            evaluation::empirical_error(&h.get().0, &self.0).map_err(err)
        }
    }
}

/// A separating halfspace, or `None` when the sample is not separable.
#[pyfunction]
fn train_lp(data: &PyDataset) -> PyResult<Option<PyHyperplane>> {
    Ok(learners::train_lp_realizable(&data.0).map_err(err)?.map(PyHyperplane))
}

/// Normalized label-weighted mean.
#[pyfunction]
fn train_averaging(data: &PyDataset) -> PyResult<PyHyperplane> {
    learners::train_averaging(&data.0).map(PyHyperplane).map_err(err)
}

/// L1 polynomial regression of the given degree, thresholded.
/// Returns `(model, l1_error, train_error)`.
#[pyfunction]
fn train_poly(data: &PyDataset, degree: usize) -> PyResult<(PyModel, f64, f64)> {
    let fit = learners::train_poly_regression(&data.0, degree).map_err(err)?;
    Ok((
        PyModel(learners::Model::PolyThreshold(fit.model)),
        fit.l1_error,
        fit.train_error,
    ))
}

fn release<T: Send>(py: Python<'_>, f: impl FnOnce() -> T + Send) -> T {
    py.detach(f)
}

/// Runs one experiment config (dict or JSON string); returns the report.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_json(&to_json(config)?).map_err(err)?;
    let report = release(py, || experiment::run_experiment(&cfg))
        .map_err(|e| HalfspaceError::new_err(e.to_string()))?;
    from_json(py, &report.to_json())
}

/// Runs a sweep config; returns one dict per row (failed cells have `None`
/// metrics).
#[pyfunction]
fn run_sweep<'py>(py: Python<'py>, config: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyList>> {
    let plan = SweepPlan::from_json(&to_json(config)?).map_err(err)?;
    let outcome = release(py, || experiment::run_sweep(&plan));
    let rows = PyList::empty(py);
    for r in outcome.rows {
        let row = pyo3::types::PyDict::new(py);
        row.set_item("sweep_value", r.sweep_value)?;
        row.set_item("seed", r.seed)?;
        row.set_item("learner", r.learner)?;
        row.set_item("mc_error", r.mc_error)?;
        row.set_item("ci_radius", r.ci_radius)?;
        row.set_item("angle", r.angle)?;
        row.set_item("wall_ms", r.wall_ms)?;
        rows.append(row)?;
    }
    Ok(rows)
}

/// The distributional checks; one dict per check.
#[pyfunction]
fn check_properties<'py>(
    py: Python<'py>,
    marginal: &Bound<'py, PyAny>,
    n: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let marginal: MarginalSpec = parse(marginal)?;
    let report = release(py, || evaluation::check_logconcave_properties(&marginal, n, seed)).map_err(err)?;
    from_json(py, &serde_json::to_string(&report.checks).expect("checks serialize"))
}

/// Monte Carlo error of a halfspace on fresh labeled draws.
/// Returns `(estimate, ci_radius)`.
#[pyfunction]
#[pyo3(signature = (h, marginal, w_star, n, seed, noise=None))]
fn mc_error(
    py: Python<'_>,
    h: &PyHyperplane,
    marginal: &Bound<'_, PyAny>,
    w_star: &PyHyperplane,
    n: usize,
    seed: u64,
    noise: Option<&Bound<'_, PyAny>>,
) -> PyResult<(f64, f64)> {
    let marginal: MarginalSpec = parse(marginal)?;
    let noise: NoiseSpec = match noise {
        Some(n) => parse(n)?,
        None => NoiseSpec::None,
    };
    let est = release(py, || evaluation::mc_error(&h.0, &marginal, &w_star.0, &noise, n, seed)).map_err(err)?;
    Ok((est.value, est.ci_radius))
}

/// Projection of `v` onto `{u : angle(u, axis) ≤ half_angle, ‖u‖ ≤ radius}`.
#[pyfunction]
#[pyo3(signature = (v, axis, half_angle, radius=1.0))]
fn project_cone_cap(v: Vec<f64>, axis: &PyHyperplane, half_angle: f64, radius: f64) -> PyResult<Vec<f64>> {
    check_point(axis.0.dim(), &v)?;
    Instance::new(v.clone()).map_err(err)?;
    let cap = geometry::ConeCap::with_radius(axis.0.clone(), half_angle, radius).map_err(err)?;
    Ok(geometry::project_cone_cap(&v, &cap))
}

#[pymodule]
fn halfspace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HalfspaceError", m.py().get_type::<HalfspaceError>())?;
    m.add_class::<PyHyperplane>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(train_lp, m)?)?;
    m.add_function(wrap_pyfunction!(train_averaging, m)?)?;
    m.add_function(wrap_pyfunction!(train_poly, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(check_properties, m)?)?;
    m.add_function(wrap_pyfunction!(mc_error, m)?)?;
    m.add_function(wrap_pyfunction!(project_cone_cap, m)?)?;
    Ok(())
}
