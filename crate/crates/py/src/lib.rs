//! Python bindings for `chernlab`.
//!
//! Points are sequences of Python complex numbers, matrices are nested lists,
//! and structured results come back as dictionaries with the same fields as
//! the CLI records.

use std::sync::Arc;

use chernlab::catalog::{get_map, get_metric, CatalogMetric, ExpectedFlags};
use chernlab::classify::{classify as classify_metric, default_tolerance, einstein_fit};
use chernlab::curvature::{ric1_potential_residual, PointGeometry};
use chernlab::dsl::{parse_map, parse_metric};
use chernlab::error::ErrorClass;
use chernlab::linalg::CMat;
use chernlab::maps::SharedMap;
use chernlab::point::ChartPoint;
use chernlab::sampling::SampleSpec;
use chernlab::schwarz::{aubin_yau_residual, chern_lu_residual};
use chernlab::spectra::{self, operator_spectrum, CurvatureOperator, HermitianForm};
use chernlab::wirtinger::{DiffEngineConfig, Engine};
use chernlab::GeomError;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

create_exception!(chernlab, ChernlabError, PyException);
create_exception!(chernlab, ConfigError, ChernlabError);
create_exception!(chernlab, DomainError, ChernlabError);
create_exception!(chernlab, NumericError, ChernlabError);

fn py_err(e: GeomError) -> PyErr {
    let msg = e.to_string();
    match e.class() {
        ErrorClass::Config => ConfigError::new_err(msg),
        ErrorClass::Domain => DomainError::new_err(msg),
        ErrorClass::Numeric => NumericError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for chernlab::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn engine_config(engine: &str) -> PyResult<DiffEngineConfig> {
    match engine {
        "jets" => Ok(DiffEngineConfig::jets()),
        "fd" => Ok(DiffEngineConfig::finite_difference()),
        other => Err(ConfigError::new_err(format!("unknown engine '{other}', expected 'jets' or 'fd'"))),
    }
}

fn point(z: Vec<Complex64>) -> PyResult<ChartPoint> {
    ChartPoint::new(z).py()
}

fn rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn matrix(rows: &[Vec<Complex64>]) -> PyResult<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(ConfigError::new_err("expected a square matrix"));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_bound_py_any(py),
            (None, Some(x)) => x.into_bound_py_any(py),
            _ => n.to_string().into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn serialize<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| NumericError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A Hermitian metric from the catalog or from the text format.
#[pyclass(frozen, module = "chernlab")]
struct Metric {
    inner: CatalogMetric,
}

impl Metric {
    fn geometry(&self, z: Vec<Complex64>, engine: &str) -> PyResult<PointGeometry> {
        let p = point(z)?;
        PointGeometry::compute(self.inner.metric.as_ref(), p.coords(), &engine_config(engine)?).py()
    }
}

#[pymethods]
impl Metric {
    /// Looks up a catalog spec such as `"hopf:n=3"` or `"file:path.metric"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: get_metric(spec).py()? })
    }

    /// Parses a metric written in the text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let m = parse_metric(text).py()?;
        Ok(Self {
            inner: CatalogMetric {
                name: m.name.clone(),
                metric: Arc::new(m),
                expected: ExpectedFlags::default(),
            },
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `(r_min, r_max)` of the default sampling region.
    #[getter]
    fn region(&self) -> (f64, f64) {
        let r = self.inner.region();
        (r.r_min, r.r_max)
    }

    fn __repr__(&self) -> String {
        format!("Metric('{}', dim={})", self.inner.name, self.inner.dim())
    }

    /// `g_{i j̄}` at a point.
    fn matrix(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&chernlab::metric::metric_matrix(self.inner.metric.as_ref(), &z).py()?))
    }

    /// `Γ^k_{ij}` as `gamma[k][i][j]`.
    #[pyo3(signature = (z, engine = "jets"))]
    fn christoffel(&self, z: Vec<Complex64>, engine: &str) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
        let geo = self.geometry(z, engine)?;
        let n = geo.dim();
        Ok((0..n).map(|k| (0..n).map(|i| (0..n).map(|j| geo.gamma.get(k, i, j)).collect()).collect()).collect())
    }

    /// `R_{i j̄ k l̄}` as `r[i][j][k][l]`.
    #[pyo3(signature = (z, engine = "jets"))]
    fn curvature(&self, z: Vec<Complex64>, engine: &str) -> PyResult<Vec<Vec<Vec<Vec<Complex64>>>>> {
        let geo = self.geometry(z, engine)?;
        let n = geo.dim();
        let r = &geo.curvature;
        Ok((0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| (0..n).map(|l| r.r(i, j, k, l)).collect()).collect()).collect())
            .collect())
    }

    /// The four Chern Ricci curvatures, the second scalar curvature and the
    /// `Ric⁽¹⁾` potential residual.
    #[pyo3(signature = (z, engine = "jets"))]
    fn ricci<'py>(&self, py: Python<'py>, z: Vec<Complex64>, engine: &str) -> PyResult<Bound<'py, PyDict>> {
        let geo = self.geometry(z, engine)?;
        let potential = ric1_potential_residual(self.inner.metric.as_ref(), &geo, &engine_config(engine)?).py()?;
        let d = PyDict::new(py);
        for (k, m) in ["ric1", "ric2", "ric3", "ric4"].iter().zip(geo.ricci.all()) {
            d.set_item(k, rows(m))?;
        }
        d.set_item("scalar2", geo.ricci.scalar2)?;
        d.set_item("ric1_potential_residual", potential)?;
        Ok(d)
    }

    /// Maximal torsion component and the torsion 1-form norm.
    #[pyo3(signature = (z, engine = "jets"))]
    fn torsion(&self, z: Vec<Complex64>, engine: &str) -> PyResult<(f64, f64)> {
        let geo = self.geometry(z, engine)?;
        Ok((geo.torsion.max_norm(), geo.torsion.tau_norm()))
    }

    #[pyo3(signature = (z, v, engine = "jets"))]
    fn hsc(&self, z: Vec<Complex64>, v: Vec<Complex64>, engine: &str) -> PyResult<f64> {
        spectra::hsc_at(&self.geometry(z, engine)?, &v).py()
    }

    #[pyo3(signature = (z, u, v, engine = "jets"))]
    fn hbc(&self, z: Vec<Complex64>, u: Vec<Complex64>, v: Vec<Complex64>, engine: &str) -> PyResult<f64> {
        spectra::hbc_at(&self.geometry(z, engine)?, &u, &v).py()
    }

    /// Real bisectional curvature of a nonnegative Hermitian form `ξ^{i j̄}`.
    #[pyo3(signature = (z, xi, engine = "jets"))]
    fn rbc(&self, z: Vec<Complex64>, xi: Vec<Vec<Complex64>>, engine: &str) -> PyResult<f64> {
        let form = HermitianForm::new(matrix(&xi)?).py()?;
        spectra::rbc_at(&self.geometry(z, engine)?, &form).py()
    }

    /// Schwarz bisectional curvature of a positive-definite Hermitian form.
    #[pyo3(signature = (z, xi, engine = "jets"))]
    fn sbc(&self, z: Vec<Complex64>, xi: Vec<Vec<Complex64>>, engine: &str) -> PyResult<f64> {
        let form = HermitianForm::new(matrix(&xi)?).py()?;
        spectra::sbc_at(&self.geometry(z, engine)?, &form).py()
    }

    /// Spectrum of the complex curvature operator.
    #[pyo3(signature = (z, engine = "jets"))]
    fn spectrum<'py>(&self, py: Python<'py>, z: Vec<Complex64>, engine: &str) -> PyResult<Bound<'py, PyAny>> {
        let op = CurvatureOperator::from_geometry(&self.geometry(z, engine)?).py()?;
        serialize(py, &operator_spectrum(&op).py()?)
    }

    /// Spectral bound check at a point where `Ric⁽²⁾ = g`.
    #[pyo3(signature = (z, tol = 1e-6, samples = 200, seed = 0, engine = "jets"))]
    fn bound_check<'py>(
        &self,
        py: Python<'py>,
        z: Vec<Complex64>,
        tol: f64,
        samples: usize,
        seed: u64,
        engine: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let geo = self.geometry(z, engine)?;
        serialize(py, &spectra::spectral_bound_check_at(&geo, tol, samples, seed).py()?)
    }

    /// Sample-based classification over the metric's region.
    #[pyo3(signature = (samples = 50, seed = 0, tol = None, engine = "jets"))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        samples: usize,
        seed: u64,
        tol: Option<f64>,
        engine: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = engine_config(engine)?;
        let spec = SampleSpec::new(samples, seed, self.inner.region());
        let tol = tol.unwrap_or_else(|| default_tolerance(&cfg));
        serialize(py, &classify_metric(self.inner.metric.as_ref(), &spec, &cfg, tol).py()?)
    }

    /// Best-fit constant in `Ric⁽²⁾ = λ g` over seeded samples.
    #[pyo3(signature = (samples = 50, seed = 0, engine = "jets"))]
    fn einstein_fit<'py>(&self, py: Python<'py>, samples: usize, seed: u64, engine: &str) -> PyResult<Bound<'py, PyAny>> {
        let cfg = engine_config(engine)?;
        let pts = SampleSpec::new(samples, seed, self.inner.region()).points(self.inner.metric.as_ref());
        serialize(py, &einstein_fit(self.inner.metric.as_ref(), &pts, &cfg).py()?)
    }
}

/// A holomorphic map from the catalog or from the text format.
#[pyclass(frozen, module = "chernlab")]
struct Map {
    inner: SharedMap,
}

#[pymethods]
impl Map {
    /// Looks up a catalog spec such as `"dilation:c=2"` or `"file:path.map"`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: get_map(spec).py()? })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(parse_map(text).py()?),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn has_inverse(&self) -> bool {
        self.inner.has_inverse()
    }

    fn __repr__(&self) -> String {
        format!("Map('{}')", self.inner.label())
    }

    fn __call__(&self, z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.inner.apply(&z).py()
    }

    fn jacobian(&self, z: Vec<Complex64>) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&self.inner.jet(&z).py()?.jacobian))
    }

    fn inverse(&self, w: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.inverse_jet(&w).py()?.value)
    }
}

/// Terms and residual of the Chern–Lu identity at a source point.
#[pyfunction]
#[pyo3(signature = (f, source, target, z, engine = "jets"))]
fn chern_lu<'py>(
    py: Python<'py>,
    f: &Map,
    source: &Metric,
    target: &Metric,
    z: Vec<Complex64>,
    engine: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let report = chern_lu_residual(
        f.inner.as_ref(),
        source.inner.metric.as_ref(),
        target.inner.metric.as_ref(),
        &point(z)?,
        &engine_config(engine)?,
    )
    .py()?;
    serialize(py, &report)
}

/// Terms and residual of the Aubin–Yau identity at a target point.
#[pyfunction]
#[pyo3(signature = (f, source, target, w, engine = "jets"))]
fn aubin_yau<'py>(
    py: Python<'py>,
    f: &Map,
    source: &Metric,
    target: &Metric,
    w: Vec<Complex64>,
    engine: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let report = aubin_yau_residual(
        f.inner.as_ref(),
        source.inner.metric.as_ref(),
        target.inner.metric.as_ref(),
        &point(w)?,
        &engine_config(engine)?,
    )
    .py()?;
    serialize(py, &report)
}

/// Runs the command-line tool in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("chernlab".to_string()).chain(args);
    let code = chernlab::cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

#[pyfunction]
fn metric_names() -> Vec<&'static str> {
    chernlab::catalog::METRIC_NAMES.to_vec()
}

#[pyfunction]
fn map_names() -> Vec<&'static str> {
    chernlab::catalog::MAP_NAMES.to_vec()
}

#[pymodule]
#[pyo3(name = "chernlab")]
fn chernlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Metric>()?;
    m.add_class::<Map>()?;
    m.add_function(wrap_pyfunction!(chern_lu, m)?)?;
    m.add_function(wrap_pyfunction!(aubin_yau, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_function(wrap_pyfunction!(metric_names, m)?)?;
    m.add_function(wrap_pyfunction!(map_names, m)?)?;
    m.add("ChernlabError", py.get_type::<ChernlabError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("NumericError", py.get_type::<NumericError>())?;
    m.add("ENGINES", (Engine::Jets.as_str(), Engine::FiniteDifference.as_str()))?;
    Ok(())
}
