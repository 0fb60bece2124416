//! Python bindings for `diskharm`.
//!
//! Reports are handed back as plain dicts; fields as nested lists indexed
//! `[radius][angle]`.

use std::path::PathBuf;

use diskharm::gridfile::{read_field, write_field, GridFileError};
use diskharm::heatlab::{conjecture_compare, ConjectureConfig, HeatBoundary, HeatError};
use diskharm::sources::catalog::figure_case;
use diskharm::sources::config::{boundary_to_toml, parse_boundary, parse_source, source_to_toml};
use diskharm::transforms::{bergman_project, poisson_integral, q_transform};
use diskharm::verify::{
    norm, run_invariant_suite, KernelFixture, NormInput, NormKind, NormSpec, SuiteConfig, VerifyError,
};
use diskharm::{
    ComplexPoint, EvaluationGrid, KernelError, PolarPoint, QuadratureError, QuadratureSpec, SourceError, TransformError,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyIOError, PyValueError};
use pyo3::prelude::*;

trait IntoPyErr {
    fn py_err(self) -> PyErr;
}

impl IntoPyErr for KernelError {
    fn py_err(self) -> PyErr {
        PyValueError::new_err(self.to_string())
    }
}

impl IntoPyErr for QuadratureError {
    fn py_err(self) -> PyErr {
        match self {
            QuadratureError::NonFinite { .. } => PyArithmeticError::new_err(self.to_string()),
            _ => PyValueError::new_err(self.to_string()),
        }
    }
}

impl IntoPyErr for TransformError {
    fn py_err(self) -> PyErr {
        match self {
            TransformError::Quadrature(q) => q.py_err(),
            TransformError::NonFinite { .. } => PyArithmeticError::new_err(self.to_string()),
            _ => PyValueError::new_err(self.to_string()),
        }
    }
}

impl IntoPyErr for SourceError {
    fn py_err(self) -> PyErr {
        match self {
            SourceError::NonFinite { .. } => PyArithmeticError::new_err(self.to_string()),
            _ => PyValueError::new_err(self.to_string()),
        }
    }
}

impl IntoPyErr for VerifyError {
    fn py_err(self) -> PyErr {
        match self {
            VerifyError::Transform(t) => t.py_err(),
            VerifyError::Quadrature(q) => q.py_err(),
            VerifyError::NonFinite(_) => PyArithmeticError::new_err(self.to_string()),
            _ => PyValueError::new_err(self.to_string()),
        }
    }
}

impl IntoPyErr for HeatError {
    fn py_err(self) -> PyErr {
        match self {
            HeatError::InvalidProblem(_) => PyValueError::new_err(self.to_string()),
            HeatError::Transform(t) => t.py_err(),
            _ => PyArithmeticError::new_err(self.to_string()),
        }
    }
}

impl IntoPyErr for GridFileError {
    fn py_err(self) -> PyErr {
        PyIOError::new_err(self.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn quad_spec(tol: f64) -> PyResult<QuadratureSpec> {
    let spec = QuadratureSpec { adaptive_tol: tol, ..QuadratureSpec::default() };
    spec.validate().map_err(IntoPyErr::py_err)?;
    Ok(spec)
}

/// Source supported in the closed unit disk.
#[pyclass(name = "Source", module = "pydiskharm", frozen, from_py_object)]
#[derive(Clone)]
struct PySource {
    inner: diskharm::SourceFunction,
}

#[pymethods]
impl PySource {
    /// Parse a TOML source description.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        parse_source(text).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    /// Indicator of the disk `|z| <= radius`.
    #[staticmethod]
    fn char_disk(radius: f64) -> PyResult<Self> {
        diskharm::SourceFunction::char_disk(radius).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    fn to_toml(&self) -> String {
        source_to_toml(&self.inner)
    }

    fn __call__(&self, r: f64, theta: f64) -> PyResult<f64> {
        let p = PolarPoint::new(r, theta).map_err(IntoPyErr::py_err)?;
        self.inner.evaluate(p).map_err(IntoPyErr::py_err)
    }

    fn __repr__(&self) -> String {
        use diskharm::DiskSource;
        format!("Source({})", self.inner.describe())
    }
}

/// Function on the unit circle.
#[pyclass(name = "Boundary", module = "pydiskharm", frozen, from_py_object)]
#[derive(Clone)]
struct PyBoundary {
    inner: diskharm::BoundaryFunction,
}

#[pymethods]
impl PyBoundary {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        parse_boundary(text).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    fn to_toml(&self) -> String {
        boundary_to_toml(&self.inner)
    }

    fn __call__(&self, theta: f64) -> PyResult<f64> {
        self.inner.evaluate(theta).map_err(IntoPyErr::py_err)
    }

    fn __repr__(&self) -> String {
        format!("Boundary({})", self.inner.describe())
    }
}

/// Tensor grid of evaluation points in polar coordinates.
#[pyclass(name = "Grid", module = "pydiskharm", frozen, from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: EvaluationGrid,
}

#[pymethods]
impl PyGrid {
    /// `n_r` radii from 0 to `r_max` and `n_theta` angles over `[-pi, pi)`.
    #[new]
    #[pyo3(signature = (r_max = 0.9, n_r = 40, n_theta = 128))]
    fn new(r_max: f64, n_r: usize, n_theta: usize) -> PyResult<Self> {
        EvaluationGrid::uniform(r_max, n_r, n_theta).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    #[staticmethod]
    fn from_axes(radii: Vec<f64>, angles: Vec<f64>) -> PyResult<Self> {
        EvaluationGrid::from_axes(radii, angles).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    #[getter]
    fn radii(&self) -> Vec<f64> {
        self.inner.radii().to_vec()
    }

    #[getter]
    fn angles(&self) -> Vec<f64> {
        self.inner.angles().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n_r={}, n_theta={}, r_max={})", self.inner.n_r(), self.inner.n_theta(), self.inner.r_max())
    }
}

/// Values computed on a grid.
#[pyclass(name = "Field", module = "pydiskharm", frozen, from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: diskharm::Field,
}

#[pymethods]
impl PyField {
    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        read_field(&path).map(|inner| Self { inner }).map_err(IntoPyErr::py_err)
    }

    /// Write the CSV file and its JSON sidecar.
    #[pyo3(signature = (path, timestamp = false))]
    fn write(&self, path: PathBuf, timestamp: bool) -> PyResult<()> {
        write_field(&path, &self.inner, timestamp).map_err(IntoPyErr::py_err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid { inner: self.inner.grid.clone() }
    }

    #[getter]
    fn values(&self) -> Vec<Vec<f64>> {
        (0..self.inner.grid.n_r()).map(|i| self.inner.row(i).to_vec()).collect()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.all_converged()
    }

    #[getter]
    fn operator(&self) -> String {
        self.inner.meta.operator.clone()
    }

    #[getter]
    fn prefactor(&self) -> f64 {
        self.inner.meta.prefactor
    }

    fn value(&self, i: usize, j: usize) -> PyResult<f64> {
        let g = &self.inner.grid;
        if i >= g.n_r() || j >= g.n_theta() {
            return Err(PyValueError::new_err(format!(
                "index ({i}, {j}) outside a {} x {} grid",
                g.n_r(),
                g.n_theta()
            )));
        }
        Ok(self.inner.value(i, j))
    }

    fn max(&self) -> f64 {
        self.inner.max()
    }

    fn min(&self) -> f64 {
        self.inner.min()
    }

    fn __repr__(&self) -> String {
        let g = &self.inner.grid;
        format!("Field({}, {} x {})", self.inner.meta.operator, g.n_r(), g.n_theta())
    }
}

#[pyfunction]
fn poisson_kernel(r: f64, theta: f64) -> PyResult<f64> {
    diskharm::poisson_kernel(r, theta).map_err(IntoPyErr::py_err)
}

/// Harmonic Bergman kernel at `s = r rho` and angle difference `psi`.
#[pyfunction]
fn q_kernel(s: f64, psi: f64) -> PyResult<f64> {
    diskharm::q_kernel(s, psi).map_err(IntoPyErr::py_err)
}

#[pyfunction]
#[pyo3(signature = (z, w, alpha = 0.0))]
fn analytic_bergman_kernel(z: Complex64, w: Complex64, alpha: f64) -> PyResult<Complex64> {
    let z = ComplexPoint::interior(z.re, z.im).map_err(IntoPyErr::py_err)?;
    let w = ComplexPoint::interior(w.re, w.im).map_err(IntoPyErr::py_err)?;
    diskharm::analytic_bergman_kernel(z, w, alpha).map_err(IntoPyErr::py_err)
}

/// `prefactor * integral of f(rho, phi) Q(r rho, theta - phi) rho drho dphi`.
#[pyfunction(name = "q_transform")]
#[pyo3(signature = (source, grid, prefactor = 1.0, tol = 1e-9))]
fn py_q_transform(py: Python<'_>, source: &PySource, grid: &PyGrid, prefactor: f64, tol: f64) -> PyResult<PyField> {
    let spec = quad_spec(tol)?;
    py.detach(|| q_transform(&source.inner, &grid.inner, prefactor, &spec))
        .map(|inner| PyField { inner })
        .map_err(IntoPyErr::py_err)
}

#[pyfunction(name = "poisson_integral")]
#[pyo3(signature = (boundary, grid, tol = 1e-9))]
fn py_poisson_integral(py: Python<'_>, boundary: &PyBoundary, grid: &PyGrid, tol: f64) -> PyResult<PyField> {
    let spec = quad_spec(tol)?;
    py.detach(|| poisson_integral(&boundary.inner, &grid.inner, &spec))
        .map(|inner| PyField { inner })
        .map_err(IntoPyErr::py_err)
}

/// Orthogonal projection onto the harmonic Bergman space.
#[pyfunction(name = "bergman_project")]
#[pyo3(signature = (source, grid, tol = 1e-9))]
fn py_bergman_project(py: Python<'_>, source: &PySource, grid: &PyGrid, tol: f64) -> PyResult<PyField> {
    let spec = quad_spec(tol)?;
    py.detach(|| bergman_project(&source.inner, &grid.inner, &spec))
        .map(|inner| PyField { inner })
        .map_err(IntoPyErr::py_err)
}

/// Norm of a Source, Boundary or Field.
///
/// `kind` is one of `bergman`, `harmonic_l2`, `hardy_sup`, `circle_l2`.
#[pyfunction(name = "norm")]
#[pyo3(signature = (target, kind = "bergman", p = 2.0, alpha = 0.0, truncation = 0.999, tol = 1e-9))]
fn py_norm<'py>(
    py: Python<'py>,
    target: &Bound<'py, PyAny>,
    kind: &str,
    p: f64,
    alpha: f64,
    truncation: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = match kind {
        "bergman" => NormKind::BergmanWeighted { p, alpha },
        "harmonic_l2" => NormKind::HarmonicBergmanL2,
        "hardy_sup" => NormKind::HardySup,
        "circle_l2" => NormKind::CircleL2,
        other => return Err(PyValueError::new_err(format!("unknown norm kind {other:?}"))),
    };
    let spec = NormSpec { quadrature: quad_spec(tol)?, ..NormSpec::new(kind) }.with_truncation(truncation);
    let report = if let Ok(s) = target.cast::<PySource>() {
        let s = s.get();
        py.detach(|| norm(NormInput::Source(&s.inner), &spec))
    } else if let Ok(f) = target.cast::<PyField>() {
        norm(NormInput::Field(&f.get().inner), &spec)
    } else if let Ok(b) = target.cast::<PyBoundary>() {
        norm(NormInput::Boundary(&b.get().inner), &spec)
    } else {
        return Err(PyValueError::new_err("expected a Source, Boundary or Field"));
    }
    .map_err(IntoPyErr::py_err)?;
    json_to_py(py, &serde_json::to_string(&report).expect("report serializes"))
}

/// Run the invariant suite and return its report.
#[pyfunction]
#[pyo3(signature = (r_max = 0.9, tol = 1e-9, sign_flipped = false))]
fn verify(py: Python<'_>, r_max: f64, tol: f64, sign_flipped: bool) -> PyResult<Bound<'_, PyAny>> {
    let config = SuiteConfig {
        r_max,
        quadrature: quad_spec(tol)?,
        kernel_fixture: if sign_flipped { KernelFixture::SignFlipped } else { KernelFixture::Exact },
        ..SuiteConfig::default()
    };
    let report = py.detach(|| run_invariant_suite(&config));
    json_to_py(py, &report.to_json())
}

/// Disk sources of a catalog figure as `(label, Source, prefactor)`.
#[pyfunction]
fn figure_sources(id: u32) -> PyResult<Vec<(String, PySource, f64)>> {
    let case = figure_case(id).map_err(IntoPyErr::py_err)?;
    Ok(case
        .q_cases()
        .into_iter()
        .map(|q| (q.label.clone(), PySource { inner: q.source.clone() }, q.prefactor))
        .collect())
}

/// Boundary functions of a catalog figure.
#[pyfunction]
fn figure_boundaries(id: u32) -> PyResult<Vec<PyBoundary>> {
    let case = figure_case(id).map_err(IntoPyErr::py_err)?;
    Ok(case.poisson_cases().into_iter().map(|c| PyBoundary { inner: c.boundary.clone() }).collect())
}

/// Solve the steady conduction problem for `source` and compare it with
/// the Q-transform. Returns `(report, fd_field, q_field)`.
#[pyfunction]
#[pyo3(signature = (source, boundary = "dirichlet", robin_h = 1.0, n_r = 64, n_theta = 128, tol = 1e-9))]
fn conjecture<'py>(
    py: Python<'py>,
    source: &PySource,
    boundary: &str,
    robin_h: f64,
    n_r: usize,
    n_theta: usize,
    tol: f64,
) -> PyResult<(Bound<'py, PyAny>, PyField, PyField)> {
    let boundary = match boundary {
        "dirichlet" => HeatBoundary::DirichletZero,
        "robin" => HeatBoundary::Robin { h: robin_h },
        other => return Err(PyValueError::new_err(format!("unknown boundary condition {other:?}"))),
    };
    let config = ConjectureConfig { n_r, n_theta, quadrature: quad_spec(tol)?, ..ConjectureConfig::default() };
    let out = py.detach(|| conjecture_compare(&source.inner, boundary, &config)).map_err(IntoPyErr::py_err)?;
    let report = json_to_py(py, &out.report.to_json())?;
    Ok((report, PyField { inner: out.fd_field }, PyField { inner: out.q_field }))
}

#[pymodule]
fn pydiskharm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySource>()?;
    m.add_class::<PyBoundary>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(poisson_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(q_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_bergman_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(py_q_transform, m)?)?;
    m.add_function(wrap_pyfunction!(py_poisson_integral, m)?)?;
    m.add_function(wrap_pyfunction!(py_bergman_project, m)?)?;
    m.add_function(wrap_pyfunction!(py_norm, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(figure_sources, m)?)?;
    m.add_function(wrap_pyfunction!(figure_boundaries, m)?)?;
    m.add_function(wrap_pyfunction!(conjecture, m)?)?;
    Ok(())
}
