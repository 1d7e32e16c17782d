//! Python bindings: `import rcycles`.
//!
//! Points are plain lists: a `Vector` is `list[float]`, a product point is
//! `list[list[float]]` with one row per block. Block indices are 0-based.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use resolvent_cycles::cycles::{self, MapKind, SolveReport, SolverConfig};
use resolvent_cycles::duality::{self, DualityReport};
use resolvent_cycles::harness;
use resolvent_cycles::operators;
use resolvent_cycles::vectorspace;
use resolvent_cycles::{Cycle, Error, ProductOperator, ProductPoint, ResolventOperator, Vector};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(x: Vec<f64>) -> PyResult<Vector> {
    Vector::new(x).map_err(py_err)
}

fn point(rows: Vec<Vec<f64>>) -> PyResult<ProductPoint> {
    ProductPoint::from_rows(rows).map_err(py_err)
}

/// A maximally monotone operator, used through its resolvent.
#[pyclass(name = "Operator", module = "rcycles")]
pub struct PyOperator {
    inner: ResolventOperator,
}

#[pymethods]
impl PyOperator {
    #[staticmethod]
    fn zero(dim: usize) -> PyResult<Self> {
        wrap(ResolventOperator::zero(dim))
    }

    /// `x ↦ M x + b` with `M` monotone.
    #[staticmethod]
    fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> PyResult<Self> {
        wrap(ResolventOperator::affine(matrix, vector(offset)?))
    }

    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        wrap(ResolventOperator::ball(vector(center)?, radius))
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        wrap(ResolventOperator::boxed(vector(lower)?, vector(upper)?))
    }

    /// Normal cone of `{v : <normal, v> <= bound}`.
    #[staticmethod]
    fn halfspace(normal: Vec<f64>, bound: f64) -> PyResult<Self> {
        wrap(ResolventOperator::halfspace(vector(normal)?, bound))
    }

    #[staticmethod]
    #[pyo3(signature = (point, basis=Vec::new()))]
    fn affine_set(point: Vec<f64>, basis: Vec<Vec<f64>>) -> PyResult<Self> {
        let basis = basis.into_iter().map(vector).collect::<PyResult<_>>()?;
        wrap(ResolventOperator::affine_set(vector(point)?, basis))
    }

    #[pyo3(signature = (x, lam=1.0))]
    fn resolve(&self, x: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
        Ok(self
            .inner
            .resolve(&vector(x)?, lam)
            .map_err(py_err)?
            .into_inner())
    }

    fn inverse(&self) -> Self {
        PyOperator {
            inner: operators::inverse(&self.inner),
        }
    }

    /// `A^⊻ = (-Id) ∘ A ∘ (-Id)`.
    fn ovee(&self) -> Self {
        PyOperator {
            inner: operators::ovee(&self.inner),
        }
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind_name()
    }

    fn __repr__(&self) -> String {
        format!(
            "Operator({}, dim={})",
            self.inner.kind_name(),
            self.inner.dim()
        )
    }
}

fn wrap(op: resolvent_cycles::Result<ResolventOperator>) -> PyResult<PyOperator> {
    op.map(|inner| PyOperator { inner }).map_err(py_err)
}

fn affine_of(op: &PyOperator) -> PyResult<&resolvent_cycles::AffineMap> {
    op.inner.as_affine().ok_or_else(|| {
        PyValueError::new_err(format!(
            "expected an affine operator, got {}",
            op.inner.kind_name()
        ))
    })
}

/// The product operator `(A_0, ..., A_{m-1})` on `(R^n)^m`.
#[pyclass(name = "Problem", module = "rcycles")]
pub struct PyProblem {
    inner: ProductOperator,
}

fn cycle_of(p: &ProductOperator, rows: Vec<Vec<f64>>) -> PyResult<Cycle> {
    let point = point(rows)?;
    let residual = cycles::composed_residual(p, &point).map_err(py_err)?;
    Ok(Cycle {
        point,
        residual,
        iterations: 0,
        map_used: None,
    })
}

fn report_dict<'py>(py: Python<'py>, r: &SolveReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("converged", r.converged)?;
    d.set_item("stalled", r.stalled)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("residual", r.final_residual())?;
    d.set_item("cycle", r.cycle.as_ref().map(|c| c.point.to_rows()))?;
    d.set_item("gap", r.gap.as_ref().map(|g| g.y.to_rows()))?;
    d.set_item("last_point", r.last_point.to_rows())?;
    let trace: Vec<(usize, f64, f64)> = r
        .trace
        .iter()
        .map(|t| (t.iter, t.residual, t.gap_norm))
        .collect();
    d.set_item("trace", trace)?;
    Ok(d)
}

fn duality_dict<'py>(py: Python<'py>, r: &DualityReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("psol", r.psol.as_ref().map(|v| v.as_slice().to_vec()))?;
    d.set_item("dsol", r.dsol.as_ref().map(|v| v.as_slice().to_vec()))?;
    d.set_item("tol", r.tol)?;
    d.set_item("all_pass", r.all_pass())?;
    let rel = PyList::empty(py);
    for c in &r.relations_checked {
        rel.append((c.id.clone(), c.pass, c.residual))?;
    }
    d.set_item("relations", rel)?;
    Ok(d)
}

#[pymethods]
impl PyProblem {
    #[new]
    fn new(operators: Vec<PyRef<'_, PyOperator>>) -> PyResult<Self> {
        let factors = operators.iter().map(|o| o.inner.clone()).collect();
        Ok(PyProblem {
            inner: ProductOperator::new(factors).map_err(py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// KM iteration from `x0`; returns a dict whether or not it converged.
    #[pyo3(signature = (x0, map="averaged", alpha=None, tol=1e-8, max_iter=100_000))]
    fn find_cycle<'py>(
        &self,
        py: Python<'py>,
        x0: Vec<Vec<f64>>,
        map: &str,
        alpha: Option<f64>,
        tol: f64,
        max_iter: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let map: MapKind = map.parse().map_err(PyValueError::new_err)?;
        let cfg = SolverConfig {
            map,
            alpha: alpha.unwrap_or(harness::config::default_alpha(map)),
            ..SolverConfig::default()
        }
        .with_tol(tol)
        .with_max_iter(max_iter);
        let x0 = point(x0)?;
        match cycles::find_cycle(&self.inner, &x0, &cfg) {
            Ok(r) => report_dict(py, &r),
            Err(Error::NoConvergence(r)) => report_dict(py, &r),
            Err(e) => Err(py_err(e)),
        }
    }

    fn step_composed(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(cycles::step_composed(&self.inner, &point(x)?)
            .map_err(py_err)?
            .to_rows())
    }

    fn step_averaged(&self, x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        Ok(cycles::step_averaged(&self.inner, &point(x)?)
            .map_err(py_err)?
            .to_rows())
    }

    /// `‖x - J_A(R x)‖`.
    fn residual(&self, x: Vec<Vec<f64>>) -> PyResult<f64> {
        cycles::composed_residual(&self.inner, &point(x)?).map_err(py_err)
    }

    #[pyo3(signature = (z, i, tol=1e-8))]
    fn membership_fi(&self, z: Vec<f64>, i: usize, tol: f64) -> PyResult<bool> {
        cycles::membership_fi(&self.inner, &vector(z)?, i, tol).map_err(py_err)
    }

    #[pyo3(signature = (z, i, tol=1e-8))]
    fn cycle_from_fixed_point(&self, z: Vec<f64>, i: usize, tol: f64) -> PyResult<Vec<Vec<f64>>> {
        Ok(
            cycles::cycle_from_fixed_point(&self.inner, &vector(z)?, i, tol)
                .map_err(py_err)?
                .point
                .to_rows(),
        )
    }

    /// Largest `‖J_{i+1}(z) - (z - y_{i+1})‖` over samples `z ∈ F_i`.
    #[pyo3(signature = (cycle, samples, i, tol=1e-8))]
    fn translation_error(
        &self,
        cycle: Vec<Vec<f64>>,
        samples: Vec<Vec<f64>>,
        i: usize,
        tol: f64,
    ) -> PyResult<f64> {
        let c = cycle_of(&self.inner, cycle)?;
        let samples = samples
            .into_iter()
            .map(vector)
            .collect::<PyResult<Vec<_>>>()?;
        cycles::translation_error(&self.inner, &c, &samples, i, tol).map_err(py_err)
    }

    #[pyo3(signature = (cycle, tol=duality::DUALITY_TOL))]
    fn verify_cycle_duality<'py>(
        &self,
        py: Python<'py>,
        cycle: Vec<Vec<f64>>,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = cycle_of(&self.inner, cycle)?;
        duality_dict(
            py,
            &duality::verify_cycle_duality(&self.inner, &c, tol).map_err(py_err)?,
        )
    }
}

/// Block `i` of the result is block `i - 1` of `x`.
#[pyfunction]
fn shift(x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(vectorspace::shift(&point(x)?).to_rows())
}

#[pyfunction]
fn displacement(x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(vectorspace::displacement(&point(x)?).to_rows())
}

/// Minimum-norm `x` with `x - R x = y`; `y` must have zero block sum.
#[pyfunction]
#[pyo3(signature = (y, tol=1e-9))]
fn solve_displacement(y: Vec<Vec<f64>>, tol: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(vectorspace::solve_displacement(&point(y)?, tol)
        .map_err(py_err)?
        .particular
        .to_rows())
}

/// `R z - z` for a cycle `z`.
#[pyfunction]
fn gap_vector(cycle: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let z = point(cycle)?;
    Ok((&vectorspace::shift(&z) - &z).to_rows())
}

/// Zero of `A + B` for two affine operators.
#[pyfunction]
fn psol(a: PyRef<'_, PyOperator>, b: PyRef<'_, PyOperator>) -> PyResult<Vec<f64>> {
    Ok(duality::psol_affine(affine_of(&a)?, affine_of(&b)?)
        .map_err(py_err)?
        .into_inner())
}

/// Zero of `A^{-1} + B^{-⊻}` for two affine operators.
#[pyfunction]
fn dsol(a: PyRef<'_, PyOperator>, b: PyRef<'_, PyOperator>) -> PyResult<Vec<f64>> {
    Ok(duality::dsol_affine(affine_of(&a)?, affine_of(&b)?)
        .map_err(py_err)?
        .into_inner())
}

#[pyfunction]
#[pyo3(signature = (a, b, tol=duality::DUALITY_TOL))]
fn verify_singleton_relations<'py>(
    py: Python<'py>,
    a: PyRef<'_, PyOperator>,
    b: PyRef<'_, PyOperator>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let r =
        duality::verify_singleton_relations(affine_of(&a)?, affine_of(&b)?, tol).map_err(py_err)?;
    duality_dict(py, &r)
}

/// Runs `command` (solve, verify or duality) on a JSON config file and
/// returns the result document as a dict. Nothing is written to disk.
#[pyfunction]
#[pyo3(signature = (path, command="solve"))]
fn run_config<'py>(py: Python<'py>, path: &str, command: &str) -> PyResult<Bound<'py, PyAny>> {
    let to_py = |e: harness::HarnessError| PyRuntimeError::new_err(e.to_string());
    let cfg = harness::load_config(std::path::Path::new(path)).map_err(to_py)?;
    let out = match command {
        "solve" => harness::run_solve(&cfg),
        "verify" => harness::run_verify(&cfg),
        "duality" => harness::run_duality(&cfg),
        other => return Err(PyValueError::new_err(format!("unknown command '{other}'"))),
    }
    .map_err(to_py)?;
    let json = harness::output::result_to_json(&out.result);
    py.import("json")?.call_method1("loads", (json,))
}

#[pymodule]
fn rcycles(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(shift, m)?)?;
    m.add_function(wrap_pyfunction!(displacement, m)?)?;
    m.add_function(wrap_pyfunction!(solve_displacement, m)?)?;
    m.add_function(wrap_pyfunction!(gap_vector, m)?)?;
    m.add_function(wrap_pyfunction!(psol, m)?)?;
    m.add_function(wrap_pyfunction!(dsol, m)?)?;
    m.add_function(wrap_pyfunction!(verify_singleton_relations, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
