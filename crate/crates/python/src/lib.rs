//! Python bindings: grids, exact vacua, residuals, the flow and the boundary expansion.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use staticflow::expansion::{self, EinsteinBoundary, ExpansionResult};
use staticflow::flow::{self, FlowControls, FlowReport, Scheme, Termination};
use staticflow::geometry::{self, StaticTriple};
use staticflow::solutions::{self, PerturbationSpec, PerturbationTarget};
use staticflow::RadialGrid;

fn err(e: staticflow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Grid", frozen)]
#[derive(Clone, Copy)]
struct PyGrid(RadialGrid);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(r_min: f64, r_max: f64, count: usize) -> PyResult<Self> {
        RadialGrid::new(r_min, r_max, count).map(Self).map_err(err)
    }

    #[getter]
    fn r_min(&self) -> f64 {
        self.0.r_min()
    }

    #[getter]
    fn r_max(&self) -> f64 {
        self.0.r_max()
    }

    #[getter]
    fn count(&self) -> usize {
        self.0.count()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn nodes(&self) -> Vec<f64> {
        self.0.nodes().collect()
    }

    fn refined(&self) -> Self {
        Self(self.0.refined())
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, {})", self.0.r_min(), self.0.r_max(), self.0.count())
    }
}

/// Metric `A dr² + B σ` and lapse `V` sampled on a grid.
#[pyclass(name = "Triple", frozen)]
#[derive(Clone)]
struct PyTriple(StaticTriple);

#[pymethods]
impl PyTriple {
    #[new]
    fn new(n: usize, grid: PyGrid, a: Vec<f64>, b: Vec<f64>, v: Vec<f64>) -> PyResult<Self> {
        let profile = |x| staticflow::Profile::new(grid.0, x).map_err(err);
        let metric = geometry::RotSymMetric::new(n, profile(a)?, profile(b)?).map_err(err)?;
        StaticTriple::new(metric, profile(v)?).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    #[getter]
    fn a(&self) -> Vec<f64> {
        self.0.metric().a().values().to_vec()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.0.metric().b().values().to_vec()
    }

    #[getter]
    fn v(&self) -> Vec<f64> {
        self.0.lapse().values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Triple(n={}, count={})", self.0.n(), self.0.grid().count())
    }
}

#[pyfunction]
fn ads(n: usize, grid: PyGrid) -> PyResult<PyTriple> {
    solutions::ads(n, grid.0).map(PyTriple).map_err(err)
}

/// Schwarzschild-AdS in the area-radius chart, or in geodesic distance when `geodesic`.
#[pyfunction]
#[pyo3(signature = (n, mass, grid, geodesic = false))]
fn schwarzschild_ads(n: usize, mass: f64, grid: PyGrid, geodesic: bool) -> PyResult<PyTriple> {
    let t = if geodesic {
        solutions::schwarzschild_ads_geodesic(n, mass, grid.0)
    } else {
        solutions::schwarzschild_ads(n, mass, grid.0)
    };
    t.map(PyTriple).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (triple, amplitude, center = 0.0, width = 1.0, decay = 2.0, target = "B"))]
fn perturb(
    triple: &PyTriple,
    amplitude: f64,
    center: f64,
    width: f64,
    decay: f64,
    target: &str,
) -> PyResult<PyTriple> {
    let target = match target {
        "A" => PerturbationTarget::A,
        "B" => PerturbationTarget::B,
        "V" => PerturbationTarget::V,
        other => return Err(PyValueError::new_err(format!("unknown target {other:?}"))),
    };
    let spec = PerturbationSpec { amplitude, center, width, decay, target };
    solutions::perturb(&triple.0, &spec).map(PyTriple).map_err(err)
}

/// Sup of the static vacuum residual.
#[pyfunction]
fn static_residual(triple: &PyTriple) -> f64 {
    geometry::static_residual(&triple.0).sup()
}

/// Sup gap between the warped-product Ricci and a full chart computation.
#[pyfunction]
fn lift_block_check(triple: &PyTriple) -> f64 {
    geometry::lift_block_check(&triple.0).sup()
}

#[pyclass(name = "FlowReport", frozen)]
struct PyFlowReport(FlowReport);

#[pymethods]
impl PyFlowReport {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn weighted_dev(&self) -> Vec<f64> {
        self.0.weighted_dev.clone()
    }

    #[getter]
    fn min_lapse(&self) -> Vec<f64> {
        self.0.min_lapse.clone()
    }

    #[getter]
    fn as_defect(&self) -> Vec<f64> {
        self.0.as_defect.clone()
    }

    #[getter]
    fn residual_norms(&self) -> Vec<f64> {
        self.0.residual_norms.clone()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.0.steps
    }

    /// `completed`, `budget_exceeded`, `positivity_lost` or `nonfinite`.
    #[getter]
    fn terminated(&self) -> &'static str {
        match self.0.terminated {
            Termination::Completed => "completed",
            Termination::BudgetExceeded => "budget_exceeded",
            Termination::PositivityLost => "positivity_lost",
            Termination::Nonfinite => "nonfinite",
        }
    }

    fn max_weighted_dev(&self) -> f64 {
        self.0.max_weighted_dev()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
#[pyo3(signature = (triple, t_end, cfl = 0.25, scheme = "explicit-rk4", monitor_every = 100, deviation_budget = f64::INFINITY))]
fn evolve(
    py: Python<'_>,
    triple: &PyTriple,
    t_end: f64,
    cfl: f64,
    scheme: &str,
    monitor_every: usize,
    deviation_budget: f64,
) -> PyResult<PyFlowReport> {
    let scheme = match scheme {
        "explicit-rk4" => Scheme::ExplicitRk4,
        "explicit-euler" => Scheme::ExplicitEuler,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    let controls = FlowControls { t_end, cfl, scheme, monitor_every, deviation_budget };
    controls.validate().map_err(err)?;
    let t = triple.0.clone();
    Ok(PyFlowReport(py.detach(move || flow::evolve(&t, &controls))))
}

#[pyclass(name = "Expansion", frozen)]
struct PyExpansion(ExpansionResult);

#[pymethods]
impl PyExpansion {
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn scal(&self) -> f64 {
        self.0.scal
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.0.c.coeffs().to_vec()
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.0.u.coeffs().to_vec()
    }

    #[getter]
    fn determinants(&self) -> Vec<f64> {
        self.0.determinants.clone()
    }

    fn parity_ok(&self) -> bool {
        expansion::parity_check(&self.0)
    }

    /// Static triple on a grid in the boundary defining coordinate `tau`.
    fn reconstruct(&self, tau_grid: PyGrid) -> PyResult<PyTriple> {
        expansion::reconstruct(&self.0, tau_grid.0).map(PyTriple).map_err(err)
    }
}

#[pyfunction]
fn expand(n: usize, scal: f64, order: usize) -> PyResult<PyExpansion> {
    let b = EinsteinBoundary::new(n, scal).map_err(err)?;
    expansion::expand(&b, order).map(PyExpansion).map_err(err)
}

#[pyfunction]
fn solvability_determinant(n: usize, m: usize) -> f64 {
    expansion::solvability_determinant(n, m)
}

#[pymodule]
fn staticflow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyTriple>()?;
    m.add_class::<PyFlowReport>()?;
    m.add_class::<PyExpansion>()?;
    m.add_function(wrap_pyfunction!(ads, m)?)?;
    m.add_function(wrap_pyfunction!(schwarzschild_ads, m)?)?;
    m.add_function(wrap_pyfunction!(perturb, m)?)?;
    m.add_function(wrap_pyfunction!(static_residual, m)?)?;
    m.add_function(wrap_pyfunction!(lift_block_check, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(solvability_determinant, m)?)?;
    Ok(())
}
