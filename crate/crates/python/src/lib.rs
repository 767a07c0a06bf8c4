//! Python bindings for `pslab-core`.
//!
//! Samples cross the boundary as lists of Python `complex`; matrices as
//! lists of rows. Input errors raise `ValueError`, numerical ones
//! `RuntimeError`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pslab_core::corpus::{corpus, gabor_system, lattice_centers, Recipe};
use pslab_core::fock::{lattice_sweep, sampling_bounds, FockPointSet};
use pslab_core::frames::{
    biorthogonality_defect, canonical_tight, commutation_ledger, commutator_pair, dual_system, frame_bounds,
    gramian, FunctionSystem,
};
use pslab_core::geometry::{density_estimate, separation_stat, PhasePointSet};
use pslab_core::grid::{
    fourier_transform, gaussian_window, hermite_functions, inverse_fourier_transform, tf_shift, GridSpec,
    PhasePoint, SampledFunction,
};
use pslab_core::linalg::CMatrix;
use pslab_core::localization::{localization_report, modulation_norm, optimal_center, weighted_l2_norm, Side};
use pslab_core::spectral::{
    localization_operator, plunge_count, prolate_count, restriction_operator, RestrictionOperator, RestrictionSpec,
};
use pslab_core::stft::{adjoint_stft, stft, StftField};
use pslab_core::{Error, C64};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidGrid(_)
        | Error::GridMismatch(_)
        | Error::OffGrid { .. }
        | Error::InvalidParameter { .. }
        | Error::UnsupportedDimension { .. }
        | Error::OutOfDomain { .. }
        | Error::DuplicatePoint(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn point(a: Vec<f64>, b: Vec<f64>) -> PyResult<PhasePoint> {
    PhasePoint::new(a, b).map_err(err)
}

fn rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Isotropic sampling grid on ℝ or ℝ²: `n` points per axis, spacing `dx`.
#[pyclass(name = "Grid", frozen, skip_from_py_object, module = "pslab")]
#[derive(Clone)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (n, dx, dim = 1))]
    fn new(n: usize, dx: f64, dim: usize) -> PyResult<Self> {
        GridSpec::new(dim, n, dx).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n_points()
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.spacing()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Axis coordinates, centered at zero.
    fn coordinates(&self) -> Vec<f64> {
        self.0.axis_coordinates()
    }

    fn dual(&self) -> Self {
        Self(self.0.dual())
    }

    fn gaussian(&self) -> PyFunction {
        PyFunction(gaussian_window(&self.0))
    }

    fn hermite(&self, count: usize) -> PyResult<Vec<PyFunction>> {
        Ok(hermite_functions(&self.0, count).map_err(err)?.into_iter().map(PyFunction).collect())
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, dx={}, dim={})", self.0.n_points(), self.0.spacing(), self.0.dim())
    }
}

/// Samples of a function on a grid.
#[pyclass(name = "Function", frozen, skip_from_py_object, module = "pslab")]
#[derive(Clone)]
struct PyFunction(SampledFunction);

#[pymethods]
impl PyFunction {
    #[new]
    fn new(grid: &PyGrid, values: Vec<C64>) -> PyResult<Self> {
        SampledFunction::new(grid.0, values).map(Self).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<C64> {
        self.0.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.values().len()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inner(&self, other: &PyFunction) -> PyResult<C64> {
        self.0.inner(&other.0).map_err(err)
    }

    fn __sub__(&self, other: &PyFunction) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __add__(&self, other: &PyFunction) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn normalized(&self) -> PyResult<Self> {
        self.0.normalized().map(Self).map_err(err)
    }

    /// `M_b T_a f`; `a` and `b` are scalars in 1D or pairs in 2D.
    #[pyo3(signature = (a, b))]
    fn shifted(&self, a: Vec<f64>, b: Vec<f64>) -> PyResult<Self> {
        tf_shift(&self.0, &point(a, b)?).map(Self).map_err(err)
    }

    /// Unitary Fourier transform, sampled on the dual grid.
    fn fourier(&self) -> Self {
        Self(fourier_transform(&self.0))
    }

    fn inverse_fourier(&self) -> Self {
        Self(inverse_fourier_transform(&self.0))
    }

    fn stft(&self, window: &PyFunction) -> PyResult<PyStft> {
        stft(&self.0, &window.0).map(PyStft).map_err(err)
    }

    /// `(center, moment)` minimizing the time (`side="time"`) or frequency moment of order `s`.
    #[pyo3(signature = (s, side = "time"))]
    fn optimal_center(&self, s: f64, side: &str) -> PyResult<(Vec<f64>, f64)> {
        let side = match side {
            "time" => Side::Time,
            "frequency" => Side::Frequency,
            other => return Err(PyValueError::new_err(format!("side must be 'time' or 'frequency', got {other:?}"))),
        };
        optimal_center(&self.0, s, side).map_err(err)
    }

    fn localization<'py>(&self, py: Python<'py>, s: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = localization_report(&self.0, s).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("s", r.s)?;
        d.set_item("time_moment", r.time_moment)?;
        d.set_item("freq_moment", r.freq_moment)?;
        d.set_item("total", r.total)?;
        d.set_item("a", r.center.a.clone())?;
        d.set_item("b", r.center.b.clone())?;
        d.set_item("tail_warning", r.tail_warning)?;
        Ok(d)
    }

    fn weighted_norm(&self, s: f64) -> PyResult<f64> {
        weighted_l2_norm(&self.0, s).map_err(err)
    }

    fn modulation_norm(&self, s: f64) -> PyResult<f64> {
        modulation_norm(&self.0, s).map_err(err)
    }

    /// `A_R f`: STFT with `window`, restricted to the box of radius `r`, synthesized back.
    fn localized(&self, r: f64, window: &PyFunction) -> PyResult<Self> {
        localization_operator(&self.0, r, &window.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Function(norm={:.6}, grid={})", self.0.norm(), PyGrid(*self.0.grid()).__repr__())
    }
}

/// Short-time Fourier transform samples on the phase-space grid.
#[pyclass(name = "Stft", frozen, module = "pslab")]
struct PyStft(StftField);

#[pymethods]
impl PyStft {
    fn values(&self) -> Vec<C64> {
        self.0.values().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn weighted_norm(&self, s: f64) -> f64 {
        self.0.weighted_norm(s)
    }

    fn adjoint(&self, window: &PyFunction) -> PyResult<PyFunction> {
        adjoint_stft(&self.0, &window.0).map(PyFunction).map_err(err)
    }
}

/// Time-frequency restriction operator on centered balls.
#[pyclass(name = "Restriction", frozen, module = "pslab")]
struct PyRestriction(RestrictionOperator);

#[pymethods]
impl PyRestriction {
    #[new]
    fn new(grid: &PyGrid, rho_time: f64, rho_freq: f64) -> PyResult<Self> {
        restriction_operator(&RestrictionSpec::centered(grid.0, rho_time, rho_freq))
            .map(Self)
            .map_err(err)
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn apply(&self, f: &PyFunction) -> PyResult<PyFunction> {
        self.0.apply(&f.0).map(PyFunction).map_err(err)
    }

    /// Leading `k` eigenvalues, descending.
    fn eigenvalues(&self, k: usize) -> PyResult<Vec<f64>> {
        Ok(self.0.spectrum(k).map_err(err)?.eigenvalues)
    }

    /// Eigenvalues above ½.
    fn plunge_count(&self) -> PyResult<usize> {
        plunge_count(&self.0).map_err(err)
    }
}

/// Finite function system with phase-space centers.
#[pyclass(name = "System", frozen, module = "pslab")]
struct PySystem(FunctionSystem);

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (members, a, b, label = "system"))]
    fn new(members: Vec<PyRef<'_, PyFunction>>, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, label: &str) -> PyResult<Self> {
        if a.len() != b.len() {
            return Err(PyValueError::new_err("a and b must have one entry per member"));
        }
        let centers = a.into_iter().zip(b).map(|(a, b)| point(a, b)).collect::<PyResult<_>>()?;
        let members = members.iter().map(|f| f.0.clone()).collect();
        FunctionSystem::new(label, members, centers).map(Self).map_err(err)
    }

    #[staticmethod]
    fn hermite(grid: &PyGrid, count: usize) -> PyResult<Self> {
        corpus(&Recipe::HermiteOnb { count }, &grid.0, 0).map(Self).map_err(err)
    }

    /// Gaussian Gabor system on `αℤ × βℤ` within `|a|, |b| ≤ extent/2`.
    #[staticmethod]
    #[pyo3(signature = (grid, alpha, beta, extent, jitter = 0.0, seed = 0))]
    fn gabor(grid: &PyGrid, alpha: f64, beta: f64, extent: f64, jitter: f64, seed: u64) -> PyResult<Self> {
        if jitter == 0.0 {
            let centers = lattice_centers(alpha, beta, extent).map_err(err)?;
            return gabor_system(&grid.0, centers, "gabor").map(Self).map_err(err);
        }
        let recipe = Recipe::JitteredGabor { alpha, beta, jitter, extent };
        corpus(&recipe, &grid.0, seed).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn members(&self) -> Vec<PyFunction> {
        self.0.members().iter().cloned().map(PyFunction).collect()
    }

    /// `(a, b)` per member.
    fn centers(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        self.0.centers().iter().map(|c| (c.a.clone(), c.b.clone())).collect()
    }

    /// `G[m][n] = (f_n, f_m)`.
    fn gramian(&self) -> Vec<Vec<C64>> {
        rows(&gramian(&self.0))
    }

    fn frame_bounds<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let fb = frame_bounds(&self.0);
        let d = PyDict::new(py);
        d.set_item("lower", fb.lower)?;
        d.set_item("upper", fb.upper)?;
        d.set_item("rank", fb.rank)?;
        d.set_item("as_frame_on_span", fb.as_frame_on_span)?;
        Ok(d)
    }

    fn dual(&self) -> PyResult<Self> {
        dual_system(&self.0).map(Self).map_err(err)
    }

    fn canonical_tight(&self) -> PyResult<Self> {
        canonical_tight(&self.0).map(Self).map_err(err)
    }

    fn biorthogonality_defect(&self, dual: &PySystem) -> PyResult<f64> {
        biorthogonality_defect(&self.0, &dual.0).map_err(err)
    }

    /// Per-member residuals of the commutation identity against `dual`.
    fn commutation_residuals(&self, dual: &PySystem) -> PyResult<Vec<f64>> {
        Ok(commutation_ledger(&self.0, &dual.0).map_err(err)?.per_n_identity_residual)
    }
}

/// Point set in phase space observed inside the cube of half-width `window`.
#[pyclass(name = "PointSet", frozen, module = "pslab")]
struct PyPointSet(PhasePointSet);

#[pymethods]
impl PyPointSet {
    #[new]
    fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, window: f64) -> PyResult<Self> {
        let dim = a.first().map_or(1, Vec::len);
        if a.len() != b.len() {
            return Err(PyValueError::new_err("a and b must have the same length"));
        }
        let pts = a.into_iter().zip(b).map(|(a, b)| point(a, b)).collect::<PyResult<_>>()?;
        PhasePointSet::new(dim, pts, window).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (alpha, beta, window, dim = 1))]
    fn lattice(alpha: f64, beta: f64, window: f64, dim: usize) -> PyResult<Self> {
        PhasePointSet::lattice(dim, alpha, beta, window).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `(lower, upper)` density at cube radius `r`.
    fn density(&self, r: f64) -> PyResult<(f64, f64)> {
        let d = density_estimate(&self.0, r).map_err(err)?;
        Ok((d.lower, d.upper))
    }

    /// Largest number of points in a unit cube.
    fn separation(&self) -> usize {
        separation_stat(&self.0)
    }
}

/// `Σ_j (x_j f, ∂_j g) + (∂_j f, x_j g)`; equals `−d (f, g)` for smooth decaying `f, g`.
#[pyfunction]
fn commutator(f: &PyFunction, g: &PyFunction) -> PyResult<C64> {
    commutator_pair(&f.0, &g.0).map_err(err)
}

/// Eigenvalues `≥ 1−ε²` of the restriction to `[−(R−R^δ), R−R^δ]` in time and frequency.
#[pyfunction]
#[pyo3(signature = (grid, r, eps = 0.3, delta = 0.5))]
fn prolate(grid: &PyGrid, r: f64, eps: f64, delta: f64) -> PyResult<usize> {
    prolate_count(r, eps, delta, grid.0).map_err(err)
}

/// Riesz bounds `(lower, upper)` of normalized Fock kernels at `points`.
#[pyfunction]
fn fock_bounds(points: Vec<C64>, window: f64) -> PyResult<(f64, f64)> {
    let set = FockPointSet::new(points, window).map_err(err)?;
    sampling_bounds(&set).map_err(err)
}

/// `[(alpha, density, lower, upper, condition)]` for square lattices clipped to `|z| < window`.
#[pyfunction]
fn fock_sweep(alphas: Vec<f64>, window: f64) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    Ok(lattice_sweep(&alphas, window)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.alpha, r.density, r.lower, r.upper, r.condition))
        .collect())
}

#[pymodule]
fn pslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", pslab_core::VERSION)?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyStft>()?;
    m.add_class::<PyRestriction>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyPointSet>()?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(prolate, m)?)?;
    m.add_function(wrap_pyfunction!(fock_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(fock_sweep, m)?)?;
    Ok(())
}
