//! Python bindings. The module is imported as `matdyn`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use matdyn::acceptance;
use matdyn::algebra::eigenvalues;
use matdyn::basin;
use matdyn::maps::{self, MapSpec, PlanarMapSpec, Verdict};
use matdyn::periodic::{self, FreeEntry, PeriodicPoint};
use matdyn::quat::{self, CatalogPoint};
use matdyn::raster::{self, ControlTriple, Domain, ExitGrid};
use matdyn::sample::DEFAULT_SEED;
use matdyn::Mat2;

create_exception!(matdyn, MatdynError, PyValueError);

fn err(e: matdyn::Error) -> PyErr {
    MatdynError::new_err(e.to_string())
}

type R<T> = PyResult<T>;

/// A 2×2 complex matrix [[x, y], [z, t]].
#[pyclass(name = "Mat2", module = "matdyn", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyMat2(Mat2);

#[pymethods]
impl PyMat2 {
    #[new]
    #[pyo3(signature = (x, y, z, t))]
    fn new(x: Complex64, y: Complex64, z: Complex64, t: Complex64) -> R<Self> {
        Mat2::try_new(x, y, z, t).map(PyMat2).map_err(err)
    }

    /// Parses eight comma-separated reals.
    #[staticmethod]
    fn parse(s: &str) -> R<Self> {
        s.parse::<Mat2>().map(PyMat2).map_err(err)
    }

    #[getter]
    fn x(&self) -> Complex64 {
        self.0.x
    }
    #[getter]
    fn y(&self) -> Complex64 {
        self.0.y
    }
    #[getter]
    fn z(&self) -> Complex64 {
        self.0.z
    }
    #[getter]
    fn t(&self) -> Complex64 {
        self.0.t
    }

    fn entries(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        let [x, y, z, t] = self.0.entries();
        (x, y, z, t)
    }

    fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    fn det(&self) -> Complex64 {
        self.0.det()
    }

    /// Largest entry modulus.
    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn eigenvalues(&self) -> (Complex64, Complex64) {
        let e = eigenvalues(&self.0);
        (e.l1, e.l2)
    }

    fn inverse(&self) -> R<Self> {
        self.0.inverse().map(PyMat2).map_err(err)
    }

    fn dist(&self, other: PyMat2) -> f64 {
        self.0.dist(&other.0)
    }

    fn __mul__(&self, other: PyMat2) -> Self {
        PyMat2(self.0 * other.0)
    }

    fn __add__(&self, other: PyMat2) -> Self {
        PyMat2(self.0 + other.0)
    }

    fn __sub__(&self, other: PyMat2) -> Self {
        PyMat2(self.0 - other.0)
    }

    fn __eq__(&self, other: PyMat2) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        let [x, y, z, t] = self.0.entries();
        format!("Mat2({x}, {y}, {z}, {t})")
    }
}

fn verdict(v: &Verdict) -> (String, Option<usize>) {
    match *v {
        Verdict::Escaped(k) => ("escaped".into(), Some(k)),
        Verdict::Converged(k) => ("converged".into(), Some(k)),
        Verdict::Completed => ("completed".into(), None),
        Verdict::IndeterminateHit(k) => ("indeterminate".into(), Some(k)),
    }
}

/// A matrix map given by its spec string, e.g. "phi-id" or "phi-diag:2,0".
#[pyclass(name = "Map", module = "matdyn", frozen)]
struct PyMap(MapSpec);

#[pymethods]
impl PyMap {
    #[new]
    fn new(spec: &str) -> R<Self> {
        spec.parse::<MapSpec>().map(PyMap).map_err(err)
    }

    fn __call__(&self, m: PyMat2) -> R<PyMat2> {
        self.apply(m)
    }

    fn apply(&self, m: PyMat2) -> R<PyMat2> {
        maps::apply(&self.0, &m.0).map(PyMat2).map_err(err)
    }

    /// Returns (iterates, verdict, step).
    #[pyo3(signature = (m, steps, escape_r = 1e12, eps = 0.0))]
    fn orbit(&self, m: PyMat2, steps: usize, escape_r: f64, eps: f64) -> R<(Vec<PyMat2>, String, Option<usize>)> {
        let rec = maps::orbit(&self.0, m.0, steps, escape_r, eps).map_err(err)?;
        let (v, k) = verdict(&rec.verdict);
        Ok((rec.points.into_iter().map(PyMat2).collect(), v, k))
    }

    fn is_conjugation_compatible(&self) -> bool {
        self.0.is_conjugation_compatible()
    }

    fn __repr__(&self) -> String {
        format!("Map('{}')", self.0)
    }
}

/// A map of the plane, e.g. "det0:1", "sq-phi-id" or "phi-theta:0.5".
#[pyclass(name = "PlanarMap", module = "matdyn", frozen)]
struct PyPlanarMap(PlanarMapSpec);

#[pymethods]
impl PyPlanarMap {
    #[new]
    fn new(spec: &str) -> R<Self> {
        spec.parse::<PlanarMapSpec>().map(PyPlanarMap).map_err(err)
    }

    fn apply(&self, p: (Complex64, Complex64)) -> R<(Complex64, Complex64)> {
        self.0.apply(p).map_err(err)
    }

    fn apply_real(&self, p: (f64, f64)) -> R<(f64, f64)> {
        self.0.apply_real(p).map_err(err)
    }

    fn exit_time(&self, p: (f64, f64), escape_r: f64, window: f64, kappa: u32) -> R<u32> {
        let c = ControlTriple::new(escape_r, window, kappa).map_err(err)?;
        raster::exit_time(&self.0, p, &c).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("PlanarMap('{}')", self.0)
    }
}

/// An exit-time raster; `values` is row-major with row 0 at the top.
#[pyclass(name = "ExitGrid", module = "matdyn", frozen)]
struct PyExitGrid {
    grid: ExitGrid,
    kappa: u32,
}

#[pymethods]
impl PyExitGrid {
    #[getter]
    fn width(&self) -> usize {
        self.grid.width
    }
    #[getter]
    fn height(&self) -> usize {
        self.grid.height
    }
    #[getter]
    fn values(&self) -> Vec<i32> {
        self.grid.values.clone()
    }

    fn get(&self, ix: usize, iy: usize) -> R<i32> {
        if ix >= self.grid.width || iy >= self.grid.height {
            return Err(MatdynError::new_err("pixel index out of range"));
        }
        Ok(self.grid.get(ix, iy))
    }

    fn center(&self, ix: usize, iy: usize) -> (f64, f64) {
        self.grid.center(ix, iy)
    }

    fn to_ppm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &raster::grid_to_ppm(&self.grid, self.kappa))
    }

    fn to_csv(&self) -> String {
        raster::grid_to_csv(&self.grid)
    }
}

#[pyfunction]
#[pyo3(signature = (planar, escape_r, window, kappa, px, py = None, domain = "square"))]
#[allow(clippy::too_many_arguments)]
fn render(
    py_: Python<'_>,
    planar: PyRef<'_, PyPlanarMap>,
    escape_r: f64,
    window: f64,
    kappa: u32,
    px: usize,
    py: Option<usize>,
    domain: &str,
) -> R<PyExitGrid> {
    let d = match domain {
        "square" => Domain::Square,
        "disk" => Domain::UnitDisk,
        _ => return Err(MatdynError::new_err("domain must be 'square' or 'disk'")),
    };
    let c = ControlTriple::new(escape_r, window, kappa).map_err(err)?;
    let map = planar.0;
    let grid = py_
        .detach(|| raster::render(&map, &c, px, py.unwrap_or(px), d))
        .map_err(err)?;
    Ok(PyExitGrid { grid, kappa })
}

#[pyfunction]
fn iterate_segment(theta: f64, x1: f64, iters: usize, refine_eps: f64) -> R<Vec<Vec<(f64, f64)>>> {
    raster::iterate_segment(theta, x1, iters, refine_eps).map_err(err)
}

type PeriodicRow = (PyMat2, u32, String, String, f64);

fn periodic_rows(pts: Vec<PeriodicPoint>) -> Vec<PeriodicRow> {
    pts.into_iter()
        .map(|p| {
            let free = match p.free {
                FreeEntry::None => "none",
                FreeEntry::Y => "y",
                FreeEntry::Z => "z",
            };
            (PyMat2(p.point), p.period, p.family.as_str().to_string(), free.to_string(), p.residual)
        })
        .collect()
}

/// Rows (point, period, family, free entry, residual).
#[pyfunction]
fn periodic_phi_id(n: u32) -> R<Vec<PeriodicRow>> {
    periodic::periodic_phi_id(n).map(periodic_rows).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (lam, n, tol = 1e-10))]
fn periodic_phi_diag(lam: Complex64, n: u32, tol: f64) -> R<Vec<PeriodicRow>> {
    periodic::periodic_phi_diag(lam, n, tol).map(periodic_rows).map_err(err)
}

#[pyfunction]
fn periodic_phi_jordan(n: u32) -> R<Vec<PeriodicRow>> {
    periodic::periodic_phi_jordan(n).map(periodic_rows).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (map, candidates, n, tol = 1e-9))]
fn brute_force_cycles(map: PyRef<'_, PyMap>, candidates: Vec<PyMat2>, n: u32, tol: f64) -> R<Vec<PeriodicRow>> {
    let c: Vec<Mat2> = candidates.into_iter().map(|m| m.0).collect();
    periodic::brute_force_cycles(&map.0, &c, n, tol).map(periodic_rows).map_err(err)
}

/// Returns (tag, max eigenvalue modulus, min eigenvalue modulus).
#[pyfunction]
#[pyo3(signature = (m, tol = basin::BOUNDARY_TOL))]
fn basin_classify_phi_id(m: PyMat2, tol: f64) -> (String, f64, f64) {
    let v = basin::basin_classify_phi_id(&m.0, tol);
    (v.tag.as_str().into(), v.max_eig_modulus, v.min_eig_modulus)
}

#[pyfunction]
#[pyo3(signature = (m, tol = basin::RATIO_TOL))]
fn classify_lambda_set(m: PyMat2, tol: f64) -> String {
    basin::classify_lambda_set(&m.0, tol).as_str().into()
}

#[pyfunction]
#[pyo3(signature = (b, c, tol = 1e-9))]
fn sigma_membership(b: Complex64, c: Complex64, tol: f64) -> bool {
    basin::sigma_membership(b, c, tol)
}

#[pyfunction]
fn empirical_basin(map: PyRef<'_, PyMap>, m: PyMat2, kappa: u32, r: f64, eps: f64) -> R<String> {
    basin::empirical_basin(&map.0, &m.0, kappa, r, eps)
        .map(|t| t.as_str().into())
        .map_err(err)
}

#[pyfunction]
fn phi_theta(theta: f64, p: (f64, f64)) -> (f64, f64) {
    quat::phi_theta(theta, p)
}

fn catalog(pts: Vec<CatalogPoint>) -> Vec<(String, (f64, f64), bool)> {
    pts.into_iter()
        .map(|c| (c.tag.as_str().into(), c.p, c.in_unit_disk))
        .collect()
}

/// Rows (tag, point, in unit disk).
#[pyfunction]
fn phi_theta_fixed_points(theta: f64) -> R<Vec<(String, (f64, f64), bool)>> {
    quat::phi_theta_fixed_points(theta).map(catalog).map_err(err)
}

#[pyfunction]
fn phi_theta_two_periodic(theta: f64) -> R<Vec<(String, (f64, f64), bool)>> {
    quat::phi_theta_two_periodic(theta)
        .map(|c| catalog(c.points))
        .map_err(err)
}

#[pyfunction]
fn delta_theta(theta: f64) -> f64 {
    quat::delta_theta(theta)
}

#[pyfunction]
fn t_n_lambda(lam: f64, v: Complex64, n: u32) -> Complex64 {
    quat::t_n_lambda(lam, v, n)
}

/// Runs the acceptance criteria; rows (id, name, passed, detail).
#[pyfunction]
#[pyo3(signature = (seed = DEFAULT_SEED, only = None))]
fn selftest(py: Python<'_>, seed: u64, only: Option<Vec<u8>>) -> R<Vec<(u8, String, bool, String)>> {
    let ids: Vec<u8> = only.unwrap_or_else(|| (1..=acceptance::COUNT).collect());
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::COUNT) {
        return Err(MatdynError::new_err(format!("no criterion {bad}")));
    }
    let rows = py.detach(|| {
        ids.iter()
            .filter_map(|&i| acceptance::run(i, seed))
            .map(|c| (c.id, c.name.to_string(), c.passed, c.detail))
            .collect()
    });
    Ok(rows)
}

#[pymodule]
#[pyo3(name = "matdyn")]
fn matdyn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MatdynError", m.py().get_type::<MatdynError>())?;
    m.add_class::<PyMat2>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyPlanarMap>()?;
    m.add_class::<PyExitGrid>()?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(iterate_segment, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_phi_id, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_phi_diag, m)?)?;
    m.add_function(wrap_pyfunction!(periodic_phi_jordan, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(basin_classify_phi_id, m)?)?;
    m.add_function(wrap_pyfunction!(classify_lambda_set, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_membership, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_basin, m)?)?;
    m.add_function(wrap_pyfunction!(phi_theta, m)?)?;
    m.add_function(wrap_pyfunction!(phi_theta_fixed_points, m)?)?;
    m.add_function(wrap_pyfunction!(phi_theta_two_periodic, m)?)?;
    m.add_function(wrap_pyfunction!(delta_theta, m)?)?;
    m.add_function(wrap_pyfunction!(t_n_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
