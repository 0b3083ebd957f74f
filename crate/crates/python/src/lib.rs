//! Python bindings for `hdlab`.
//!
//! Scalars go in and out as floats and complex numbers, phase-space states
//! as 4-tuples `(q1, q2, pi1, pi2)`. Report structs come back as plain
//! dicts.

use hdlab::lab::{self, Grid1D, ScanObservable, Stencil};
use hdlab::nonlocal::{self, NonlocalParams};
use hdlab::propagator::{self, PotentialSign, Taper};
use hdlab::pu::{self, PUParams, PhaseState};
use hdlab::special::{self, Branch, EigenLabel};
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(hdlab_py, HdlabError, PyRuntimeError, "Numerical failure inside hdlab.");

type State = (f64, f64, f64, f64);

fn err(e: hdlab::Error) -> PyErr {
    match e {
        hdlab::Error::InvalidParameter(m) => PyValueError::new_err(m),
        other => HdlabError::new_err(other.to_string()),
    }
}

fn params(omega: f64, hbar: f64) -> PyResult<PUParams> {
    PUParams::new(omega, hbar).map_err(err)
}

fn state(s: State) -> PhaseState {
    PhaseState::new(s.0, s.1, s.2, s.3)
}

fn tuple(s: PhaseState) -> State {
    (s.q1, s.q2, s.pi1, s.pi2)
}

/// serde → JSON text → `json.loads`.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

// classical PU

/// Ostrogradsky Hamiltonian at `(q1, q2, pi1, pi2)`.
#[pyfunction]
#[pyo3(signature = (s, omega, hbar=1.0))]
fn hamiltonian_pu(s: State, omega: f64, hbar: f64) -> PyResult<f64> {
    Ok(pu::hamiltonian_pu(&state(s), &params(omega, hbar)?))
}

#[pyfunction]
#[pyo3(signature = (s, omega, hbar=1.0))]
fn x_observable(s: State, omega: f64, hbar: f64) -> PyResult<f64> {
    Ok(pu::x_observable(&state(s), &params(omega, hbar)?))
}

/// `(x1, x2, p1, p2)` of the decoupled pair.
#[pyfunction]
#[pyo3(signature = (s, omega, hbar=1.0))]
fn decouple(s: State, omega: f64, hbar: f64) -> PyResult<State> {
    let d = pu::decouple(&state(s), &params(omega, hbar)?);
    let a = d.to_array();
    Ok((a[0], a[1], a[2], a[3]))
}

#[pyfunction]
#[pyo3(signature = (d, omega, hbar=1.0))]
fn recouple(d: State, omega: f64, hbar: f64) -> PyResult<State> {
    let d = pu::DecoupledState::from_array([d.0, d.1, d.2, d.3]);
    Ok(tuple(pu::recouple(&d, &params(omega, hbar)?)))
}

#[pyfunction]
#[pyo3(signature = (s0, omega, t_grid, rtol=1e-10, hbar=1.0))]
fn integrate_flow(py: Python<'_>, s0: State, omega: f64, t_grid: Vec<f64>, rtol: f64, hbar: f64) -> PyResult<Vec<State>> {
    let p = params(omega, hbar)?;
    let out = py.detach(|| pu::integrate_flow(&state(s0), &p, &t_grid, rtol)).map_err(err)?;
    Ok(out.into_iter().map(tuple).collect())
}

/// Fitted exponential growth of X along the flow: dict with rate, intercept, max_residual.
#[pyfunction]
#[pyo3(signature = (s0, omega, samples=60, hbar=1.0))]
fn fit_x_growth(py: Python<'_>, s0: State, omega: f64, samples: usize, hbar: f64) -> PyResult<Py<PyAny>> {
    let fit = pu::fit_x_growth(&state(s0), &params(omega, hbar)?, samples).map_err(err)?;
    to_py(py, &fit)
}

// nonlocal modes

/// Roots and residues of `z² + ω²cosh(Tz)`.
#[pyclass(module = "hdlab_py", frozen)]
struct ModeDecomposition {
    inner: nonlocal::ModeDecomposition,
}

#[pymethods]
impl ModeDecomposition {
    /// Every stored zero: `±iΩ` per real mode, then the four images of each complex pair.
    fn roots(&self) -> Vec<Complex64> {
        self.inner.roots()
    }

    /// `[(Omega_i, eta_i), ...]`
    #[getter]
    fn real_modes(&self) -> Vec<(f64, f64)> {
        self.inner.real_modes.iter().map(|m| (m.omega_i, m.eta_i)).collect()
    }

    /// `[(omega_k, eta_k), ...]`
    #[getter]
    fn complex_modes(&self) -> Vec<(Complex64, Complex64)> {
        self.inner.complex_modes.iter().map(|m| (m.omega_k, m.eta_k)).collect()
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.inner.tail_bound
    }

    fn truncated(&self, k: usize) -> Self {
        Self { inner: self.inner.truncated(k) }
    }

    /// `Σ` of the partial-fraction expansion of `ω⁴/Φ(z)`.
    fn partial_fraction(&self, z: Complex64) -> PyResult<Complex64> {
        nonlocal::partial_fraction_eval(&self.inner, z).map_err(err)
    }

    fn spectrum_generators(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &nonlocal::spectrum_generators(&self.inner))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.real_modes.len() + self.inner.complex_modes.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ModeDecomposition(real={}, complex={}, tail_bound={:.3e})",
            self.inner.real_modes.len(),
            self.inner.complex_modes.len(),
            self.inner.tail_bound
        )
    }
}

#[pyfunction]
#[pyo3(signature = (omega, delay, pairs=16, search_radius=40.0, hbar=1.0))]
fn find_modes(py: Python<'_>, omega: f64, delay: f64, pairs: usize, search_radius: f64, hbar: f64) -> PyResult<ModeDecomposition> {
    let p = NonlocalParams::new(omega, delay, hbar).map_err(err)?;
    let inner = py.detach(|| nonlocal::find_modes(&p, pairs, search_radius)).map_err(err)?;
    Ok(ModeDecomposition { inner })
}

/// `|Φ(z)|`.
#[pyfunction]
fn characteristic_residual(z: Complex64, omega: f64, delay: f64) -> PyResult<f64> {
    let p = NonlocalParams::new(omega, delay, 1.0).map_err(err)?;
    nonlocal::characteristic_residual(z, &p).map_err(err)
}

// special functions

/// `D_ν(z)`.
#[pyfunction]
fn parabolic_cylinder_d(nu: Complex64, z: Complex64) -> PyResult<Complex64> {
    special::parabolic_cylinder_d(nu, z).map_err(err)
}

/// Physicists' Hermite polynomial.
#[pyfunction]
fn hermite(n: u32, x: f64) -> PyResult<f64> {
    special::hermite(n, x).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, x, omega, hbar=1.0))]
fn oscillator_factor(n: u32, x: f64, omega: f64, hbar: f64) -> PyResult<f64> {
    Ok(special::oscillator_factor(n, x, &params(omega, hbar)?))
}

#[pyfunction]
#[pyo3(signature = (epsilon, x, omega, branch=1, hbar=1.0))]
fn inverted_eigenfunction(epsilon: f64, x: f64, omega: f64, branch: i32, hbar: f64) -> PyResult<Complex64> {
    let b = Branch::from_sign(branch).map_err(err)?;
    special::inverted_eigenfunction(epsilon, b, x, &params(omega, hbar)?).map_err(err)
}

// propagators

#[pyfunction]
#[pyo3(signature = (x, y, t, omega, hbar=1.0))]
fn inverted_propagator(x: f64, y: f64, t: f64, omega: f64, hbar: f64) -> PyResult<Complex64> {
    propagator::inverted_propagator(x, y, t, omega, hbar).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, t, omega, hbar=1.0))]
fn harmonic_propagator(x: f64, y: f64, t: f64, omega: f64, hbar: f64) -> PyResult<Complex64> {
    propagator::harmonic_propagator(x, y, t, omega, hbar).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (x, y, t, hbar=1.0))]
fn free_propagator(x: f64, y: f64, t: f64, hbar: f64) -> PyResult<Complex64> {
    propagator::free_propagator(x, y, t, hbar).map_err(err)
}

/// N-slice Trotter kernel at `(x, y)`; `potential` is "inverted" or "harmonic".
#[pyfunction]
#[pyo3(signature = (x, y, t, omega, steps, potential="inverted", hbar=1.0))]
fn trotter_propagator(x: f64, y: f64, t: f64, omega: f64, steps: usize, potential: &str, hbar: f64) -> PyResult<Complex64> {
    let sign = match potential {
        "inverted" => PotentialSign::Inverted,
        "harmonic" => PotentialSign::Harmonic,
        other => return Err(PyValueError::new_err(format!("unknown potential {other:?}"))),
    };
    Ok(propagator::trotter_kernel(t, omega, hbar, steps, sign).map_err(err)?.eval(x, y))
}

#[pyfunction]
#[pyo3(signature = (energy, t_max, omega=1.0, taper=0.2, hbar=1.0))]
fn spectral_identity(py: Python<'_>, energy: f64, t_max: f64, omega: f64, taper: f64, hbar: f64) -> PyResult<Py<PyAny>> {
    let p = params(omega, hbar)?;
    let r = py
        .detach(|| propagator::spectral_identity(energy, t_max, Taper { fraction: taper }, &p))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (tau_grid, omega, hbar=1.0))]
fn euclidean_pitfall(py: Python<'_>, tau_grid: Vec<f64>, omega: f64, hbar: f64) -> PyResult<Py<PyAny>> {
    let r = propagator::euclidean_pitfall(&tau_grid, omega, hbar).map_err(err)?;
    to_py(py, &r)
}

// grid experiments

#[derive(Serialize)]
struct EvolveSummary {
    norms: Vec<f64>,
    total_drift: f64,
    max_step_drift: f64,
    max_boundary_mass: f64,
    contaminated: bool,
    second_moment: f64,
}

/// Cayley evolution of a Gaussian packet under the inverted (default) or
/// harmonic grid Hamiltonian.
#[pyfunction]
#[pyo3(signature = (omega, dt, steps, extent=30.0, points=2048, x0=0.5, sigma=1.0, k0=0.3, potential="inverted", hbar=1.0))]
#[allow(clippy::too_many_arguments)]
fn evolve_packet(
    py: Python<'_>,
    omega: f64,
    dt: f64,
    steps: usize,
    extent: f64,
    points: usize,
    x0: f64,
    sigma: f64,
    k0: f64,
    potential: &str,
    hbar: f64,
) -> PyResult<Py<PyAny>> {
    let g = Grid1D::new(extent, points).map_err(err)?;
    let h = match potential {
        "inverted" => lab::build_hamiltonian_inverted(g, omega, hbar),
        "harmonic" => lab::build_hamiltonian_harmonic(g, omega, hbar),
        other => return Err(PyValueError::new_err(format!("unknown potential {other:?}"))),
    }
    .map_err(err)?;
    let s = lab::gaussian_packet(g, x0, sigma, k0).map_err(err)?;
    let r = py.detach(|| lab::evolve(&s, &h.into(), dt, steps, hbar)).map_err(err)?;
    let summary = EvolveSummary {
        second_moment: r.state.second_moment(),
        norms: r.norms,
        total_drift: r.total_drift,
        max_step_drift: r.max_step_drift,
        max_boundary_mass: r.max_boundary_mass,
        contaminated: r.contaminated,
    };
    to_py(py, &summary)
}

/// Truncated `⟨n, ε′|X̂|n, ε⟩` over the cutoffs; `control_width` switches to the damped control.
#[pyfunction]
#[pyo3(signature = (epsilon_bra, epsilon_ket, cutoffs, omega=1.0, n=0, branch=1, control_width=None, hbar=1.0))]
#[allow(clippy::too_many_arguments)]
fn divergence_scan(
    py: Python<'_>,
    epsilon_bra: f64,
    epsilon_ket: f64,
    cutoffs: Vec<f64>,
    omega: f64,
    n: u32,
    branch: i32,
    control_width: Option<f64>,
    hbar: f64,
) -> PyResult<Py<PyAny>> {
    let p = params(omega, hbar)?;
    let b = Branch::from_sign(branch).map_err(err)?;
    let bra = EigenLabel { n, epsilon: epsilon_bra, branch: b };
    let ket = EigenLabel { n, epsilon: epsilon_ket, branch: b };
    let obs = control_width.map_or(ScanObservable::Position, |width| ScanObservable::DampedControl { width });
    let r = py.detach(|| lab::divergence_scan(&bra, &ket, &cutoffs, obs, &p)).map_err(err)?;
    to_py(py, &r)
}

/// Interior residual of `[X̂, Ĥ] − iħΩX̂` on a grid; `stencil` is "second" or "eighth".
#[pyfunction]
#[pyo3(signature = (omega, extent=20.0, points=1024, stencil="eighth", hbar=1.0))]
fn commutator_residual(omega: f64, extent: f64, points: usize, stencil: &str, hbar: f64) -> PyResult<f64> {
    let s = match stencil {
        "second" => Stencil::Second,
        "eighth" => Stencil::Eighth,
        other => return Err(PyValueError::new_err(format!("unknown stencil {other:?}"))),
    };
    let g = Grid1D::new(extent, points).map_err(err)?;
    Ok(lab::commutator_check(&params(omega, hbar)?, g, s).map_err(err)?.residual)
}

#[pymodule]
pub fn hdlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HdlabError", m.py().get_type::<HdlabError>())?;
    m.add_class::<ModeDecomposition>()?;
    m.add_function(wrap_pyfunction!(hamiltonian_pu, m)?)?;
    m.add_function(wrap_pyfunction!(x_observable, m)?)?;
    m.add_function(wrap_pyfunction!(decouple, m)?)?;
    m.add_function(wrap_pyfunction!(recouple, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_flow, m)?)?;
    m.add_function(wrap_pyfunction!(fit_x_growth, m)?)?;
    m.add_function(wrap_pyfunction!(find_modes, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_residual, m)?)?;
    m.add_function(wrap_pyfunction!(parabolic_cylinder_d, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(oscillator_factor, m)?)?;
    m.add_function(wrap_pyfunction!(inverted_eigenfunction, m)?)?;
    m.add_function(wrap_pyfunction!(inverted_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(free_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_identity, m)?)?;
    m.add_function(wrap_pyfunction!(euclidean_pitfall, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_packet, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_scan, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_residual, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_python_types() {
        Python::initialize();
        Python::attach(|py| {
            assert!(err(hdlab::Error::InvalidParameter("x".into())).is_instance_of::<PyValueError>(py));
            let e = err(hdlab::Error::Caustic("x".into()));
            assert!(e.is_instance_of::<HdlabError>(py));
            assert!(e.is_instance_of::<PyRuntimeError>(py));
        });
    }

    #[test]
    fn reports_become_dicts() {
        Python::initialize();
        Python::attach(|py| {
            let d = fit_x_growth(py, (0.3, -0.2, 0.5, 0.1), 1.5, 40, 1.0).unwrap();
            let rate: f64 = d.bind(py).get_item("rate").unwrap().extract().unwrap();
            assert!((rate - 1.5).abs() <= 1e-6);
        });
    }

    #[test]
    fn decouple_round_trip() {
        let s = (0.4, -1.1, 0.7, 0.2);
        let back = recouple(decouple(s, 1.3, 1.0).unwrap(), 1.3, 1.0).unwrap();
        for (a, b) in [(back.0, s.0), (back.1, s.1), (back.2, s.2), (back.3, s.3)] {
            assert!((a - b).abs() <= 1e-14);
        }
        assert!(decouple(s, -1.0, 1.0).is_err());
    }
}
