//! Python bindings for `mepack`.
//!
//! Exact results come back as strings in the library's expression syntax;
//! numeric results as floats or complex numbers.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mepack::algebra::{parse_expr, parse_phase, parse_weyl, parse_words, Expr};
use mepack::classical::{entropy_classical, moment_classical, moment_classical_numeric, planck_volume};
use mepack::dynamics::{
    averaged_derivatives, derivatives_classical, derivatives_quantum, evolve_quadratic, propagate, quantum_correction,
    trajectory_quadratic, DynamicsKind, PolynomialPotential, PropagationMode, Trajectory,
};
use mepack::oracle::{fock_evolve, fock_expectation, FockState};
use mepack::quantum::{entropy_quantum, expectation_quantum, fock_weight, hbar_form, solve_multipliers_quantum};
use mepack::{MepackError, PacketMoments};

create_exception!(mepack, NumericalError, PyException, "A numerical resource limit was hit.");
create_exception!(
    mepack,
    ConsistencyError,
    PyException,
    "Two independent computations disagreed."
);

fn to_py(err: MepackError) -> PyErr {
    let text = err.to_string();
    match err {
        MepackError::Domain(_)
        | MepackError::PureStateLimit
        | MepackError::Parse { .. }
        | MepackError::UnboundSymbol(_)
        | MepackError::Config(_) => PyValueError::new_err(text),
        MepackError::CutoffInsufficient { .. } | MepackError::HorizonExceeded { .. } | MepackError::TaylorBreakdown { .. } => {
            NumericalError::new_err(text)
        }
        MepackError::Consistency(_) | MepackError::Io { .. } => ConsistencyError::new_err(text),
    }
}

trait OrPyErr<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPyErr<T> for mepack::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Position and momentum averages and widths, with an optional numeric `hbar`.
#[pyclass(name = "PacketMoments", module = "mepack", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPacket(PacketMoments);

#[pymethods]
impl PyPacket {
    #[new]
    #[pyo3(signature = (q, p, dq, dp, hbar = None))]
    fn new(q: f64, p: f64, dq: f64, dp: f64, hbar: Option<f64>) -> PyResult<Self> {
        let packet = PacketMoments::new(q, p, dq, dp).py()?;
        Ok(PyPacket(match hbar {
            Some(h) => packet.with_hbar(h).py()?,
            None => packet,
        }))
    }

    #[getter]
    fn q(&self) -> f64 {
        self.0.q
    }
    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }
    #[getter]
    fn dq(&self) -> f64 {
        self.0.dq
    }
    #[getter]
    fn dp(&self) -> f64 {
        self.0.dp
    }
    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar_or_default()
    }

    /// `2 dQ dP / hbar`.
    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu()
    }

    /// Von Neumann entropy of the quantum packet.
    fn entropy(&self) -> PyResult<f64> {
        entropy_quantum(self.0.require_quantum().py()?).py()
    }

    /// Gibbs entropy of the classical packet against the reference volume (default `2 pi hbar`).
    #[pyo3(signature = (volume = None))]
    fn entropy_classical(&self, volume: Option<f64>) -> PyResult<f64> {
        entropy_classical(&self.0, volume.unwrap_or_else(|| planck_volume(self.0.hbar_or_default()))).py()
    }

    /// Lagrange multipliers `(lam1, lam2, lam3, lam4)` of the quantum packet.
    fn multipliers(&self) -> PyResult<(f64, f64, f64, f64)> {
        let [a, b, c, d] = solve_multipliers_quantum(&self.0).py()?.lambda;
        Ok((a, b, c, d))
    }

    fn __repr__(&self) -> String {
        let m = &self.0;
        format!(
            "PacketMoments(q={}, p={}, dq={}, dp={}, hbar={})",
            m.q,
            m.p,
            m.dq,
            m.dp,
            m.hbar_or_default()
        )
    }
}

fn coefficient(value: &Bound<'_, PyAny>) -> PyResult<Expr> {
    if let Ok(text) = value.extract::<String>() {
        return parse_expr(&text).py();
    }
    let x: f64 = value.extract()?;
    mepack::algebra::Scalar::from_f64(x)
        .map(Expr::constant)
        .ok_or_else(|| PyValueError::new_err(format!("coefficient must be finite, got {x}")))
}

/// `V(q) = sum_k V_k q^k / k!` with mass `m`. Coefficients may be numbers or expression strings.
#[pyclass(name = "Potential", module = "mepack", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPotential(PolynomialPotential);

#[pymethods]
impl PyPotential {
    #[new]
    #[pyo3(signature = (coefficients, mass = None))]
    fn new(coefficients: Vec<Bound<'_, PyAny>>, mass: Option<Bound<'_, PyAny>>) -> PyResult<Self> {
        let coefs = coefficients.iter().map(coefficient).collect::<PyResult<Vec<_>>>()?;
        let mass = match mass {
            Some(m) => coefficient(&m)?,
            None => Expr::one(),
        };
        Ok(PyPotential(PolynomialPotential::new(mass, coefs).py()?))
    }

    /// Fully symbolic potential truncated at degree `k`.
    #[staticmethod]
    fn symbolic(k: u8) -> Self {
        PyPotential(PolynomialPotential::symbolic(k))
    }

    /// `stiffness q^2 / 2`.
    #[staticmethod]
    #[pyo3(signature = (stiffness, mass = 1.0))]
    fn harmonic(stiffness: f64, mass: f64) -> PyResult<Self> {
        Ok(PyPotential(PolynomialPotential::harmonic(mass, stiffness).py()?))
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    /// The Hamiltonian `p^2/2m + V(q)` as a phase-space polynomial.
    fn hamiltonian(&self) -> String {
        self.0.hamiltonian_phase().to_string()
    }

    fn __repr__(&self) -> String {
        format!("Potential(H = {})", self.0.hamiltonian_phase())
    }
}

/// Exact quantum average of an operator polynomial, in powers of `1/nu`
/// (or of `hbar` with `hbar_form=True`).
#[pyfunction]
#[pyo3(signature = (expr, hbar_form = false))]
fn expectation(expr: &str, hbar_form: bool) -> PyResult<String> {
    let avg = expectation_quantum(&parse_weyl(expr).py()?).py()?;
    Ok(if hbar_form { self::hbar_form(&avg) } else { avg }.to_string())
}

/// Numeric quantum average of an operator polynomial for a packet with numeric `hbar`.
#[pyfunction]
fn expectation_numeric(packet: &PyPacket, expr: &str) -> PyResult<Complex64> {
    mepack::quantum::expectation_quantum_numeric(&packet.0, &parse_weyl(expr).py()?).py()
}

/// Exact classical Gaussian average of a phase-space polynomial.
#[pyfunction]
fn moment(expr: &str) -> PyResult<String> {
    Ok(moment_classical(&parse_phase(expr).py()?).to_string())
}

#[pyfunction]
fn moment_numeric(packet: &PyPacket, expr: &str) -> PyResult<f64> {
    moment_classical_numeric(&packet.0, &parse_phase(expr).py()?).py()
}

/// Quantum minus classical `d^n P/dt^n` as `{j: coefficient of nu^-j}`.
#[pyfunction]
fn corrections(potential: &PyPotential, order: usize) -> PyResult<BTreeMap<u32, String>> {
    let c = quantum_correction(&potential.0, order).py()?;
    Ok(c.by_inverse_nu.iter().map(|(&j, e)| (j, e.to_string())).collect())
}

/// Averaged `d^n Q/dt^n` and `d^n P/dt^n` for `n = 0..order`.
#[pyfunction]
#[pyo3(signature = (potential, order, quantum = true))]
fn derivatives<'py>(py: Python<'py>, potential: &PyPotential, order: usize, quantum: bool) -> PyResult<Bound<'py, PyDict>> {
    let avg = if quantum {
        averaged_derivatives(&derivatives_quantum(&potential.0, order).py()?)
    } else {
        averaged_derivatives(&derivatives_classical(&potential.0, order).py()?)
    }
    .py()?;
    let out = PyDict::new(py);
    let text = |xs: &[Expr]| xs.iter().map(Expr::to_string).collect::<Vec<_>>();
    out.set_item("Q", text(&avg.position))?;
    out.set_item("P", text(&avg.momentum))?;
    Ok(out)
}

/// Exact evolution of a packet under an at most quadratic potential.
#[pyfunction]
fn evolve_quadratic_packet(packet: &PyPacket, potential: &PyPotential, t: f64) -> PyResult<PyPacket> {
    Ok(PyPacket(evolve_quadratic(&packet.0, &potential.0, t).py()?))
}

fn rows<'py>(py: Python<'py>, traj: Trajectory) -> PyResult<Vec<Bound<'py, PyDict>>> {
    traj.points
        .iter()
        .map(|pt| {
            let d = PyDict::new(py);
            d.set_item("t", pt.t)?;
            d.set_item("Q", pt.packet.q)?;
            d.set_item("P", pt.packet.p)?;
            d.set_item("dQ", pt.packet.dq)?;
            d.set_item("dP", pt.packet.dp)?;
            d.set_item("nu", pt.nu)?;
            d.set_item("S", pt.entropy)?;
            d.set_item("provenance", traj.provenance.to_string())?;
            Ok(d)
        })
        .collect()
}

/// Trajectory on a time grid. Quadratic potentials evolve exactly; others
/// need `order` and use Taylor propagation (`"taylor-origin"` or
/// `"repacketized-stepping"`).
#[pyfunction]
#[pyo3(signature = (packet, potential, grid, quantum = true, order = None, propagation = "taylor-origin"))]
fn trajectory<'py>(
    py: Python<'py>,
    packet: &PyPacket,
    potential: &PyPotential,
    grid: Vec<f64>,
    quantum: bool,
    order: Option<usize>,
    propagation: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let kind = if quantum {
        DynamicsKind::Quantum
    } else {
        DynamicsKind::Classical
    };
    let traj = match order {
        None => trajectory_quadratic(&packet.0, &potential.0, &grid, kind).py()?,
        Some(order) => {
            let mode = match propagation {
                "taylor-origin" => PropagationMode::TaylorOrigin,
                "repacketized-stepping" => PropagationMode::RepacketizedStepping,
                other => return Err(PyValueError::new_err(format!("unknown propagation `{other}`"))),
            };
            propagate(&packet.0, &potential.0, &grid, order, mode, kind).py()?
        }
    };
    rows(py, traj)
}

#[pyfunction]
#[pyo3(name = "entropy_quantum")]
fn entropy_of_nu(nu: f64) -> PyResult<f64> {
    entropy_quantum(nu).py()
}

#[pyfunction]
#[pyo3(name = "fock_weight")]
fn fock_weight_of(nu: f64, k: u64) -> PyResult<f64> {
    fock_weight(nu, k).py()
}

fn fock_state(packet: &PyPacket, words: &mepack::algebra::WordPolynomial, cutoff: Option<usize>) -> PyResult<FockState> {
    let degree = words.to_weyl().py()?.degree().unwrap_or(0) as usize;
    match cutoff {
        Some(n) => FockState::with_cutoff(&packet.0, n, degree),
        None => FockState::new(&packet.0, degree),
    }
    .py()
}

/// Average of an operator word polynomial in a truncated number basis.
#[pyfunction]
#[pyo3(signature = (packet, expr, cutoff = None))]
fn fock_expectation_numeric(packet: &PyPacket, expr: &str, cutoff: Option<usize>) -> PyResult<Complex64> {
    let words = parse_words(expr).py()?;
    let state = fock_state(packet, &words, cutoff)?;
    fock_expectation(&state, &words).py()
}

/// Averages and widths after evolving the number-basis density matrix for time `t`.
#[pyfunction]
#[pyo3(signature = (packet, potential, t, cutoff = None))]
fn fock_evolve_packet(packet: &PyPacket, potential: &PyPotential, t: f64, cutoff: Option<usize>) -> PyResult<PyPacket> {
    let degree = potential.0.degree().max(2);
    let state = match cutoff {
        Some(n) => FockState::with_cutoff(&packet.0, n, degree),
        None => FockState::new(&packet.0, degree),
    }
    .py()?;
    Ok(PyPacket(fock_evolve(&state, &potential.0, t).py()?.moments()))
}

#[pymodule]
#[pyo3(name = "mepack")]
fn mepack_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPacket>()?;
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(moment, m)?)?;
    m.add_function(wrap_pyfunction!(moment_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(corrections, m)?)?;
    m.add_function(wrap_pyfunction!(derivatives, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_quadratic_packet, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_of_nu, m)?)?;
    m.add_function(wrap_pyfunction!(fock_weight_of, m)?)?;
    m.add_function(wrap_pyfunction!(fock_expectation_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(fock_evolve_packet, m)?)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("ConsistencyError", m.py().get_type::<ConsistencyError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
