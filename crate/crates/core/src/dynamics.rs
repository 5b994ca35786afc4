//! Time evolution of ME packets: exact flows for at most quadratic potentials,
//! Taylor derivative tables at `t = 0` (Poisson and Heisenberg), averaged
//! equations of motion, quantum corrections, and trajectory propagation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{poisson_bracket, Expr, PhasePolynomial, Scalar, Symbol, WeylPolynomial};
use crate::classical::{entropy_classical, moment_classical, planck_volume};
use crate::error::{MepackError, Result};
use crate::packet::PacketMoments;
use crate::quantum::{entropy_quantum, expectation_quantum};

/// `V(q) = Σ_k V_k q^k / k!` truncated at degree `K`, with mass `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialPotential {
    pub mass: Expr,
    /// `V_0..V_K`.
    pub coefficients: Vec<Expr>,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |a, i| a * BigInt::from(i))
}

fn inverse_factorial(n: u32) -> Expr {
    Expr::constant(Scalar::real(BigRational::new(BigInt::from(1), factorial(n))))
}

fn exact(x: f64, what: &str) -> Result<Expr> {
    Scalar::from_f64(x)
        .map(Expr::constant)
        .ok_or_else(|| MepackError::Domain(format!("{what} must be finite, got {x}")))
}

impl PolynomialPotential {
    /// Fully symbolic potential with coefficients `V0..VK` and mass `m`.
    pub fn symbolic(truncation: u8) -> Self {
        PolynomialPotential {
            mass: Expr::sym(Symbol::Mass),
            coefficients: (0..=truncation).map(|k| Expr::sym(Symbol::V(k))).collect(),
        }
    }

    pub fn new(mass: Expr, coefficients: Vec<Expr>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(MepackError::Domain("a potential needs at least V0".into()));
        }
        if mass.is_zero() || mass.inv().is_none() {
            return Err(MepackError::Domain(format!("mass must be a nonzero single term, got {mass}")));
        }
        if let Some(c) = mass.as_constant() {
            if !(c.is_real() && !c.is_negative_real()) {
                return Err(MepackError::Domain(format!("mass must be positive, got {c}")));
            }
        }
        Ok(PolynomialPotential { mass, coefficients })
    }

    /// Potential with exact binary values of the given doubles.
    pub fn numeric(mass: f64, coefficients: &[f64]) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(MepackError::Domain(format!("mass must be positive, got {mass}")));
        }
        let coefficients = coefficients
            .iter()
            .enumerate()
            .map(|(k, &v)| exact(v, &format!("V{k}")))
            .collect::<Result<Vec<_>>>()?;
        PolynomialPotential::new(exact(mass, "mass")?, coefficients)
    }

    /// Harmonic potential `V(q) = stiffness q^2 / 2`.
    pub fn harmonic(mass: f64, stiffness: f64) -> Result<Self> {
        PolynomialPotential::numeric(mass, &[0.0, 0.0, stiffness])
    }

    /// The truncation degree `K`.
    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Highest `k` with a nonzero `V_k` (zero for a constant potential).
    pub fn degree(&self) -> usize {
        self.coefficients.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn coefficient(&self, k: usize) -> Expr {
        self.coefficients.get(k).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn inverse_mass(&self) -> Expr {
        self.mass.inv().expect("validated on construction")
    }

    /// `V(q)` as a phase-space polynomial.
    pub fn potential_phase(&self) -> PhasePolynomial {
        let mut v = PhasePolynomial::zero();
        for (k, c) in self.coefficients.iter().enumerate() {
            let coef = c * &inverse_factorial(k as u32);
            v = &v + &PhasePolynomial::monomial(k as u32, 0, coef);
        }
        v
    }

    pub fn hamiltonian_phase(&self) -> PhasePolynomial {
        let kinetic = PhasePolynomial::p()
            .pow(2)
            .scale(&(&Expr::ratio(1, 2) * &self.inverse_mass()));
        &kinetic + &self.potential_phase()
    }

    /// `H = p^2/2m + V(q)`; no ordering ambiguity since `V` depends on `q` only.
    pub fn hamiltonian_weyl(&self) -> WeylPolynomial {
        self.hamiltonian_phase().to_weyl_standard()
    }

    /// Numeric mass and coefficients; fails when any of them is symbolic.
    pub fn numeric_values(&self) -> Result<(f64, Vec<f64>)> {
        let empty = crate::algebra::Bindings::new();
        let mass = self.mass.eval_real(&empty)?;
        let coefs = self
            .coefficients
            .iter()
            .map(|c| c.eval_real(&empty))
            .collect::<Result<Vec<_>>>()?;
        Ok((mass, coefs))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowBranch {
    /// `V_2 > 0`: bounded trigonometric flow.
    Oscillatory,
    /// `V_2 = 0`: free particle or uniform force.
    Uniform,
    /// `V_2 < 0`: unbounded hyperbolic flow.
    Hyperbolic,
}

/// `q(t) = f0 + q f1 + p f2`, `p(t) = g0 + q g1 + p g2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticFlow {
    pub f: [f64; 3],
    pub g: [f64; 3],
    pub branch: FlowBranch,
}

impl QuadraticFlow {
    pub fn is_bounded(&self) -> bool {
        self.branch == FlowBranch::Oscillatory
    }
}

fn require_quadratic(potential: &PolynomialPotential) -> Result<(f64, f64, f64)> {
    if potential.degree() > 2 {
        return Err(MepackError::Domain(format!(
            "exact flow needs a potential of degree <= 2, got degree {}; use the Taylor derivative engine",
            potential.degree()
        )));
    }
    let (m, v) = potential.numeric_values()?;
    let at = |k: usize| v.get(k).copied().unwrap_or(0.0);
    Ok((m, at(1), at(2)))
}

pub fn quadratic_flow(potential: &PolynomialPotential, t: f64) -> Result<QuadraticFlow> {
    let (m, v1, v2) = require_quadratic(potential)?;
    if v2 == 0.0 {
        return Ok(QuadraticFlow {
            f: [-v1 / (2.0 * m) * t * t, 1.0, t / m],
            g: [-v1 * t, 0.0, 1.0],
            branch: FlowBranch::Uniform,
        });
    }
    let xi = (m * v2.abs()).sqrt();
    let omega = (v2.abs() / m).sqrt();
    let ratio = v1 / v2;
    let x = omega * t;
    Ok(if v2 > 0.0 {
        let (s, c) = x.sin_cos();
        QuadraticFlow {
            f: [-ratio * (1.0 - c), c, s / xi],
            g: [-xi * ratio * s, -xi * s, c],
            branch: FlowBranch::Oscillatory,
        }
    } else {
        let (s, c) = (x.sinh(), x.cosh());
        QuadraticFlow {
            f: [-ratio * (1.0 - c), c, s / xi],
            g: [xi * ratio * s, xi * s, c],
            branch: FlowBranch::Hyperbolic,
        }
    })
}

/// Averages and widths after time `t` under an at most quadratic potential.
/// The same formulas hold for classical and quantum packets.
pub fn evolve_quadratic(packet: &PacketMoments, potential: &PolynomialPotential, t: f64) -> Result<PacketMoments> {
    packet.validate()?;
    let QuadraticFlow { f, g, .. } = quadratic_flow(potential, t)?;
    let (dq2, dp2) = (packet.dq * packet.dq, packet.dp * packet.dp);
    Ok(PacketMoments {
        q: f[0] + packet.q * f[1] + packet.p * f[2],
        p: g[0] + packet.q * g[1] + packet.p * g[2],
        dq: (f[1] * f[1] * dq2 + f[2] * f[2] * dp2).sqrt(),
        dp: (g[1] * g[1] * dq2 + g[2] * g[2] * dp2).sqrt(),
        hbar: packet.hbar,
    })
}

/// Whether an engine or trajectory follows classical or quantum packets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsKind {
    Classical,
    #[default]
    Quantum,
}

/// `d^n X/dt^n` at `t = 0` for `n = 0..=order` under Hamilton's equations.
pub fn time_derivatives_classical(x: &PhasePolynomial, potential: &PolynomialPotential, order: usize) -> Vec<PhasePolynomial> {
    let h = potential.hamiltonian_phase();
    let mut out = vec![x.clone()];
    for n in 0..order {
        out.push(poisson_bracket(&out[n], &h));
    }
    out
}

/// `d^n X/dt^n` at `t = 0` for `n = 0..=order` under `dX/dt = [X, H]/(i hbar)`.
pub fn time_derivatives_quantum(x: &WeylPolynomial, potential: &PolynomialPotential, order: usize) -> Vec<WeylPolynomial> {
    let h = potential.hamiltonian_weyl();
    // 1/(i hbar) = -i/hbar
    let factor = &Expr::constant(-Scalar::i()) * &Expr::pow_sym(Symbol::Hbar, -1);
    let mut out = vec![x.clone()];
    for n in 0..order {
        let next = out[n].commutator(&h).scale(&factor);
        out.push(next);
    }
    out
}

/// Time derivatives of `q` and `p` at `t = 0`; index `n` holds the `n`-th
/// derivative, index 0 the variable itself.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTable<T> {
    pub position: Vec<T>,
    pub momentum: Vec<T>,
    /// Degree `K` at which the potential was truncated.
    pub truncation: usize,
}

pub type ClassicalTable = DerivativeTable<PhasePolynomial>;
pub type QuantumTable = DerivativeTable<WeylPolynomial>;

impl<T> DerivativeTable<T> {
    pub fn order(&self) -> usize {
        self.momentum.len() - 1
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(MepackError::Domain("derivative order must be at least 1".into()));
    }
    Ok(())
}

/// Classical table; position entries use `d^n q/dt^n = (1/m) d^(n-1) p/dt^(n-1)`.
pub fn derivatives_classical(potential: &PolynomialPotential, order: usize) -> Result<ClassicalTable> {
    check_order(order)?;
    let momentum = time_derivatives_classical(&PhasePolynomial::p(), potential, order);
    let inv_m = potential.inverse_mass();
    let position = std::iter::once(PhasePolynomial::q())
        .chain(momentum[..order].iter().map(|d| d.scale(&inv_m)))
        .collect();
    Ok(DerivativeTable {
        position,
        momentum,
        truncation: potential.truncation(),
    })
}

pub fn derivatives_quantum(potential: &PolynomialPotential, order: usize) -> Result<QuantumTable> {
    check_order(order)?;
    let momentum = time_derivatives_quantum(&WeylPolynomial::p(), potential, order);
    let inv_m = potential.inverse_mass();
    let position = std::iter::once(WeylPolynomial::q())
        .chain(momentum[..order].iter().map(|d| d.scale(&inv_m)))
        .collect();
    Ok(DerivativeTable {
        position,
        momentum,
        truncation: potential.truncation(),
    })
}

/// Sets `hbar = 0` in every coefficient and forgets the ordering.
pub fn classical_shadow(x: &WeylPolynomial) -> Result<PhasePolynomial> {
    let mut failed = None;
    let stripped = x.map_coefficients(|c| match c.substitute(Symbol::Hbar, &Expr::zero()) {
        Ok(v) => v,
        Err(e) => {
            failed = Some(e);
            Expr::zero()
        }
    });
    match failed {
        Some(e) => Err(e),
        None => Ok(stripped.to_phase()),
    }
}

/// `d^n Q/dt^n` and `d^n P/dt^n` as expressions in the packet parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AveragedDerivatives {
    pub position: Vec<Expr>,
    pub momentum: Vec<Expr>,
}

/// Types whose time derivatives can be averaged over the matching ME packet.
pub trait PacketAverage {
    fn packet_average(&self) -> Result<Expr>;
}

impl PacketAverage for PhasePolynomial {
    fn packet_average(&self) -> Result<Expr> {
        Ok(moment_classical(self))
    }
}

impl PacketAverage for WeylPolynomial {
    fn packet_average(&self) -> Result<Expr> {
        expectation_quantum(self)
    }
}

/// Averages each table entry over the packet of the table's kind. Quantum
/// results have `hbar` eliminated through `hbar = 2 dQ dP / nu`.
pub fn averaged_derivatives<T: PacketAverage + Sync>(table: &DerivativeTable<T>) -> Result<AveragedDerivatives> {
    let average = |xs: &[T]| xs.par_iter().map(T::packet_average).collect::<Result<Vec<_>>>();
    Ok(AveragedDerivatives {
        position: average(&table.position)?,
        momentum: average(&table.momentum)?,
    })
}

/// Quantum minus classical `d^n P/dt^n`, grouped by powers of `1/nu`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumCorrection {
    pub order: usize,
    /// Coefficient of `nu^(-j)` keyed by `j`.
    pub by_inverse_nu: BTreeMap<u32, Expr>,
}

impl QuantumCorrection {
    pub fn is_zero(&self) -> bool {
        self.by_inverse_nu.is_empty()
    }

    pub fn coefficient(&self, inverse_power: u32) -> Expr {
        self.by_inverse_nu.get(&inverse_power).cloned().unwrap_or_else(Expr::zero)
    }

    /// Lowest power of `1/nu` present.
    pub fn leading_power(&self) -> Option<u32> {
        self.by_inverse_nu.keys().next().copied()
    }

    pub fn to_expr(&self) -> Expr {
        self.by_inverse_nu
            .iter()
            .map(|(&j, c)| c * &Expr::pow_sym(Symbol::Nu, -(j as i32)))
            .sum()
    }

    /// Numeric value for a packet (and any numeric potential already baked in).
    pub fn eval(&self, packet: &PacketMoments) -> Result<f64> {
        self.to_expr().eval_real(&packet.bindings())
    }
}

impl fmt::Display for QuantumCorrection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (j, c)) in self.by_inverse_nu.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})/nu^{j}")?;
        }
        Ok(())
    }
}

/// `quantum - classical` averaged `d^n P/dt^n`. Fails if the difference has a
/// positive power of `nu`, a `1/nu` term, or an imaginary part.
pub fn quantum_correction(potential: &PolynomialPotential, order: usize) -> Result<QuantumCorrection> {
    check_order(order)?;
    let quantum = time_derivatives_quantum(&WeylPolynomial::p(), potential, order)
        .pop()
        .expect("order >= 1")
        .packet_average()?;
    let classical = time_derivatives_classical(&PhasePolynomial::p(), potential, order)
        .pop()
        .expect("order >= 1")
        .packet_average()?;
    let diff = &quantum - &classical;
    if !diff.is_real() {
        return Err(MepackError::Consistency(format!(
            "imaginary quantum correction at order {order}: {}",
            diff.imag_part()
        )));
    }
    let mut by_inverse_nu = BTreeMap::new();
    for (exp, coef) in diff.collect(Symbol::Nu) {
        if exp > 0 || exp == -1 {
            return Err(MepackError::Consistency(format!(
                "quantum correction at order {order} has a nu^{exp} term: {coef}"
            )));
        }
        if exp == 0 {
            return Err(MepackError::Consistency(format!(
                "quantum correction at order {order} survives the classical limit: {coef}"
            )));
        }
        by_inverse_nu.insert((-exp) as u32, coef);
    }
    Ok(QuantumCorrection { order, by_inverse_nu })
}

/// How a trajectory was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    QuadraticExact,
    TaylorOrigin,
    RepacketizedStepping,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::QuadraticExact => "quadratic-exact",
            Provenance::TaylorOrigin => "taylor-origin",
            Provenance::RepacketizedStepping => "repacketized-stepping",
        })
    }
}

/// Approximate propagation schemes for general potentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationMode {
    TaylorOrigin,
    RepacketizedStepping,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub packet: PacketMoments,
    pub nu: f64,
    pub entropy: f64,
    /// Largest magnitude among the last retained Taylor terms; absent for exact flows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remainder: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub provenance: Provenance,
    pub kind: DynamicsKind,
    pub points: Vec<TrajectoryPoint>,
}

fn check_grid(grid: &[f64], from_origin: bool) -> Result<()> {
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(MepackError::Domain("time grid contains a non-finite value".into()));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(MepackError::Domain(format!(
            "time grid must be strictly increasing, found {} followed by {}",
            w[0], w[1]
        )));
    }
    if from_origin {
        if let Some(&t0) = grid.first() {
            if t0 != 0.0 {
                return Err(MepackError::Domain(format!("time grid must start at 0, starts at {t0}")));
            }
        }
    }
    Ok(())
}

fn point(packet: PacketMoments, t: f64, kind: DynamicsKind, remainder: Option<f64>) -> Result<TrajectoryPoint> {
    let nu = packet.nu();
    let entropy = match kind {
        DynamicsKind::Quantum => entropy_quantum(nu)?,
        DynamicsKind::Classical => entropy_classical(&packet, planck_volume(packet.hbar_or_default()))?,
    };
    Ok(TrajectoryPoint {
        t,
        packet,
        nu,
        entropy,
        remainder,
    })
}

/// Exact trajectory under an at most quadratic potential.
pub fn trajectory_quadratic(
    packet: &PacketMoments,
    potential: &PolynomialPotential,
    grid: &[f64],
    kind: DynamicsKind,
) -> Result<Trajectory> {
    check_grid(grid, false)?;
    if kind == DynamicsKind::Quantum {
        packet.require_quantum()?;
    }
    let points = grid
        .par_iter()
        .map(|&t| point(evolve_quadratic(packet, potential, t)?, t, kind, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        provenance: Provenance::QuadraticExact,
        kind,
        points,
    })
}

/// Averaged Taylor coefficients of `q, p, q^2, p^2` as functions of the packet.
struct MomentSeries {
    /// `series[j][n]`: `n`-th derivative of observable `j` at `t = 0`.
    series: [Vec<Expr>; 4],
}

impl MomentSeries {
    fn build(potential: &PolynomialPotential, order: usize, kind: DynamicsKind) -> Result<Self> {
        let series: Vec<Vec<Expr>> = match kind {
            DynamicsKind::Classical => {
                let obs = [
                    PhasePolynomial::q(),
                    PhasePolynomial::p(),
                    PhasePolynomial::q().pow(2),
                    PhasePolynomial::p().pow(2),
                ];
                obs.par_iter()
                    .map(|x| {
                        let ds = time_derivatives_classical(x, potential, order);
                        Ok(ds.iter().map(moment_classical).collect())
                    })
                    .collect::<Result<_>>()?
            }
            DynamicsKind::Quantum => {
                let obs = [
                    WeylPolynomial::q(),
                    WeylPolynomial::p(),
                    WeylPolynomial::q().pow(2),
                    WeylPolynomial::p().pow(2),
                ];
                obs.par_iter()
                    .map(|x| {
                        time_derivatives_quantum(x, potential, order)
                            .iter()
                            .map(expectation_quantum)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?
            }
        };
        let series: [Vec<Expr>; 4] = series.try_into().expect("four observables");
        Ok(MomentSeries { series })
    }

    /// Taylor-sums the moments from `packet` over time `dt`.
    fn advance(&self, packet: &PacketMoments, dt: f64) -> Result<(PacketMoments, f64)> {
        let bindings = packet.bindings();
        let mut values = [0.0; 4];
        let mut remainder: f64 = 0.0;
        for (j, derivs) in self.series.iter().enumerate() {
            let mut term_scale = 1.0;
            let mut last = 0.0;
            for (n, d) in derivs.iter().enumerate() {
                if n > 0 {
                    term_scale *= dt / n as f64;
                }
                last = d.eval_real(&bindings)? * term_scale;
                values[j] += last;
            }
            remainder = remainder.max(last.abs());
        }
        let [q, p, q2, p2] = values;
        let (vq, vp) = (q2 - q * q, p2 - p * p);
        if !(vq > 0.0 && vp > 0.0) {
            return Err(MepackError::TaylorBreakdown {
                t: dt,
                variance: vq.min(vp),
            });
        }
        let next = PacketMoments {
            q,
            p,
            dq: vq.sqrt(),
            dp: vp.sqrt(),
            hbar: packet.hbar,
        };
        Ok((next, remainder))
    }
}

/// Approximate trajectory from `t = 0` derivative tables of order `order`.
///
/// `TaylorOrigin` sums one Taylor polynomial around `t = 0`.
/// `RepacketizedStepping` re-expands around each grid point, replacing the
/// evolved state by the ME packet with the current averages and widths; the
/// growing `q`–`p` correlation is dropped at every step.
pub fn propagate(
    packet: &PacketMoments,
    potential: &PolynomialPotential,
    grid: &[f64],
    order: usize,
    mode: PropagationMode,
    kind: DynamicsKind,
) -> Result<Trajectory> {
    if order < 2 {
        return Err(MepackError::Domain(format!(
            "propagation order must be at least 2, got {order}"
        )));
    }
    check_grid(grid, true)?;
    match kind {
        DynamicsKind::Quantum => {
            packet.require_quantum()?;
        }
        DynamicsKind::Classical => packet.validate()?,
    }
    potential.numeric_values()?;
    let series = MomentSeries::build(potential, order, kind)?;
    let points = match mode {
        PropagationMode::TaylorOrigin => grid
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    return point(*packet, t, kind, Some(0.0));
                }
                let (next, rem) = series.advance(packet, t)?;
                point(next, t, kind, Some(rem))
            })
            .collect::<Result<Vec<_>>>()?,
        PropagationMode::RepacketizedStepping => {
            let mut out = Vec::with_capacity(grid.len());
            let mut current = *packet;
            let mut prev_t = 0.0;
            for &t in grid {
                let mut rem = 0.0;
                if t > prev_t {
                    let (next, r) = series.advance(&current, t - prev_t)?;
                    current = next;
                    rem = r;
                }
                out.push(point(current, t, kind, Some(rem))?);
                prev_t = t;
            }
            out
        }
    };
    Ok(Trajectory {
        provenance: match mode {
            PropagationMode::TaylorOrigin => Provenance::TaylorOrigin,
            PropagationMode::RepacketizedStepping => Provenance::RepacketizedStepping,
        },
        kind,
        points,
    })
}
