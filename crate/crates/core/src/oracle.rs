//! Floating-point oracles independent of the symbolic engine.
//!
//! Quantum quantities come from dense matrices on a truncated number basis
//! adapted to the packet; operator words are multiplied in written order, so
//! no normal ordering is involved. Classical moments come from Gauss–Hermite
//! quadrature, with a seeded Monte-Carlo estimator as a fallback.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{OperatorLetter, PhasePolynomial, WeylPolynomial, WordPolynomial};
use crate::dynamics::PolynomialPotential;
use crate::error::{MepackError, Result};
use crate::packet::PacketMoments;
use crate::quantum::FockWeights;

/// Largest neglected Fock weight accepted by the cutoff policy.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Largest population allowed in the top band after evolution.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;

type CMatrix = DMatrix<Complex64>;

/// Extra basis states kept above the tail-resolved dimension for operators of degree `degree`.
pub fn degree_margin(degree: usize) -> usize {
    (2 * degree).max(8)
}

/// Smallest basis dimension resolving the tail plus the degree margin.
pub fn policy_cutoff(nu: f64, degree: usize) -> Result<usize> {
    let weights = FockWeights::new(nu)?;
    Ok(weights.states_for_tail(TAIL_TOLERANCE) + degree_margin(degree))
}

/// Truncated number-basis representation of a packet's state and its `q`, `p`.
#[derive(Clone, Debug)]
pub struct FockState {
    pub packet: PacketMoments,
    pub cutoff: usize,
    pub margin: usize,
    pub q: CMatrix,
    pub p: CMatrix,
    pub a: CMatrix,
    pub a_dag: CMatrix,
    pub rho: CMatrix,
}

impl FockState {
    /// State at the policy cutoff for operators up to `degree`.
    pub fn new(packet: &PacketMoments, degree: usize) -> Result<Self> {
        let nu = packet.require_quantum()?;
        Self::with_cutoff(packet, policy_cutoff(nu, degree)?, degree)
    }

    /// State on `cutoff` basis vectors; fails when the tail below the degree
    /// margin is not resolved.
    pub fn with_cutoff(packet: &PacketMoments, cutoff: usize, degree: usize) -> Result<Self> {
        let nu = packet.require_quantum()?;
        let weights = FockWeights::new(nu)?;
        let margin = degree_margin(degree);
        let resolved = cutoff.saturating_sub(margin);
        let tail = weights.tail_from(resolved);
        if resolved == 0 || tail >= TAIL_TOLERANCE {
            return Err(MepackError::CutoffInsufficient {
                cutoff,
                tail,
                tolerance: TAIL_TOLERANCE,
            });
        }
        let mut a = CMatrix::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        let a_dag = a.adjoint();
        let id = CMatrix::identity(cutoff, cutoff);
        let s = 1.0 / nu.sqrt();
        let q = &id * Complex64::from(packet.q) + (&a + &a_dag) * Complex64::from(packet.dq * s);
        let p = &id * Complex64::from(packet.p) + (&a - &a_dag) * Complex64::new(0.0, -packet.dp * s);
        let diag = DVector::from_iterator(cutoff, (0..cutoff).map(|k| Complex64::from(weights.weight(k as u64))));
        Ok(FockState {
            packet: *packet,
            cutoff,
            margin,
            q,
            p,
            a,
            a_dag,
            rho: CMatrix::from_diagonal(&diag),
        })
    }

    pub fn hbar(&self) -> f64 {
        self.packet.hbar_or_default()
    }

    fn letter(&self, l: OperatorLetter) -> &CMatrix {
        match l {
            OperatorLetter::Q => &self.q,
            OperatorLetter::P => &self.p,
            OperatorLetter::Ad => &self.a_dag,
            OperatorLetter::A => &self.a,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    /// `1 - Tr rho`.
    pub fn trace_deficit(&self) -> f64 {
        1.0 - self.trace().re
    }

    /// `Tr(rho M)`.
    pub fn expect_matrix(&self, m: &CMatrix) -> Complex64 {
        (&self.rho * m).trace()
    }

    /// `-Tr rho ln rho` from the eigenvalues of `rho`.
    pub fn entropy(&self) -> f64 {
        let eig = self.rho.clone().symmetric_eigen();
        eig.eigenvalues.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
    }

    /// Averages and widths of `q` and `p` in this state.
    pub fn moments(&self) -> PacketMoments {
        let q = self.expect_matrix(&self.q).re;
        let p = self.expect_matrix(&self.p).re;
        let q2 = self.expect_matrix(&(&self.q * &self.q)).re;
        let p2 = self.expect_matrix(&(&self.p * &self.p)).re;
        PacketMoments {
            q,
            p,
            dq: (q2 - q * q).max(0.0).sqrt(),
            dp: (p2 - p * p).max(0.0).sqrt(),
            hbar: self.packet.hbar,
        }
    }

    /// Largest entry of `[q, p] - i hbar` outside the top two rows and columns.
    pub fn commutator_defect(&self) -> f64 {
        let c = &self.q * &self.p - &self.p * &self.q;
        let n = self.cutoff.saturating_sub(2);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j {
                    Complex64::new(0.0, self.hbar())
                } else {
                    Complex64::from(0.0)
                };
                worst = worst.max((c[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Population of the top `margin` basis states.
    pub fn top_band_population(&self) -> f64 {
        (self.cutoff - self.margin..self.cutoff).map(|k| self.rho[(k, k)].re).sum()
    }
}

/// `Tr(rho X)` with every word multiplied out in written order.
pub fn fock_expectation(state: &FockState, x: &WordPolynomial) -> Result<Complex64> {
    let bindings = state.packet.bindings();
    let mut total = Complex64::from(0.0);
    for (word, coef) in x.terms() {
        let c = coef.eval(&bindings)?;
        let mut m = state.rho.clone();
        for &l in word {
            m = &m * state.letter(l);
        }
        total += c * m.trace();
    }
    Ok(total)
}

/// `Tr(rho X)` for a normal-form Weyl polynomial, each term as the matrix product `q^a p^b`.
pub fn fock_expectation_weyl(state: &FockState, x: &WeylPolynomial) -> Result<Complex64> {
    let bindings = state.packet.bindings();
    let mut total = Complex64::from(0.0);
    for ((a, b), coef) in x.terms() {
        let c = coef.eval(&bindings)?;
        let mut m = state.rho.clone();
        for _ in 0..a {
            m = &m * &state.q;
        }
        for _ in 0..b {
            m = &m * &state.p;
        }
        total += c * m.trace();
    }
    Ok(total)
}

/// `H = p^2/2m + Σ V_k q^k/k!` on the truncated basis.
pub fn hamiltonian_matrix(state: &FockState, potential: &PolynomialPotential) -> Result<CMatrix> {
    let (mass, coefs) = potential.numeric_values()?;
    let n = state.cutoff;
    let mut h = (&state.p * &state.p) * Complex64::from(0.5 / mass);
    let mut power = CMatrix::identity(n, n);
    let mut factorial = 1.0;
    for (k, &v) in coefs.iter().enumerate() {
        if k > 0 {
            power = &power * &state.q;
            factorial *= k as f64;
        }
        if v != 0.0 {
            h += &power * Complex64::from(v / factorial);
        }
    }
    Ok(h)
}

/// `rho(t) = U rho U†` with `U = exp(-i H t / hbar)`; fails when more than
/// `tolerance` of the population reaches the top band.
pub fn fock_evolve_with(state: &FockState, potential: &PolynomialPotential, t: f64, tolerance: f64) -> Result<FockState> {
    if t == 0.0 {
        return Ok(state.clone());
    }
    let h = hamiltonian_matrix(state, potential)?;
    let u = (h * Complex64::new(0.0, -t / state.hbar())).exp();
    let rho = &u * &state.rho * u.adjoint();
    let evolved = FockState { rho, ..state.clone() };
    let leakage = evolved.top_band_population();
    if leakage > tolerance {
        return Err(MepackError::HorizonExceeded { leakage, tolerance });
    }
    Ok(evolved)
}

pub fn fock_evolve(state: &FockState, potential: &PolynomialPotential, t: f64) -> Result<FockState> {
    fock_evolve_with(state, potential, t, LEAKAGE_TOLERANCE)
}

/// Evolves to every time in `times` independently.
pub fn fock_evolve_many(state: &FockState, potential: &PolynomialPotential, times: &[f64]) -> Result<Vec<FockState>> {
    times.par_iter().map(|&t| fock_evolve(state, potential, t)).collect()
}

/// Which phase-space variable to differentiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Position,
    Momentum,
}

/// `<d^n X/dt^n>` at `t = 0` from nested matrix commutators `[., H]/(i hbar)`.
pub fn fock_time_derivative(state: &FockState, potential: &PolynomialPotential, x: Observable, order: usize) -> Result<f64> {
    let h = hamiltonian_matrix(state, potential)?;
    let factor = Complex64::new(0.0, -1.0 / state.hbar());
    let mut d = match x {
        Observable::Position => state.q.clone(),
        Observable::Momentum => state.p.clone(),
    };
    for _ in 0..order {
        d = (&d * &h - &h * &d) * factor;
    }
    Ok(state.expect_matrix(&d).re)
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the standard
/// normal density (weights sum to 1), by the Golub–Welsch eigenvalue method.
pub fn hermite_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `<q^a p^b>` under the classical packet by tensor-product quadrature,
/// exact up to rounding since the rule integrates degree `a + b` exactly.
pub fn gaussian_moment_numeric(packet: &PacketMoments, a: u32, b: u32) -> Result<f64> {
    packet.validate()?;
    let axis = |n: u32, center: f64, width: f64| -> f64 {
        let (nodes, weights) = hermite_rule(n as usize / 2 + 1);
        nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * (center + width * x).powi(n as i32))
            .sum()
    };
    Ok(axis(a, packet.q, packet.dq) * axis(b, packet.p, packet.dp))
}

/// `<X>` of a phase-space polynomial by quadrature.
pub fn gaussian_expectation_numeric(packet: &PacketMoments, x: &PhasePolynomial) -> Result<f64> {
    let bindings = packet.bindings();
    x.terms()
        .map(|((a, b), c)| Ok(c.eval_real(&bindings)? * gaussian_moment_numeric(packet, a, b)?))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Seeded Monte-Carlo estimate of `<q^a p^b>` with its standard error.
pub fn monte_carlo_moment(packet: &PacketMoments, a: u32, b: u32, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    packet.validate()?;
    if samples < 2 {
        return Err(MepackError::Domain("Monte-Carlo needs at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        let v = (packet.q + packet.dq * x).powi(a as i32) * (packet.p + packet.dp * y).powi(b as i32);
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_words;

    #[test]
    fn hermite_rule_reproduces_normal_moments() {
        let (x, w) = hermite_rule(4);
        let m = |k: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum::<f64>();
        assert!((m(0) - 1.0).abs() < 1e-14);
        assert!(m(1).abs() < 1e-14);
        assert!((m(2) - 1.0).abs() < 1e-13);
        assert!((m(6) - 15.0).abs() < 1e-11);
    }

    #[test]
    fn normalization_and_position() {
        let packet = PacketMoments::new(0.7, -0.4, 1.2, 1.25).unwrap().with_hbar(1.0).unwrap();
        let state = FockState::new(&packet, 2).unwrap();
        assert!(state.trace_deficit().abs() < 1e-12);
        let q = fock_expectation(&state, &parse_words("q").unwrap()).unwrap();
        assert!((q.re - 0.7).abs() < 1e-10 && q.im.abs() < 1e-12);
    }

    #[test]
    fn insufficient_cutoff_reported() {
        let packet = PacketMoments::from_nu(0.0, 0.0, 10.0).unwrap();
        assert!(matches!(
            FockState::with_cutoff(&packet, 20, 2),
            Err(MepackError::CutoffInsufficient { .. })
        ));
    }

    #[test]
    fn commutator_on_retained_block() {
        let packet = PacketMoments::from_nu(1.0, 2.0, 3.0).unwrap();
        let state = FockState::new(&packet, 2).unwrap();
        assert!(state.commutator_defect() < 1e-10);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let packet = PacketMoments::new(1.0, 0.0, 0.5, 1.0).unwrap();
        let a = monte_carlo_moment(&packet, 2, 0, 20_000, 7).unwrap();
        let b = monte_carlo_moment(&packet, 2, 0, 20_000, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.mean - 1.25).abs() < 5.0 * a.std_error);
    }
}
