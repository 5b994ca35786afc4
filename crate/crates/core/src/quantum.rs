//! Quantum ME packets: multipliers, partition function, the geometric Fock
//! weights of the diagonal representation, von Neumann entropy, and exact
//! expectation values of arbitrary Weyl polynomials.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{diagonal_part, to_ladder, Expr, LadderFrame, NumberPolynomial, Scalar, Symbol, WeylPolynomial};
use crate::classical::classical_multipliers_symbolic;
use crate::error::{MepackError, Result};
use crate::packet::PacketMoments;
use crate::partition::{check_positive_quadratic, PartitionFunction};

/// `(nu/2) ln((nu+1)/(nu-1))`; tends to 1 as `nu -> ∞` and diverges at `nu = 1`.
pub fn log_factor(nu: f64) -> f64 {
    0.5 * nu * (2.0 / (nu - 1.0)).ln_1p()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumMultipliers {
    pub lambda: [f64; 4],
    /// The shared factor `(nu/2) ln((nu+1)/(nu-1))`.
    pub factor: f64,
    pub hbar: f64,
}

/// The multipliers as expressions: the classical ones times the symbol `Lnu`
/// standing for `(nu/2) ln((nu+1)/(nu-1))`.
pub fn quantum_multipliers_symbolic() -> [Expr; 4] {
    let l = Expr::sym(Symbol::LogFactor);
    classical_multipliers_symbolic().map(|e| &e * &l)
}

pub fn solve_multipliers_quantum(packet: &PacketMoments) -> Result<QuantumMultipliers> {
    let nu = packet.require_quantum()?;
    if nu <= 1.0 + 1e-12 {
        return Err(MepackError::PureStateLimit);
    }
    let factor = log_factor(nu);
    let (dq2, dp2) = (packet.dq * packet.dq, packet.dp * packet.dp);
    Ok(QuantumMultipliers {
        lambda: [
            -packet.q / dq2 * factor,
            -packet.p / dp2 * factor,
            0.5 / dq2 * factor,
            0.5 / dp2 * factor,
        ],
        factor,
        hbar: packet.hbar_or_default(),
    })
}

/// `Z = exp(lam1^2/4lam3 + lam2^2/4lam4) / (2 sinh(hbar sqrt(lam3 lam4)))`.
pub fn partition_quantum(mult: &QuantumMultipliers) -> Result<f64> {
    check_positive_quadratic(&mult.lambda)?;
    PartitionFunction::quantum().evaluate(&mult.lambda, mult.hbar)
}

/// `R_k = 2 (nu-1)^k / (nu+1)^(k+1)`, the weight of `|k><k|`; `δ_k0` at `nu = 1`.
pub fn fock_weight(nu: f64, k: u64) -> Result<f64> {
    if !(nu.is_finite() && nu >= 1.0) {
        return Err(MepackError::Domain(format!("Fock weights need nu >= 1, got {nu}")));
    }
    if nu == 1.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let ratio = (nu - 1.0) / (nu + 1.0);
    Ok(2.0 / (nu + 1.0) * ratio.powf(k as f64))
}

/// Exact weight for rational `nu`.
pub fn fock_weight_exact(nu: &BigRational, k: u32) -> BigRational {
    let one = BigRational::one();
    let ratio = (nu - &one) / (nu + &one);
    let two = BigRational::from_integer(BigInt::from(2));
    two / (nu + &one) * num_traits::pow(ratio, k as usize)
}

/// Weight sequence of a packet with a numeric cutoff policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockWeights {
    pub nu: f64,
}

impl FockWeights {
    pub fn new(nu: f64) -> Result<Self> {
        fock_weight(nu, 0)?;
        Ok(FockWeights { nu })
    }

    pub fn weight(&self, k: u64) -> f64 {
        fock_weight(self.nu, k).expect("validated on construction")
    }

    /// `((nu-1)/(nu+1))`, the ratio of consecutive weights.
    pub fn ratio(&self) -> f64 {
        (self.nu - 1.0) / (self.nu + 1.0)
    }

    /// `Σ_{k >= n} R_k = ratio^n`, the weight outside the first `n` states.
    pub fn tail_from(&self, n: usize) -> f64 {
        if self.nu == 1.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        self.ratio().powi(n as i32)
    }

    /// Smallest number of states whose neglected tail is below `tolerance`.
    pub fn states_for_tail(&self, tolerance: f64) -> usize {
        if self.nu == 1.0 {
            return 1;
        }
        let n = (tolerance.ln() / self.ratio().ln()).ceil().max(1.0) as usize;
        // guard against rounding right at the threshold
        (n.saturating_sub(1)..n + 2)
            .find(|&m| m > 0 && self.tail_from(m) < tolerance)
            .unwrap_or(n + 2)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0u64..).map(move |k| self.weight(k))
    }
}

/// `S = -ln 2 + ((nu+1)/2) ln(nu+1) - ((nu-1)/2) ln(nu-1)`, zero at `nu = 1`.
pub fn entropy_quantum(nu: f64) -> Result<f64> {
    if !(nu.is_finite() && nu >= 1.0) {
        return Err(MepackError::Domain(format!("entropy needs nu >= 1, got {nu}")));
    }
    let tail = if nu == 1.0 { 0.0 } else { 0.5 * (nu - 1.0) * (nu - 1.0).ln() };
    Ok(-std::f64::consts::LN_2 + 0.5 * (nu + 1.0) * (nu + 1.0).ln() - tail)
}

/// `dS/dnu = (1/2) ln((nu+1)/(nu-1))`.
pub fn entropy_quantum_slope(nu: f64) -> Result<f64> {
    if !(nu.is_finite() && nu > 1.0) {
        return Err(MepackError::Domain(format!("entropy slope needs nu > 1, got {nu}")));
    }
    Ok(0.5 * (2.0 / (nu - 1.0)).ln_1p())
}

/// Entropy from the Legendre form `ln Z + Σ_i lam_i <constraint_i>`; a
/// cross-check of [`entropy_quantum`] through the multipliers.
pub fn entropy_legendre(packet: &PacketMoments) -> Result<f64> {
    let mult = solve_multipliers_quantum(packet)?;
    let z = partition_quantum(&mult)?;
    let [l1, l2, l3, l4] = mult.lambda;
    Ok(z.ln()
        + l1 * packet.q
        + l2 * packet.p
        + l3 * (packet.q * packet.q + packet.dq * packet.dq)
        + l4 * (packet.p * packet.p + packet.dp * packet.dp))
}

/// The ground state of the diagonal representation in the position basis:
/// `(nu/(2 pi dQ^2))^(1/4) exp(-nu (q-Q)^2/(4 dQ^2) + i P q/hbar)`.
pub fn ground_wavefunction(packet: &PacketMoments, q: f64) -> Result<Complex64> {
    let nu = packet.require_quantum()?;
    let hbar = packet.hbar_or_default();
    let dq2 = packet.dq * packet.dq;
    let amplitude = (nu / (2.0 * PI * dq2)).powf(0.25);
    let x = q - packet.q;
    Ok(Complex64::from_polar(
        amplitude * (-nu * x * x / (4.0 * dq2)).exp(),
        packet.p * q / hbar,
    ))
}

/// Dense univariate polynomial in `nu` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
struct NuPoly(Vec<BigRational>);

impl NuPoly {
    fn trim(mut self) -> Self {
        while self.0.last().map(Zero::is_zero).unwrap_or(false) {
            self.0.pop();
        }
        self
    }

    fn derivative(&self) -> Self {
        NuPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trim()
    }

    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return NuPoly(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        NuPoly(out).trim()
    }

    /// Synthetic division by `(nu - root)`: returns quotient and remainder.
    fn div_linear(&self, root: &BigRational) -> (Self, BigRational) {
        let n = self.0.len();
        if n == 0 {
            return (NuPoly(Vec::new()), BigRational::zero());
        }
        let mut quotient = vec![BigRational::zero(); n.saturating_sub(1)];
        let mut carry = BigRational::zero();
        for i in (0..n).rev() {
            let value = &self.0[i] + &carry * root;
            if i == 0 {
                return (NuPoly(quotient).trim(), value);
            }
            quotient[i - 1] = value.clone();
            carry = value;
        }
        unreachable!()
    }

    fn to_expr(&self) -> Expr {
        self.0
            .iter()
            .enumerate()
            .map(|(i, c)| &Expr::constant(Scalar::real(c.clone())) * &Expr::pow_sym(Symbol::Nu, i as i32))
            .sum()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `Σ_k R_k k^n = (2/(nu+1)) ((nu^2-1)/2 · d/dnu)^n (nu+1)/2`, as a polynomial in `nu`.
pub fn power_moment_operator_route(n: u32) -> Result<Expr> {
    let generator = NuPoly(vec![rat(-1, 2), BigRational::zero(), rat(1, 2)]);
    let mut i_n = NuPoly(vec![rat(1, 2), rat(1, 2)]);
    for _ in 0..n {
        i_n = generator.mul(&i_n.derivative());
    }
    let doubled = NuPoly(i_n.0.iter().map(|c| c * rat(2, 1)).collect());
    let (quotient, remainder) = doubled.div_linear(&rat(-1, 1));
    if !remainder.is_zero() {
        return Err(MepackError::Consistency(format!("2 I_{n}(nu) is not divisible by nu + 1")));
    }
    Ok(quotient.to_expr())
}

/// `Σ_k R_k k^(m) = m! ((nu-1)/2)^m`.
pub fn falling_moment_closed_route(m: u32) -> Expr {
    let fact: BigInt = (1..=m).fold(BigInt::one(), |a, i| a * BigInt::from(i));
    let base = NuPoly(vec![rat(-1, 2), rat(1, 2)]);
    let mut acc = NuPoly(vec![BigRational::from_integer(fact)]);
    for _ in 0..m {
        acc = acc.mul(&base);
    }
    acc.to_expr()
}

/// Which evaluator of `Σ_k R_k P(k)` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumRoute {
    /// The differential-operator formula applied to the monomial-basis form of `P`.
    OperatorFormula,
    /// Closed sums of falling factorials.
    FallingFactorial,
}

/// `Σ_k R_k P(k)` for a number polynomial.
pub fn weighted_sum(poly: &NumberPolynomial, route: SumRoute) -> Result<Expr> {
    let mut total = Expr::zero();
    match route {
        SumRoute::OperatorFormula => {
            for (n, c) in poly.to_monomial_basis() {
                total = &total + &(&c * &power_moment_operator_route(n)?);
            }
        }
        SumRoute::FallingFactorial => {
            for (&m, c) in poly.falling_coefficients() {
                total = &total + &(c * &falling_moment_closed_route(m));
            }
        }
    }
    Ok(total)
}

/// Diagonal polynomial `P(k) = <k|X|k>` of `X` in the packet's diagonal representation.
pub fn diagonal_polynomial(x: &WeylPolynomial) -> Result<NumberPolynomial> {
    let ladder = to_ladder(x, &LadderFrame::symbolic());
    let diag = diagonal_part(&ladder);
    for coef in diag.falling_coefficients().values() {
        if coef.contains(Symbol::S) {
            return Err(MepackError::Consistency(format!(
                "odd power of nu^(-1/2) survived in the diagonal part: {coef}"
            )));
        }
    }
    Ok(diag)
}

/// Exact `<X>` in the quantum ME packet, as an expression in
/// `Q, P, dQ, dP, nu` (with `hbar` eliminated through `hbar = 2 dQ dP / nu`).
///
/// Both sum routes are evaluated and must agree.
pub fn expectation_quantum(x: &WeylPolynomial) -> Result<Expr> {
    let diag = diagonal_polynomial(x)?;
    let by_operator = weighted_sum(&diag, SumRoute::OperatorFormula)?;
    let by_falling = weighted_sum(&diag, SumRoute::FallingFactorial)?;
    if by_operator != by_falling {
        return Err(MepackError::Consistency(format!(
            "expectation routes disagree: {by_operator} vs {by_falling}"
        )));
    }
    Ok(by_falling)
}

/// Numeric `<X>` for a concrete packet with `nu >= 1`.
pub fn expectation_quantum_numeric(packet: &PacketMoments, x: &WeylPolynomial) -> Result<Complex64> {
    packet.require_quantum()?;
    expectation_quantum(x)?.eval(&packet.bindings())
}

/// Rewrites `nu` as `2 dQ dP / hbar`, the display form used for small
/// expectation values such as `<qp> = QP + i hbar/2`.
pub fn hbar_form(e: &Expr) -> Expr {
    let nu = &(&Expr::int(2) * &Expr::sym(Symbol::DQ)) * &(&Expr::sym(Symbol::DP) * &Expr::pow_sym(Symbol::Hbar, -1));
    e.substitute(Symbol::Nu, &nu).expect("single-term substitution")
}

/// Rewrites `hbar` as `2 dQ dP / nu`.
pub fn nu_form(e: &Expr) -> Expr {
    e.substitute(Symbol::Hbar, &LadderFrame::symbolic().hbar())
        .expect("single-term substitution")
}

/// `lam1 + 2 lam3 Q`, the derivative of the entropy with respect to `Q`;
/// identically zero for the quantum multipliers.
pub fn entropy_q_gradient_symbolic() -> Expr {
    let [l1, _, l3, _] = quantum_multipliers_symbolic();
    &l1 + &(&(&Expr::int(2) * &l3) * &Expr::sym(Symbol::Q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_weyl;

    #[test]
    fn weights_at_nu_three() {
        assert_eq!(fock_weight(3.0, 0).unwrap(), 0.5);
        assert_eq!(fock_weight(3.0, 1).unwrap(), 0.25);
        assert_eq!(fock_weight(1.0, 0).unwrap(), 1.0);
        assert_eq!(fock_weight(1.0, 3).unwrap(), 0.0);
        assert!(fock_weight(0.5, 0).is_err());
    }

    #[test]
    fn exact_weights_sum_to_one() {
        let nu = BigRational::new(7.into(), 3.into());
        let n = 40;
        let partial: BigRational = (0..n).map(|k| fock_weight_exact(&nu, k)).sum();
        let ratio = (&nu - BigRational::one()) / (&nu + BigRational::one());
        let tail = num_traits::pow(ratio, n as usize);
        assert_eq!(partial + tail, BigRational::one());
    }

    #[test]
    fn pure_state_limit_is_distinguished() {
        let packet = PacketMoments::from_nu(0.0, 0.0, 1.0).unwrap();
        assert!(matches!(solve_multipliers_quantum(&packet), Err(MepackError::PureStateLimit)));
        let below = PacketMoments::from_nu(0.0, 0.0, 0.5).unwrap();
        assert!(matches!(solve_multipliers_quantum(&below), Err(MepackError::Domain(_))));
    }

    #[test]
    fn entropy_endpoints() {
        assert_eq!(entropy_quantum(1.0).unwrap(), 0.0);
        assert!(entropy_quantum(0.9).is_err());
        let nu: f64 = 1e3;
        let asym = nu.ln() + 1.0 - std::f64::consts::LN_2;
        assert!(((entropy_quantum(nu).unwrap() - asym) / asym).abs() < 0.01);
    }

    #[test]
    fn operator_route_low_orders() {
        // <k> = (nu-1)/2, <k^2> = <k(k-1)> + <k> = (nu-1)^2/2 + (nu-1)/2
        let nu = Expr::sym(Symbol::Nu);
        let half = Expr::ratio(1, 2);
        assert_eq!(power_moment_operator_route(0).unwrap(), Expr::one());
        assert_eq!(power_moment_operator_route(1).unwrap(), &(&half * &nu) - &half);
        let nm1 = &nu - &Expr::one();
        let k2 = &(&half * &nm1.pow(2)) + &(&half * &nm1);
        assert_eq!(power_moment_operator_route(2).unwrap(), k2);
    }

    #[test]
    fn qp_expectation() {
        let e = expectation_quantum(&parse_weyl("q*p").unwrap()).unwrap();
        let expected = parse_weyl("Q*P + (1/2)*i*hbar").unwrap().coefficient(0, 0);
        assert_eq!(hbar_form(&e), expected);
        assert_eq!(e, nu_form(&expected));
    }

    #[test]
    fn ground_state_is_normalized_at_center() {
        let packet = PacketMoments::from_nu(0.3, 1.0, 2.0).unwrap();
        let psi = ground_wavefunction(&packet, 0.3).unwrap();
        let expected = (2.0 / (2.0 * PI * packet.dq * packet.dq)).powf(0.25);
        assert!((psi.norm() - expected).abs() < 1e-14);
    }
}
