//! Classical ME packets: the Gaussian phase-space distributions that
//! maximize entropy for given averages and variances of `q` and `p`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{Expr, PhasePolynomial, Scalar, Symbol};
use crate::error::{MepackError, Result};
use crate::packet::PacketMoments;
use crate::partition::{check_positive_quadratic, PartitionFunction};

/// Lagrange multipliers of the classical packet, paired with the reference
/// volume `v` used to make phase-space integrals dimensionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalMultipliers {
    pub lambda: [f64; 4],
    pub volume: f64,
}

/// `h = 2 pi hbar`, the default reference volume.
pub fn planck_volume(hbar: f64) -> f64 {
    2.0 * PI * hbar
}

/// The multipliers as expressions in `Q, P, dQ, dP`:
/// `(-Q/dQ^2, -P/dP^2, 1/(2 dQ^2), 1/(2 dP^2))`.
pub fn classical_multipliers_symbolic() -> [Expr; 4] {
    let q = Expr::sym(Symbol::Q);
    let p = Expr::sym(Symbol::P);
    let dq2 = Expr::pow_sym(Symbol::DQ, -2);
    let dp2 = Expr::pow_sym(Symbol::DP, -2);
    [
        -(&q * &dq2),
        -(&p * &dp2),
        &Expr::ratio(1, 2) * &dq2,
        &Expr::ratio(1, 2) * &dp2,
    ]
}

pub fn solve_multipliers_classical(packet: &PacketMoments, volume: f64) -> Result<ClassicalMultipliers> {
    packet.validate()?;
    if !(volume.is_finite() && volume > 0.0) {
        return Err(MepackError::Domain(format!(
            "reference volume must be positive, got {volume}"
        )));
    }
    let (dq2, dp2) = (packet.dq * packet.dq, packet.dp * packet.dp);
    Ok(ClassicalMultipliers {
        lambda: [-packet.q / dq2, -packet.p / dp2, 0.5 / dq2, 0.5 / dp2],
        volume,
    })
}

/// `Z = (pi/v) (lam3 lam4)^(-1/2) exp(lam1^2/4lam3 + lam2^2/4lam4)`.
pub fn partition_classical(mult: &ClassicalMultipliers) -> Result<f64> {
    check_positive_quadratic(&mult.lambda)?;
    PartitionFunction::classical().evaluate(&mult.lambda, mult.volume)
}

/// Phase-space density of the packet, normalized against `dq dp / v`.
pub fn density_at(packet: &PacketMoments, q: f64, p: f64, volume: f64) -> f64 {
    let x = (q - packet.q) / packet.dq;
    let y = (p - packet.p) / packet.dp;
    volume / (2.0 * PI * packet.dq * packet.dp) * (-0.5 * (x * x + y * y)).exp()
}

/// Product density of independent one-dimensional packets.
pub fn density_at_product(packets: &[PacketMoments], points: &[(f64, f64)], volume: f64) -> Result<f64> {
    if packets.len() != points.len() {
        return Err(MepackError::Domain(format!(
            "{} packets but {} phase-space points",
            packets.len(),
            points.len()
        )));
    }
    Ok(packets
        .iter()
        .zip(points)
        .map(|(pk, &(q, p))| density_at(pk, q, p, volume))
        .product())
}

/// Entropy `1 + ln(2 pi dQ dP / v)`.
pub fn entropy_classical(packet: &PacketMoments, volume: f64) -> Result<f64> {
    packet.validate()?;
    if !(volume.is_finite() && volume > 0.0) {
        return Err(MepackError::Domain(format!(
            "reference volume must be positive, got {volume}"
        )));
    }
    Ok(1.0 + (2.0 * PI * packet.dq * packet.dp / volume).ln())
}

fn double_factorial_odd(n: u32) -> BigInt {
    // (n-1)!! for even n
    (1..n).step_by(2).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn int_expr(n: BigInt) -> Expr {
    Expr::constant(Scalar::real(BigRational::from_integer(n)))
}

/// `<(q - Q)^a> = (a-1)!! dQ^a` for even `a`, zero otherwise.
fn central_moment(a: u32, width: Symbol) -> Expr {
    if a % 2 == 1 {
        return Expr::zero();
    }
    &int_expr(double_factorial_odd(a)) * &Expr::pow_sym(width, a as i32)
}

/// `<q^a p^b>` from the closed-form Gaussian moments.
pub fn gaussian_moment_symbolic(a: u32, b: u32) -> Expr {
    let one_axis = |n: u32, center: Symbol, width: Symbol| -> Expr {
        (0..=n)
            .map(|i| {
                let c = int_expr(binomial(n, i));
                &(&c * &Expr::pow_sym(center, (n - i) as i32)) * &central_moment(i, width)
            })
            .sum()
    };
    &one_axis(a, Symbol::Q, Symbol::DQ) * &one_axis(b, Symbol::P, Symbol::DP)
}

/// `<q^k p^l q^(2m) p^(2n)> = (-1)^N (1/Z) ∂^N Z / ∂lam1^k ∂lam2^l ∂lam3^m ∂lam4^n`,
/// with the multipliers substituted after differentiation.
pub fn partition_moment_symbolic(k: u32, l: u32, m: u32, n: u32) -> Expr {
    let rel = PartitionFunction::classical_relative_derivative([k, l, m, n]);
    let order = k + l + m + n;
    let signed = if order % 2 == 1 { -rel } else { rel };
    substitute_classical_multipliers(&signed)
}

/// Replaces `lam1..lam4` by their values in terms of `Q, P, dQ, dP`.
pub fn substitute_classical_multipliers(e: &Expr) -> Expr {
    let values = classical_multipliers_symbolic();
    let mut out = e.clone();
    for (i, v) in values.iter().enumerate() {
        out = out
            .substitute(Symbol::Lambda(i as u8 + 1), v)
            .expect("classical multipliers are single terms");
    }
    out
}

/// Which of the two independent moment evaluators to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentRoute {
    /// Derivatives of the partition function with respect to the multipliers.
    PartitionDerivative,
    /// Closed-form central Gaussian moments.
    GaussianClosedForm,
}

fn monomial_moment(a: u32, b: u32, route: MomentRoute) -> Expr {
    match route {
        MomentRoute::GaussianClosedForm => gaussian_moment_symbolic(a, b),
        // use the q^2 and p^2 multipliers for as many factors as possible
        MomentRoute::PartitionDerivative => partition_moment_symbolic(a % 2, b % 2, a / 2, b / 2),
    }
}

/// `<X>` for a phase-space polynomial under the classical packet, as an
/// expression in `Q, P, dQ, dP` (and whatever symbols the coefficients carry).
pub fn moment_classical_with(poly: &PhasePolynomial, route: MomentRoute) -> Expr {
    poly.terms().map(|((a, b), coef)| coef * &monomial_moment(a, b, route)).sum()
}

/// `<X>` under the classical packet. Uses the closed-form Gaussian route;
/// [`moment_classical_verified`] cross-checks against the partition route.
pub fn moment_classical(poly: &PhasePolynomial) -> Expr {
    moment_classical_with(poly, MomentRoute::GaussianClosedForm)
}

/// Evaluates both routes and fails if they disagree.
pub fn moment_classical_verified(poly: &PhasePolynomial) -> Result<Expr> {
    let closed = moment_classical_with(poly, MomentRoute::GaussianClosedForm);
    let partition = moment_classical_with(poly, MomentRoute::PartitionDerivative);
    if closed != partition {
        return Err(MepackError::Consistency(format!(
            "classical moment routes disagree: {closed} vs {partition}"
        )));
    }
    Ok(closed)
}

/// Numeric `<X>` for a concrete packet.
pub fn moment_classical_numeric(packet: &PacketMoments, poly: &PhasePolynomial) -> Result<f64> {
    packet.validate()?;
    moment_classical(poly).eval_real(&packet.bindings())
}
