//! Partition functions of the classical and quantum ME packets as functions
//! of the Lagrange multipliers `lambda_1..lambda_4`.
//!
//! Both share the Gaussian exponent `E = lam1^2/(4 lam3) + lam2^2/(4 lam4)`:
//!
//! * classical: `Z = (pi/v) (lam3 lam4)^(-1/2) exp(E)`
//! * quantum:   `Z = exp(E) / (2 sinh(hbar sqrt(lam3 lam4)))`

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{Expr, Scalar, Symbol};
use crate::error::{MepackError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionKind {
    Classical,
    Quantum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionFunction {
    pub kind: PartitionKind,
}

fn lam(i: u8) -> Expr {
    Expr::sym(Symbol::Lambda(i))
}

/// Checks `lam3, lam4 > 0`, the integrability condition shared by both kinds.
pub(crate) fn check_positive_quadratic(lambda: &[f64; 4]) -> Result<()> {
    if !(lambda[2] > 0.0 && lambda[3] > 0.0) {
        return Err(MepackError::Domain(format!(
            "partition function diverges: lambda3 = {}, lambda4 = {} must both be positive",
            lambda[2], lambda[3]
        )));
    }
    Ok(())
}

/// Even Bernoulli-type coefficients of `x / sinh x = Σ_j b_j x^(2j)`.
pub fn x_over_sinh_coefficients(terms: usize) -> Vec<BigRational> {
    // Bernoulli numbers B_0..B_{2(terms-1)} via the standard recurrence.
    let top = 2 * terms.saturating_sub(1);
    let mut bern: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..=top {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, b) in bern.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
        }
        bern.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    (0..terms)
        .map(|j| {
            let two_j = 2 * j;
            let fact: BigInt = (1..=two_j).fold(BigInt::one(), |a, i| a * BigInt::from(i));
            let factor = BigInt::from(2) - BigInt::from(2).pow(two_j as u32);
            BigRational::from_integer(factor) * &bern[two_j] / BigRational::from_integer(fact)
        })
        .collect()
}

impl PartitionFunction {
    pub fn classical() -> Self {
        PartitionFunction {
            kind: PartitionKind::Classical,
        }
    }

    pub fn quantum() -> Self {
        PartitionFunction {
            kind: PartitionKind::Quantum,
        }
    }

    /// `E = lam1^2/(4 lam3) + lam2^2/(4 lam4)`.
    pub fn exponent() -> Expr {
        let quarter = Expr::ratio(1, 4);
        let a = &(&quarter * &lam(1).pow(2)) * &lam(3).inv().expect("symbol");
        let b = &(&quarter * &lam(2).pow(2)) * &lam(4).inv().expect("symbol");
        &a + &b
    }

    /// The classical prefactor `pi / v` multiplying `(lam3 lam4)^(-1/2) exp(E)`.
    pub fn classical_prefactor() -> Expr {
        &Expr::sym(Symbol::Pi) * &Expr::pow_sym(Symbol::Vol, -1)
    }

    /// `∂ ln Z / ∂ lam_i` for the classical partition function.
    pub fn classical_log_derivative(i: u8) -> Expr {
        let mut d = Self::exponent().diff(Symbol::Lambda(i));
        if i == 3 || i == 4 {
            // from (lam3 lam4)^(-1/2)
            d = &d - &(&Expr::ratio(1, 2) * &lam(i).inv().expect("symbol"));
        }
        d
    }

    /// `(1/Z) ∂^N Z / ∂lam1^k ∂lam2^l ∂lam3^m ∂lam4^n` for the classical `Z`,
    /// as a Laurent polynomial in the multipliers.
    pub fn classical_relative_derivative(orders: [u32; 4]) -> Expr {
        let logs: Vec<Expr> = (1..=4).map(Self::classical_log_derivative).collect();
        let mut r = Expr::one();
        for (idx, &count) in orders.iter().enumerate() {
            let sym = Symbol::Lambda(idx as u8 + 1);
            for _ in 0..count {
                // ∂(Z r) = Z (r ∂ln Z + ∂r)
                r = &(&r * &logs[idx]) + &r.diff(sym);
            }
        }
        r
    }

    /// Numeric value at the given multipliers. The classical kind uses the
    /// reference volume `v`, the quantum kind uses `hbar`.
    pub fn evaluate(&self, lambda: &[f64; 4], scale: f64) -> Result<f64> {
        check_positive_quadratic(lambda)?;
        let e = lambda[0] * lambda[0] / (4.0 * lambda[2]) + lambda[1] * lambda[1] / (4.0 * lambda[3]);
        let root = (lambda[2] * lambda[3]).sqrt();
        Ok(match self.kind {
            PartitionKind::Classical => std::f64::consts::PI / scale / root * e.exp(),
            PartitionKind::Quantum => e.exp() / (2.0 * (scale * root).sinh()),
        })
    }

    /// Small-`hbar` expansion of the quantum partition function:
    /// `Z = (lam3 lam4)^(-1/2) exp(E) Σ_j a_j` with the returned `a_j`,
    /// from `1/(2 sinh x) = (1/2x) Σ_j b_j x^(2j)`, `x = hbar sqrt(lam3 lam4)`.
    pub fn quantum_small_hbar_series(terms: usize) -> Vec<Expr> {
        let hbar = Expr::sym(Symbol::Hbar);
        let l34 = &lam(3) * &lam(4);
        x_over_sinh_coefficients(terms)
            .into_iter()
            .enumerate()
            .map(|(j, b)| {
                let c = Expr::constant(Scalar::real(b / BigRational::from_integer(2.into())));
                let h = if j == 0 {
                    hbar.inv().expect("symbol")
                } else {
                    hbar.pow(2 * j as u32 - 1)
                };
                &(&c * &h) * &l34.pow(j as u32)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinh_series_coefficients() {
        let b = x_over_sinh_coefficients(4);
        assert_eq!(b[0], BigRational::one());
        assert_eq!(b[1], BigRational::new((-1).into(), 6.into()));
        assert_eq!(b[2], BigRational::new(7.into(), 360.into()));
        assert_eq!(b[3], BigRational::new((-31).into(), 15120.into()));
    }

    #[test]
    fn second_derivative_identities() {
        let z11 = PartitionFunction::classical_relative_derivative([2, 0, 0, 0]);
        let z3 = PartitionFunction::classical_relative_derivative([0, 0, 1, 0]);
        assert_eq!(z11, -z3);
        let z22 = PartitionFunction::classical_relative_derivative([0, 2, 0, 0]);
        let z4 = PartitionFunction::classical_relative_derivative([0, 0, 0, 1]);
        assert_eq!(z22, -z4);
    }

    #[test]
    fn relative_derivative_matches_finite_differences() {
        let z = PartitionFunction::classical();
        let lambda = [0.3, -0.7, 0.9, 1.4];
        let h = 1e-4;
        let f = |l: [f64; 4]| z.evaluate(&l, 2.0).unwrap();
        let mut plus = lambda;
        plus[0] += h;
        let mut minus = lambda;
        minus[0] -= h;
        let fd = (f(plus) - f(minus)) / (2.0 * h) / f(lambda);
        let b = crate::algebra::Bindings::new()
            .with(Symbol::Lambda(1), lambda[0])
            .with(Symbol::Lambda(2), lambda[1])
            .with(Symbol::Lambda(3), lambda[2])
            .with(Symbol::Lambda(4), lambda[3]);
        let exact = PartitionFunction::classical_relative_derivative([1, 0, 0, 0])
            .eval_real(&b)
            .unwrap();
        assert!((fd - exact).abs() < 1e-7, "{fd} vs {exact}");
    }

    #[test]
    fn divergent_multipliers_rejected() {
        let z = PartitionFunction::classical();
        assert!(z.evaluate(&[0.0, 0.0, -1.0, 1.0], 1.0).is_err());
        assert!(PartitionFunction::quantum().evaluate(&[0.0, 0.0, 1.0, 0.0], 1.0).is_err());
    }
}
