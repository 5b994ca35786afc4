//! Commutative polynomials in the phase-space variables `q`, `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::expr::Expr;
use super::ordered::{write_operator_terms, WeylPolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct PhasePolynomial {
    terms: BTreeMap<(u32, u32), Expr>,
}

impl PhasePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Expr::one())
    }

    pub fn constant(c: Expr) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: u32, b: u32, coef: Expr) -> Self {
        let mut out = Self::zero();
        out.add_term(a, b, coef);
        out
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, Expr::one())
    }

    pub fn p() -> Self {
        Self::monomial(0, 1, Expr::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Expr)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coefficient(&self, a: u32, b: u32) -> Expr {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    fn add_term(&mut self, a: u32, b: u32, coef: Expr) {
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_default();
        *slot = &*slot + &coef;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn scale(&self, c: &Expr) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            out.add_term(a, b, coef * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn d_dq(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, coef * &Expr::int(a as i64));
            }
        }
        out
    }

    pub fn d_dp(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, coef * &Expr::int(b as i64));
            }
        }
        out
    }

    pub fn map_coefficients(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            out.add_term(a, b, f(coef));
        }
        out
    }

    /// Quantization in the standard (`q` left of `p`) ordering.
    pub fn to_weyl_standard(&self) -> WeylPolynomial {
        let mut out = WeylPolynomial::zero();
        for (&(a, b), coef) in &self.terms {
            out.add_term(a, b, coef.clone());
        }
        out
    }
}

/// `{f, g} = ∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q`.
pub fn poisson_bracket(f: &PhasePolynomial, g: &PhasePolynomial) -> PhasePolynomial {
    &(&f.d_dq() * &g.d_dp()) - &(&f.d_dp() * &g.d_dq())
}

impl WeylPolynomial {
    /// The commutative image: every normal-ordered term read as `q^a p^b`.
    pub fn to_phase(&self) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero();
        for ((a, b), coef) in self.terms() {
            out.add_term(a, b, coef.clone());
        }
        out
    }
}

impl<'a> Add<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn add(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn sub(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl<'a> Mul<&'a PhasePolynomial> for &'a PhasePolynomial {
    type Output = PhasePolynomial;
    fn mul(self, rhs: &PhasePolynomial) -> PhasePolynomial {
        let mut out = PhasePolynomial::zero();
        for (&(a, b), ca) in &self.terms {
            for (&(c, d), cb) in &rhs.terms {
                out.add_term(a + c, b + d, ca * cb);
            }
        }
        out
    }
}

impl Neg for &PhasePolynomial {
    type Output = PhasePolynomial;
    fn neg(self) -> PhasePolynomial {
        self.scale(&Expr::int(-1))
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_operator_terms(self.terms(), "q", "p", f)
    }
}
