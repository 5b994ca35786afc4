//! Polynomials in the number variable `k`, stored in the falling-factorial basis.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::Expr;
use super::scalar::Scalar;

/// `Σ_m c_m · k^(m)` with `k^(m) = k(k-1)...(k-m+1)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NumberPolynomial {
    falling: BTreeMap<u32, Expr>,
}

fn int_expr(n: &BigInt) -> Expr {
    Expr::constant(Scalar::real(BigRational::from_integer(n.clone())))
}

/// Signed Stirling numbers of the first kind, rows `0..=n`.
fn stirling_first(n: u32) -> Vec<Vec<BigInt>> {
    let n = n as usize;
    let mut s = vec![vec![BigInt::from(0); n + 1]; n + 1];
    s[0][0] = BigInt::from(1);
    for i in 0..n {
        for k in 1..=i + 1 {
            s[i + 1][k] = &s[i][k - 1] - BigInt::from(i) * &s[i][k];
        }
    }
    s
}

/// Stirling numbers of the second kind, rows `0..=n`.
fn stirling_second(n: u32) -> Vec<Vec<BigInt>> {
    let n = n as usize;
    let mut s = vec![vec![BigInt::from(0); n + 1]; n + 1];
    s[0][0] = BigInt::from(1);
    for i in 0..n {
        for k in 1..=i + 1 {
            s[i + 1][k] = BigInt::from(k) * &s[i][k] + &s[i][k - 1];
        }
    }
    s
}

impl NumberPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_falling(coefficients: BTreeMap<u32, Expr>) -> Self {
        let falling = coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        NumberPolynomial { falling }
    }

    pub(crate) fn add_falling(&mut self, m: u32, coef: Expr) {
        if coef.is_zero() {
            return;
        }
        let slot = self.falling.entry(m).or_default();
        *slot = &*slot + &coef;
        if slot.is_zero() {
            self.falling.remove(&m);
        }
    }

    /// Builds from monomial-basis coefficients `Σ_n c_n k^n`.
    pub fn from_monomial_basis(coefficients: &BTreeMap<u32, Expr>) -> Self {
        let top = coefficients.keys().max().copied().unwrap_or(0);
        let table = stirling_second(top);
        let mut out = Self::zero();
        for (&n, c) in coefficients {
            for m in 0..=n {
                let s = &table[n as usize][m as usize];
                if *s != BigInt::from(0) {
                    out.add_falling(m, c * &int_expr(s));
                }
            }
        }
        out
    }

    pub fn falling_coefficients(&self) -> &BTreeMap<u32, Expr> {
        &self.falling
    }

    pub fn coefficient(&self, m: u32) -> Expr {
        self.falling.get(&m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.falling.keys().max().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.falling.is_empty()
    }

    /// Coefficients in the monomial basis `k^n`.
    pub fn to_monomial_basis(&self) -> BTreeMap<u32, Expr> {
        let top = self.degree().unwrap_or(0);
        let table = stirling_first(top);
        let mut out: BTreeMap<u32, Expr> = BTreeMap::new();
        for (&m, c) in &self.falling {
            for n in 0..=m {
                let s = &table[m as usize][n as usize];
                if *s != BigInt::from(0) {
                    let slot = out.entry(n).or_default();
                    *slot = &*slot + &(c * &int_expr(s));
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Value at an integer `k`.
    pub fn eval_at(&self, k: u64) -> Expr {
        let mut total = Expr::zero();
        for (&m, c) in &self.falling {
            let ff: BigInt = (0..m as u64)
                .map(|j| BigInt::from(k) - BigInt::from(j))
                .fold(BigInt::from(1), |acc, x| acc * x);
            total = &total + &(c * &int_expr(&ff));
        }
        total
    }
}

impl fmt::Display for NumberPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.falling.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .falling
            .iter()
            .rev()
            .map(|(m, c)| match m {
                0 => format!("({c})"),
                _ => format!("({c})*k^({m})"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
