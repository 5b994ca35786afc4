//! Passage from phase-space operators to the ladder operators of the
//! packet's diagonal representation, and extraction of diagonal matrix elements.

use super::expr::{Expr, Symbol};
use super::number::NumberPolynomial;
use super::ordered::{LadderPolynomial, WeylPolynomial};
use super::scalar::Scalar;

/// The affine map `q = Q + dQ·s·(A + A†)`, `p = P − i·dP·s·(A − A†)`
/// with `s = nu^(-1/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderFrame {
    pub q: Expr,
    pub p: Expr,
    pub dq: Expr,
    pub dp: Expr,
}

impl LadderFrame {
    /// Fully symbolic frame in `Q`, `P`, `dQ`, `dP`.
    pub fn symbolic() -> Self {
        LadderFrame {
            q: Expr::sym(Symbol::Q),
            p: Expr::sym(Symbol::P),
            dq: Expr::sym(Symbol::DQ),
            dp: Expr::sym(Symbol::DP),
        }
    }

    pub fn position(&self) -> LadderPolynomial {
        let s = Expr::sym(Symbol::S);
        let quad = &LadderPolynomial::annihilation() + &LadderPolynomial::creation();
        &LadderPolynomial::constant(self.q.clone()) + &quad.scale(&(&self.dq * &s))
    }

    /// `hbar` expressed through the frame: `2·dQ·dP/nu`.
    pub fn hbar(&self) -> Expr {
        &(&Expr::int(2) * &self.dq) * &(&self.dp * &Expr::pow_sym(Symbol::Nu, -1))
    }

    pub fn momentum(&self) -> LadderPolynomial {
        let s = Expr::sym(Symbol::S);
        let quad = &LadderPolynomial::annihilation() - &LadderPolynomial::creation();
        let factor = &(&Expr::constant(-Scalar::i()) * &self.dp) * &s;
        &LadderPolynomial::constant(self.p.clone()) + &quad.scale(&factor)
    }
}

impl Default for LadderFrame {
    fn default() -> Self {
        Self::symbolic()
    }
}

/// Rewrites a Weyl polynomial in the packet's ladder operators, in normal order.
/// Coefficients have `hbar` eliminated in favour of `2·dQ·dP/nu`.
pub fn to_ladder(x: &WeylPolynomial, frame: &LadderFrame) -> LadderPolynomial {
    let q = frame.position();
    let p = frame.momentum();
    let hbar = frame.hbar();
    x.substitute_generators(&q, &p, LadderPolynomial::one(), |c| {
        let c = c.substitute(Symbol::Hbar, &hbar).expect("frame hbar is a single term");
        LadderPolynomial::constant(c)
    })
}

/// Keeps the balanced terms `A†^m A^m` as `k^(m)` in the falling-factorial basis.
pub fn diagonal_part(x: &LadderPolynomial) -> NumberPolynomial {
    let mut out = NumberPolynomial::zero();
    for ((a, b), coef) in x.terms() {
        if a == b {
            out.add_falling(a, coef.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ordered::Letter;

    #[test]
    fn position_substitution() {
        let l = to_ladder(&WeylPolynomial::q(), &LadderFrame::symbolic());
        let s = Expr::sym(Symbol::S);
        let dq = Expr::sym(Symbol::DQ);
        assert_eq!(l.coefficient(0, 0), Expr::sym(Symbol::Q));
        assert_eq!(l.coefficient(1, 0), &dq * &s);
        assert_eq!(l.coefficient(0, 1), &dq * &s);
    }

    #[test]
    fn symmetric_product_expansion() {
        let qp = WeylPolynomial::from_word(&[Letter::Left, Letter::Right]);
        let pq = WeylPolynomial::from_word(&[Letter::Right, Letter::Left]);
        let l = to_ladder(&(&qp + &pq), &LadderFrame::symbolic());
        let (q, p, dq, dp, s) = (
            Expr::sym(Symbol::Q),
            Expr::sym(Symbol::P),
            Expr::sym(Symbol::DQ),
            Expr::sym(Symbol::DP),
            Expr::sym(Symbol::S),
        );
        let nu_inv = Expr::pow_sym(Symbol::Nu, -1);
        let two_i = Expr::constant(Scalar::int(2) * Scalar::i());
        assert_eq!(l.coefficient(0, 0), Expr::int(2) * &q * &p);
        // 2 P dQ s A†  + 2 i Q dP s A†
        assert_eq!(
            l.coefficient(1, 0),
            &(Expr::int(2) * &p * &dq * &s) + &(&two_i * &q * &dp * &s)
        );
        assert_eq!(
            l.coefficient(0, 1),
            &(Expr::int(2) * &p * &dq * &s) - &(&two_i * &q * &dp * &s)
        );
        // -2 i (dQ dP / nu) (A^2 - A†^2)
        assert_eq!(l.coefficient(0, 2), -(&two_i * &dq * &dp * &nu_inv));
        assert_eq!(l.coefficient(2, 0), &two_i * &dq * &dp * &nu_inv);
        assert!(l.coefficient(1, 1).is_zero());
        let diag = diagonal_part(&l);
        assert_eq!(diag.degree(), Some(0));
        assert_eq!(diag.coefficient(0), Expr::int(2) * &q * &p);
    }

    #[test]
    fn quadrature_squared_diagonal() {
        let x = (&LadderPolynomial::annihilation() + &LadderPolynomial::creation()).pow(2);
        let d = diagonal_part(&x);
        // 2k + 1
        assert_eq!(d.coefficient(1), Expr::int(2));
        assert_eq!(d.coefficient(0), Expr::int(1));
    }

    #[test]
    fn unbalanced_terms_drop() {
        let x = &LadderPolynomial::annihilation() - &LadderPolynomial::creation();
        assert!(diagonal_part(&x).is_zero());
    }

    #[test]
    fn constants_map_to_constants() {
        let one = to_ladder(&WeylPolynomial::one(), &LadderFrame::symbolic());
        assert_eq!(one, LadderPolynomial::one());
    }
}
