//! Exact symbolic kernel: scalars, Laurent expressions, phase-space
//! polynomials with the Poisson bracket, and the normal-ordered Weyl and
//! ladder algebras. No floating point is used for any stored coefficient.

pub mod diagonal;
pub mod expr;
pub mod number;
pub mod ordered;
pub mod parse;
pub mod phase;
pub mod scalar;

pub use diagonal::{diagonal_part, to_ladder, LadderFrame};
pub use expr::{Bindings, Expr, Monomial, Symbol};
pub use number::NumberPolynomial;
pub use ordered::{LadderPolynomial, Letter, NormalOrdered, WeylPolynomial};
pub use parse::{parse_expr, parse_ladder, parse_phase, parse_weyl, parse_words, OperatorLetter, WordPolynomial};
pub use phase::{poisson_bracket, PhasePolynomial};
pub use scalar::Scalar;

/// `[X, Y] = XY − YX` in normal form.
pub fn commutator(x: &WeylPolynomial, y: &WeylPolynomial) -> WeylPolynomial {
    x.commutator(y)
}
