//! Noncommutative polynomials in two generators `X`, `Y` obeying
//! `Y·X = X·Y + c`, stored in normal form `X^a Y^b`.
//!
//! The Weyl algebra uses `X = q`, `Y = p`, `c = -i·hbar`; the ladder algebra
//! uses `X = A†`, `Y = A`, `c = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::expr::{write_term, Expr, Symbol};
use super::scalar::Scalar;

/// One generator of a two-letter algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    /// Placed left in normal form (`q` or `A†`).
    Left,
    /// Placed right in normal form (`p` or `A`).
    Right,
}

pub trait Commutation: Clone + fmt::Debug + PartialEq + Eq + Default + Send + Sync + 'static {
    const LEFT_NAME: &'static str;
    const RIGHT_NAME: &'static str;

    /// The constant `c` in `Y·X = X·Y + c`.
    fn swap_constant() -> Expr;

    /// Adjoint of the normal-ordered monomial `X^a Y^b` (unit coefficient).
    fn dagger_monomial(a: u32, b: u32) -> NormalOrdered<Self>;
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct WeylRelation;

#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct LadderRelation;

impl Commutation for WeylRelation {
    const LEFT_NAME: &'static str = "q";
    const RIGHT_NAME: &'static str = "p";

    fn swap_constant() -> Expr {
        // p q = q p - i hbar
        -(Expr::i() * Expr::sym(Symbol::Hbar))
    }

    fn dagger_monomial(a: u32, b: u32) -> NormalOrdered<Self> {
        // q and p are self-adjoint, so (q^a p^b)† = p^b q^a
        NormalOrdered::monomial(0, b, Expr::one()) * NormalOrdered::monomial(a, 0, Expr::one())
    }
}

impl Commutation for LadderRelation {
    const LEFT_NAME: &'static str = "Ad";
    const RIGHT_NAME: &'static str = "A";

    fn swap_constant() -> Expr {
        // A A† = A† A + 1
        Expr::one()
    }

    fn dagger_monomial(a: u32, b: u32) -> NormalOrdered<Self> {
        NormalOrdered::monomial(b, a, Expr::one())
    }
}

/// Polynomial in normal form: a map from `(a, b)` to the coefficient of `X^a Y^b`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct NormalOrdered<K: Commutation> {
    terms: BTreeMap<(u32, u32), Expr>,
    relation: PhantomData<K>,
}

/// Heisenberg-picture operators in `q`, `p` with `[q, p] = i·hbar`.
pub type WeylPolynomial = NormalOrdered<WeylRelation>;

/// Polynomials in `A†`, `A` with `[A, A†] = 1`.
pub type LadderPolynomial = NormalOrdered<LadderRelation>;

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl<K: Commutation> NormalOrdered<K> {
    pub fn zero() -> Self {
        NormalOrdered {
            terms: BTreeMap::new(),
            relation: PhantomData,
        }
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

    /// The left generator (`q` or `A†`).
    pub fn left() -> Self {
        Self::monomial(1, 0, Expr::one())
    }

    /// The right generator (`p` or `A`).
    pub fn right() -> Self {
        Self::monomial(0, 1, Expr::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
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

    pub(crate) fn add_term(&mut self, a: u32, b: u32, coef: Expr) {
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry((a, b)).or_default();
        *slot = &*slot + &coef;
        if slot.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// Normal form of a word by repeated single swaps `Y X -> X Y + c`,
    /// always rewriting the leftmost out-of-order pair.
    pub fn from_word(word: &[Letter]) -> Self {
        let c = K::swap_constant();
        let mut out = Self::zero();
        let mut pending: Vec<(Expr, Vec<Letter>)> = vec![(Expr::one(), word.to_vec())];
        while let Some((coef, w)) = pending.pop() {
            match w
                .windows(2)
                .position(|pair| pair[0] == Letter::Right && pair[1] == Letter::Left)
            {
                None => {
                    let a = w.iter().filter(|l| **l == Letter::Left).count() as u32;
                    out.add_term(a, w.len() as u32 - a, coef);
                }
                Some(i) => {
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    let mut contracted = w[..i].to_vec();
                    contracted.extend_from_slice(&w[i + 2..]);
                    pending.push((&coef * &c, contracted));
                    pending.push((coef, swapped));
                }
            }
        }
        out
    }

    /// Product of normal monomials via `Y^b X^c = Σ_k k! C(b,k) C(c,k) κ^k X^(c-k) Y^(b-k)`.
    fn mul_monomials(a: u32, b: u32, c: u32, d: u32, kappa: &Expr, out: &mut Self, coef: &Expr) {
        for k in 0..=b.min(c) {
            let weight = factorial(k) * binomial(b, k) * binomial(c, k);
            let factor = Expr::constant(Scalar::real(BigRational::from_integer(weight)));
            let term = &(&factor * &kappa.pow(k)) * coef;
            out.add_term(a + c - k, b + d - k, term);
        }
    }

    pub fn scale(&self, c: &Expr) -> Self {
        let mut out = Self::zero();
        if c.is_zero() {
            return out;
        }
        for (&(a, b), coef) in &self.terms {
            out.add_term(a, b, coef * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Adjoint: word reversal plus coefficient conjugation.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            out = &out + &K::dagger_monomial(a, b).scale(&coef.conj());
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Expr) -> Expr) -> Self {
        let mut out = Self::zero();
        for (&(a, b), coef) in &self.terms {
            out.add_term(a, b, f(coef));
        }
        out
    }

    /// Evaluates the polynomial with `X`, `Y` replaced by elements of another
    /// algebra (a ring homomorphism on normal-ordered terms).
    pub fn substitute_generators<T>(&self, x: &T, y: &T, one: T, lift: impl Fn(&Expr) -> T) -> T
    where
        T: Clone,
        for<'a> &'a T: Mul<&'a T, Output = T> + Add<&'a T, Output = T>,
    {
        let max_a = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let max_b = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut xp = vec![one.clone()];
        for i in 0..max_a {
            let next = &xp[i] * x;
            xp.push(next);
        }
        let mut yp = vec![one.clone()];
        for i in 0..max_b {
            let next = &yp[i] * y;
            yp.push(next);
        }
        let mut acc: Option<T> = None;
        for (&(a, b), coef) in &self.terms {
            let term = &(&lift(coef) * &xp[a as usize]) * &yp[b as usize];
            acc = Some(match acc {
                None => term,
                Some(prev) => &prev + &term,
            });
        }
        acc.unwrap_or_else(|| lift(&Expr::zero()))
    }
}

impl<'a, K: Commutation> Add<&'a NormalOrdered<K>> for &'a NormalOrdered<K> {
    type Output = NormalOrdered<K>;
    fn add(self, rhs: &NormalOrdered<K>) -> NormalOrdered<K> {
        let mut out = self.clone();
        for (&(a, b), coef) in &rhs.terms {
            out.add_term(a, b, coef.clone());
        }
        out
    }
}

impl<'a, K: Commutation> Sub<&'a NormalOrdered<K>> for &'a NormalOrdered<K> {
    type Output = NormalOrdered<K>;
    fn sub(self, rhs: &NormalOrdered<K>) -> NormalOrdered<K> {
        let mut out = self.clone();
        for (&(a, b), coef) in &rhs.terms {
            out.add_term(a, b, -coef);
        }
        out
    }
}

impl<'a, K: Commutation> Mul<&'a NormalOrdered<K>> for &'a NormalOrdered<K> {
    type Output = NormalOrdered<K>;
    fn mul(self, rhs: &NormalOrdered<K>) -> NormalOrdered<K> {
        let kappa = K::swap_constant();
        let mut out = NormalOrdered::zero();
        for (&(a, b), ca) in &self.terms {
            for (&(c, d), cb) in &rhs.terms {
                NormalOrdered::mul_monomials(a, b, c, d, &kappa, &mut out, &(ca * cb));
            }
        }
        out
    }
}

impl<K: Commutation> Neg for &NormalOrdered<K> {
    type Output = NormalOrdered<K>;
    fn neg(self) -> NormalOrdered<K> {
        self.scale(&Expr::int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl<K: Commutation> $tr<NormalOrdered<K>> for NormalOrdered<K> {
            type Output = NormalOrdered<K>;
            fn $method(self, rhs: NormalOrdered<K>) -> NormalOrdered<K> {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Prints an operator polynomial as a flat sum of `scalar*X^a*Y^b` terms.
pub(crate) fn write_operator_terms<'a>(
    terms: impl Iterator<Item = ((u32, u32), &'a Expr)>,
    left: &str,
    right: &str,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let mut ordered: Vec<((u32, u32), &Expr)> = terms.collect();
    ordered.sort_by_key(|&((a, b), _)| std::cmp::Reverse((a + b, a)));
    if ordered.is_empty() {
        return write!(f, "0");
    }
    let mut out = String::new();
    let mut first = true;
    for ((a, b), coef) in ordered {
        for (mono, c) in coef.terms().rev() {
            let mut factors: Vec<(String, i32)> = mono.iter().map(|(s, e)| (s.name(), e)).collect();
            if a > 0 {
                factors.push((left.to_string(), a as i32));
            }
            if b > 0 {
                factors.push((right.to_string(), b as i32));
            }
            write_term(&mut out, c, &factors, first);
            first = false;
        }
    }
    f.write_str(&out)
}

impl<K: Commutation> fmt::Display for NormalOrdered<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_operator_terms(self.terms(), K::LEFT_NAME, K::RIGHT_NAME, f)
    }
}

impl WeylPolynomial {
    pub fn q() -> Self {
        Self::left()
    }

    pub fn p() -> Self {
        Self::right()
    }
}

impl LadderPolynomial {
    pub fn creation() -> Self {
        Self::left()
    }

    pub fn annihilation() -> Self {
        Self::right()
    }
}
