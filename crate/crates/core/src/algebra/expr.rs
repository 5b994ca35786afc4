//! Exact multivariate Laurent polynomials over the fixed physics symbol set.
//!
//! Denominators are restricted to monomials, which is enough for every
//! quantity in the crate (`1/m`, `1/dQ^2`, `1/nu^k`). The auxiliary symbol
//! `s` stands for `nu^(-1/2)` and the rewrite `s^2 -> 1/nu` is applied on
//! every construction, so at most one power of `s` survives in a monomial.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::scalar::Scalar;
use crate::error::{MepackError, Result};

/// Scalar symbols. Declaration order fixes the canonical monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Hbar,
    Mass,
    /// Taylor coefficient `V_k` of the potential.
    V(u8),
    Q,
    P,
    DQ,
    DP,
    Nu,
    /// `nu^(-1/2)`.
    S,
    T,
    /// Lagrange multipliers `lambda_1..lambda_4`.
    Lambda(u8),
    /// Reference phase-space volume of the classical entropy.
    Vol,
    Pi,
    /// `(nu/2) ln((nu+1)/(nu-1))`, the common factor of the quantum multipliers.
    LogFactor,
}

impl Symbol {
    pub fn name(&self) -> String {
        match self {
            Symbol::Hbar => "hbar".into(),
            Symbol::Mass => "m".into(),
            Symbol::V(k) => format!("V{k}"),
            Symbol::Q => "Q".into(),
            Symbol::P => "P".into(),
            Symbol::DQ => "dQ".into(),
            Symbol::DP => "dP".into(),
            Symbol::Nu => "nu".into(),
            Symbol::S => "s".into(),
            Symbol::T => "t".into(),
            Symbol::Lambda(k) => format!("lam{k}"),
            Symbol::Vol => "v".into(),
            Symbol::Pi => "pi".into(),
            Symbol::LogFactor => "Lnu".into(),
        }
    }

    pub fn from_name(name: &str) -> Option<Symbol> {
        let sym = match name {
            "hbar" => Symbol::Hbar,
            "m" => Symbol::Mass,
            "Q" => Symbol::Q,
            "P" => Symbol::P,
            "dQ" => Symbol::DQ,
            "dP" => Symbol::DP,
            "nu" => Symbol::Nu,
            "s" => Symbol::S,
            "t" => Symbol::T,
            "v" => Symbol::Vol,
            "pi" => Symbol::Pi,
            "Lnu" => Symbol::LogFactor,
            _ => {
                if let Some(rest) = name.strip_prefix("lam") {
                    let k: u8 = rest.parse().ok()?;
                    return (1..=4).contains(&k).then_some(Symbol::Lambda(k));
                }
                if let Some(rest) = name.strip_prefix('V') {
                    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
                        return None;
                    }
                    return rest.parse().ok().map(Symbol::V);
                }
                return None;
            }
        };
        Some(sym)
    }
}

/// Product of symbol powers with non-zero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<Symbol, i32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(sym: Symbol, exp: i32) -> Self {
        let mut m = Monomial::one();
        m.mul_var(sym, exp);
        m
    }

    pub fn from_pairs(pairs: &[(Symbol, i32)]) -> Self {
        let mut m = Monomial::one();
        for &(s, e) in pairs {
            m.mul_var(s, e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, sym: Symbol) -> i32 {
        self.0.get(&sym).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, i32)> + '_ {
        self.0.iter().map(|(s, e)| (*s, *e))
    }

    pub fn degree(&self) -> i32 {
        self.0.values().sum()
    }

    fn mul_var(&mut self, sym: Symbol, exp: i32) {
        if exp == 0 {
            return;
        }
        let e = self.0.entry(sym).or_insert(0);
        *e += exp;
        if *e == 0 {
            self.0.remove(&sym);
        }
    }

    /// Applies `s^2 -> 1/nu`, keeping at most `s^1`.
    fn reduce_s(&mut self) {
        let e = self.exponent(Symbol::S);
        if e == 0 || e == 1 {
            return;
        }
        let q = e.div_euclid(2);
        let r = e.rem_euclid(2);
        self.0.remove(&Symbol::S);
        if r != 0 {
            self.0.insert(Symbol::S, r);
        }
        self.mul_var(Symbol::Nu, -q);
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (s, e) in other.iter() {
            out.mul_var(s, e);
        }
        out.reduce_s();
        out
    }

    pub fn inv(&self) -> Monomial {
        let mut out = Monomial(self.0.iter().map(|(s, e)| (*s, -*e)).collect());
        out.reduce_s();
        out
    }

    pub fn without(&self, sym: Symbol) -> Monomial {
        let mut out = self.clone();
        out.0.remove(&sym);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // lexicographic: a larger exponent on an earlier symbol ranks higher
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some((_, ea)), None) => return if **ea > 0 { Ordering::Greater } else { Ordering::Less },
                (None, Some((_, eb))) => return if **eb > 0 { Ordering::Less } else { Ordering::Greater },
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord,
                    },
                    Ordering::Less => {
                        return if **ea > 0 { Ordering::Greater } else { Ordering::Less };
                    }
                    Ordering::Greater => {
                        return if **eb > 0 { Ordering::Less } else { Ordering::Greater };
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric values for symbols, used to evaluate expressions in double precision.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    values: HashMap<Symbol, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, sym: Symbol, value: f64) -> Self {
        self.values.insert(sym, value);
        self
    }

    pub fn set(&mut self, sym: Symbol, value: f64) {
        self.values.insert(sym, value);
    }

    /// Value of a symbol. `s` falls back to `nu^(-1/2)` and `pi` to the constant.
    pub fn get(&self, sym: Symbol) -> Option<f64> {
        if let Some(v) = self.values.get(&sym) {
            return Some(*v);
        }
        match sym {
            Symbol::S => self.values.get(&Symbol::Nu).map(|nu| nu.powf(-0.5)),
            Symbol::Pi => Some(std::f64::consts::PI),
            Symbol::Nu => {
                let (dq, dp, h) = (
                    self.values.get(&Symbol::DQ)?,
                    self.values.get(&Symbol::DP)?,
                    self.values.get(&Symbol::Hbar)?,
                );
                Some(2.0 * dq * dp / h)
            }
            _ => None,
        }
    }
}

/// Exact Laurent polynomial with complex-rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Scalar::int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Expr::constant(Scalar::ratio(num, den))
    }

    pub fn i() -> Self {
        Expr::constant(Scalar::i())
    }

    pub fn sym(sym: Symbol) -> Self {
        Expr::term(Scalar::one(), Monomial::var(sym, 1))
    }

    pub fn pow_sym(sym: Symbol, exp: i32) -> Self {
        Expr::term(Scalar::one(), Monomial::var(sym, exp))
    }

    pub fn term(c: Scalar, mut mono: Monomial) -> Self {
        mono.reduce_s();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// The constant scalar if this expression has no symbols.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `(coefficient, monomial)` if this expression has a single term.
    pub fn as_monomial(&self) -> Option<(&Scalar, &Monomial)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(m, c)| (c, m))
        } else {
            None
        }
    }

    fn add_term(&mut self, mono: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&mono);
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.mul(mono), c.clone());
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse, defined only for single-term expressions.
    pub fn inv(&self) -> Option<Expr> {
        let (c, m) = self.as_monomial()?;
        Some(Expr::term(c.inv()?, m.inv()))
    }

    pub fn conj(&self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Scalar::is_real)
    }

    pub fn real_part(&self) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), Scalar::real(c.re.clone()));
        }
        out
    }

    pub fn imag_part(&self) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), Scalar::real(c.im.clone()));
        }
        out
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(sym) != 0)
    }

    pub fn max_exponent(&self, sym: Symbol) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(sym)).max()
    }

    pub fn min_exponent(&self, sym: Symbol) -> Option<i32> {
        self.terms.keys().map(|m| m.exponent(sym)).min()
    }

    /// Groups terms by the exponent of `sym`; each group has `sym` removed.
    pub fn collect(&self, sym: Symbol) -> BTreeMap<i32, Expr> {
        let mut out: BTreeMap<i32, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exponent(sym)).or_default().add_term(m.without(sym), c.clone());
        }
        out
    }

    /// Coefficient of `sym^exp`.
    pub fn coeff(&self, sym: Symbol, exp: i32) -> Expr {
        self.collect(sym).remove(&exp).unwrap_or_default()
    }

    /// Replaces `sym` by `value`. Negative powers of `sym` require `value`
    /// to be invertible (a single term).
    pub fn substitute(&self, sym: Symbol, value: &Expr) -> Result<Expr> {
        let groups = self.collect(sym);
        let min = groups.keys().next().copied().unwrap_or(0);
        let inverse = if min < 0 {
            Some(value.inv().ok_or_else(|| {
                MepackError::Domain(format!(
                    "cannot substitute non-monomial for `{}` appearing with negative powers",
                    sym.name()
                ))
            })?)
        } else {
            None
        };
        let mut out = Expr::zero();
        for (exp, rest) in groups {
            let factor = if exp >= 0 {
                value.pow(exp as u32)
            } else {
                inverse.as_ref().expect("checked above").pow((-exp) as u32)
            };
            out = &out + &(&rest * &factor);
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to `sym`.
    pub fn diff(&self, sym: Symbol) -> Expr {
        assert!(sym != Symbol::S, "differentiate through nu instead of s");
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(sym);
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.mul_var(sym, -1);
            out.add_term(dm, c * &Scalar::int(e as i64));
        }
        out
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut value = c.to_complex();
            for (s, e) in m.iter() {
                let x = bindings.get(s).ok_or_else(|| MepackError::UnboundSymbol(s.name()))?;
                value *= x.powi(e);
            }
            total += value;
        }
        Ok(total)
    }

    pub fn eval_real(&self, bindings: &Bindings) -> Result<f64> {
        Ok(self.eval(bindings)?.re)
    }
}

impl From<Scalar> for Expr {
    fn from(c: Scalar) -> Self {
        Expr::constant(c)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&Scalar::int(-1))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        (&self).neg()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |acc, x| &acc + &x)
    }
}

/// Writes one term `coef*num.../den...` with an explicit leading sign marker.
/// Returns whether the printed term is negative.
pub(crate) fn write_term(out: &mut String, coef: &Scalar, factors: &[(String, i32)], first: bool) {
    let negative = coef.is_negative_real() || (coef.is_imaginary() && coef.im < num_rational::BigRational::zero());
    let magnitude = if negative { -coef } else { coef.clone() };
    if first {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    let numer: Vec<String> = factors
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    let denom: Vec<String> = factors
        .iter()
        .filter(|(_, e)| *e < 0)
        .map(|(n, e)| if *e == -1 { n.clone() } else { format!("{n}^{}", -e) })
        .collect();
    let mut pieces: Vec<String> = Vec::new();
    let mag_is_one = magnitude.is_one();
    if !mag_is_one || numer.is_empty() {
        let text = if magnitude.is_real() {
            let r = &magnitude.re;
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("({}/{})", r.numer(), r.denom())
            }
        } else if magnitude.is_imaginary() {
            let r = &magnitude.im;
            if r.is_one() {
                "i".to_string()
            } else if r.is_integer() {
                format!("{}*i", r.numer())
            } else {
                format!("({}/{})*i", r.numer(), r.denom())
            }
        } else {
            magnitude.to_string()
        };
        pieces.push(text);
    }
    pieces.extend(numer);
    out.push_str(&pieces.join("*"));
    for d in denom {
        out.push('/');
        out.push_str(&d);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let factors: Vec<(String, i32)> = m.iter().map(|(s, e)| (s.name(), e)).collect();
            write_term(&mut out, c, &factors, i == 0);
        }
        f.write_str(&out)
    }
}
