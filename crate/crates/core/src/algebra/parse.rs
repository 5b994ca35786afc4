//! Plain-text expression grammar, e.g. `(3/2)*V3*q^2*p + i*hbar*q`.
//!
//! ```text
//! sum     := ['+'|'-'] product (('+'|'-') product)*
//! product := power (('*'|'/') power)*
//! power   := atom ['^' ['-'] integer]
//! atom    := number | 'i' | symbol | operator | '(' sum ')'
//! ```
//!
//! Operators are `q`, `p` (Weyl) and `A`, `Ad` (ladder). Products keep
//! their written order; conversion to a normal form happens afterwards.
//! Division is allowed only by a single scalar term.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::{Expr, Symbol};
use super::ordered::{LadderPolynomial, Letter, WeylPolynomial};
use super::phase::PhasePolynomial;
use super::scalar::Scalar;
use crate::error::{MepackError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OperatorLetter {
    Q,
    P,
    Ad,
    A,
}

/// A noncommutative polynomial in written (unreduced) word order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WordPolynomial {
    terms: BTreeMap<Vec<OperatorLetter>, Expr>,
}

impl WordPolynomial {
    fn scalar(c: Expr) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        WordPolynomial { terms }
    }

    fn letter(l: OperatorLetter) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![l], Expr::one());
        WordPolynomial { terms }
    }

    fn add_term(&mut self, word: Vec<OperatorLetter>, coef: Expr) {
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(word.clone()).or_default();
        *slot = &*slot + &coef;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }

    /// A single word with the given coefficient.
    pub fn word(letters: Vec<OperatorLetter>, coef: Expr) -> Self {
        let mut out = Self::default();
        out.add_term(letters, coef);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[OperatorLetter], &Expr)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    /// Adjoint: reversed words, daggered letters, conjugated coefficients.
    pub fn dagger(&self) -> Self {
        let mut out = Self::default();
        for (w, c) in &self.terms {
            let word = w
                .iter()
                .rev()
                .map(|l| match l {
                    OperatorLetter::Ad => OperatorLetter::A,
                    OperatorLetter::A => OperatorLetter::Ad,
                    other => *other,
                })
                .collect();
            out.add_term(word, c.conj());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    fn neg(&self) -> Self {
        let mut out = Self::default();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca * cb);
            }
        }
        out
    }

    /// The scalar value if no operator letters occur.
    pub fn as_scalar(&self) -> Option<Expr> {
        if self.terms.keys().all(|w| w.is_empty()) {
            Some(self.terms.get(&Vec::new()).cloned().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = OperatorLetter> + '_ {
        self.terms.keys().flat_map(|w| w.iter().copied())
    }

    fn uses(&self, allowed: &[OperatorLetter]) -> bool {
        self.letters().all(|l| allowed.contains(&l))
    }

    /// Normal form in the Weyl algebra; fails if ladder letters occur.
    pub fn to_weyl(&self) -> Result<WeylPolynomial> {
        if !self.uses(&[OperatorLetter::Q, OperatorLetter::P]) {
            return Err(MepackError::Domain(
                "expression mixes ladder operators into a q/p polynomial".into(),
            ));
        }
        let mut out = WeylPolynomial::zero();
        for (w, c) in &self.terms {
            let word: Vec<Letter> = w
                .iter()
                .map(|l| {
                    if *l == OperatorLetter::Q {
                        Letter::Left
                    } else {
                        Letter::Right
                    }
                })
                .collect();
            out = &out + &WeylPolynomial::from_word(&word).scale(c);
        }
        Ok(out)
    }

    /// Normal form in the ladder algebra; fails if `q` or `p` occur.
    pub fn to_ladder(&self) -> Result<LadderPolynomial> {
        if !self.uses(&[OperatorLetter::A, OperatorLetter::Ad]) {
            return Err(MepackError::Domain("expression mixes q/p into a ladder polynomial".into()));
        }
        let mut out = LadderPolynomial::zero();
        for (w, c) in &self.terms {
            let word: Vec<Letter> = w
                .iter()
                .map(|l| {
                    if *l == OperatorLetter::Ad {
                        Letter::Left
                    } else {
                        Letter::Right
                    }
                })
                .collect();
            out = &out + &LadderPolynomial::from_word(&word).scale(c);
        }
        Ok(out)
    }

    /// Commutative reading of the words as phase-space monomials.
    pub fn to_phase(&self) -> Result<PhasePolynomial> {
        if !self.uses(&[OperatorLetter::Q, OperatorLetter::P]) {
            return Err(MepackError::Domain("phase-space polynomials only contain q and p".into()));
        }
        let mut out = PhasePolynomial::zero();
        for (w, c) in &self.terms {
            let a = w.iter().filter(|l| **l == OperatorLetter::Q).count() as u32;
            let b = w.len() as u32 - a;
            out = &out + &PhasePolynomial::monomial(a, b, c.clone());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Token::Plus)),
            '-' => out.push((start, Token::Minus)),
            '*' => out.push((start, Token::Star)),
            '/' => out.push((start, Token::Slash)),
            '^' => out.push((start, Token::Caret)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &input[start..i];
                out.push((start, Token::Number(parse_decimal(text, start)?)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(input[start..i].to_string())));
                continue;
            }
            other => {
                return Err(MepackError::Parse {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
pub fn parse_decimal(text: &str, pos: usize) -> Result<BigRational> {
    let err = || MepackError::Parse {
        pos,
        msg: format!("malformed number `{text}`"),
    };
    let mut parts = text.splitn(2, '.');
    let int_part = parts.next().unwrap_or("");
    let frac_part = parts.next().unwrap_or("");
    if int_part.is_empty() && frac_part.is_empty() || frac_part.contains('.') {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| err())?;
    let denom = BigInt::from(10).pow(frac_part.len() as u32);
    Ok(BigRational::new(numer, denom))
}

/// Exact value of a rational literal like `-3/2`, `0.125` or `7`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t.strip_prefix('+').unwrap_or(t).trim()),
    };
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let n = parse_decimal(n.trim(), 0)?;
            let d = parse_decimal(d.trim(), 0)?;
            if d == BigRational::from_integer(0.into()) {
                return Err(MepackError::Parse {
                    pos: 0,
                    msg: "zero denominator".into(),
                });
            }
            n / d
        }
        None => parse_decimal(body, 0)?,
    };
    Ok(if neg { -value } else { value })
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(MepackError::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn sum(&mut self) -> Result<WordPolynomial> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Token::Plus) => self.pos += 1,
            _ => {}
        }
        let first = self.product()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<WordPolynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.offset();
                    let divisor = self.power()?;
                    let inv = divisor.as_scalar().and_then(|s| s.inv()).ok_or(MepackError::Parse {
                        pos: at,
                        msg: "division only by a nonzero single-term scalar".into(),
                    })?;
                    acc = acc.mul(&WordPolynomial::scalar(inv));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<WordPolynomial> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let exp = match self.peek() {
            Some(Token::Number(n)) if n.is_integer() => {
                let e: u32 = n.numer().try_into().or_else(|_| self.error("exponent too large"))?;
                self.pos += 1;
                e
            }
            _ => return self.error("expected integer exponent"),
        };
        let base = if negative {
            match base.as_scalar().and_then(|s| s.inv()) {
                Some(inv) => WordPolynomial::scalar(inv),
                None => return self.error("negative powers only of single-term scalars"),
            }
        } else {
            base
        };
        let mut acc = WordPolynomial::scalar(Expr::one());
        for _ in 0..exp {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<WordPolynomial> {
        let token = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("unexpected end of input"),
        };
        self.pos += 1;
        match token {
            Token::Number(n) => Ok(WordPolynomial::scalar(Expr::constant(Scalar::real(n)))),
            Token::LParen => {
                let inner = self.sum()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "i" => Ok(WordPolynomial::scalar(Expr::i())),
                "q" => Ok(WordPolynomial::letter(OperatorLetter::Q)),
                "p" => Ok(WordPolynomial::letter(OperatorLetter::P)),
                "A" => Ok(WordPolynomial::letter(OperatorLetter::A)),
                "Ad" => Ok(WordPolynomial::letter(OperatorLetter::Ad)),
                other => match Symbol::from_name(other) {
                    Some(sym) => Ok(WordPolynomial::scalar(Expr::sym(sym))),
                    None => {
                        self.pos -= 1;
                        self.error(format!("unknown symbol `{other}`"))
                    }
                },
            },
            _ => {
                self.pos -= 1;
                self.error("expected a number, symbol or `(`")
            }
        }
    }
}

/// Parses text into a word polynomial (written operator order preserved).
pub fn parse_words(input: &str) -> Result<WordPolynomial> {
    let tokens = tokenize(input)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        len: input.len(),
    };
    let out = parser.sum()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(out)
}

pub fn parse_weyl(input: &str) -> Result<WeylPolynomial> {
    parse_words(input)?.to_weyl()
}

pub fn parse_ladder(input: &str) -> Result<LadderPolynomial> {
    parse_words(input)?.to_ladder()
}

pub fn parse_phase(input: &str) -> Result<PhasePolynomial> {
    parse_words(input)?.to_phase()
}

pub fn parse_expr(input: &str) -> Result<Expr> {
    parse_words(input)?.as_scalar().ok_or(MepackError::Parse {
        pos: 0,
        msg: "operators are not allowed in a scalar expression".into(),
    })
}
