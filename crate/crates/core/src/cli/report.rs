//! Rendering of run results: trajectory CSV/JSON, text tables, and the
//! metadata footer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{Expr, Monomial, Scalar, Symbol};
use crate::dynamics::Trajectory;
use crate::error::{MepackError, Result};

/// Column header of trajectory CSV files.
pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "Q", "P", "dQ", "dP", "nu", "S"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "dQ")]
    pub dq: f64,
    #[serde(rename = "dP")]
    pub dp: f64,
    pub nu: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    traj.points
        .iter()
        .map(|pt| TrajectoryRow {
            t: pt.t,
            q: pt.packet.q,
            p: pt.packet.p,
            dq: pt.packet.dq,
            dp: pt.packet.dp,
            nu: pt.nu,
            s: pt.entropy,
        })
        .collect()
}

fn csv_error(e: impl std::fmt::Display) -> MepackError {
    MepackError::Consistency(format!("CSV assembly failed: {e}"))
}

/// Shortest round-trip decimal; exponent form for very small or large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// CSV text with the given header; floats use [`format_float`].
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| format_float(x))).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<String> {
    let rows: Vec<Vec<f64>> = trajectory_rows(traj)
        .iter()
        .map(|r| vec![r.t, r.q, r.p, r.dq, r.dp, r.nu, r.s])
        .collect();
    csv_table(&TRAJECTORY_HEADER, &rows)
}

pub fn trajectory_json(traj: &Trajectory) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&trajectory_rows(traj))
        .map_err(|e| MepackError::Consistency(format!("JSON assembly failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Run metadata kept out of the data files.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Footer {
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
    pub version: String,
}

impl Footer {
    pub fn new(mode: &str) -> Self {
        Footer {
            mode: mode.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Footer::default()
        }
    }

    pub fn text(&self) -> String {
        let show = |o: Option<usize>| o.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let provenance = if self.provenance.is_empty() {
            "-".to_string()
        } else {
            self.provenance.join(",")
        };
        format!(
            "# mode={} kind={} order={} cutoff={} provenance={} mepack={}\n",
            self.mode,
            self.kind.as_deref().unwrap_or("-"),
            show(self.order),
            show(self.cutoff),
            provenance,
            self.version
        )
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain struct");
        s.push('\n');
        s
    }
}

/// Least-squares slope of `ln |y|` against `ln x`.
pub fn fit_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && b.abs() > 0.0)
        .map(|(a, b)| (a.ln(), b.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format_float(z.re)
    } else if z.im < 0.0 {
        format!("{} - {}i", format_float(z.re), format_float(-z.im))
    } else {
        format!("{} + {}i", format_float(z.re), format_float(z.im))
    }
}

fn is_parameter(sym: Symbol) -> bool {
    matches!(sym, Symbol::V(_) | Symbol::Mass | Symbol::Hbar | Symbol::T)
}

/// Splits an expression by its potential-parameter monomial (`V_k`, `m`, ...),
/// leaving the packet-dependent remainder.
pub fn group_by_parameters(e: &Expr) -> BTreeMap<Monomial, Expr> {
    let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
    for (mono, c) in e.terms() {
        let params: Vec<(Symbol, i32)> = mono.iter().filter(|(s, _)| is_parameter(*s)).collect();
        let state: Vec<(Symbol, i32)> = mono.iter().filter(|(s, _)| !is_parameter(*s)).collect();
        let term = Expr::term(c.clone(), Monomial::from_pairs(&state));
        let slot = out.entry(Monomial::from_pairs(&params)).or_insert_with(Expr::zero);
        *slot = &*slot + &term;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Splits off the `nu` dependence: packet monomial without `nu` → polynomial in `nu`.
pub fn group_by_packet_monomial(e: &Expr) -> BTreeMap<Monomial, Expr> {
    let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
    for (mono, c) in e.terms() {
        let nu = mono.exponent(Symbol::Nu);
        let term = Expr::term(c.clone(), Monomial::var(Symbol::Nu, nu));
        let slot = out.entry(mono.without(Symbol::Nu)).or_insert_with(Expr::zero);
        *slot = &*slot + &term;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Rational content of a real expression: gcd of numerators over lcm of denominators.
fn rational_content(e: &Expr) -> Option<BigRational> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (_, c) in e.terms() {
        if !c.im.is_zero() {
            return None;
        }
        num = num.gcd(c.re.numer());
        den = den.lcm(c.re.denom());
    }
    if num.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// `c*(e/c)` with `c` the rational content, or `e` when `c = 1`.
pub fn factor_content(e: &Expr) -> String {
    match rational_content(e) {
        Some(c) if !c.is_one() && e.len() > 1 => {
            let inner = e.scale(&Scalar::real(c.recip()));
            let c = if c.is_negative() { -c } else { c };
            format!("({})*({})", Scalar::real(c), inner)
        }
        _ => e.to_string(),
    }
}

pub fn monomial_text(m: &Monomial) -> String {
    Expr::term(Scalar::one(), m.clone()).to_string()
}

/// Aligned two-column text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}
