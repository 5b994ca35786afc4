//! The six run modes. Each returns its text report and the data files to write.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::report::{
    csv_table, factor_content, fit_log_slope, format_complex, format_float, group_by_packet_monomial, group_by_parameters,
    monomial_text, text_table, trajectory_csv, trajectory_json, Footer,
};
use super::scenario::{Mode, OutputFormat, PropagationSpec, Scenario};
use crate::algebra::{parse_words, Expr, WeylPolynomial, WordPolynomial};
use crate::classical::{moment_classical, moment_classical_numeric};
use crate::dynamics::{
    averaged_derivatives, derivatives_classical, derivatives_quantum, evolve_quadratic, propagate, quantum_correction,
    time_derivatives_classical, time_derivatives_quantum, trajectory_quadratic, DynamicsKind, PolynomialPotential,
    PropagationMode, Trajectory,
};
use crate::error::Result;
use crate::oracle::{fock_evolve, fock_expectation, gaussian_expectation_numeric, policy_cutoff, FockState};
use crate::packet::PacketMoments;
use crate::quantum::{expectation_quantum, expectation_quantum_numeric, hbar_form};

/// Text report plus named output files.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub text: String,
    pub files: Vec<(String, String)>,
    pub footer: Footer,
}

pub fn run_mode(scenario: &Scenario) -> Result<RunOutput> {
    scenario.validate()?;
    match scenario.mode()? {
        Mode::Moments => moments(scenario),
        Mode::Evolve => evolve(scenario),
        Mode::Derivatives => derivatives(scenario),
        Mode::Corrections => corrections(scenario),
        Mode::LimitSweep => limit_sweep(scenario),
        Mode::OracleCheck => oracle_check(scenario),
    }
}

fn kind_name(kind: DynamicsKind) -> String {
    match kind {
        DynamicsKind::Classical => "classical".into(),
        DynamicsKind::Quantum => "quantum".into(),
    }
}

struct ParsedExpr {
    text: String,
    words: WordPolynomial,
    weyl: WeylPolynomial,
}

fn parse_all(scenario: &Scenario) -> Result<Vec<ParsedExpr>> {
    scenario
        .run
        .expressions
        .iter()
        .map(|text| {
            let words = parse_words(text)?;
            let weyl = words.to_weyl()?;
            Ok(ParsedExpr {
                text: text.clone(),
                words,
                weyl,
            })
        })
        .collect()
}

fn word_degree(words: &WordPolynomial) -> usize {
    words.terms().map(|(w, _)| w.len()).max().unwrap_or(0)
}

fn moments(scenario: &Scenario) -> Result<RunOutput> {
    let exprs = parse_all(scenario)?;
    let packet = scenario.packet.as_ref().map(|_| scenario.packet()).transpose()?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for e in &exprs {
        let quantum = expectation_quantum(&e.weyl)?;
        let classical = moment_classical(&e.words.to_phase()?);
        let _ = writeln!(text, "<{}>", e.text);
        let _ = writeln!(text, "  quantum:   {}", hbar_form(&quantum));
        let _ = writeln!(text, "  quantum (nu form): {quantum}");
        let _ = writeln!(text, "  classical: {classical}");
        if let Some(pk) = &packet {
            let qv = if pk.require_quantum().is_ok() {
                format_complex(expectation_quantum_numeric(pk, &e.weyl)?)
            } else {
                "n/a (nu < 1)".into()
            };
            let cv = format_float(moment_classical_numeric(pk, &e.words.to_phase()?)?);
            let _ = writeln!(text, "  at packet: quantum {qv}, classical {cv}");
            rows.push(vec![e.text.clone(), qv, cv]);
        }
    }
    let mut out = RunOutput {
        text,
        footer: Footer::new("moments"),
        ..RunOutput::default()
    };
    if !rows.is_empty() {
        out.files.push((
            "moments.txt".into(),
            text_table(&["expression", "quantum", "classical"], &rows),
        ));
    }
    Ok(out)
}

fn evolve(scenario: &Scenario) -> Result<RunOutput> {
    let packet = scenario.packet()?;
    let potential = scenario.potential()?;
    let grid = scenario.grid()?;
    let kind = scenario.kind();
    let quadratic = potential.degree() <= 2;
    let mut footer = Footer::new("evolve");
    footer.kind = Some(kind_name(kind));
    let traj: Trajectory = match scenario.run.propagation {
        PropagationSpec::Auto if quadratic => trajectory_quadratic(&packet, &potential, &grid, kind)?,
        PropagationSpec::QuadraticExact => trajectory_quadratic(&packet, &potential, &grid, kind)?,
        spec => {
            let mode = match spec {
                PropagationSpec::RepacketizedStepping => PropagationMode::RepacketizedStepping,
                _ => PropagationMode::TaylorOrigin,
            };
            let order = scenario.order(4)?;
            footer.order = Some(order);
            propagate(&packet, &potential, &grid, order, mode, kind)?
        }
    };
    footer.provenance.push(traj.provenance.to_string());
    if traj.provenance == crate::dynamics::Provenance::RepacketizedStepping {
        footer.provenance.push("approximation".into());
    }
    let csv = trajectory_csv(&traj)?;
    let mut files = Vec::new();
    match scenario.output.format {
        OutputFormat::Csv => files.push(("trajectory.csv".into(), csv.clone())),
        OutputFormat::Json => files.push(("trajectory.json".into(), trajectory_json(&traj)?)),
        OutputFormat::Both => {
            files.push(("trajectory.csv".into(), csv.clone()));
            files.push(("trajectory.json".into(), trajectory_json(&traj)?));
        }
    }
    Ok(RunOutput {
        text: csv,
        files,
        footer,
    })
}

fn derivatives(scenario: &Scenario) -> Result<RunOutput> {
    let potential = scenario.potential()?;
    let order = scenario.order(4)?;
    let classical = derivatives_classical(&potential, order)?;
    let quantum = derivatives_quantum(&potential, order)?;
    let avg_c = averaged_derivatives(&classical)?;
    let avg_q = averaged_derivatives(&quantum)?;
    let mut text = String::new();
    let _ = writeln!(text, "potential truncated at degree {}", potential.truncation());
    let _ = writeln!(text, "\n[classical, Poisson bracket]");
    for n in 1..=order {
        let _ = writeln!(text, "d^{n}q/dt^{n} = {}", classical.position[n]);
        let _ = writeln!(text, "d^{n}p/dt^{n} = {}", classical.momentum[n]);
    }
    let _ = writeln!(text, "\n[quantum, commutator, normal order q before p]");
    for n in 1..=order {
        let _ = writeln!(text, "d^{n}q/dt^{n} = {}", quantum.position[n]);
        let _ = writeln!(text, "d^{n}p/dt^{n} = {}", quantum.momentum[n]);
    }
    let _ = writeln!(text, "\n[classical averages]");
    for n in 1..=order {
        let _ = writeln!(text, "d^{n}Q/dt^{n} = {}", avg_c.position[n]);
        let _ = writeln!(text, "d^{n}P/dt^{n} = {}", avg_c.momentum[n]);
    }
    let _ = writeln!(text, "\n[quantum averages]");
    for n in 1..=order {
        let _ = writeln!(text, "d^{n}Q/dt^{n} = {}", hbar_form(&avg_q.position[n]));
        let _ = writeln!(text, "d^{n}P/dt^{n} = {}", hbar_form(&avg_q.momentum[n]));
    }
    let mut footer = Footer::new("derivatives");
    footer.order = Some(order);
    Ok(RunOutput {
        files: vec![("derivatives.txt".into(), text.clone())],
        text,
        footer,
    })
}

fn average_momentum_derivative(potential: &PolynomialPotential, order: usize) -> Result<(Expr, Expr)> {
    let c = time_derivatives_classical(&crate::algebra::PhasePolynomial::p(), potential, order)
        .pop()
        .expect("order >= 1");
    let q = time_derivatives_quantum(&WeylPolynomial::p(), potential, order)
        .pop()
        .expect("order >= 1");
    Ok((moment_classical(&c), expectation_quantum(&q)?))
}

fn corrections(scenario: &Scenario) -> Result<RunOutput> {
    let potential = scenario.potential()?;
    let order = scenario.order(5)?;
    let results = (1..=order)
        .into_par_iter()
        .map(|n| {
            Ok((
                quantum_correction(&potential, n)?,
                average_momentum_derivative(&potential, n)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "quantum minus classical d^nP/dt^n, potential truncated at degree {}, hbar = 2*dQ*dP/nu",
        potential.truncation()
    );
    for (corr, (classical, quantum)) in &results {
        let _ = writeln!(text, "order {}: {}", corr.order, corr);
        if corr.is_zero() {
            continue;
        }
        let groups_q = group_by_parameters(quantum);
        let groups_c = group_by_parameters(classical);
        for (params, corr_group) in group_by_parameters(&corr.to_expr()) {
            let q_group = groups_q.get(&params).cloned().unwrap_or_else(Expr::zero);
            let c_group = groups_c.get(&params).cloned().unwrap_or_else(Expr::zero);
            let q_parts = group_by_packet_monomial(&q_group);
            let c_parts = group_by_packet_monomial(&c_group);
            for state in group_by_packet_monomial(&corr_group).keys() {
                let qc = q_parts.get(state).cloned().unwrap_or_else(Expr::zero);
                let cc = c_parts.get(state).cloned().unwrap_or_else(Expr::zero);
                let _ = writeln!(
                    text,
                    "  [{}] coefficient of {}: classical {} -> quantum {}",
                    monomial_text(&params),
                    monomial_text(state),
                    factor_content(&cc),
                    factor_content(&qc)
                );
            }
        }
        let leading = corr.leading_power().unwrap_or(0);
        let _ = writeln!(text, "  leading power of 1/nu: {leading}");
    }
    let mut footer = Footer::new("corrections");
    footer.order = Some(order);
    Ok(RunOutput {
        files: vec![("corrections.txt".into(), text.clone())],
        text,
        footer,
    })
}

/// Packet with the same averages and widths and `hbar = 2 dQ dP / nu`.
fn packet_at_nu(base: &PacketMoments, nu: f64) -> Result<PacketMoments> {
    PacketMoments::new(base.q, base.p, base.dq, base.dp)?.with_hbar(2.0 * base.dq * base.dp / nu)
}

fn trajectory_deviation(packet: &PacketMoments, potential: &PolynomialPotential, grid: &[f64], order: usize) -> Result<f64> {
    let run = |kind| propagate(packet, potential, grid, order.max(2), PropagationMode::TaylorOrigin, kind);
    let (q, c) = (run(DynamicsKind::Quantum)?, run(DynamicsKind::Classical)?);
    Ok(q.points
        .iter()
        .zip(&c.points)
        .map(|(a, b)| {
            let (x, y) = (&a.packet, &b.packet);
            [(x.q - y.q).abs(), (x.p - y.p).abs(), (x.dq - y.dq).abs(), (x.dp - y.dp).abs()]
                .into_iter()
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max))
}

fn limit_sweep(scenario: &Scenario) -> Result<RunOutput> {
    let base = scenario.packet()?;
    let potential = scenario.potential()?;
    potential.numeric_values()?;
    let order = scenario.order(5)?;
    let exprs = parse_all(scenario)?;
    let grid = match &scenario.run.grid {
        Some(g) => Some(g.times()?),
        None => None,
    };
    let correction = quantum_correction(&potential, order)?;
    let moment_pairs = exprs
        .iter()
        .map(|e| Ok((expectation_quantum(&e.weyl)?, moment_classical(&e.words.to_phase()?))))
        .collect::<Result<Vec<_>>>()?;
    let nus = scenario.run.nu.clone();
    let rows = nus
        .par_iter()
        .map(|&nu| {
            let packet = packet_at_nu(&base, nu)?;
            let b = packet.bindings();
            let mut row = vec![nu, packet.hbar_or_default(), correction.eval(&packet)?];
            for (q, c) in &moment_pairs {
                row.push((q.eval(&b)? - c.eval(&b)?).norm());
            }
            if let Some(g) = &grid {
                row.push(trajectory_deviation(&packet, &potential, g, order)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut header: Vec<String> = vec!["nu".into(), "hbar".into(), format!("correction_order_{order}")];
    header.extend(exprs.iter().map(|e| format!("moment_deviation[{}]", e.text)));
    if grid.is_some() {
        header.push("trajectory_deviation".into());
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = csv_table(&header_refs, &rows)?;
    let mut text = String::new();
    let _ = writeln!(text, "sweep at fixed Q, P, dQ, dP with hbar = 2*dQ*dP/nu");
    let _ = writeln!(text, "order {order} correction: {correction}");
    for (col, name) in header.iter().enumerate().skip(2) {
        let ys: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        match fit_log_slope(&nus, &ys) {
            Some(s) => {
                let _ = writeln!(text, "slope of log|{name}| vs log nu: {s:.6}");
            }
            None => {
                let _ = writeln!(text, "slope of log|{name}| vs log nu: undefined (values vanish)");
            }
        }
    }
    let mut footer = Footer::new("limit-sweep");
    footer.order = Some(order);
    if grid.is_some() {
        footer.provenance.push("taylor-origin".into());
    }
    Ok(RunOutput {
        text,
        files: vec![("limit_sweep.csv".into(), csv)],
        footer,
    })
}

fn delta_row(name: String, symbolic: num_complex::Complex64, oracle: num_complex::Complex64) -> Vec<String> {
    let abs = (symbolic - oracle).norm();
    let rel = abs / symbolic.norm().max(f64::MIN_POSITIVE);
    vec![
        name,
        format_complex(symbolic),
        format_complex(oracle),
        format!("{abs:.3e}"),
        format!("{rel:.3e}"),
    ]
}

fn oracle_check(scenario: &Scenario) -> Result<RunOutput> {
    let packet = scenario.packet()?;
    let exprs = parse_all(scenario)?;
    let degree = exprs.iter().map(|e| word_degree(&e.words)).max().unwrap_or(2).max(2);
    let nu = packet.require_quantum()?;
    let cutoff = match scenario.run.cutoff {
        Some(c) => c,
        None => policy_cutoff(nu, degree)?,
    };
    let state = FockState::with_cutoff(&packet, cutoff, degree)?;
    let mut rows = Vec::new();
    for e in &exprs {
        let symbolic = expectation_quantum_numeric(&packet, &e.weyl)?;
        let oracle = fock_expectation(&state, &e.words)?;
        rows.push(delta_row(format!("quantum <{}>", e.text), symbolic, oracle));
        let phase = e.words.to_phase()?;
        let classical = moment_classical_numeric(&packet, &phase)?;
        let quadrature = gaussian_expectation_numeric(&packet, &phase)?;
        rows.push(delta_row(
            format!("classical <{}>", e.text),
            classical.into(),
            quadrature.into(),
        ));
    }
    let mut provenance = Vec::new();
    if let (Some(_), Some(grid)) = (&scenario.potential, &scenario.run.grid) {
        let potential = scenario.potential()?;
        if potential.degree() <= 2 {
            provenance.push("quadratic-exact".to_string());
            for t in grid.times()? {
                let exact = evolve_quadratic(&packet, &potential, t)?;
                let fock = fock_evolve(&state, &potential, t)?.moments();
                for (name, a, b) in [
                    ("Q", exact.q, fock.q),
                    ("P", exact.p, fock.p),
                    ("dQ", exact.dq, fock.dq),
                    ("dP", exact.dp, fock.dp),
                ] {
                    rows.push(delta_row(format!("{name}(t={t})"), a.into(), b.into()));
                }
            }
        }
    }
    let header = ["quantity", "symbolic", "oracle", "abs_delta", "rel_delta"];
    let table = text_table(&header, &rows);
    let mut footer = Footer::new("oracle-check");
    footer.cutoff = Some(cutoff);
    footer.provenance = provenance;
    Ok(RunOutput {
        files: vec![("oracle_check.txt".into(), table.clone())],
        text: table,
        footer,
    })
}
