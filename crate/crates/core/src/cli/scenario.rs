//! Scenario files: one JSON document describing a packet, a potential and a run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_expr, Expr, Symbol};
use crate::dynamics::{DynamicsKind, PolynomialPotential};
use crate::error::{MepackError, Result};
use crate::packet::PacketMoments;

/// A number given either as a JSON number or as a string holding an exact
/// rational (`"3/2"`), a decimal, or (in symbolic modes) an expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Float(f64),
    Text(String),
}

impl NumberSpec {
    pub fn to_expr(&self, field: &str) -> Result<Expr> {
        match self {
            NumberSpec::Float(x) => crate::algebra::Scalar::from_f64(*x)
                .map(Expr::constant)
                .ok_or_else(|| MepackError::Config(format!("{field}: {x} is not finite"))),
            NumberSpec::Text(s) => parse_expr(s).map_err(|e| MepackError::Config(format!("{field}: {e}"))),
        }
    }

    pub fn to_f64(&self, field: &str) -> Result<f64> {
        match self {
            NumberSpec::Float(x) => Ok(*x),
            NumberSpec::Text(_) => self
                .to_expr(field)?
                .eval_real(&crate::algebra::Bindings::new())
                .map_err(|_| MepackError::Config(format!("{field}: expected a number, got a symbolic value"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    #[serde(rename = "Q")]
    pub q: NumberSpec,
    #[serde(rename = "P")]
    pub p: NumberSpec,
    #[serde(rename = "dQ")]
    pub dq: NumberSpec,
    #[serde(rename = "dP")]
    pub dp: NumberSpec,
    #[serde(default)]
    pub hbar: Option<NumberSpec>,
}

impl PacketSpec {
    pub fn to_packet(&self) -> Result<PacketMoments> {
        let packet = PacketMoments::new(
            self.q.to_f64("packet.Q")?,
            self.p.to_f64("packet.P")?,
            self.dq.to_f64("packet.dQ")?,
            self.dp.to_f64("packet.dP")?,
        )
        .map_err(|e| MepackError::Config(format!("packet: {e}")))?;
        let hbar = match &self.hbar {
            Some(h) => h.to_f64("packet.hbar")?,
            None => 1.0,
        };
        packet
            .with_hbar(hbar)
            .map_err(|e| MepackError::Config(format!("packet.hbar: {e}")))
    }
}

/// `{"m": 1, "V": [0, 0, "1/2"]}` or `{"symbolic": 4}` for `m, V0..V4` as symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub m: Option<NumberSpec>,
    #[serde(default, rename = "V")]
    pub v: Option<Vec<NumberSpec>>,
    #[serde(default)]
    pub symbolic: Option<u8>,
}

impl PotentialSpec {
    pub fn to_potential(&self) -> Result<PolynomialPotential> {
        if let Some(k) = self.symbolic {
            if self.v.is_some() || self.m.is_some() {
                return Err(MepackError::Config(
                    "potential: `symbolic` cannot be combined with `m` or `V`".into(),
                ));
            }
            return Ok(PolynomialPotential::symbolic(k));
        }
        let mass = match &self.m {
            Some(m) => m.to_expr("potential.m")?,
            None => Expr::one(),
        };
        let coefficients = match &self.v {
            Some(v) if !v.is_empty() => v
                .iter()
                .enumerate()
                .map(|(k, c)| c.to_expr(&format!("potential.V[{k}]")))
                .collect::<Result<Vec<_>>>()?,
            _ => {
                return Err(MepackError::Config(
                    "potential.V: at least one coefficient is required".into(),
                ))
            }
        };
        for c in &coefficients {
            if c.contains(Symbol::Q) || c.contains(Symbol::P) || c.contains(Symbol::DQ) || c.contains(Symbol::DP) {
                return Err(MepackError::Config(format!(
                    "potential: coefficient {c} may not depend on packet parameters"
                )));
            }
        }
        PolynomialPotential::new(mass, coefficients).map_err(|e| MepackError::Config(format!("potential: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Moments,
    Evolve,
    Derivatives,
    Corrections,
    LimitSweep,
    OracleCheck,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Moments => "moments",
            Mode::Evolve => "evolve",
            Mode::Derivatives => "derivatives",
            Mode::Corrections => "corrections",
            Mode::LimitSweep => "limit-sweep",
            Mode::OracleCheck => "oracle-check",
        }
    }
}

/// Propagation choice for `evolve`; `auto` picks the exact flow when possible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagationSpec {
    #[default]
    Auto,
    QuadraticExact,
    TaylorOrigin,
    RepacketizedStepping,
}

/// Either explicit times or an inclusive `start..stop` range with a step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Times(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl GridSpec {
    pub fn times(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Times(t) => Ok(t.clone()),
            &GridSpec::Range { start, stop, step } => {
                if !(step.is_finite() && step > 0.0 && start.is_finite() && stop.is_finite()) {
                    return Err(MepackError::Config(format!(
                        "run.grid: step must be positive and bounds finite (start {start}, stop {stop}, step {step})"
                    )));
                }
                if stop < start {
                    return Ok(Vec::new());
                }
                // round so that 0..1 step 0.25 lands exactly on 1
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub kind: Option<DynamicsKind>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub propagation: PropagationSpec,
    #[serde(default)]
    pub expressions: Vec<String>,
    #[serde(default)]
    pub nu: Vec<f64>,
    #[serde(default)]
    pub cutoff: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub packet: Option<PacketSpec>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| MepackError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| MepackError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn packet(&self) -> Result<PacketMoments> {
        self.packet
            .as_ref()
            .ok_or_else(|| MepackError::Config("packet: required by this mode".into()))?
            .to_packet()
    }

    pub fn potential(&self) -> Result<PolynomialPotential> {
        self.potential
            .as_ref()
            .ok_or_else(|| MepackError::Config("potential: required by this mode".into()))?
            .to_potential()
    }

    pub fn mode(&self) -> Result<Mode> {
        self.run
            .mode
            .ok_or_else(|| MepackError::Config("run.mode: missing (or pass --mode)".into()))
    }

    pub fn kind(&self) -> DynamicsKind {
        self.run.kind.unwrap_or_default()
    }

    pub fn order(&self, default: usize) -> Result<usize> {
        let order = self.run.order.unwrap_or(default);
        if order == 0 {
            return Err(MepackError::Config("run.order: must be at least 1".into()));
        }
        Ok(order)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        match &self.run.grid {
            Some(g) => g.times(),
            None => Err(MepackError::Config("run.grid: required by this mode".into())),
        }
    }

    /// Checks everything the selected mode needs before any work starts.
    pub fn validate(&self) -> Result<()> {
        let mode = self.mode()?;
        let needs_packet = matches!(mode, Mode::Evolve | Mode::LimitSweep | Mode::OracleCheck);
        if needs_packet {
            let packet = self.packet()?;
            let quantum = mode != Mode::Evolve || self.kind() == DynamicsKind::Quantum;
            if quantum && mode != Mode::LimitSweep {
                packet
                    .require_quantum()
                    .map_err(|e| MepackError::Config(format!("packet: {e}")))?;
            }
        } else if self.packet.is_some() {
            self.packet()?;
        }
        if matches!(mode, Mode::Evolve | Mode::Derivatives | Mode::Corrections | Mode::LimitSweep) || self.potential.is_some() {
            self.potential()?;
        }
        if mode == Mode::Evolve {
            self.grid()?;
        }
        if mode == Mode::Moments && self.run.expressions.is_empty() {
            return Err(MepackError::Config(
                "run.expressions: moments mode needs at least one expression (or --expr)".into(),
            ));
        }
        if mode == Mode::LimitSweep {
            if self.run.nu.is_empty() {
                return Err(MepackError::Config(
                    "run.nu: limit-sweep needs a list of nu values (or --nu)".into(),
                ));
            }
            if let Some(bad) = self.run.nu.iter().find(|&&nu| !(nu.is_finite() && nu > 1.0)) {
                return Err(MepackError::Config(format!(
                    "run.nu: {bad} violates the uncertainty bound (nu = 2 dQ dP / hbar must exceed 1 for a sweep)"
                )));
            }
        }
        for (i, e) in self.run.expressions.iter().enumerate() {
            crate::algebra::parse_words(e).map_err(|err| MepackError::Config(format!("run.expressions[{i}]: {err}")))?;
        }
        self.order(1)?;
        Ok(())
    }
}
