use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MepackError {
    #[error("domain error: {0}")]
    Domain(String),

    /// Raised at quantum-module boundaries when nu == 1: the packet is the
    /// pure ground state and the Lagrange multipliers are singular.
    #[error("pure-state limit (nu = 1): multipliers diverge; use the Fock weights or the ground wavefunction instead")]
    PureStateLimit,

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unbound symbol `{0}` in numeric evaluation")]
    UnboundSymbol(String),

    #[error("Fock cutoff {cutoff} insufficient: neglected weight {tail:.3e} exceeds tolerance {tolerance:.1e}")]
    CutoffInsufficient { cutoff: usize, tail: f64, tolerance: f64 },

    #[error("evolution horizon exceeded: top-band leakage {leakage:.3e} above tolerance {tolerance:.1e} (raise the cutoff or shorten t)")]
    HorizonExceeded { leakage: f64, tolerance: f64 },

    #[error("Taylor propagation broke down at t = {t}: variance {variance:.3e} is not positive (shorten the grid or change the order)")]
    TaylorBreakdown { t: f64, variance: f64 },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, MepackError>;
