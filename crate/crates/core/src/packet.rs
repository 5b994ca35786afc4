//! The four constraint values that define an ME packet.

use serde::{Deserialize, Serialize};

use crate::algebra::{Bindings, Symbol};
use crate::error::{MepackError, Result};

/// Averages and standard deviations of position and momentum for one
/// degree of freedom, optionally with a numeric `hbar`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketMoments {
    pub q: f64,
    pub p: f64,
    pub dq: f64,
    pub dp: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
}

impl PacketMoments {
    pub fn new(q: f64, p: f64, dq: f64, dp: f64) -> Result<Self> {
        let packet = PacketMoments {
            q,
            p,
            dq,
            dp,
            hbar: None,
        };
        packet.validate()?;
        Ok(packet)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(MepackError::Domain(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = Some(hbar);
        Ok(self)
    }

    /// Packet with the given `nu` at `hbar = 1`, splitting `dQ = dP = sqrt(nu/2)`.
    pub fn from_nu(q: f64, p: f64, nu: f64) -> Result<Self> {
        let width = (nu / 2.0).sqrt();
        PacketMoments::new(q, p, width, width)?.with_hbar(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("Q", self.q), ("P", self.p)] {
            if !v.is_finite() {
                return Err(MepackError::Domain(format!("{name} must be finite")));
            }
        }
        for (name, v) in [("dQ", self.dq), ("dP", self.dp)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(MepackError::Domain(format!(
                    "{name} must be a positive standard deviation, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn hbar_or_default(&self) -> f64 {
        self.hbar.unwrap_or(1.0)
    }

    /// `nu = 2 dQ dP / hbar` (with `hbar = 1` when unbound).
    pub fn nu(&self) -> f64 {
        2.0 * self.dq * self.dp / self.hbar_or_default()
    }

    /// Rejects packets below the uncertainty bound; returns `nu`.
    pub fn require_quantum(&self) -> Result<f64> {
        self.validate()?;
        let nu = self.nu();
        // tolerate rounding at the pure-state boundary
        if nu < 1.0 - 1e-12 {
            return Err(MepackError::Domain(format!(
                "nu = 2 dQ dP / hbar = {nu} violates the uncertainty bound nu >= 1"
            )));
        }
        Ok(nu.max(1.0))
    }

    /// Numeric values for `Q, P, dQ, dP, hbar, nu`.
    pub fn bindings(&self) -> Bindings {
        Bindings::new()
            .with(Symbol::Q, self.q)
            .with(Symbol::P, self.p)
            .with(Symbol::DQ, self.dq)
            .with(Symbol::DP, self.dp)
            .with(Symbol::Hbar, self.hbar_or_default())
            .with(Symbol::Nu, self.nu())
    }
}
