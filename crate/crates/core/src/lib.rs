//! Maximum-entropy phase-space packets.
//!
//! Classical packets are Gaussian distributions fixed by the averages and
//! variances of position and momentum; quantum packets are the density
//! operators maximizing von Neumann entropy under the same four
//! constraints. The crate computes their moments and entropy exactly,
//! evolves them under polynomial potentials and isolates the quantum
//! corrections to the averaged equations of motion.

pub mod algebra;
pub mod classical;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod packet;
pub mod partition;
pub mod quantum;

pub use error::{MepackError, Result};
pub use packet::PacketMoments;
