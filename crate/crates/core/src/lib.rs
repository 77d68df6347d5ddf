//! Relativistic scattering, bound states and vacuum pair production for the
//! one-dimensional Dirac equation with piecewise-constant potentials.
//!
//! Units are natural (ħ = c = 1) and every routine takes the fermion mass
//! explicitly, so the default `m = 1` only fixes the scale.
//!
//! * [`dirac`]: plane waves, the momentum branch rule, spinor algebra.
//! * [`analytic`]: closed-form step, barrier, Sauter and Coulomb results.
//! * [`transfer`]: numerical transfer matrices for arbitrary staircases.
//! * [`spectrum`]: delta and square well bound states, charge bookkeeping.
//! * [`vacuum`]: Klein-zone normal modes and the pair-production current.

pub mod analytic;
pub mod dirac;
mod error;
pub mod quad;
pub mod roots;
pub mod spectrum;
pub mod transfer;
pub mod vacuum;

pub use error::{Error, Result};

pub use analytic::ScatteringResult;
pub use dirac::{Direction, Mass, Normalization, PlaneWaveMode, Regime, Spinor};
pub use spectrum::{BoundState, ChargeLedger, Parity};
pub use transfer::{PotentialProfile, Segment, TransferResult};
