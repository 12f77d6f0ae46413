//! Pure-state simulation of cavity-QED networks that entangle atoms or
//! cavity fields with a single flying photon or atom.
//!
//! - [`qstate`]: registers, dense pure states, unitaries and projections.
//! - [`iomodel`]: pulsed input-output dynamics of one cavity-atom block.
//! - [`elements`]: optical, atomic and cavity element unitaries.
//! - [`schemes`]: circuit builders, outcome enumeration and the retry walk.
//! - [`verify`]: target states, stabilizers and fidelities.
//! - [`cli`]: the `cqed-net` command-line front end.

pub mod cli;
pub mod elements;
pub mod error;
pub mod iomodel;
pub mod qstate;
pub mod schemes;
pub mod verify;

pub use error::{Error, Result};
pub use qstate::{PureState, Register, Subsystem, SubsystemKind, C64};
