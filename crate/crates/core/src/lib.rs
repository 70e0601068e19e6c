//! Two-state qubit teleportation.
//!
//! Fidelity formulas for classical (measure-and-prepare) strategies,
//! teleportation through a non-maximally entangled pure channel,
//! channel purification and state-dependent telecloning, together with an
//! exact protocol-enumeration oracle that checks every closed form.

pub mod channel;
pub mod classical;
pub mod ensemble;
pub mod error;
pub mod mc;
pub mod optim;
pub mod protocol;
pub mod qcore;
pub mod telecloning;
pub mod verify;

pub use channel::{ChannelStrategyReport, Method};
pub use classical::{ClassicalStrategy, StrategyReport};
pub use ensemble::{Channel, TwoStateEnsemble};
pub use error::{Error, Result};
pub use mc::McEstimate;
pub use protocol::{ProtocolSpec, RngSeed};
pub use qcore::{
    apply_local, bell_measure, fidelity, partial_trace, tensor, von_neumann_entropy, BellOutcome,
    BellState, DensityMatrix, LocalOperator, PureState,
};
pub use telecloning::{CloneCoeffs, TelecloneResult, TelecloningSystem};
pub use verify::{CheckOutcome, VerifyConfig};
