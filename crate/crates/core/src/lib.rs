//! Two coupled two-level atoms excited by single-photon and coherent pulses.
//!
//! The crate computes the dipole-dipole couplings of an atom pair, builds
//! temporal envelopes for the input field and integrates the atomic dynamics
//! with two independent single-photon solvers and a coherent-state solver.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherent;
pub mod couplings;
pub mod error;
pub mod fock;
pub mod io;
pub mod ode;
pub mod operators;
pub mod optimize;
pub mod pulse;
pub mod quadrature;
pub mod trajectory;

pub use couplings::{AtomPairConfig, CollectiveRates, RatesRow, KR_MIN};
pub use error::{Error, Result};
pub use fock::{InitialState, SolverOptions, CLS_SIGN};
pub use pulse::{Channel, PhotonMode, Side, SpatialProfile, TemporalEnvelope};
pub use trajectory::{Population, StateTrajectory};
