//! Simulation and verification toolkit for a Bell-type argument without
//! inequalities that needs no shared reference frame.
//!
//! Two observers each receive four qubits of an eight-qubit state built from
//! the two four-qubit singlet states. Because every ingredient is invariant
//! under `U⊗4`, the perfect correlations survive collective decoherence and
//! arbitrary local rotations of the measurement setups.
//!
//! Module map:
//! - [`qcore`]: dense states, SU(2) sampling, partial traces, projective measurement
//! - [`dfs_states`]: the singlet states, the source state and the observables F, G
//! - [`correlations`]: exact joint and conditional outcome probabilities
//! - [`localmeas`]: the single-qubit measurement protocol and experiment simulator
//! - [`distinguish`]: which singlet-subspace pairs fixed product measurements separate
//! - [`hardy`]: local-hidden-variable feasibility and the optimal probabilities
//! - [`decohere`]: collective-decoherence channel and immunity checks

pub mod correlations;
pub mod decohere;
pub mod dfs_states;
pub mod distinguish;
pub mod error;
pub mod hardy;
pub mod localmeas;
pub mod optim;
pub mod qcore;
pub mod seeding;

pub use error::{Error, Result};
