//! Measure-and-retransmit strategies for symmetric qubit ensembles.
//!
//! The crate computes the minimum error probability and the maximum
//! fidelity of a relay that measures one of `m` equiprobable symmetric qubit
//! states and prepares a replacement, both in closed form and by an
//! independent numerical search over rank-one POMs. A Monte Carlo simulator
//! estimates the same quantities empirically.

// Range checks are written `!(x <= limit)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod fidelity;
pub mod measurements;
pub mod optimizer;
pub mod qubit;
pub mod simulator;
pub mod tolerance;

pub use ensembles::{apply_generator, symmetric_ensemble, SymmetricEnsemble};
pub use error::{Error, Result};
pub use fidelity::{
    fidelity_of_strategy, max_fidelity_analytic, o_k_operator, optimal_retransmission,
    optimal_strategy_analytic, FidelityReport, Strategy,
};
pub use measurements::{
    error_probability, min_error_analytic, outcome_probabilities, square_root_measurement,
    validate_pom, Assignment, Pom, PomViolation,
};
pub use qubit::{bloch_vector, hermitian_eig2, make_qubit, overlap_prob, BlochVector, Hermitian2, PureQubit};
pub use simulator::{simulate_error, simulate_fidelity, SimResult};
