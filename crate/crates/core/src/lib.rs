//! Truncated Fock-space simulator for a harmonic oscillator coupled to the two
//! polarizations of a single graviton mode, with the tripartite entanglement
//! witnesses built on two-mode third-order correlations.
//!
//! Modules, bottom-up:
//!
//! - [`fock`]: three-mode truncated basis, states, dense operators, ensembles.
//! - [`opdsl`]: parser and evaluator for ladder-operator expressions.
//! - [`model`]: physical constants, couplings, polarization, Hamiltonian.
//! - [`expm`]: matrix exponential by scaling and squaring.
//! - [`dynamics`]: exact and first-order evolution from the vacuum.
//! - [`witness`]: inseparability values and the genuine-tripartite witnesses.
//! - [`bisep`]: random biseparable states and the falsification run.

pub mod bisep;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod fock;
pub mod model;
pub mod opdsl;
pub mod witness;

pub use error::{Error, Result};
pub use fock::{Ensemble, FockSpace, Mode, Normalization, Operator, StateVector};
