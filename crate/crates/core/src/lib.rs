//! Labeling of transmon-cavity eigenstates and the quantities built on it.
//!
//! The crate builds the composite Hamiltonian of a transmon capacitively
//! coupled to a single cavity mode, diagonalizes it densely, and assigns
//! "qubit level p, photon number n" labels to eigenstates with four
//! strategies (overlap, block, recursive, and energy-window continuity of
//! the qubit occupancy). Labeled ladders give the photon-number-dependent
//! cavity frequency, whose peaks and drops mark resonances with higher
//! transmon levels. Driven dynamics in the lab and displaced frames serve
//! as an independent check of which labeling the system actually follows.

pub mod cache;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod labeling;
pub mod linalg;
pub mod observables;
pub mod operators;
pub mod output;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use operators::{CompositeLayout, CouplingForm, OperatorMatrix, QubitEigensystem, SystemSpec};
pub use spectrum::EigenSolution;
pub use labeling::{ContinuityConfig, FirstStep, LabelLadder, Method};
