//! Simulation of the two-prover Hamiltonian game (low-weight Pauli braiding
//! test plus energy test) and of the knowledge extractor that recovers a
//! low-energy witness from any strategy winning it with high probability.
//!
//! Everything is exact and dense: states up to ~22 qubits, game values by
//! full enumeration of the question distribution, and the extractor output
//! as the exact mixture over all teleportation keys.

pub mod error;
pub mod extractor;
pub mod games;
pub mod hamiltonian;
pub mod params;
pub mod qcore;
pub mod strategies;

pub use error::{Error, Result};
