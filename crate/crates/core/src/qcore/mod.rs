//! Dense quantum-state kernel: statevectors and density matrices over named
//! registers, phase-tracked Pauli words, projective measurements and
//! teleportation primitives.

mod density;
mod ensemble;
mod layout;
mod pauli;
mod pvm;
mod state;

pub use density::{fidelity, trace_distance, DensityMatrix};
pub use ensemble::MixedState;
pub use layout::{max_qubits, Layout, Register, DEFAULT_MAX_QUBITS};
pub use pauli::{Letter, PauliWord, Phase, MAX_SITES};
pub use pvm::{bell_measure, measure_pvm, pvm_distribution, Label, Projector, Pvm, TeleportKey};
pub use state::StateVector;

/// Tolerance for construction invariants (norms, traces, hermiticity).
pub const TOL_CONSTRUCT: f64 = 1e-10;
/// Tolerance for equality assertions.
pub const TOL_EQ: f64 = 1e-9;
/// Tolerance for quantities accumulated through whole circuits.
pub const TOL_CIRCUIT: f64 = 1e-8;

/// `w|ψ⟩` on a named register.
pub fn apply_pauli(state: &StateVector, w: &PauliWord, target: &str) -> crate::Result<StateVector> {
    state.apply_pauli_on(w, target)
}

/// Controlled word: see [`StateVector::controlled_apply`].
pub fn controlled_apply(state: &StateVector, w: &PauliWord, target: &str, control: &str) -> crate::Result<StateVector> {
    let layout = state.layout();
    let t = layout.qubits(&[target])?;
    let c = layout.qubits(&[control])?;
    if target == control {
        return Err(crate::Error::Overlap(format!("register `{target}` is both control and target")));
    }
    state.controlled_apply(w, &t, &c)
}

pub fn partial_trace<S: AsRef<str>>(rho: &DensityMatrix, keep: &[S]) -> crate::Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn depolarize(rho: &DensityMatrix, register: &str, delta: f64) -> crate::Result<DensityMatrix> {
    rho.depolarize(register, delta)
}
