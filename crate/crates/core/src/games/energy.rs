use super::{AliceQuestion, BobQuestion, Check, GameSpec, QuestionEntry};
use crate::error::Result;
use crate::hamiltonian::XZHamiltonian;

/// The energy test: a uniformly random term `ℓ` and `(W, e) ∈ D_ℓ`; Alice is
/// asked to teleport, Bob to measure `σ_W(e) = H_ℓ`. Every pair of `D_ℓ`
/// yields the same question, so the pairs are merged into one entry per
/// term.
pub fn energy_test(h: &XZHamiltonian) -> Result<GameSpec> {
    let m = h.m() as f64;
    let entries = h
        .terms()
        .iter()
        .enumerate()
        .map(|(l, t)| QuestionEntry {
            prob: 1.0 / m,
            alice: AliceQuestion::Teleport,
            bob: BobQuestion::Pauli(t.word.clone()),
            check: Check::Energy { term: l, coeff: t.coeff, word: t.word.clone() },
        })
        .collect();
    GameSpec::new("energy", h.n(), entries)
}
