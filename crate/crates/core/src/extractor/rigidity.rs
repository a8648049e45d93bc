use num_complex::Complex64;
use serde::Serialize;

use super::extract::setup;
use super::oracle::OracleAccess;
use crate::error::{Error, Result};
use crate::games::{exact_loss, linearity_cap, lwpbt, xz_words, BobQuestion, Strategy};
use crate::hamiltonian::letters;
use crate::qcore::StateVector;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionDeviation {
    pub question: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub n: usize,
    pub deviations: Vec<QuestionDeviation>,
    pub max_deviation: f64,
    /// `1 − ω` on the braiding test.
    pub epsilon: f64,
    /// `max_deviation / (n⁶ ε^{1/4})`, when `ε > 0`.
    pub constant_estimate: Option<f64>,
}

/// `(⟨Φ+_n| ⊗ I)|v⟩` for the last `2n` qubits of `v`.
fn project_epr(v: &StateVector, rest: crate::qcore::Layout, n: usize) -> Result<StateVector> {
    let e = 1usize << (2 * n);
    let s = (1.0 / (1u64 << n) as f64).sqrt();
    let amps = (0..v.dim() / e)
        .map(|j| (0..1usize << n).map(|x| v.amplitudes()[j * e + (x << n | x)]).sum::<Complex64>() * s)
        .collect();
    StateVector::from_raw(rest, amps)
}

/// `‖W_B(a)|ψ⟩ − V_B† σ_W(a) V_B|ψ⟩‖` for every linearity question `W(a)`,
/// with `V_B` the swap gadget against a fresh `|Φ+_n⟩`.
pub fn rigidity_deviation(s: &Strategy, n: usize) -> Result<RigidityReport> {
    let oracle = OracleAccess::new(s);
    if oracle.n()? != n {
        return Err(Error::WidthMismatch { expected: n, actual: oracle.n()? });
    }
    let (prepared, u, _) = setup(&oracle)?;
    let u_inv = u.inverse();
    let rest = s.state().layout().clone();
    let questions: Vec<_> =
        xz_words(n, linearity_cap(n)).into_iter().map(BobQuestion::Pauli).filter(|q| s.bob_pvm(q).is_ok()).collect();
    let mut sq = vec![0.0; questions.len()];
    for ((w, psi), (_, joint)) in s.state().branches().iter().zip(prepared.branches()) {
        let swapped = u.run_with(joint, &oracle)?;
        for (slot, q) in sq.iter_mut().zip(&questions) {
            let BobQuestion::Pauli(word) = q else { unreachable!() };
            let lhs = s.bob_pvm(q)?.apply_observable(psi)?;
            let moved = swapped.apply_pauli_on(word, super::extract::OUT)?;
            let rhs = project_epr(&u_inv.run_with(&moved, &oracle)?, rest.clone(), n)?;
            let diff: f64 = lhs.amplitudes().iter().zip(rhs.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum();
            *slot += w * diff;
        }
    }
    let deviations: Vec<QuestionDeviation> = questions
        .iter()
        .zip(&sq)
        .map(|(q, d)| {
            let BobQuestion::Pauli(word) = q else { unreachable!() };
            QuestionDeviation { question: letters(word), deviation: d.sqrt() }
        })
        .collect();
    let max_deviation = deviations.iter().map(|d| d.deviation).fold(0.0, f64::max);
    let epsilon = exact_loss(&lwpbt(n)?, s)?;
    let constant_estimate = (epsilon > 0.0).then(|| max_deviation / ((n as f64).powi(6) * epsilon.powf(0.25)));
    Ok(RigidityReport { n, deviations, max_deviation, epsilon, constant_estimate })
}
