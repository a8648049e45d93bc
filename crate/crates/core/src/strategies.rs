//! Prover strategies: honest provers for each game, the semi-honest hook and
//! the deviations used in sweeps.

use crate::error::{Error, Result};
use crate::games::{braiding_test, ms_observable, xz_words, AliceQuestion, BobQuestion, GameSpec, MsLine, Strategy};
use crate::hamiltonian::{XZHamiltonian, WITNESS};
use crate::qcore::{DensityMatrix, Label, Layout, Letter, MixedState, PauliWord, Projector, Pvm, StateVector};

/// Alice's EPR half.
pub const EPR_A: &str = "A";
/// Bob's EPR half.
pub const EPR_B: &str = "B";
/// Alice's purification of a mixed witness.
pub const WITNESS_AUX: &str = "WAUX";
const COINS_A: &str = "RA";
const COINS_B: &str = "RB";

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl Witness {
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        Ok(Witness::Mixed(DensityMatrix::maximally_mixed(Layout::new(&[(WITNESS, n)])?)?))
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Witness::Pure(s) => s.num_qubits(),
            Witness::Mixed(r) => r.num_qubits(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            Witness::Pure(s) => s.to_density(),
            Witness::Mixed(r) => r.clone(),
        }
    }

    /// The witness as a pure state on `W` (plus `WAUX` when mixed).
    fn register_state(&self) -> Result<(StateVector, Vec<String>)> {
        let n = self.num_qubits();
        match self {
            Witness::Pure(s) => {
                let layout = Layout::new(&[(WITNESS, n)])?;
                Ok((StateVector::from_amplitudes(layout, s.amplitudes().to_vec())?, vec![WITNESS.into()]))
            }
            Witness::Mixed(r) => {
                let pure = r.purify(WITNESS, WITNESS_AUX)?;
                Ok((pure, vec![WITNESS.into(), WITNESS_AUX.into()]))
            }
        }
    }
}

fn regs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Honest Table 2 strategy for the stand-alone Magic Square game.
pub fn honest_magic_square() -> Result<Strategy> {
    let state = StateVector::epr_pairs(EPR_A, EPR_B, 2)?;
    let mut s = Strategy::new(MixedState::pure(state), regs(&[EPR_A]), regs(&[EPR_B]))?.with_epr(EPR_A, EPR_B)?;
    for line in MsLine::ALL {
        s.set_alice(AliceQuestion::Line(line), Pvm::joint(regs(&[EPR_A]), &line.vars().map(ms_observable))?)?;
    }
    for var in 1..=9 {
        s.set_bob(BobQuestion::Variable(var), Pvm::observable(regs(&[EPR_B]), &ms_observable(var))?)?;
    }
    Ok(s)
}

/// Honest braiding-test measurements: Alice's joint linearity and line
/// measurements on `A`, Bob's `σ_W(a)` for every XZ word and `v_9` on `B`.
fn add_honest_measurements(s: &mut Strategy, n: usize) -> Result<()> {
    for q in braiding_test(n)?.alice_questions() {
        let pvm = match q {
            AliceQuestion::Linearity { first, second } => Pvm::joint(regs(&[EPR_A]), &[first.clone(), second.clone()])?,
            AliceQuestion::AntiCommutation { line, i, j } => {
                let words = line
                    .vars()
                    .map(|v| ms_observable(v).embed(n, &[*i, *j]))
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                Pvm::joint(regs(&[EPR_A]), &words)?
            }
            _ => continue,
        };
        s.set_alice(q.clone(), pvm)?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = ms_observable(9).embed(n, &[i, j])?;
            s.set_bob(BobQuestion::SpecialV9 { i, j }, Pvm::observable(regs(&[EPR_B]), &w)?)?;
        }
    }
    for w in xz_words(n, n) {
        let pvm = Pvm::observable(regs(&[EPR_B]), &w)?;
        s.set_bob(BobQuestion::Pauli(w), pvm)?;
    }
    Ok(())
}

/// `n` EPR pairs measured with the honest Pauli observables.
pub fn honest_lwpbt(n: usize) -> Result<Strategy> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", msg: format!("needs n >= 2, got {n}") });
    }
    let state = StateVector::epr_pairs(EPR_A, EPR_B, n)?;
    let mut s = Strategy::new(MixedState::pure(state), regs(&[EPR_A]), regs(&[EPR_B]))?.with_epr(EPR_A, EPR_B)?;
    add_honest_measurements(&mut s, n)?;
    Ok(s)
}

/// Honest prover pair for `G(H, p)`: Alice additionally holds the witness
/// and answers "Teleport" with a Bell measurement of (witness, her halves).
pub fn honest_ham(h: &XZHamiltonian, witness: &Witness) -> Result<Strategy> {
    let n = h.n();
    if witness.num_qubits() != n {
        return Err(Error::WidthMismatch { expected: n, actual: witness.num_qubits() });
    }
    let (ws, mut alice) = witness.register_state()?;
    alice.push(EPR_A.into());
    let state = ws.tensor(&StateVector::epr_pairs(EPR_A, EPR_B, n)?)?;
    let mut s = Strategy::new(MixedState::pure(state), alice, regs(&[EPR_B]))?.with_epr(EPR_A, EPR_B)?;
    s.set_alice(AliceQuestion::Teleport, Pvm::bell(WITNESS, EPR_A, n))?;
    add_honest_measurements(&mut s, n)?;
    Ok(s)
}

/// Replaces Alice's "Teleport" measurement by an arbitrary PVM on her
/// registers with labels in `{0,1}^{2n}`.
pub fn semi_honest(base: &Strategy, teleport: Pvm) -> Result<Strategy> {
    let (a, _) = base.epr().ok_or_else(|| Error::InvalidStrategy("base strategy has no EPR block".into()))?;
    let n = base.state().layout().width(a)?;
    if teleport.labels().any(|l| l >> (2 * n) != 0) {
        return Err(Error::InvalidStrategy("teleport answers must be 2n-bit strings".into()));
    }
    let mut s = base.clone();
    s.set_alice(AliceQuestion::Teleport, teleport)?;
    Ok(s)
}

/// Per-qubit depolarization of the EPR block; everything else unchanged.
pub fn depolarized(base: &Strategy, delta: f64) -> Result<Strategy> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter { name: "delta", msg: format!("{delta} outside [0, 1]") });
    }
    let (a, b) = base.epr().ok_or_else(|| Error::InvalidStrategy("base strategy has no EPR block".into()))?;
    let state = base.state().depolarize(&[a, b], delta)?;
    base.clone().with_state(state)
}

/// Bob reports the opposite of every bit.
pub fn bit_flip_bob(base: &Strategy) -> Strategy {
    base.clone().map_bob_labels(|l: Label| l ^ 1)
}

/// `count` fair coins on the leading qubits of a `width`-qubit `|+⟩` register
/// read in the computational basis; `bits` is the outcome, MSB first.
fn coin_projector(width: usize, count: usize, bits: u64) -> Projector {
    let words = (0..count)
        .map(|k| {
            let z = PauliWord::single(width, k, Letter::Z);
            if bits >> (count - 1 - k) & 1 == 1 {
                z.negated()
            } else {
                z
            }
        })
        .collect();
    Projector::Stabilizer(words)
}

/// Unentangled provers answering uniformly at random among valid answers.
pub fn classical_random(g: &GameSpec) -> Result<Strategy> {
    let n = g.n();
    let width =
        g.alice_questions().iter().map(|q| if **q == AliceQuestion::Teleport { 2 * n } else { 2 }).max().unwrap_or(2);
    let state = StateVector::plus(COINS_A, width)?.tensor(&StateVector::plus(COINS_B, 1)?)?;
    let mut s = Strategy::new(MixedState::pure(state), regs(&[COINS_A]), regs(&[COINS_B]))?;
    for q in g.alice_questions() {
        let outcomes: Vec<(Label, Projector)> = match q {
            AliceQuestion::Line(line) | AliceQuestion::AntiCommutation { line, .. } => (0..4u64)
                .map(|x| {
                    let x3 = line.parity() ^ (x >> 1) ^ (x & 1);
                    (x << 1 | x3, coin_projector(width, 2, x))
                })
                .collect(),
            AliceQuestion::Linearity { .. } => (0..4u64).map(|x| (x, coin_projector(width, 2, x))).collect(),
            AliceQuestion::Teleport => (0..1u64 << (2 * n)).map(|x| (x, coin_projector(width, 2 * n, x))).collect(),
        };
        s.set_alice(q.clone(), Pvm::new(regs(&[COINS_A]), width, outcomes))?;
    }
    let coin = Pvm::observable(regs(&[COINS_B]), &PauliWord::single(1, 0, Letter::Z))?;
    for q in g.bob_questions() {
        s.set_bob(q.clone(), coin.clone())?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_valid_measurements() {
        honest_magic_square().unwrap().validate_measurements(1e-10).unwrap();
        honest_lwpbt(2).unwrap().validate_measurements(1e-10).unwrap();
        let g = crate::games::lwpbt(2).unwrap();
        let c = classical_random(&g).unwrap();
        c.covers(&g).unwrap();
        c.validate_measurements(1e-10).unwrap();
    }

    #[test]
    fn witness_width_is_checked() {
        let h = XZHamiltonian::from_strs(2, 2, &[(1.0, "ZZ")]).unwrap();
        let w = Witness::Pure(StateVector::plus("W", 1).unwrap());
        assert!(honest_ham(&h, &w).is_err());
    }
}
