use nalgebra::DMatrix;
use num_complex::Complex64;

use super::oracle::{OracleAccess, Query};
use crate::error::{Error, Result};
use crate::games::BobQuestion;
use crate::qcore::{Layout, Letter, PauliWord, StateVector};

/// A gate on global qubit indices of a fixed layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    ControlledPauli {
        control: usize,
        word: PauliWord,
        targets: Vec<usize>,
    },
    /// A prover observable controlled by a public qubit, through the oracle.
    ControlledObservable {
        control: usize,
        query: BobQuestion,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Reversed circuit with every gate inverted. Binary observables square
    /// to the identity, so their controlled versions are self-inverse.
    pub fn inverse(&self) -> Circuit {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| match g {
                Gate::ControlledPauli { control, word, targets } => {
                    Gate::ControlledPauli { control: *control, word: word.inverse(), targets: targets.clone() }
                }
                other => other.clone(),
            })
            .collect();
        Circuit { gates }
    }

    /// Runs a circuit without oracle gates.
    pub fn run(&self, state: &StateVector) -> Result<StateVector> {
        self.execute(state, None)
    }

    /// Runs through the oracle: prover registers are reachable only via
    /// controlled observables, every other gate must act on public qubits.
    pub fn run_with(&self, state: &StateVector, oracle: &OracleAccess) -> Result<StateVector> {
        self.execute(state, Some(oracle))
    }

    fn execute(&self, state: &StateVector, oracle: Option<&OracleAccess>) -> Result<StateVector> {
        let mut s = state.clone();
        let public = |qs: &[usize]| match oracle {
            Some(o) => o.check_public(state.layout(), qs),
            None => Ok(()),
        };
        for g in &self.gates {
            match g {
                Gate::Hadamard(q) => {
                    public(&[*q])?;
                    s.hadamard_mut(*q)?;
                }
                Gate::Cnot { control, target } => {
                    public(&[*control, *target])?;
                    s.cnot_mut(*control, *target)?;
                }
                Gate::ControlledPauli { control, word, targets } => {
                    public(&[*control])?;
                    public(targets)?;
                    s = s.controlled_apply(word, targets, &[*control])?;
                }
                Gate::ControlledObservable { control, query } => {
                    let o = oracle.ok_or_else(|| Error::OracleRefused("observable gate needs an oracle".into()))?;
                    s = o.controlled_observable(&s, &Query::Bob(query.clone()), *control)?;
                }
            }
        }
        Ok(s)
    }
}

fn paired(layout: &Layout, a: &str, b: &str) -> Result<(Vec<usize>, Vec<usize>)> {
    let qa = layout.qubits(&[a])?;
    let qb = layout.qubits(&[b])?;
    if qa.len() != qb.len() {
        return Err(Error::WidthMismatch { expected: qa.len(), actual: qb.len() });
    }
    Ok((qa, qb))
}

/// The reference swap acting directly on `target`: controlled-σ_X,
/// `H^{⊗n}`, controlled-σ_Z, `H^{⊗n}`, controlled-σ_X, each controlled
/// qubit-wise by `e1`. With `(e1, e2)` in `|Φ+⟩` it moves `target` into `e1`.
pub fn ideal_swap(layout: &Layout, target: &str, e1: &str) -> Result<Circuit> {
    let (t, e) = paired(layout, target, e1)?;
    let mut c = Circuit::new();
    let x = PauliWord::from_letters(&[Letter::X]);
    let z = PauliWord::from_letters(&[Letter::Z]);
    let controlled = |c: &mut Circuit, w: &PauliWord| {
        for (tq, eq) in t.iter().zip(&e) {
            c.push(Gate::ControlledPauli { control: *eq, word: w.clone(), targets: vec![*tq] });
        }
    };
    let hadamards = |c: &mut Circuit| e.iter().for_each(|q| c.push(Gate::Hadamard(*q)));
    controlled(&mut c, &x);
    hadamards(&mut c);
    controlled(&mut c, &z);
    hadamards(&mut c);
    controlled(&mut c, &x);
    Ok(c)
}

/// The swap isometry built from Bob's single-site observables: `H^{⊗n}` on
/// `e1`, controlled `Z_B(e_j)`, `H^{⊗n}`, controlled `X_B(e_i)`, then CNOTs
/// from `e2` into `e1`.
pub fn swap_gadget(oracle: &OracleAccess, layout: &Layout, e1: &str, e2: &str) -> Result<Circuit> {
    let n = oracle.n()?;
    let (q1, q2) = paired(layout, e1, e2)?;
    if q1.len() != n {
        return Err(Error::WidthMismatch { expected: n, actual: q1.len() });
    }
    let question = |k: usize, l: Letter| BobQuestion::Pauli(PauliWord::single(n, k, l));
    for k in 0..n {
        for l in [Letter::X, Letter::Z] {
            if !oracle.has(&Query::Bob(question(k, l))) {
                return Err(Error::OracleRefused(format!("no observable for {}", question(k, l))));
            }
        }
    }
    let mut c = Circuit::new();
    q1.iter().for_each(|q| c.push(Gate::Hadamard(*q)));
    for (j, q) in q1.iter().enumerate() {
        c.push(Gate::ControlledObservable { control: *q, query: question(j, Letter::Z) });
    }
    q1.iter().for_each(|q| c.push(Gate::Hadamard(*q)));
    for (i, q) in q1.iter().enumerate() {
        c.push(Gate::ControlledObservable { control: *q, query: question(i, Letter::X) });
    }
    for (a, b) in q2.iter().zip(&q1) {
        c.push(Gate::Cnot { control: *a, target: *b });
    }
    Ok(c)
}

/// Spectral norm of `A − B` for two maps given column by column.
pub fn operator_distance(a: &[StateVector], b: &[StateVector]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    let cols: Vec<Vec<Complex64>> =
        a.iter().zip(b).map(|(x, y)| x.amplitudes().iter().zip(y.amplitudes()).map(|(p, q)| p - q).collect()).collect();
    let k = cols.len();
    let mut gram = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v: Complex64 = cols[i].iter().zip(&cols[j]).map(|(p, q)| p.conj() * q).sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
    }
    let top = gram.symmetric_eigenvalues().iter().copied().fold(0.0, f64::max);
    Ok(top.max(0.0).sqrt())
}
