use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::games::{AliceQuestion, BobQuestion, Strategy};
use crate::qcore::{Layout, MixedState, Pvm, StateVector, TeleportKey};

/// A measurement a prover can be asked to perform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Alice(AliceQuestion),
    Bob(BobQuestion),
}

/// One entry of the access log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum OracleCall {
    /// Provers' state tensored with fresh public registers.
    Prepare {
        registers: Vec<String>,
    },
    ControlledObservable {
        query: String,
        control: usize,
    },
    /// Alice's "Teleport" measurement; `coherent` when the outcome is written
    /// to a message register instead of being read classically.
    Teleport {
        coherent: bool,
    },
    InjectMessage {
        register: String,
        qubits: usize,
    },
}

/// Black-box access to a strategy. Every operation is a prover's local
/// measurement or observable, possibly controlled by public qubits; private
/// registers are never read.
#[derive(Debug)]
pub struct OracleAccess<'a> {
    strategy: &'a Strategy,
    log: Mutex<Vec<OracleCall>>,
}

impl<'a> OracleAccess<'a> {
    pub fn new(strategy: &'a Strategy) -> Self {
        Self { strategy, log: Mutex::new(Vec::new()) }
    }

    fn record(&self, call: OracleCall) {
        self.log.lock().expect("oracle log poisoned").push(call);
    }

    pub fn log(&self) -> Vec<OracleCall> {
        self.log.lock().expect("oracle log poisoned").clone()
    }

    /// The audited strategy, for the verifier's own bookkeeping.
    pub(crate) fn strategy(&self) -> &Strategy {
        self.strategy
    }

    /// Width of Bob's EPR half.
    pub fn n(&self) -> Result<usize> {
        let (_, b) = self.strategy.epr().ok_or_else(|| Error::OracleRefused("strategy exposes no EPR block".into()))?;
        self.strategy.state().layout().width(b)
    }

    pub fn has(&self, query: &Query) -> bool {
        match query {
            Query::Alice(q) => self.strategy.alice_pvm(q).is_ok(),
            Query::Bob(q) => self.strategy.bob_pvm(q).is_ok(),
        }
    }

    fn is_private(&self, layout: &Layout, qubit: usize) -> bool {
        layout
            .registers()
            .iter()
            .any(|r| r.range().contains(&qubit) && self.strategy.state().layout().contains(&r.name))
    }

    /// Fails unless every listed qubit lies in a public register.
    pub fn check_public(&self, layout: &Layout, qubits: &[usize]) -> Result<()> {
        match qubits.iter().find(|&&q| self.is_private(layout, q)) {
            Some(q) => Err(Error::OracleRefused(format!("qubit {q} belongs to a prover"))),
            None => Ok(()),
        }
    }

    /// The provers' state tensored with `public` (whose registers must be
    /// new).
    pub fn prepare(&self, public: &StateVector) -> Result<MixedState> {
        let registers = public.layout().registers().iter().map(|r| r.name.clone()).collect();
        self.record(OracleCall::Prepare { registers });
        self.strategy.state().tensor(public)
    }

    fn pvm(&self, query: &Query) -> Result<&Pvm> {
        match query {
            Query::Alice(q) => self.strategy.alice_pvm(q),
            Query::Bob(q) => self.strategy.bob_pvm(q),
        }
        .map_err(|e| Error::OracleRefused(e.to_string()))
    }

    /// Applies the prover's observable for `query` on the `|1⟩` branch of the
    /// public qubit `control`. An `m`-outcome measurement is used as the
    /// observable `Σ_k e^{2πik/m} P_k` (labels in increasing order), which
    /// is `P_0 − P_1` for binary answers.
    pub fn controlled_observable(&self, state: &StateVector, query: &Query, control: usize) -> Result<StateVector> {
        self.check_public(state.layout(), &[control])?;
        let pvm = self.pvm(query)?;
        let name = match query {
            Query::Alice(q) => format!("alice:{q}"),
            Query::Bob(q) => format!("bob:{q}"),
        };
        self.record(OracleCall::ControlledObservable { query: name, control });
        state.controlled_by(control, |s| observable(pvm, s))
    }

    fn teleport_pvm(&self) -> Result<&Pvm> {
        self.pvm(&Query::Alice(AliceQuestion::Teleport))
    }

    /// Number of "Teleport" outcomes (`4^n`).
    pub fn teleport_outcomes(&self) -> Result<usize> {
        Ok(self.teleport_pvm()?.outcomes().len())
    }

    /// Unnormalized branch `k` of Alice's "Teleport" measurement and its key.
    pub fn teleport_branch(&self, state: &StateVector, k: usize) -> Result<(TeleportKey, StateVector)> {
        let n = self.n()?;
        let pvm = self.teleport_pvm()?;
        self.record(OracleCall::Teleport { coherent: false });
        let label = pvm.outcomes().get(k).ok_or(Error::IndexOutOfRange { index: k, len: pvm.outcomes().len() })?.0;
        Ok((TeleportKey::unpack(label, n), pvm.project(state, k)?))
    }

    /// Samples Alice's "Teleport" answer.
    pub fn teleport_sample<R: Rng + ?Sized>(
        &self,
        state: &StateVector,
        rng: &mut R,
    ) -> Result<(TeleportKey, StateVector)> {
        let n = self.n()?;
        self.record(OracleCall::Teleport { coherent: false });
        let (label, post) = self.teleport_pvm()?.measure(state, rng)?;
        Ok((TeleportKey::unpack(label, n), post))
    }

    /// Runs "Teleport" coherently: appends a `2n`-qubit message register
    /// `msg` holding the answer, `Σ_l P_l|ψ⟩ ⊗ |l⟩`.
    pub fn teleport_coherent(&self, state: &StateVector, msg: &str) -> Result<StateVector> {
        let n = self.n()?;
        let pvm = self.teleport_pvm()?;
        self.record(OracleCall::Teleport { coherent: true });
        let width = 2 * n;
        let layout = state.layout().concat(&Layout::new(&[(msg, width)])?)?;
        layout.check_cap()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); state.dim() << width];
        for (k, (label, _)) in pvm.outcomes().iter().enumerate() {
            let v = pvm.project(state, k)?;
            for (j, a) in v.amplitudes().iter().enumerate() {
                amps[(j << width) | *label as usize] = *a;
            }
        }
        StateVector::from_amplitudes(layout, amps)
    }

    /// Appends `content` as new public message registers.
    pub fn inject_message(&self, state: &StateVector, content: &StateVector) -> Result<StateVector> {
        for r in content.layout().registers() {
            self.record(OracleCall::InjectMessage { register: r.name.clone(), qubits: r.len });
        }
        state.tensor(content)
    }
}

fn observable(pvm: &Pvm, state: &StateVector) -> Result<StateVector> {
    let mut labels: Vec<(u64, usize)> = pvm.outcomes().iter().enumerate().map(|(k, (l, _))| (*l, k)).collect();
    if labels.len() == 2 && labels.iter().all(|(l, _)| *l < 2) {
        return pvm.apply_observable(state);
    }
    labels.sort_unstable();
    let m = labels.len() as f64;
    let mut acc = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (pos, (_, k)) in labels.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, 2.0 * PI * pos as f64 / m);
        for (slot, a) in acc.iter_mut().zip(pvm.project(state, *k)?.amplitudes()) {
            *slot += phase * a;
        }
    }
    StateVector::from_raw(state.layout().clone(), acc)
}
