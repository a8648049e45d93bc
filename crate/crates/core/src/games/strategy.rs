use std::collections::BTreeMap;

use super::{AliceQuestion, BobQuestion, GameSpec};
use crate::error::{Error, Result};
use crate::qcore::{Label, MixedState, Pvm};

/// A quantum strategy: a shared state split between the two provers and one
/// measurement per question, each acting on its owner's registers only.
#[derive(Debug, Clone)]
pub struct Strategy {
    state: MixedState,
    alice_registers: Vec<String>,
    bob_registers: Vec<String>,
    alice: BTreeMap<AliceQuestion, Pvm>,
    bob: BTreeMap<BobQuestion, Pvm>,
    epr: Option<(String, String)>,
}

impl Strategy {
    pub fn new(state: MixedState, alice_registers: Vec<String>, bob_registers: Vec<String>) -> Result<Self> {
        let layout = state.layout();
        let mut seen: Vec<&str> = Vec::new();
        for r in alice_registers.iter().chain(&bob_registers) {
            layout.register(r)?;
            if seen.contains(&r.as_str()) {
                return Err(Error::Overlap(format!("register `{r}` assigned twice")));
            }
            seen.push(r);
        }
        if seen.len() != layout.registers().len() {
            return Err(Error::InvalidStrategy("every register must belong to a prover".into()));
        }
        Ok(Self { state, alice_registers, bob_registers, alice: BTreeMap::new(), bob: BTreeMap::new(), epr: None })
    }

    /// Records which registers hold the EPR block `(Alice half, Bob half)`.
    pub fn with_epr(mut self, alice_half: &str, bob_half: &str) -> Result<Self> {
        if !self.alice_registers.iter().any(|r| r == alice_half) || !self.bob_registers.iter().any(|r| r == bob_half) {
            return Err(Error::InvalidStrategy("EPR halves must be owned by Alice and Bob respectively".into()));
        }
        self.epr = Some((alice_half.to_string(), bob_half.to_string()));
        Ok(self)
    }

    fn check_local(&self, pvm: &Pvm, owner: &[String]) -> Result<()> {
        if let Some(r) = pvm.registers().iter().find(|r| !owner.contains(r)) {
            return Err(Error::InvalidStrategy(format!("measurement touches foreign register `{r}`")));
        }
        pvm.targets(self.state.layout())?;
        Ok(())
    }

    pub fn set_alice(&mut self, q: AliceQuestion, pvm: Pvm) -> Result<()> {
        self.check_local(&pvm, &self.alice_registers)?;
        self.alice.insert(q, pvm);
        Ok(())
    }

    pub fn set_bob(&mut self, q: BobQuestion, pvm: Pvm) -> Result<()> {
        self.check_local(&pvm, &self.bob_registers)?;
        self.bob.insert(q, pvm);
        Ok(())
    }

    /// Same measurements on a new state over the same layout.
    pub fn with_state(mut self, state: MixedState) -> Result<Self> {
        if state.layout() != self.state.layout() {
            return Err(Error::InvalidStrategy("replacement state has a different layout".into()));
        }
        self.state = state;
        Ok(self)
    }

    /// Relabels every Bob outcome.
    pub fn map_bob_labels(mut self, f: impl Fn(Label) -> Label) -> Self {
        for pvm in self.bob.values_mut() {
            *pvm = pvm.relabeled(&f);
        }
        self
    }

    pub fn state(&self) -> &MixedState {
        &self.state
    }

    pub fn alice_registers(&self) -> &[String] {
        &self.alice_registers
    }

    pub fn bob_registers(&self) -> &[String] {
        &self.bob_registers
    }

    pub fn epr(&self) -> Option<(&str, &str)> {
        self.epr.as_ref().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn alice_pvm(&self, q: &AliceQuestion) -> Result<&Pvm> {
        self.alice.get(q).ok_or_else(|| Error::MissingPvm(q.to_string()))
    }

    pub fn bob_pvm(&self, q: &BobQuestion) -> Result<&Pvm> {
        self.bob.get(q).ok_or_else(|| Error::MissingPvm(q.to_string()))
    }

    pub fn alice_questions(&self) -> impl Iterator<Item = &AliceQuestion> {
        self.alice.keys()
    }

    pub fn bob_questions(&self) -> impl Iterator<Item = &BobQuestion> {
        self.bob.keys()
    }

    /// Checks that every question of `g` has a measurement whose labels lie
    /// in the declared answer set.
    pub fn covers(&self, g: &GameSpec) -> Result<()> {
        for q in g.alice_questions() {
            let count = q.answer_count(g.n());
            if self.alice_pvm(q)?.labels().any(|l| l >= count) {
                return Err(Error::InvalidStrategy(format!("answer outside the declared set for {q}")));
            }
        }
        for q in g.bob_questions() {
            if self.bob_pvm(q)?.labels().any(|l| l >= q.answer_count()) {
                return Err(Error::InvalidStrategy(format!("answer outside the declared set for {q}")));
            }
        }
        Ok(())
    }

    /// Runs the dense PVM axiom checks on every measurement.
    pub fn validate_measurements(&self, tol: f64) -> Result<()> {
        for pvm in self.alice.values().chain(self.bob.values()) {
            pvm.validate(tol)?;
        }
        Ok(())
    }
}
