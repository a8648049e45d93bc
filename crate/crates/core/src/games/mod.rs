//! Non-local games: question distributions, predicates, strategies, exact
//! values and sampled play.

mod energy;
mod lwpbt;
mod magic_square;
mod play;
mod strategy;
mod value;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::hamiltonian::{letters, XZHamiltonian};
use crate::qcore::{Label, PauliWord};

pub use energy::energy_test;
pub use lwpbt::{braiding_test, linearity_cap, linearity_test, lwpbt, xz_words};
pub use magic_square::{magic_square, ms_observable, MsLine};
pub use play::{estimate_value, hoeffding_half_width, play, Estimate, PlayOutcome, Theta, Transcript};
pub use strategy::Strategy;
pub use value::{exact_loss, exact_value, value_breakdown, EntryValue, ValueBreakdown};

/// Tolerance on the total question probability.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AliceQuestion {
    /// A Magic Square line (stand-alone game).
    Line(MsLine),
    /// Linearity test: the pair `(W(a), W(a'))`.
    Linearity {
        first: PauliWord,
        second: PauliWord,
    },
    /// Anti-commutation test: a line played on positions `i < j`.
    AntiCommutation {
        line: MsLine,
        i: usize,
        j: usize,
    },
    Teleport,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BobQuestion {
    /// A Magic Square variable `1..=9` (stand-alone game).
    Variable(u8),
    /// An XZ word `W(a)`.
    Pauli(PauliWord),
    /// The `v_9` variable on positions `i < j`.
    SpecialV9 { i: usize, j: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subtest {
    MagicSquare,
    Linearity,
    AntiCommutation,
    Energy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// Bob's bit equals Alice's first bit.
    LinearityFirst,
    LinearitySecond,
    /// Bob's bit equals the XOR of Alice's bits.
    LinearitySum,
    /// Alice's assignment satisfies the line parity and agrees with Bob on `var`.
    MagicSquare {
        line: MsLine,
        var: u8,
    },
    /// Energy-test predicate for term `term`.
    Energy {
        term: usize,
        coeff: f64,
        word: PauliWord,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionEntry {
    pub prob: f64,
    pub alice: AliceQuestion,
    pub bob: BobQuestion,
    pub check: Check,
}

/// A finite question distribution with its predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    name: String,
    n: usize,
    entries: Vec<QuestionEntry>,
}

impl AliceQuestion {
    /// Number of declared answers; labels run over `0..count`.
    pub fn answer_count(&self, n: usize) -> u64 {
        match self {
            AliceQuestion::Line(_) | AliceQuestion::AntiCommutation { .. } => 8,
            AliceQuestion::Linearity { .. } => 4,
            AliceQuestion::Teleport => 1 << (2 * n),
        }
    }

    pub fn subtest(&self) -> Subtest {
        match self {
            AliceQuestion::Line(_) => Subtest::MagicSquare,
            AliceQuestion::Linearity { .. } => Subtest::Linearity,
            AliceQuestion::AntiCommutation { .. } => Subtest::AntiCommutation,
            AliceQuestion::Teleport => Subtest::Energy,
        }
    }
}

impl BobQuestion {
    pub fn answer_count(&self) -> u64 {
        2
    }
}

impl Check {
    /// Probability that the verifier accepts answers `(alice, bob)`.
    pub fn accept(&self, alice: Label, bob: Label, n: usize) -> f64 {
        let yes = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Check::LinearityFirst => yes(alice >> 1 & 1 == bob),
            Check::LinearitySecond => yes(alice & 1 == bob),
            Check::LinearitySum => yes((alice >> 1 ^ alice) & 1 == bob),
            Check::MagicSquare { line, var } => {
                let assignment = alice & 7;
                let Some(pos) = line.position(*var) else { return 0.0 };
                let parity = u64::from(assignment.count_ones() % 2 == 1);
                yes(parity == line.parity() && assignment >> (2 - pos) & 1 == bob)
            }
            Check::Energy { coeff, word, .. } => {
                let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
                let (a, b) = (alice >> n & mask, alice & mask);
                // d_i = (−1)^{α_i} on Z positions, (−1)^{β_i} on X positions
                let flips = (a & word.z_mask()).count_ones() + (b & word.x_mask()).count_ones() + bob as u32;
                let product_negative = flips % 2 == 1;
                if product_negative == (*coeff < 0.0) {
                    1.0 - coeff.abs()
                } else {
                    1.0
                }
            }
        }
    }
}

impl GameSpec {
    pub fn new(name: impl Into<String>, n: usize, entries: Vec<QuestionEntry>) -> Result<Self> {
        let g = Self { name: name.into(), n, entries };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::InvalidGame("no questions".into()));
        }
        let mut total = 0.0;
        for e in &self.entries {
            if !(0.0..=1.0).contains(&e.prob) {
                return Err(Error::ProbabilityOutOfRange(e.prob));
            }
            total += e.prob;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidGame(format!("question probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of EPR pairs the honest strategy uses.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[QuestionEntry] {
        &self.entries
    }

    pub fn alice_questions(&self) -> BTreeSet<&AliceQuestion> {
        self.entries.iter().map(|e| &e.alice).collect()
    }

    pub fn bob_questions(&self) -> BTreeSet<&BobQuestion> {
        self.entries.iter().map(|e| &e.bob).collect()
    }

    /// Total probability of each sub-test.
    pub fn subtest_weights(&self) -> Vec<(Subtest, f64)> {
        let mut out: Vec<(Subtest, f64)> = Vec::new();
        for e in &self.entries {
            let s = e.alice.subtest();
            match out.iter_mut().find(|(t, _)| *t == s) {
                Some((_, w)) => *w += e.prob,
                None => out.push((s, e.prob)),
            }
        }
        out
    }

    /// `wa·a + (1 − wa)·b` as a single question distribution.
    pub fn mix(name: impl Into<String>, a: &GameSpec, b: &GameSpec, wa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&wa) {
            return Err(Error::ProbabilityOutOfRange(wa));
        }
        if a.n != b.n {
            return Err(Error::WidthMismatch { expected: a.n, actual: b.n });
        }
        let entries = (a.entries.iter().map(|e| (e, wa)))
            .chain(b.entries.iter().map(|e| (e, 1.0 - wa)))
            .map(|(e, w)| QuestionEntry { prob: e.prob * w, ..e.clone() })
            .collect();
        Self::new(name, a.n, entries)
    }
}

/// `G(H, p)`: the linearity/anti-commutation test with probability `1 − p`
/// and the energy test with probability `p`.
pub fn hamiltonian_game(h: &XZHamiltonian, p: f64) -> Result<GameSpec> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter { name: "p", msg: format!("{p} outside [0, 1]") });
    }
    GameSpec::mix("hamiltonian", &braiding_test(h.n())?, &energy_test(h)?, 1.0 - p)
}

impl fmt::Display for MsLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for AliceQuestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AliceQuestion::Line(l) => write!(f, "line:{l}"),
            AliceQuestion::Linearity { first, second } => write!(f, "lin:{},{}", letters(first), letters(second)),
            AliceQuestion::AntiCommutation { line, i, j } => write!(f, "ac:{line}@{i},{j}"),
            AliceQuestion::Teleport => f.write_str("teleport"),
        }
    }
}

impl fmt::Display for BobQuestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BobQuestion::Variable(k) => write!(f, "var:v{k}"),
            BobQuestion::Pauli(w) => write!(f, "pauli:{}", letters(w)),
            BobQuestion::SpecialV9 { i, j } => write!(f, "v9@{i},{j}"),
        }
    }
}

impl fmt::Display for Subtest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subtest::MagicSquare => "magic_square",
            Subtest::Linearity => "linearity",
            Subtest::AntiCommutation => "anti_commutation",
            Subtest::Energy => "energy",
        })
    }
}
