use super::{AliceQuestion, BobQuestion, Check, GameSpec, QuestionEntry};
use crate::error::Result;
use crate::qcore::{Letter, PauliWord};

/// Lines of the 3×3 square `v1 v2 v3 / v4 v5 v6 / v7 v8 v9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MsLine {
    R1,
    R2,
    R3,
    C1,
    C2,
    C3,
}

impl MsLine {
    pub const ALL: [MsLine; 6] = [MsLine::R1, MsLine::R2, MsLine::R3, MsLine::C1, MsLine::C2, MsLine::C3];

    /// Variables on the line, in answer-bit order.
    pub fn vars(self) -> [u8; 3] {
        match self {
            MsLine::R1 => [1, 2, 3],
            MsLine::R2 => [4, 5, 6],
            MsLine::R3 => [7, 8, 9],
            MsLine::C1 => [1, 4, 7],
            MsLine::C2 => [2, 5, 8],
            MsLine::C3 => [3, 6, 9],
        }
    }

    /// Required XOR of the three answer bits.
    pub fn parity(self) -> u64 {
        u64::from(self == MsLine::C3)
    }

    pub fn position(self, var: u8) -> Option<usize> {
        self.vars().iter().position(|&v| v == var)
    }

    pub fn name(self) -> &'static str {
        match self {
            MsLine::R1 => "r1",
            MsLine::R2 => "r2",
            MsLine::R3 => "r3",
            MsLine::C1 => "c1",
            MsLine::C2 => "c2",
            MsLine::C3 => "c3",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

/// The two-qubit operator solution `A_1 … A_9`.
pub fn ms_observable(var: u8) -> PauliWord {
    use Letter::{I, X, Z};
    let w = |a, b| PauliWord::from_letters(&[a, b]);
    match var {
        1 => w(I, Z),
        2 => w(Z, I),
        3 => w(Z, Z),
        4 => w(X, I),
        5 => w(I, X),
        6 => w(X, X),
        7 => w(X, Z),
        8 => w(Z, X),
        // σ_Xσ_Z ⊗ σ_Zσ_X
        9 => &(&w(X, Z) * &w(Z, I)) * &w(I, X),
        _ => panic!("magic square variable {var} outside 1..=9"),
    }
}

/// Alice gets a line, Bob a uniformly random variable on it.
pub fn magic_square() -> Result<GameSpec> {
    let mut entries = Vec::with_capacity(18);
    for line in MsLine::ALL {
        for var in line.vars() {
            entries.push(QuestionEntry {
                prob: 1.0 / 18.0,
                alice: AliceQuestion::Line(line),
                bob: BobQuestion::Variable(var),
                check: Check::MagicSquare { line, var },
            });
        }
    }
    GameSpec::new("magic_square", 2, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_multiply_to_parity() {
        for line in MsLine::ALL {
            let [a, b, c] = line.vars().map(ms_observable);
            let prod = &(&a * &b) * &c;
            let expected = if line.parity() == 1 { PauliWord::identity(2).negated() } else { PauliWord::identity(2) };
            assert_eq!(prod, expected, "{line:?}");
            assert!(a.commutes_with(&b) && b.commutes_with(&c) && a.commutes_with(&c));
        }
        assert_eq!(ms_observable(9), "YY".parse().unwrap());
    }
}
