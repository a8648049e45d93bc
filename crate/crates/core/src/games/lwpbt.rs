use super::magic_square::{ms_observable, MsLine};
use super::{AliceQuestion, BobQuestion, Check, GameSpec, QuestionEntry};
use crate::error::{Error, Result};
use crate::qcore::{Letter, PauliWord, Phase};

/// Weight cap on linearity strings: `min(6, n)`.
pub fn linearity_cap(n: usize) -> usize {
    n.min(6)
}

/// The low-weight Pauli braiding test on `n` EPR pairs: linearity test and
/// anti-commutation test, each with probability 1/2.
pub fn lwpbt(n: usize) -> Result<GameSpec> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", msg: format!("needs n >= 2, got {n}") });
    }
    let mut entries = linearity_entries(n, 0.5)?;
    entries.extend(anti_commutation_entries(n, 0.5)?);
    GameSpec::new(format!("lwpbt{n}"), n, entries)
}

/// The linearity test alone.
pub fn linearity_test(n: usize) -> Result<GameSpec> {
    GameSpec::new(format!("linearity{n}"), n, linearity_entries(n, 1.0)?)
}

/// The braiding component of `G(H, p)`: [`lwpbt`] for `n >= 2`. A single
/// qubit has no position pair for the anti-commutation test, so `n = 1`
/// falls back to the linearity test.
pub fn braiding_test(n: usize) -> Result<GameSpec> {
    if n >= 2 {
        lwpbt(n)
    } else {
        linearity_test(n)
    }
}

fn linearity_entries(n: usize, weight: f64) -> Result<Vec<QuestionEntry>> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", msg: "needs n >= 1".into() });
    }
    if n > 16 {
        return Err(Error::TooManyQubits { qubits: 2 * n, cap: 32 });
    }
    let cap = linearity_cap(n);
    let strings: Vec<u64> = (0..1u64 << n).filter(|a| a.count_ones() as usize <= cap).collect();
    let pairs = (strings.len() * strings.len()) as f64;
    let mut entries = Vec::new();
    for &a in &strings {
        for &a2 in &strings {
            let union = a | a2;
            let sites: Vec<usize> = (0..n).filter(|&k| union >> (n - 1 - k) & 1 == 1).collect();
            let prob = weight / pairs / (1u64 << sites.len()) as f64 / 3.0;
            for pattern in 0..1u64 << sites.len() {
                // Z where the pattern bit is set, X elsewhere on the union
                let mut z = 0u64;
                for (pos, &k) in sites.iter().enumerate() {
                    if pattern >> (sites.len() - 1 - pos) & 1 == 1 {
                        z |= 1 << (n - 1 - k);
                    }
                }
                let w = PauliWord::from_masks(n, union & !z, z, Phase::PlusOne);
                let first = w.masked(a);
                let second = w.masked(a2);
                let alice = AliceQuestion::Linearity { first: first.clone(), second: second.clone() };
                for (bob, check) in [
                    (first, Check::LinearityFirst),
                    (second, Check::LinearitySecond),
                    (w.masked(a ^ a2), Check::LinearitySum),
                ] {
                    entries.push(QuestionEntry { prob, alice: alice.clone(), bob: BobQuestion::Pauli(bob), check });
                }
            }
        }
    }
    Ok(entries)
}

fn anti_commutation_entries(n: usize, weight: f64) -> Result<Vec<QuestionEntry>> {
    let position_pairs = n * (n - 1) / 2;
    let prob = weight / position_pairs as f64 / 6.0 / 3.0;
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for line in MsLine::ALL {
                for var in line.vars() {
                    let bob = if var == 9 {
                        BobQuestion::SpecialV9 { i, j }
                    } else {
                        BobQuestion::Pauli(ms_observable(var).embed(n, &[i, j])?)
                    };
                    entries.push(QuestionEntry {
                        prob,
                        alice: AliceQuestion::AntiCommutation { line, i, j },
                        bob,
                        check: Check::MagicSquare { line, var },
                    });
                }
            }
        }
    }
    Ok(entries)
}

/// Every XZ word of weight at most `cap` on `n` sites, in a fixed order.
pub fn xz_words(n: usize, cap: usize) -> Vec<PauliWord> {
    let mut out = Vec::new();
    for code in 0..3u64.pow(n as u32) {
        let mut c = code;
        let mut letters = vec![Letter::I; n];
        for slot in letters.iter_mut().rev() {
            *slot = [Letter::I, Letter::X, Letter::Z][(c % 3) as usize];
            c /= 3;
        }
        let w = PauliWord::from_letters(&letters);
        if w.weight() <= cap {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn question_counts() {
        let g = lwpbt(2).unwrap();
        // 7^n linearity pairs, C(n,2)·6 anti-commutation lines
        assert_eq!(g.alice_questions().len(), 49 + 6);
        assert_eq!(xz_words(2, 2).len(), 9);
        assert!(lwpbt(1).is_err());
    }
}
