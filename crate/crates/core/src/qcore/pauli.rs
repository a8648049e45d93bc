//! Phase-tracked Pauli words.
//!
//! A word on `n` sites is stored as a pair of bit masks plus a power of `i`.
//! Site `k` (0-based, left to right) lives at bit `n - 1 - k`, the same
//! most-significant-first convention used for amplitude indices, so a mask
//! read as an integer is also the basis index it flips.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest word length representable by the bit masks.
pub const MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Z => (false, true),
            Letter::Y => (true, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Global phase of a Pauli word, a power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power(k: u8) -> Self {
        match k & 3 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        i_pow(self.power())
    }

    pub fn is_real(self) -> bool {
        self.power() & 1 == 0
    }
}

pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// An `n`-site Pauli operator `i^k · P_1 ⊗ … ⊗ P_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_SITES, "Pauli word longer than {MAX_SITES} sites");
        Self { n, x: 0, z: 0, phase: 0 }
    }

    /// Builds a word from raw site masks (site `k` at bit `n - 1 - k`).
    pub fn from_masks(n: usize, x: u64, z: u64, phase: Phase) -> Self {
        assert!(n <= MAX_SITES, "Pauli word longer than {MAX_SITES} sites");
        let keep = full_mask(n);
        Self { n, x: x & keep, z: z & keep, phase: phase.power() }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let n = letters.len();
        let mut w = Self::identity(n);
        for (k, l) in letters.iter().enumerate() {
            w.set_letter(k, *l);
        }
        w
    }

    /// A single letter at site `k`, identity elsewhere.
    pub fn single(n: usize, k: usize, letter: Letter) -> Self {
        let mut w = Self::identity(n);
        w.set_letter(k, letter);
        w
    }

    fn bit(&self, k: usize) -> u64 {
        1u64 << (self.n - 1 - k)
    }

    fn set_letter(&mut self, k: usize, letter: Letter) {
        let b = self.bit(k);
        let (x, z) = letter.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        Phase::from_power(self.phase)
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase.power();
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn letter(&self, k: usize) -> Letter {
        let b = self.bit(k);
        Letter::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n).map(|k| self.letter(k)).collect()
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Mask of non-identity sites.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// True when no site carries `Y`.
    pub fn is_xz(&self) -> bool {
        self.x & self.z == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Hermitian words (real phase) are ±1-valued observables.
    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Inverse, which for a Pauli word is its adjoint.
    pub fn inverse(&self) -> Self {
        let mut w = self.clone();
        w.phase = (4 - self.phase) & 3;
        w
    }

    /// Power of `i` picked up when the word acts as `X^x Z^z` on basis states,
    /// that is `w = i^k X^x Z^z` (each `Y` contributes `i`).
    pub(crate) fn xz_form_phase(&self) -> u8 {
        (self.phase + ((self.x & self.z).count_ones() % 4) as u8) & 3
    }

    pub fn tensor(&self, other: &Self) -> Self {
        assert!(self.n + other.n <= MAX_SITES);
        Self {
            n: self.n + other.n,
            x: (self.x << other.n) | other.x,
            z: (self.z << other.n) | other.z,
            phase: (self.phase + other.phase) & 3,
        }
    }

    /// Places this word on the given sites of an `n`-site word.
    pub fn embed(&self, n: usize, sites: &[usize]) -> Result<Self> {
        if sites.len() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, actual: sites.len() });
        }
        let mut out = Self::identity(n);
        for (k, &s) in sites.iter().enumerate() {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, len: n });
            }
            if out.letter(s) != Letter::I {
                return Err(Error::Overlap(format!("site {s} used twice")));
            }
            out.set_letter(s, self.letter(k));
        }
        out.phase = self.phase;
        Ok(out)
    }

    /// Restricts to the sites where `mask` is set: the `σ_W(a)` selection.
    pub fn masked(&self, mask: u64) -> Self {
        let mask = mask & full_mask(self.n);
        Self { n: self.n, x: self.x & mask, z: self.z & mask, phase: self.phase }
    }

    /// Dense `2^n × 2^n` matrix. Only intended for small words.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        let ph = self.xz_form_phase();
        for j in 0..dim {
            let sign = if (self.z & j as u64).count_ones() % 2 == 1 { 2 } else { 0 };
            m[(j ^ self.x as usize, j)] = i_pow(ph + sign);
        }
        m
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Mul for &PauliWord {
    type Output = PauliWord;

    fn mul(self, rhs: &PauliWord) -> PauliWord {
        assert_eq!(self.n, rhs.n, "multiplying Pauli words of different length");
        // Write each factor as i^k X^x Z^z, then move Z^{z1} past X^{x2}.
        let k1 = self.xz_form_phase();
        let k2 = rhs.xz_form_phase();
        let swap = 2 * ((self.z & rhs.x).count_ones() % 2) as u8;
        let x = self.x ^ rhs.x;
        let z = self.z ^ rhs.z;
        let ys = ((x & z).count_ones() % 4) as u8;
        PauliWord { n: self.n, x, z, phase: (k1 + k2 + swap + 4 - ys) & 3 }
    }
}

impl Mul for PauliWord {
    type Output = PauliWord;

    fn mul(self, rhs: PauliWord) -> PauliWord {
        &self * &rhs
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase() {
            Phase::PlusOne => "+",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `+i`, `-i`) followed
    /// by letters over `IXYZ`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("+i") {
            (Phase::PlusI, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (Phase::PlusI, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (Phase::PlusOne, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, t)
        };
        if body.len() > MAX_SITES {
            return Err(Error::InvalidPauli(s.to_string()));
        }
        let letters = body
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::InvalidPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliWord::from_letters(&letters).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn single_site_products() {
        assert_eq!(&w("X") * &w("Z"), w("-iY"));
        assert_eq!(&w("Z") * &w("X"), w("+iY"));
        assert_eq!(&w("X") * &w("Y"), w("+iZ"));
        assert_eq!(&w("Y") * &w("Y"), w("I"));
        // anti-commutation of X and Z
        assert_eq!(&w("X") * &w("Z"), (&w("Z") * &w("X")).negated());
    }

    #[test]
    fn magic_square_corner_is_hermitian() {
        let a9 = (&w("XZ") * &w("ZX")).with_phase(Phase::PlusOne);
        let xz = &w("X") * &w("Z");
        let zx = &w("Z") * &w("X");
        let product = xz.tensor(&zx);
        assert_eq!(product, w("YY"));
        assert!(product.is_hermitian());
        assert_eq!(a9.letters(), vec![Letter::Y, Letter::Y]);
    }

    #[test]
    fn masks_follow_msb_first_convention() {
        let p = w("XIZ");
        assert_eq!(p.x_mask(), 0b100);
        assert_eq!(p.z_mask(), 0b001);
        assert_eq!(p.weight(), 2);
        assert_eq!(p.masked(0b001), w("IIZ"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("XQ".parse::<PauliWord>().is_err());
        assert_eq!(w("-iXY").phase(), Phase::MinusI);
        assert_eq!(w("-iXY").to_string(), "-iXY");
    }

    #[test]
    fn embed_places_letters() {
        let p = w("XZ").embed(4, &[1, 3]).unwrap();
        assert_eq!(p, w("IXIZ"));
        assert!(w("XZ").embed(4, &[1, 1]).is_err());
    }
}
