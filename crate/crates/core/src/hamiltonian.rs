//! XZ local Hamiltonians `H = (1/m) Σ γ_ℓ H_ℓ` with each `H_ℓ` a tensor
//! product of `I`, `X`, `Z`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Layout, Letter, PauliWord, StateVector, MAX_SITES};

/// Largest `n` accepted by [`XZHamiltonian::ground`].
pub const GROUND_MAX_QUBITS: usize = 12;

/// Locality above which linearity questions no longer cover every term.
pub const LWPBT_WEIGHT_CAP: usize = 6;

/// Register name of witness states.
pub const WITNESS: &str = "W";

#[derive(Debug, Clone, PartialEq)]
pub struct XZTerm {
    pub coeff: f64,
    pub word: PauliWord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XZHamiltonian {
    n: usize,
    k: usize,
    terms: Vec<XZTerm>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamFile {
    n: usize,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    coeff: f64,
    pauli: String,
}

/// A parsed Hamiltonian plus non-fatal findings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub hamiltonian: XZHamiltonian,
    pub warnings: Vec<String>,
}

impl XZHamiltonian {
    pub fn new(n: usize, k: usize, terms: Vec<XZTerm>) -> Result<Self> {
        let h = Self { n, k, terms, alpha: None, beta: None };
        h.validate().map_err(|(_, msg)| Error::InvalidHamiltonian(msg))?;
        Ok(h)
    }

    /// Builds from `(coeff, letters)` pairs, e.g. `(1.0, "ZZ")`.
    pub fn from_strs(n: usize, k: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let terms =
            terms.iter().map(|(c, s)| Ok(XZTerm { coeff: *c, word: parse_word(s)? })).collect::<Result<Vec<_>>>()?;
        Self::new(n, k, terms)
    }

    pub fn with_thresholds(mut self, alpha: f64, beta: f64) -> Result<Self> {
        self.alpha = Some(alpha);
        self.beta = Some(beta);
        self.validate().map_err(|(_, msg)| Error::InvalidHamiltonian(msg))?;
        Ok(self)
    }

    /// Checks every invariant; on failure returns the offending term index
    /// (if any) with a message.
    fn validate(&self) -> std::result::Result<(), (Option<usize>, String)> {
        if self.n == 0 || self.n > MAX_SITES {
            return Err((None, format!("n = {} outside 1..={MAX_SITES}", self.n)));
        }
        if self.terms.is_empty() {
            return Err((None, "no terms".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.word.len() != self.n {
                return Err((Some(i), format!("term {i} has {} sites, expected {}", t.word.len(), self.n)));
            }
            if !t.word.is_xz() {
                return Err((Some(i), format!("term {i} ({}) contains a Y letter", letters(&t.word))));
            }
            if !t.coeff.is_finite() || t.coeff.abs() > 1.0 {
                return Err((Some(i), format!("term {i} coefficient {} outside [-1, 1]", t.coeff)));
            }
            if t.word.weight() > self.k {
                return Err((Some(i), format!("term {i} has weight {} > k = {}", t.word.weight(), self.k)));
            }
        }
        // implied by the coefficient bound, kept as a guard on the derived quantity
        if self.gamma() > 1.0 {
            return Err((None, format!("gamma = {} exceeds 1", self.gamma())));
        }
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) if !(0.0 <= a && a < b && b <= 1.0) => {
                Err((None, format!("thresholds must satisfy 0 <= alpha < beta <= 1 (got {a}, {b})")))
            }
            (Some(t), None) | (None, Some(t)) if !(0.0..=1.0).contains(&t) => {
                Err((None, format!("threshold {t} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::parse_with_warnings(text)?.hamiltonian)
    }

    pub fn parse_with_warnings(text: &str) -> Result<Parsed> {
        let file: HamFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        let mut terms = Vec::with_capacity(file.terms.len());
        for (i, t) in file.terms.iter().enumerate() {
            let word = parse_word(&t.pauli).map_err(|_| Error::Parse {
                line: term_line(text, i),
                msg: format!("invalid Pauli string `{}`", t.pauli),
            })?;
            terms.push(XZTerm { coeff: t.coeff, word });
        }
        let h = Self { n: file.n, k: file.k, terms, alpha: file.alpha, beta: file.beta };
        h.validate()
            .map_err(|(term, msg)| Error::Parse { line: term.map(|i| term_line(text, i)).unwrap_or(1), msg })?;
        let mut warnings = Vec::new();
        if h.k > LWPBT_WEIGHT_CAP {
            warnings
                .push(format!("k = {} exceeds {LWPBT_WEIGHT_CAP}: linearity questions do not cover every term", h.k));
        }
        Ok(Parsed { hamiltonian: h, warnings })
    }

    pub fn serialize(&self) -> String {
        let file = HamFile {
            n: self.n,
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            terms: self.terms.iter().map(|t| TermFile { coeff: t.coeff, pauli: letters(&t.word) }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("Hamiltonian serialization cannot fail")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[XZTerm] {
        &self.terms
    }

    pub fn term(&self, l: usize) -> Result<&XZTerm> {
        self.terms.get(l).ok_or(Error::IndexOutOfRange { index: l, len: self.terms.len() })
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    /// `γ = (1/m) Σ |γ_ℓ|`.
    pub fn gamma(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum::<f64>() / self.m() as f64
    }

    /// `tr(Hρ)` for an `n`-qubit density matrix.
    pub fn energy(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.num_qubits() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, actual: rho.num_qubits() });
        }
        let targets: Vec<usize> = (0..self.n).collect();
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.coeff * rho.expectation(&t.word, &targets)?.re;
        }
        Ok(acc / self.m() as f64)
    }

    /// `⟨ψ|H|ψ⟩` for an `n`-qubit pure state.
    pub fn energy_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.num_qubits() != self.n {
            return Err(Error::WidthMismatch { expected: self.n, actual: psi.num_qubits() });
        }
        let amps = psi.amplitudes();
        let mut acc = 0.0;
        for t in &self.terms {
            let (x, z) = (t.word.x_mask() as usize, t.word.z_mask() as usize);
            let mut e = Complex64::new(0.0, 0.0);
            for (j, a) in amps.iter().enumerate() {
                let s = if (z & j).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                e += amps[j ^ x].conj() * a * s;
            }
            acc += t.coeff * e.re;
        }
        Ok(acc / self.m() as f64)
    }

    /// `⟨H_ℓ⟩_ρ` for a single term (without its coefficient).
    pub fn term_expectation(&self, l: usize, rho: &DensityMatrix) -> Result<f64> {
        let t = self.term(l)?;
        let targets: Vec<usize> = (0..self.n).collect();
        Ok(rho.expectation(&t.word, &targets)?.re)
    }

    /// Dense real matrix of `H` (all terms are real).
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.n > GROUND_MAX_QUBITS {
            return Err(Error::TooManyQubits { qubits: self.n, cap: GROUND_MAX_QUBITS });
        }
        let dim = 1usize << self.n;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        let m = self.m() as f64;
        for t in &self.terms {
            let (x, z) = (t.word.x_mask() as usize, t.word.z_mask() as usize);
            for j in 0..dim {
                let s = if (z & j).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                h[(j ^ x, j)] += t.coeff * s / m;
            }
        }
        Ok(h)
    }

    /// Minimum eigenvalue and a ground state on register `W`. Degenerate
    /// ground spaces resolve to the normalized projection of the lowest
    /// basis state with nonzero overlap; the phase is canonical.
    pub fn ground(&self) -> Result<(f64, StateVector)> {
        let h = self.to_matrix()?;
        let dim = h.nrows();
        let eig = SymmetricEigen::new(h);
        let lambda0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let cols: Vec<usize> = (0..dim).filter(|&c| eig.eigenvalues[c] - lambda0 < 1e-9).collect();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..dim {
            let mut v = vec![0.0; dim];
            for &c in &cols {
                let coef = eig.eigenvectors[(j, c)];
                for (r, slot) in v.iter_mut().enumerate() {
                    *slot += coef * eig.eigenvectors[(r, c)];
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for (slot, a) in amps.iter_mut().zip(&v) {
                    *slot = Complex64::new(a / norm, 0.0);
                }
                break;
            }
        }
        let layout = Layout::new(&[(WITNESS, self.n)])?;
        let state = StateVector::from_amplitudes(layout, amps)?.canonical_phase();
        Ok((lambda0, state))
    }

    /// Target energy used when none is given: `max(0, λ0)`.
    pub fn default_alpha(&self) -> Result<f64> {
        Ok(self.ground()?.0.max(0.0))
    }

    /// `D_ℓ`: every `(W, e)` with `W ∈ {X,Z}^n` and `σ_W(e) = H_ℓ`. `e` is
    /// the support of the term; off-support letters enumerate X before Z,
    /// lowest site most significant.
    pub fn decomposition_pairs(&self, l: usize) -> Result<Vec<(PauliWord, u64)>> {
        let t = self.term(l)?;
        let e = t.word.support();
        let free: Vec<usize> = (0..self.n).filter(|&k| t.word.letter(k) == Letter::I).collect();
        let mut out = Vec::with_capacity(1 << free.len());
        for pattern in 0..1u64 << free.len() {
            let mut letters_w = t.word.letters();
            for (pos, &site) in free.iter().enumerate() {
                let bit = pattern >> (free.len() - 1 - pos) & 1;
                letters_w[site] = if bit == 0 { Letter::X } else { Letter::Z };
            }
            out.push((PauliWord::from_letters(&letters_w), e));
        }
        Ok(out)
    }
}

/// Parses a Pauli string restricted to `I`, `X`, `Z` (Y is rejected later by
/// validation so the error can name the term).
fn parse_word(s: &str) -> Result<PauliWord> {
    let letters = s
        .chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::InvalidPauli(s.to_string())))
        .collect::<Result<Vec<_>>>()?;
    if letters.is_empty() || letters.len() > MAX_SITES {
        return Err(Error::InvalidPauli(s.to_string()));
    }
    Ok(PauliWord::from_letters(&letters))
}

/// The word's letters without phase, e.g. `XIZ`.
pub fn letters(w: &PauliWord) -> String {
    w.letters().iter().map(|l| l.as_char()).collect()
}

/// 1-based line of the `i`-th `"pauli"` key in the document.
fn term_line(text: &str, i: usize) -> usize {
    text.match_indices("\"pauli\"").nth(i).map(|(pos, _)| text[..pos].matches('\n').count() + 1).unwrap_or(1)
}
