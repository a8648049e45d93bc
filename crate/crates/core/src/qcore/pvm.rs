use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::layout::Layout;
use super::pauli::{Letter, PauliWord};
use super::StateVector;
use crate::error::{Error, Result};

/// Outcome label of a measurement. Multi-bit answers are packed
/// most-significant-first.
pub type Label = u64;

/// A projector on the local qubits of a [`Pvm`].
#[derive(Debug, Clone, PartialEq)]
pub enum Projector {
    /// `Π_k (I + w_k)/2` for pairwise commuting Hermitian words; the sign of
    /// each factor is the word's phase.
    Stabilizer(Vec<PauliWord>),
    Dense(DMatrix<Complex64>),
}

impl Projector {
    fn apply(&self, state: &StateVector, targets: &[usize]) -> Result<StateVector> {
        match self {
            Projector::Stabilizer(words) => {
                let mut out = state.clone();
                for w in words {
                    let flipped = out.apply_pauli(w, targets)?;
                    let amps = out.amplitudes().iter().zip(flipped.amplitudes()).map(|(a, b)| (a + b) * 0.5).collect();
                    out = StateVector::from_raw(out.layout().clone(), amps)?;
                }
                Ok(out)
            }
            Projector::Dense(m) => state.apply_matrix(m, targets),
        }
    }

    /// Dense matrix on `width` local qubits.
    pub fn to_matrix(&self, width: usize) -> DMatrix<Complex64> {
        match self {
            Projector::Dense(m) => m.clone(),
            Projector::Stabilizer(words) => {
                let dim = 1usize << width;
                let mut m = DMatrix::identity(dim, dim);
                let id = DMatrix::<Complex64>::identity(dim, dim);
                for w in words {
                    m = m * (&id + w.to_matrix()) * Complex64::new(0.5, 0.0);
                }
                m
            }
        }
    }
}

/// Projective measurement on an ordered list of named registers.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm {
    registers: Vec<String>,
    width: usize,
    outcomes: Vec<(Label, Projector)>,
}

impl Pvm {
    pub fn new(registers: Vec<String>, width: usize, outcomes: Vec<(Label, Projector)>) -> Self {
        Self { registers, width, outcomes }
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn outcomes(&self) -> &[(Label, Projector)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.outcomes.iter().map(|(l, _)| *l)
    }

    /// Two-outcome measurement of a Hermitian word: label 0 is the `+1`
    /// eigenspace, label 1 the `−1` eigenspace.
    pub fn observable(registers: Vec<String>, word: &PauliWord) -> Result<Self> {
        if !word.is_hermitian() {
            return Err(Error::MalformedPvm(format!("{word} is not Hermitian")));
        }
        let width = word.len();
        Ok(Self::new(
            registers,
            width,
            vec![
                (0, Projector::Stabilizer(vec![word.clone()])),
                (1, Projector::Stabilizer(vec![word.clone().negated()])),
            ],
        ))
    }

    /// Joint measurement of commuting Hermitian words; the label packs one
    /// bit per word, first word most significant.
    pub fn joint(registers: Vec<String>, words: &[PauliWord]) -> Result<Self> {
        let width = words.first().map(|w| w.len()).unwrap_or(0);
        for (i, a) in words.iter().enumerate() {
            if !a.is_hermitian() || a.len() != width {
                return Err(Error::MalformedPvm(format!("{a} cannot be jointly measured")));
            }
            if words[i + 1..].iter().any(|b| !a.commutes_with(b)) {
                return Err(Error::MalformedPvm(format!("{a} does not commute with its partners")));
            }
        }
        let k = words.len();
        let outcomes = (0..1u64 << k)
            .map(|label| {
                let factors = words
                    .iter()
                    .enumerate()
                    .map(|(i, w)| if label >> (k - 1 - i) & 1 == 1 { w.clone().negated() } else { w.clone() })
                    .collect();
                (label, Projector::Stabilizer(factors))
            })
            .collect();
        Ok(Self::new(registers, width, outcomes))
    }

    /// Computational-basis measurement on `width` qubits.
    pub fn computational(registers: Vec<String>, width: usize) -> Self {
        let words: Vec<PauliWord> = (0..width).map(|k| PauliWord::single(width, k, Letter::Z)).collect();
        Self::joint(registers, &words).expect("single-site Z words commute")
    }

    /// Bell measurement pairing qubit `i` of `first` with qubit `i` of
    /// `second`. Labels pack a [`TeleportKey`].
    pub fn bell(first: &str, second: &str, n: usize) -> Self {
        let width = 2 * n;
        let outcomes = (0..1u64 << width)
            .map(|label| {
                let key = TeleportKey::unpack(label, n);
                let mut factors = Vec::with_capacity(width);
                for i in 0..n {
                    let xx = PauliWord::single(width, i, Letter::X) * PauliWord::single(width, n + i, Letter::X);
                    let zz = PauliWord::single(width, i, Letter::Z) * PauliWord::single(width, n + i, Letter::Z);
                    // outcome state (I ⊗ X^a Z^b)|Φ+⟩: XX sign (−1)^b, ZZ sign (−1)^a
                    factors.push(if key.b_bit(i, n) { xx.negated() } else { xx });
                    factors.push(if key.a_bit(i, n) { zz.negated() } else { zz });
                }
                (label, Projector::Stabilizer(factors))
            })
            .collect();
        Self::new(vec![first.to_string(), second.to_string()], width, outcomes)
    }

    /// Same projectors under new labels.
    pub fn relabeled(&self, f: impl Fn(Label) -> Label) -> Self {
        let outcomes = self.outcomes.iter().map(|(l, p)| (f(*l), p.clone())).collect();
        Self::new(self.registers.clone(), self.width, outcomes)
    }

    pub fn targets(&self, layout: &Layout) -> Result<Vec<usize>> {
        let q = layout.qubits(&self.registers)?;
        if q.len() != self.width {
            return Err(Error::WidthMismatch { expected: self.width, actual: q.len() });
        }
        Ok(q)
    }

    /// Unnormalized post-measurement vector for outcome index `idx`.
    pub fn project(&self, state: &StateVector, idx: usize) -> Result<StateVector> {
        let targets = self.targets(state.layout())?;
        self.outcomes[idx].1.apply(state, &targets)
    }

    /// All unnormalized branches, in outcome order.
    pub fn branches(&self, state: &StateVector) -> Result<Vec<(Label, StateVector)>> {
        let targets = self.targets(state.layout())?;
        self.outcomes.iter().map(|(l, p)| Ok((*l, p.apply(state, &targets)?))).collect()
    }

    /// Born distribution in outcome order.
    pub fn distribution(&self, state: &StateVector) -> Result<Vec<(Label, f64)>> {
        Ok(self.branches(state)?.into_iter().map(|(l, v)| (l, v.norm_sqr())).collect())
    }

    /// Samples an outcome and returns the renormalized post-state.
    pub fn measure<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Result<(Label, StateVector)> {
        let branches = self.branches(state)?;
        let total: f64 = branches.iter().map(|(_, v)| v.norm_sqr()).sum();
        let u = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let last = branches.len() - 1;
        for (i, (label, v)) in branches.into_iter().enumerate() {
            let p = v.norm_sqr();
            acc += p;
            if u < acc || i == last {
                if p.sqrt() < 1e-14 {
                    return Err(Error::ImpossibleOutcome(label));
                }
                return Ok((label, v.normalized()?));
            }
        }
        unreachable!("measurement with no outcomes")
    }

    /// `O|ψ⟩ = (P_0 − P_1)|ψ⟩` for a two-outcome PVM labelled {0, 1}.
    pub fn apply_observable(&self, state: &StateVector) -> Result<StateVector> {
        let (p0, p1) = self.binary_indices()?;
        let a = self.project(state, p0)?;
        let b = self.project(state, p1)?;
        let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x - y).collect();
        StateVector::from_raw(state.layout().clone(), amps)
    }

    fn binary_indices(&self) -> Result<(usize, usize)> {
        let find = |l| self.outcomes.iter().position(|(x, _)| *x == l);
        match (self.outcomes.len(), find(0), find(1)) {
            (2, Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::MalformedPvm("not a two-outcome {0,1} measurement".into())),
        }
    }

    /// Checks the PVM axioms on the dense local operators.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let dim = 1usize << self.width;
        let mats: Vec<DMatrix<Complex64>> = self.outcomes.iter().map(|(_, p)| p.to_matrix(self.width)).collect();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        let maxabs = |m: &DMatrix<Complex64>| m.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (i, p) in mats.iter().enumerate() {
            if p.nrows() != dim {
                return Err(Error::MalformedPvm(format!("projector {i} has wrong dimension")));
            }
            if maxabs(&(p - p.adjoint())) > tol {
                return Err(Error::MalformedPvm(format!("projector {i} is not Hermitian")));
            }
            if maxabs(&(p * p - p)) > tol {
                return Err(Error::MalformedPvm(format!("projector {i} is not idempotent")));
            }
            for (j, q) in mats.iter().enumerate().skip(i + 1) {
                if maxabs(&(p * q)) > tol {
                    return Err(Error::MalformedPvm(format!("projectors {i} and {j} are not orthogonal")));
                }
            }
            sum += p;
        }
        if maxabs(&(sum - DMatrix::identity(dim, dim))) > tol {
            return Err(Error::MalformedPvm("projectors do not sum to identity".into()));
        }
        let mut labels: Vec<Label> = self.labels().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.outcomes.len() {
            return Err(Error::MalformedPvm("duplicate outcome labels".into()));
        }
        Ok(())
    }
}

/// Teleportation keys: `a` is the X-correction key, `b` the Z-correction
/// key, so applying `σ_X^a` then `σ_Z^b` restores the teleported state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TeleportKey {
    pub a: u64,
    pub b: u64,
}

impl TeleportKey {
    pub fn pack(self, n: usize) -> Label {
        (self.a << n) | self.b
    }

    pub fn unpack(label: Label, n: usize) -> Self {
        let mask = (1u64 << n) - 1;
        Self { a: (label >> n) & mask, b: label & mask }
    }

    fn a_bit(self, i: usize, n: usize) -> bool {
        self.a >> (n - 1 - i) & 1 == 1
    }

    fn b_bit(self, i: usize, n: usize) -> bool {
        self.b >> (n - 1 - i) & 1 == 1
    }

    /// The restoring correction `σ_Z^b σ_X^a` (X applied first).
    pub fn correction(self, n: usize) -> PauliWord {
        let x = PauliWord::from_masks(n, self.a, 0, super::Phase::PlusOne);
        let z = PauliWord::from_masks(n, 0, self.b, super::Phase::PlusOne);
        &z * &x
    }

    pub fn all(n: usize) -> impl Iterator<Item = TeleportKey> {
        (0..1u64 << (2 * n)).map(move |l| TeleportKey::unpack(l, n))
    }
}

/// Samples a PVM outcome; returns the label and the renormalized state.
pub fn measure_pvm<R: Rng + ?Sized>(state: &StateVector, pvm: &Pvm, rng: &mut R) -> Result<(Label, StateVector)> {
    pvm.measure(state, rng)
}

/// Exact Born distribution of a PVM.
pub fn pvm_distribution(state: &StateVector, pvm: &Pvm) -> Result<Vec<(Label, f64)>> {
    pvm.distribution(state)
}

/// Bell measurement of `half1` against `half2` (equal widths). Returns the
/// X-key, the Z-key and the renormalized post-state.
pub fn bell_measure<R: Rng + ?Sized>(
    state: &StateVector,
    half1: &str,
    half2: &str,
    rng: &mut R,
) -> Result<(u64, u64, StateVector)> {
    let n = state.layout().width(half1)?;
    let m = state.layout().width(half2)?;
    if n != m {
        return Err(Error::WidthMismatch { expected: n, actual: m });
    }
    let (label, post) = Pvm::bell(half1, half2, n).measure(state, rng)?;
    let key = TeleportKey::unpack(label, n);
    Ok((key.a, key.b, post))
}
