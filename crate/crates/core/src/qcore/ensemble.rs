use num_complex::Complex64;

use super::layout::Layout;
use super::pauli::{Letter, PauliWord};
use super::{DensityMatrix, StateVector, TOL_CONSTRUCT};
use crate::error::{Error, Result};

/// A mixed state kept as a weighted ensemble of pure states over a common
/// layout. Every quantity computed from it is linear in the weights, so the
/// ensemble never has to be densified.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    branches: Vec<(f64, StateVector)>,
}

impl MixedState {
    pub fn pure(state: StateVector) -> Self {
        Self { branches: vec![(1.0, state)] }
    }

    pub fn new(branches: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = branches.first().ok_or_else(|| Error::InvalidDensity("empty ensemble".into()))?.1.layout().clone();
        let mut total = 0.0;
        for (w, s) in &branches {
            if *w < 0.0 {
                return Err(Error::ProbabilityOutOfRange(*w));
            }
            if s.layout() != &first {
                return Err(Error::InvalidDensity("ensemble members disagree on layout".into()));
            }
            if (s.norm() - 1.0).abs() > TOL_CONSTRUCT {
                return Err(Error::NotNormalized(s.norm()));
            }
            total += w;
        }
        if (total - 1.0).abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidDensity(format!("ensemble weights sum to {total}")));
        }
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[(f64, StateVector)] {
        &self.branches
    }

    pub fn layout(&self) -> &Layout {
        self.branches[0].1.layout()
    }

    pub fn is_pure(&self) -> bool {
        self.branches.len() == 1
    }

    /// Applies `f` to every member.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&StateVector) -> Result<StateVector>,
    {
        let branches = self.branches.iter().map(|(w, s)| Ok((*w, f(s)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }

    /// Tensors a pure state onto every member.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        self.map(|s| s.tensor(other))
    }

    pub fn reduced_density<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let mut acc: Option<DensityMatrix> = None;
        for (w, s) in &self.branches {
            let r = s.reduced_density(keep)?.scaled(*w);
            match acc.as_mut() {
                Some(a) => a.add(&r)?,
                None => acc = Some(r),
            }
        }
        Ok(acc.expect("ensemble is never empty"))
    }

    /// Per-qubit depolarization of the listed registers, expanded as a Pauli
    /// mixture: `I` with weight `1 − 3δ/4`, each of `X, Y, Z` with `δ/4`.
    /// Members equal up to global phase are merged after each qubit.
    pub fn depolarize<S: AsRef<str>>(&self, registers: &[S], delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::ProbabilityOutOfRange(delta));
        }
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let qubits = self.layout().qubits(registers)?;
        let mut branches = self.branches.clone();
        for q in qubits {
            let mut next = Vec::with_capacity(branches.len() * 4);
            for (w, s) in &branches {
                next.push((w * (1.0 - 0.75 * delta), s.clone()));
                for l in [Letter::X, Letter::Y, Letter::Z] {
                    next.push((w * 0.25 * delta, s.apply_pauli(&PauliWord::from_letters(&[l]), &[q])?));
                }
            }
            branches = merge(next)?;
        }
        Ok(Self { branches })
    }
}

fn merge(items: Vec<(f64, StateVector)>) -> Result<Vec<(f64, StateVector)>> {
    let mut out: Vec<(f64, StateVector)> = Vec::new();
    'outer: for (w, s) in items {
        if w <= 0.0 {
            continue;
        }
        for (ow, os) in out.iter_mut() {
            let ov: Complex64 = os.inner(&s)?;
            if ov.norm() > 1.0 - 1e-12 {
                *ow += w;
                continue 'outer;
            }
        }
        out.push((w, s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::density::trace_distance;

    #[test]
    fn ensemble_depolarization_matches_channel() {
        let bell = StateVector::epr_pairs("A", "B", 1).unwrap();
        for delta in [0.0, 0.3, 1.0] {
            let ens = MixedState::pure(bell.clone()).depolarize(&["A", "B"], delta).unwrap();
            let dense = bell.to_density().depolarize("A", delta).unwrap().depolarize("B", delta).unwrap();
            let got = ens.reduced_density(&["A", "B"]).unwrap();
            assert!(trace_distance(&got, &dense).unwrap() < 1e-12);
            // Paulis on either half of an EPR pair coincide, so at most 4 members remain
            assert!(ens.branches().len() <= 4);
        }
    }

    #[test]
    fn half_depolarized_bell_fidelity() {
        let bell = StateVector::epr_pairs("A", "B", 1).unwrap();
        let ens = MixedState::pure(bell.clone()).depolarize(&["B"], 0.5).unwrap();
        let f: f64 = ens.branches().iter().map(|(w, s)| w * bell.inner(s).unwrap().norm_sqr()).sum();
        assert!((f - 0.625).abs() < 1e-12);
    }

    #[test]
    fn weights_are_validated() {
        let s = StateVector::plus("A", 1).unwrap();
        assert!(MixedState::new(vec![(0.5, s.clone())]).is_err());
        assert!(MixedState::new(vec![(0.5, s.clone()), (0.5, s)]).is_ok());
    }
}
