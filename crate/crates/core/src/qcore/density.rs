use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::layout::{check_targets, global_mask, Layout};
use super::pauli::{i_pow, PauliWord};
use super::{StateVector, TOL_CONSTRUCT};
use crate::error::{Error, Result};

/// Mixed state over named registers.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
    layout: Layout,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(mat: DMatrix<Complex64>, layout: Layout) -> Result<Self> {
        let rho = Self::from_raw_checked(mat, layout)?;
        rho.validate()?;
        Ok(rho)
    }

    fn from_raw_checked(mat: DMatrix<Complex64>, layout: Layout) -> Result<Self> {
        layout.check_cap()?;
        let dim = 1usize << layout.num_qubits();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch(dim, mat.nrows()));
        }
        Ok(Self { mat, layout })
    }

    pub(crate) fn from_raw(mat: DMatrix<Complex64>, layout: Layout) -> Self {
        debug_assert_eq!(mat.nrows(), 1usize << layout.num_qubits());
        Self { mat, layout }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn maximally_mixed(layout: Layout) -> Result<Self> {
        layout.check_cap()?;
        let dim = 1usize << layout.num_qubits();
        let mat = DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(Self { mat, layout })
    }

    pub fn validate(&self) -> Result<()> {
        let herm = (&self.mat - self.mat.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > TOL_CONSTRUCT {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL_CONSTRUCT || tr.im.abs() > TOL_CONSTRUCT {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.mat *= Complex64::new(s, 0.0);
        self
    }

    /// Entrywise sum; layouts must agree.
    pub fn add(&mut self, other: &DensityMatrix) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        self.mat += &other.mat;
        Ok(())
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.mat.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Traces out every register not listed in `keep`.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        let layout = self.layout.restrict(keep)?;
        let kept: Vec<String> = layout.registers().iter().map(|r| r.name.clone()).collect();
        let kq = self.layout.qubits(&kept)?;
        let total = self.num_qubits();
        let tq: Vec<usize> = (0..total).filter(|q| !kq.contains(q)).collect();
        let dk = 1usize << kq.len();
        let dt = 1usize << tq.len();
        let ko: Vec<usize> = (0..dk).map(|i| global_mask(i as u64, &kq, total) as usize).collect();
        let to: Vec<usize> = (0..dt).map(|i| global_mask(i as u64, &tq, total) as usize).collect();
        let mut m = DMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &to {
                    acc += self.mat[(ko[i] | t, ko[j] | t)];
                }
                m[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix { mat: m, layout })
    }

    /// `w ρ w†` on the target qubits.
    pub fn conjugate_pauli(&self, w: &PauliWord, targets: &[usize]) -> Result<DensityMatrix> {
        if w.len() != targets.len() {
            return Err(Error::WidthMismatch { expected: targets.len(), actual: w.len() });
        }
        let total = self.num_qubits();
        check_targets(targets, total)?;
        let gx = global_mask(w.x_mask(), targets, total) as usize;
        let gz = global_mask(w.z_mask(), targets, total) as usize;
        let sign = |j: usize| if (gz & j).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        let dim = self.dim();
        // global phases cancel between w and w†
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for l in 0..dim {
                m[(k ^ gx, l ^ gx)] = self.mat[(k, l)] * (sign(k) * sign(l));
            }
        }
        Ok(DensityMatrix { mat: m, layout: self.layout.clone() })
    }

    /// Per-qubit depolarizing channel `ρ → (1−δ)ρ + δ·I/2 ⊗ tr_q ρ` on every
    /// qubit of `register`.
    pub fn depolarize(&self, register: &str, delta: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::ProbabilityOutOfRange(delta));
        }
        let qubits = self.layout.qubits(&[register])?;
        let mut rho = self.clone();
        for q in qubits {
            // I/2 ⊗ tr_q ρ = (ρ + XρX + YρY + ZρZ)/4
            let mut twirl = rho.mat.clone();
            for l in ["X", "Y", "Z"] {
                let w: PauliWord = l.parse()?;
                twirl += &rho.conjugate_pauli(&w, &[q])?.mat;
            }
            rho.mat = rho.mat * Complex64::new(1.0 - delta, 0.0) + twirl * Complex64::new(delta / 4.0, 0.0);
        }
        Ok(rho)
    }

    /// `tr(w ρ)` for a word on the target qubits.
    pub fn expectation(&self, w: &PauliWord, targets: &[usize]) -> Result<Complex64> {
        if w.len() != targets.len() {
            return Err(Error::WidthMismatch { expected: targets.len(), actual: w.len() });
        }
        let total = self.num_qubits();
        check_targets(targets, total)?;
        let gx = global_mask(w.x_mask(), targets, total) as usize;
        let gz = global_mask(w.z_mask(), targets, total) as usize;
        let ph = w.xz_form_phase();
        // (wρ)_{jj} = phase(j^gx) ρ_{j^gx, j}
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            let k = j ^ gx;
            let s = if (gz & k).count_ones() & 1 == 1 { 2 } else { 0 };
            acc += i_pow(ph + s) * self.mat[(k, j)];
        }
        Ok(acc)
    }

    /// Purification `Σ √λ_i |v_i⟩_sys |i⟩_aux` with an auxiliary register of
    /// the same width.
    pub fn purify(&self, system: &str, aux: &str) -> Result<StateVector> {
        let n = self.num_qubits();
        let eig = self.mat.clone().symmetric_eigen();
        let dim = self.dim();
        let mut amps = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= 1e-14 {
                continue;
            }
            let v = eig.eigenvectors.column(i);
            for s in 0..dim {
                amps[s * dim + i] = v[s] * lambda.sqrt();
            }
        }
        let layout = Layout::new(&[(system, n), (aux, n)])?;
        StateVector::from_raw(layout, amps)?.normalized()
    }

    fn sqrt_psd(&self) -> DMatrix<Complex64> {
        let eig = self.mat.clone().symmetric_eigen();
        let d = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
        );
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
    }
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let s = rho.sqrt_psd();
    let inner = &s * &sigma.mat * &s;
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let root: f64 = inner.symmetric_eigen().eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// `½‖ρ − σ‖₁`, clamped to `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = &rho.mat - &sigma.mat;
    let diff = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let sum: f64 = diff.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}
