use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::layout::{check_targets, global_mask, Layout};
use super::pauli::{i_pow, PauliWord};
use super::{DensityMatrix, TOL_CONSTRUCT};
use crate::error::{Error, Result};

/// Dense pure state over named registers.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    layout: Layout,
}

impl StateVector {
    /// `|0…0⟩` over the layout.
    pub fn zero(layout: Layout) -> Result<Self> {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: Layout, index: usize) -> Result<Self> {
        layout.check_cap()?;
        let dim = 1usize << layout.num_qubits();
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, layout })
    }

    /// Validating constructor; the vector must be unit norm.
    pub fn from_amplitudes(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::from_raw(layout, amps)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > TOL_CONSTRUCT {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Unnormalized vector, used for projected branches.
    pub fn from_raw(layout: Layout, amps: Vec<Complex64>) -> Result<Self> {
        layout.check_cap()?;
        let dim = 1usize << layout.num_qubits();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(dim, amps.len()));
        }
        Ok(Self { amps, layout })
    }

    /// Single register in the state `|+⟩^{⊗n}`.
    pub fn plus(name: &str, n: usize) -> Result<Self> {
        let layout = Layout::new(&[(name, n)])?;
        layout.check_cap()?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { amps: vec![a; dim], layout })
    }

    /// `|Φ+_n⟩` with qubit `i` of `first` paired to qubit `i` of `second`.
    pub fn epr_pairs(first: &str, second: &str, n: usize) -> Result<Self> {
        let layout = Layout::new(&[(first, n), (second, n)])?;
        layout.check_cap()?;
        let dim = 1usize << (2 * n);
        let a = Complex64::new(FRAC_1_SQRT_2.powi(n as i32), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for x in 0..(1usize << n) {
            amps[(x << n) | x] = a;
        }
        Ok(Self { amps, layout })
    }

    /// Haar-like random pure state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(layout: Layout, rng: &mut R) -> Result<Self> {
        layout.check_cap()?;
        let dim = 1usize << layout.num_qubits();
        let mut amps: Vec<Complex64> = (0..dim).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps, layout })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::NotNormalized(n));
        }
        for a in &mut self.amps {
            *a /= n;
        }
        Ok(self)
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for a in &mut self.amps {
            *a *= c;
        }
        self
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        layout.check_cap()?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { amps, layout })
    }

    pub fn qubits<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        self.layout.qubits(names)
    }

    /// `w|ψ⟩` on the target qubits, global phase included.
    pub fn apply_pauli(&self, w: &PauliWord, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_pauli_mut(w, targets)?;
        Ok(out)
    }

    pub fn apply_pauli_mut(&mut self, w: &PauliWord, targets: &[usize]) -> Result<()> {
        if w.len() != targets.len() {
            return Err(Error::WidthMismatch { expected: targets.len(), actual: w.len() });
        }
        let total = self.num_qubits();
        check_targets(targets, total)?;
        let gx = global_mask(w.x_mask(), targets, total) as usize;
        let gz = global_mask(w.z_mask(), targets, total) as usize;
        let ph = w.xz_form_phase();
        if gx == 0 {
            if gz == 0 && ph == 0 {
                return Ok(());
            }
            for (j, a) in self.amps.iter_mut().enumerate() {
                let s = if (gz & j).count_ones() & 1 == 1 { 2 } else { 0 };
                *a *= i_pow(ph + s);
            }
        } else {
            let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
            for (j, a) in self.amps.iter().enumerate() {
                let s = if (gz & j).count_ones() & 1 == 1 { 2 } else { 0 };
                out[j ^ gx] = a * i_pow(ph + s);
            }
            self.amps = out;
        }
        Ok(())
    }

    /// Pauli word on a named register.
    pub fn apply_pauli_on(&self, w: &PauliWord, register: &str) -> Result<Self> {
        let t = self.layout.qubits(&[register])?;
        self.apply_pauli(w, &t)
    }

    /// Controlled Pauli. With a single control qubit the whole word is applied
    /// on the control's `|1⟩` branch; with one control per letter, letter `k`
    /// is applied when control `k` is set (the word must then carry phase +1).
    pub fn controlled_apply(&self, w: &PauliWord, targets: &[usize], controls: &[usize]) -> Result<Self> {
        if controls.iter().any(|c| targets.contains(c)) {
            return Err(Error::Overlap("control and target registers overlap".into()));
        }
        check_targets(controls, self.num_qubits())?;
        match controls.len() {
            1 => self.controlled_by(controls[0], |s| s.apply_pauli(w, targets)),
            k if k == w.len() => {
                if w.phase().power() != 0 {
                    return Err(Error::InvalidPauli(format!("{w}: letter-wise control needs phase +1")));
                }
                let mut out = self.clone();
                for (pos, &c) in controls.iter().enumerate() {
                    let single = PauliWord::from_letters(&[w.letter(pos)]);
                    out = out.controlled_by(c, |s| s.apply_pauli(&single, &[targets[pos]]))?;
                }
                Ok(out)
            }
            k => Err(Error::WidthMismatch { expected: w.len(), actual: k }),
        }
    }

    /// Applies `op` on the `|1⟩` branch of `control`. `op` must not act on
    /// the control qubit.
    pub fn controlled_by<F>(&self, control: usize, op: F) -> Result<Self>
    where
        F: FnOnce(&StateVector) -> Result<StateVector>,
    {
        let total = self.num_qubits();
        check_targets(&[control], total)?;
        let acted = op(self)?;
        if acted.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), acted.dim()));
        }
        let cbit = 1usize << (total - 1 - control);
        let amps = self
            .amps
            .iter()
            .zip(&acted.amps)
            .enumerate()
            .map(|(j, (a, b))| if j & cbit != 0 { *b } else { *a })
            .collect();
        Ok(Self { amps, layout: self.layout.clone() })
    }

    /// Arbitrary `2^t × 2^t` operator on the target qubits.
    pub fn apply_matrix(&self, m: &DMatrix<Complex64>, targets: &[usize]) -> Result<Self> {
        let total = self.num_qubits();
        check_targets(targets, total)?;
        let t = targets.len();
        let d = 1usize << t;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch(d, m.nrows()));
        }
        let offsets: Vec<usize> = (0..d).map(|i| global_mask(i as u64, targets, total) as usize).collect();
        let tmask = offsets[d - 1];
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for base in 0..self.dim() {
            if base & tmask != 0 {
                continue;
            }
            for (i, o) in offsets.iter().enumerate() {
                buf[i] = self.amps[base | o];
            }
            for (r, o) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, v) in buf.iter().enumerate() {
                    acc += m[(r, c)] * v;
                }
                out[base | o] = acc;
            }
        }
        Ok(Self { amps: out, layout: self.layout.clone() })
    }

    pub fn hadamard(&self, q: usize) -> Result<Self> {
        let mut out = self.clone();
        out.hadamard_mut(q)?;
        Ok(out)
    }

    pub fn hadamard_mut(&mut self, q: usize) -> Result<()> {
        let total = self.num_qubits();
        check_targets(&[q], total)?;
        let bit = 1usize << (total - 1 - q);
        for j in 0..self.amps.len() {
            if j & bit == 0 {
                let a = self.amps[j];
                let b = self.amps[j | bit];
                self.amps[j] = (a + b) * FRAC_1_SQRT_2;
                self.amps[j | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    pub fn cnot_mut(&mut self, control: usize, target: usize) -> Result<()> {
        let total = self.num_qubits();
        check_targets(&[control, target], total)?;
        let cb = 1usize << (total - 1 - control);
        let tb = 1usize << (total - 1 - target);
        for j in 0..self.amps.len() {
            if j & cb != 0 && j & tb == 0 {
                self.amps.swap(j, j | tb);
            }
        }
        Ok(())
    }

    /// Reduced density operator on `keep` (registers stay in layout order).
    pub fn reduced_density<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
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
            for j in i..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &to {
                    acc += self.amps[ko[i] | t] * self.amps[ko[j] | t].conj();
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc.conj();
            }
        }
        Ok(DensityMatrix::from_raw(m, layout))
    }

    /// `|ψ⟩⟨ψ|` scaled by the squared norm (no renormalization).
    pub fn to_density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        DensityMatrix::from_raw(&v * v.adjoint(), self.layout.clone())
    }

    /// Sets the first non-negligible amplitude real and positive.
    pub fn canonical_phase(mut self) -> Self {
        if let Some(a) = self.amps.iter().find(|a| a.norm() > 1e-12).copied() {
            let ph = a.conj() / a.norm();
            for x in &mut self.amps {
                *x *= ph;
            }
        }
        self
    }

    /// Renames a register in place.
    pub fn renamed(mut self, from: &str, to: &str) -> Result<Self> {
        let spec: Vec<(String, usize)> = self
            .layout
            .registers()
            .iter()
            .map(|r| (if r.name == from { to.to_string() } else { r.name.clone() }, r.len))
            .collect();
        self.layout.register(from)?;
        self.layout = Layout::new(&spec)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let dump =
            StateDump { layout: self.layout.clone(), amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect() };
        Ok(serde_json::to_string(&dump)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: StateDump = serde_json::from_str(text)?;
        let amps = dump.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Self::from_amplitudes(dump.layout, amps)
    }
}

#[derive(Serialize, Deserialize)]
struct StateDump {
    layout: Layout,
    amplitudes: Vec<[f64; 2]>,
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli::Letter;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(name: &str, amps: [Complex64; 2]) -> StateVector {
        StateVector::from_amplitudes(Layout::new(&[(name, 1)]).unwrap(), amps.to_vec()).unwrap()
    }

    #[test]
    fn identity_word_is_noop() {
        let mut rng = rand::rng();
        let s = StateVector::random(Layout::new(&[("A", 3)]).unwrap(), &mut rng).unwrap();
        let out = s.apply_pauli(&"III".parse().unwrap(), &[0, 1, 2]).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn x_and_y_on_zero() {
        let zero = qubit("A", [c(1.0, 0.0), c(0.0, 0.0)]);
        let x = zero.apply_pauli(&"X".parse().unwrap(), &[0]).unwrap();
        assert_eq!(x.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        // letter Y: Y|0> = i|1>
        let y = zero.apply_pauli(&PauliWord::from_letters(&[Letter::Y]), &[0]).unwrap();
        assert!((y.amplitudes()[1] - c(0.0, 1.0)).norm() < 1e-15);
        // the product X·Z = -iY acts as X Z, so |0> -> |1>
        let xz = &"X".parse::<PauliWord>().unwrap() * &"Z".parse::<PauliWord>().unwrap();
        let p = zero.apply_pauli(&xz, &[0]).unwrap();
        assert!((p.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let zero = StateVector::zero(Layout::new(&[("A", 2)]).unwrap()).unwrap();
        assert!(matches!(zero.apply_pauli(&"X".parse().unwrap(), &[0, 1]), Err(Error::WidthMismatch { .. })));
    }

    #[test]
    fn controlled_pauli_examples() {
        let h = FRAC_1_SQRT_2;
        // control |0>: unchanged
        let s = qubit("C", [c(1.0, 0.0), c(0.0, 0.0)]).tensor(&qubit("T", [c(h, 0.0), c(h, 0.0)])).unwrap();
        let out = s.controlled_apply(&"Z".parse().unwrap(), &[1], &[0]).unwrap();
        assert_eq!(out, s);
        // control |1>, Z on |+> gives |->
        let s = qubit("C", [c(0.0, 0.0), c(1.0, 0.0)]).tensor(&qubit("T", [c(h, 0.0), c(h, 0.0)])).unwrap();
        let out = s.controlled_apply(&"Z".parse().unwrap(), &[1], &[0]).unwrap();
        let expect = [c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0), c(-h, 0.0)];
        for (a, b) in out.amplitudes().iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
        // control |+>, X on |0>: Bell state
        let s = qubit("C", [c(h, 0.0), c(h, 0.0)]).tensor(&qubit("T", [c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let out = s.controlled_apply(&"X".parse().unwrap(), &[1], &[0]).unwrap();
        let bell = StateVector::epr_pairs("C", "T", 1).unwrap();
        assert!(out.distance(&bell).unwrap() < 1e-15);
        assert!(s.controlled_apply(&"X".parse().unwrap(), &[0], &[0]).is_err());
    }

    #[test]
    fn letterwise_control() {
        // controls |11>, word XZ on |00>: X on first target, Z on second
        let layout = Layout::new(&[("C", 2), ("T", 2)]).unwrap();
        let s = StateVector::basis(layout, 0b1100).unwrap();
        let out = s.controlled_apply(&"XZ".parse().unwrap(), &[2, 3], &[0, 1]).unwrap();
        assert!((out.amplitudes()[0b1110] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reduced_density_of_product() {
        let layout = Layout::new(&[("A", 1), ("B", 1)]).unwrap();
        let s = StateVector::basis(layout, 0b01).unwrap();
        let rb = s.reduced_density(&["B"]).unwrap();
        assert!((rb.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_dump_round_trip() {
        let s = StateVector::epr_pairs("A", "B", 1).unwrap();
        let back = StateVector::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn dense_matrix_matches_pauli_kernel() {
        let mut rng = rand::rng();
        let s = StateVector::random(Layout::new(&[("A", 3)]).unwrap(), &mut rng).unwrap();
        let w: PauliWord = "-iYZ".parse().unwrap();
        let a = s.apply_pauli(&w, &[2, 0]).unwrap();
        let b = s.apply_matrix(&w.to_matrix(), &[2, 0]).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-12);
    }
}
