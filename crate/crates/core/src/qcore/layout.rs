use std::ops::Range;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on dense simulation width.
pub const DEFAULT_MAX_QUBITS: usize = 22;

/// Dense simulation cap, overridable through `POQLAB_MAX_QUBITS`.
pub fn max_qubits() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("POQLAB_MAX_QUBITS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// Named, contiguous qubit registers. Qubit 0 is the most significant bit of
/// an amplitude index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Layout {
    registers: Vec<Register>,
}

impl Layout {
    /// Registers laid out back to back in the given order.
    pub fn new<S: AsRef<str>>(spec: &[(S, usize)]) -> Result<Self> {
        let mut layout = Layout::default();
        for (name, len) in spec {
            layout.push(name.as_ref(), *len)?;
        }
        Ok(layout)
    }

    fn push(&mut self, name: &str, len: usize) -> Result<()> {
        if self.find(name).is_some() {
            return Err(Error::DuplicateRegister(name.to_string()));
        }
        let start = self.num_qubits();
        self.registers.push(Register { name: name.to_string(), start, len });
        Ok(())
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.len).sum()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.find(name).is_some()
    }

    fn find(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.find(name).ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn width(&self, name: &str) -> Result<usize> {
        Ok(self.register(name)?.len)
    }

    /// Qubit indices of the named registers, concatenated in argument order.
    pub fn qubits<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for name in names {
            out.extend(self.register(name.as_ref())?.range());
        }
        Ok(out)
    }

    /// Appends `other`'s registers after this layout's.
    pub fn concat(&self, other: &Layout) -> Result<Layout> {
        let mut out = self.clone();
        for r in &other.registers {
            out.push(&r.name, r.len)?;
        }
        Ok(out)
    }

    /// Sub-layout keeping the listed registers in their original order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Layout> {
        for k in keep {
            self.register(k.as_ref())?;
        }
        let mut out = Layout::default();
        for r in &self.registers {
            if keep.iter().any(|k| k.as_ref() == r.name) {
                out.push(&r.name, r.len)?;
            }
        }
        Ok(out)
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        let q = self.num_qubits();
        let cap = max_qubits();
        if q > cap {
            return Err(Error::TooManyQubits { qubits: q, cap });
        }
        Ok(())
    }
}

/// Translates positions within a list of target qubits into amplitude-index
/// bit masks of a `total`-qubit state.
pub(crate) fn global_mask(local: u64, targets: &[usize], total: usize) -> u64 {
    let t = targets.len();
    let mut g = 0u64;
    for (k, &q) in targets.iter().enumerate() {
        if local >> (t - 1 - k) & 1 == 1 {
            g |= 1u64 << (total - 1 - q);
        }
    }
    g
}

pub(crate) fn check_targets(targets: &[usize], total: usize) -> Result<()> {
    let mut seen = 0u64;
    for &q in targets {
        if q >= total {
            return Err(Error::IndexOutOfRange { index: q, len: total });
        }
        let b = 1u64 << q;
        if seen & b != 0 {
            return Err(Error::Overlap(format!("qubit {q} listed twice")));
        }
        seen |= b;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_are_contiguous() {
        let l = Layout::new(&[("A", 2), ("B", 3)]).unwrap();
        assert_eq!(l.num_qubits(), 5);
        assert_eq!(l.qubits(&["B", "A"]).unwrap(), vec![2, 3, 4, 0, 1]);
        assert!(Layout::new(&[("A", 1), ("A", 1)]).is_err());
        assert!(l.qubits(&["C"]).is_err());
        let r = l.restrict(&["B"]).unwrap();
        assert_eq!(r.register("B").unwrap().start, 0);
    }

    #[test]
    fn global_mask_maps_msb_first() {
        // local bit for target position 0 is the MSB of the local mask
        assert_eq!(global_mask(0b10, &[3, 0], 4), 1 << 0);
        assert_eq!(global_mask(0b01, &[3, 0], 4), 1 << 3);
    }
}
