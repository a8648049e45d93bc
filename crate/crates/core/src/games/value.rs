use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{AliceQuestion, GameSpec, Strategy, Subtest};
use crate::error::Result;
use crate::qcore::Pvm;

/// Branches with squared norm below this carry no probability.
const NEGLIGIBLE: f64 = 1e-30;

/// Probability-weighted win and loss of one question entry. Both are
/// accumulated directly so tiny losses keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EntryValue {
    pub win: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueBreakdown {
    pub per_entry: Vec<EntryValue>,
    subtests: Vec<Subtest>,
}

impl ValueBreakdown {
    pub fn value(&self) -> f64 {
        self.per_entry.iter().map(|e| e.win).sum()
    }

    pub fn loss(&self) -> f64 {
        self.per_entry.iter().map(|e| e.loss).sum()
    }

    /// Conditional winning probability of each sub-test present.
    pub fn by_subtest(&self) -> BTreeMap<Subtest, f64> {
        let mut acc: BTreeMap<Subtest, (f64, f64)> = BTreeMap::new();
        for (e, s) in self.per_entry.iter().zip(&self.subtests) {
            let slot = acc.entry(*s).or_default();
            slot.0 += e.win;
            slot.1 += e.win + e.loss;
        }
        acc.into_iter().map(|(s, (w, total))| (s, if total > 0.0 { w / total } else { 1.0 })).collect()
    }
}

pub fn exact_value(g: &GameSpec, s: &Strategy) -> Result<f64> {
    Ok(value_breakdown(g, s)?.value())
}

/// `1 − ω`, summed from the rejecting branches.
pub fn exact_loss(g: &GameSpec, s: &Strategy) -> Result<f64> {
    Ok(value_breakdown(g, s)?.loss())
}

/// Exact enumeration of `Σ μ(x,y) Σ_{a,b} λ(a,b|x,y) Born(a,b)`. Questions
/// sharing Alice's question are evaluated together; groups and Alice
/// outcomes run in parallel and are reduced in a fixed order.
pub fn value_breakdown(g: &GameSpec, s: &Strategy) -> Result<ValueBreakdown> {
    let mut groups: BTreeMap<&AliceQuestion, Vec<usize>> = BTreeMap::new();
    for (i, e) in g.entries().iter().enumerate() {
        groups.entry(&e.alice).or_default().push(i);
        s.bob_pvm(&e.bob)?;
    }
    for q in groups.keys() {
        s.alice_pvm(q)?;
    }
    let groups: Vec<(&AliceQuestion, Vec<usize>)> = groups.into_iter().collect();
    let results =
        groups.par_iter().map(|(q, idxs)| group_value(g, s, s.alice_pvm(q)?, idxs)).collect::<Result<Vec<_>>>()?;

    let mut per_entry = vec![EntryValue::default(); g.entries().len()];
    for ((_, idxs), vals) in groups.iter().zip(results) {
        for (&i, v) in idxs.iter().zip(vals) {
            let p = g.entries()[i].prob;
            per_entry[i] = EntryValue { win: p * v.win, loss: p * v.loss };
        }
    }
    let subtests = g.entries().iter().map(|e| e.alice.subtest()).collect();
    Ok(ValueBreakdown { per_entry, subtests })
}

/// Unweighted win/loss for every entry in `idxs`, all sharing `alice`.
fn group_value(g: &GameSpec, s: &Strategy, alice: &Pvm, idxs: &[usize]) -> Result<Vec<EntryValue>> {
    let bobs: Vec<&Pvm> = idxs.iter().map(|&i| s.bob_pvm(&g.entries()[i].bob)).collect::<Result<_>>()?;
    let mut total = vec![EntryValue::default(); idxs.len()];
    for (weight, psi) in s.state().branches() {
        let per_outcome = (0..alice.outcomes().len())
            .into_par_iter()
            .map(|k| -> Result<Vec<EntryValue>> {
                let mut acc = vec![EntryValue::default(); idxs.len()];
                let v = alice.project(psi, k)?;
                if v.norm_sqr() < NEGLIGIBLE {
                    return Ok(acc);
                }
                let la = alice.outcomes()[k].0;
                for (slot, (&i, bob)) in acc.iter_mut().zip(idxs.iter().zip(&bobs)) {
                    let check = &g.entries()[i].check;
                    for (lb, u) in bob.branches(&v)? {
                        let born = u.norm_sqr();
                        let lambda = check.accept(la, lb, g.n());
                        slot.win += born * lambda;
                        slot.loss += born * (1.0 - lambda);
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        for acc in per_outcome {
            for (t, a) in total.iter_mut().zip(acc) {
                t.win += weight * a.win;
                t.loss += weight * a.loss;
            }
        }
    }
    Ok(total)
}
