use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::circuit::{swap_gadget, Circuit};
use super::oracle::OracleAccess;
use crate::error::{Error, Result};
use crate::games::{exact_loss, hamiltonian_game};
use crate::hamiltonian::{XZHamiltonian, GROUND_MAX_QUBITS};
use crate::params::{derive, to_f64, GameParams};
use crate::qcore::{fidelity, DensityMatrix, Letter, MixedState, PauliWord, StateVector, TeleportKey};

/// Output half of the extractor's register.
pub const OUT: &str = "E1";
/// The other half, entangled with `OUT` before the swap.
pub const AUX: &str = "E2";
/// Message register of the coherent route.
pub const MSG: &str = "MSG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOrder {
    SwapThenTeleport,
    TeleportThenSwap,
}

/// `ζ` with the weights `q_{a,b}` of every teleportation key.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub zeta: DensityMatrix,
    pub q_ab: Vec<(TeleportKey, f64)>,
}

/// Provers' state with `|Φ+_n⟩` on `(E1, E2)`, and the swap gadget on it.
pub(crate) fn setup(oracle: &OracleAccess) -> Result<(MixedState, Circuit, usize)> {
    let n = oracle.n()?;
    let prepared = oracle.prepare(&StateVector::epr_pairs(OUT, AUX, n)?)?;
    prepared.layout().check_cap()?;
    let u = swap_gadget(oracle, prepared.layout(), OUT, AUX)?;
    Ok((prepared, u, n))
}

/// `ζ = Σ_{a,b} q_{a,b} σ_Z^b σ_X^a ρ_{a,b} σ_X^a σ_Z^b`, by iterating every
/// key of Alice's "Teleport" answer.
pub fn extract_state(oracle: &OracleAccess, order: StepOrder) -> Result<Extraction> {
    let (prepared, u, n) = setup(oracle)?;
    let outcomes = oracle.teleport_outcomes()?;
    let mut zeta: Option<DensityMatrix> = None;
    let mut q = vec![0.0; outcomes];
    let mut keys = vec![TeleportKey { a: 0, b: 0 }; outcomes];
    for (w, psi) in prepared.branches() {
        let base = match order {
            StepOrder::SwapThenTeleport => u.run_with(psi, oracle)?,
            StepOrder::TeleportThenSwap => psi.clone(),
        };
        let parts = (0..outcomes)
            .into_par_iter()
            .map(|k| -> Result<(TeleportKey, f64, Option<DensityMatrix>)> {
                let (key, mut v) = oracle.teleport_branch(&base, k)?;
                if order == StepOrder::TeleportThenSwap {
                    v = u.run_with(&v, oracle)?;
                }
                let weight = v.norm_sqr();
                if weight < 1e-30 {
                    return Ok((key, 0.0, None));
                }
                let corrected = v.apply_pauli_on(&key.correction(n), OUT)?;
                Ok((key, weight, Some(corrected.reduced_density(&[OUT])?)))
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, (key, weight, rho)) in parts.into_iter().enumerate() {
            keys[k] = key;
            q[k] += w * weight;
            if let Some(rho) = rho {
                let rho = rho.scaled(*w);
                match zeta.as_mut() {
                    Some(z) => z.add(&rho)?,
                    None => zeta = Some(rho),
                }
            }
        }
    }
    let zeta = zeta.ok_or_else(|| Error::InvalidDensity("every teleportation branch vanished".into()))?;
    Ok(Extraction { zeta, q_ab: keys.into_iter().zip(q).collect() })
}

/// The same `ζ` without reading the keys: the answer lands in a message
/// register and the corrections are controlled by it; the output register
/// is then traced out of the joint state.
pub fn extract_coherent(oracle: &OracleAccess) -> Result<DensityMatrix> {
    let (prepared, u, n) = setup(oracle)?;
    let mut zeta: Option<DensityMatrix> = None;
    for (w, psi) in prepared.branches() {
        let mut v = oracle.teleport_coherent(&u.run_with(psi, oracle)?, MSG)?;
        let out = v.layout().qubits(&[OUT])?;
        let msg = v.layout().qubits(&[MSG])?;
        let x = PauliWord::from_letters(&[Letter::X]);
        let z = PauliWord::from_letters(&[Letter::Z]);
        for i in 0..n {
            v = v.controlled_apply(&x, &[out[i]], &[msg[i]])?;
        }
        for i in 0..n {
            v = v.controlled_apply(&z, &[out[i]], &[msg[n + i]])?;
        }
        let rho = v.reduced_density(&[OUT])?.scaled(*w);
        match zeta.as_mut() {
            Some(acc) => acc.add(&rho)?,
            None => zeta = Some(rho),
        }
    }
    zeta.ok_or_else(|| Error::InvalidDensity("empty ensemble".into()))
}

/// Monte Carlo estimate of `ζ` from `shots` single runs.
pub fn extract_sampled(oracle: &OracleAccess, seed: u64, shots: usize) -> Result<DensityMatrix> {
    if shots == 0 {
        return Err(Error::InvalidParameter { name: "shots", msg: "must be at least 1".into() });
    }
    let (prepared, u, n) = setup(oracle)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zeta: Option<DensityMatrix> = None;
    for _ in 0..shots {
        let mut r: f64 = rng.random();
        let mut psi = &prepared.branches()[0].1;
        for (w, s) in prepared.branches() {
            psi = s;
            if r < *w {
                break;
            }
            r -= w;
        }
        let (key, post) = oracle.teleport_sample(&u.run_with(psi, oracle)?, &mut rng)?;
        let corrected = post.apply_pauli_on(&key.correction(n), OUT)?;
        let rho = corrected.reduced_density(&[OUT])?.scaled(1.0 / shots as f64);
        match zeta.as_mut() {
            Some(acc) => acc.add(&rho)?,
            None => zeta = Some(rho),
        }
    }
    zeta.ok_or_else(|| Error::InvalidDensity("no shots".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractConfig {
    pub p_used: f64,
    /// Target energy; `max(0, λ0)` when absent.
    pub alpha: Option<f64>,
    pub c: f64,
    pub order: StepOrder,
}

impl ExtractConfig {
    pub fn new(p_used: f64) -> Self {
        Self { p_used, alpha: None, c: crate::params::DEFAULT_C, order: StepOrder::SwapThenTeleport }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractionReport {
    pub n: usize,
    pub p_used: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub energy: f64,
    pub bound: f64,
    pub slack: f64,
    pub fidelity_ground: Option<f64>,
    pub q_ab: BTreeMap<String, f64>,
    pub c: f64,
    pub eta_star: Option<f64>,
    pub p_star: Option<f64>,
    /// `ε ≤ η*`.
    pub in_regime: Option<bool>,
    #[serde(skip)]
    pub zeta: DensityMatrix,
}

impl ExtractionReport {
    pub fn total_weight(&self) -> f64 {
        self.q_ab.values().sum()
    }
}

/// Full pipeline: extracts `ζ` and audits the strategy on `G(H, p_used)`.
pub fn extract(oracle: &OracleAccess, h: &XZHamiltonian, cfg: &ExtractConfig) -> Result<ExtractionReport> {
    let n = oracle.n()?;
    if n != h.n() {
        return Err(Error::WidthMismatch { expected: h.n(), actual: n });
    }
    let ex = extract_state(oracle, cfg.order)?;
    let energy = h.energy(&ex.zeta)?;
    let epsilon = exact_loss(&hamiltonian_game(h, cfg.p_used)?, oracle.strategy())?;
    let ground = if n <= GROUND_MAX_QUBITS { Some(h.ground()?) } else { None };
    let alpha = match (cfg.alpha, &ground) {
        (Some(a), _) => a,
        (None, Some((l0, _))) => l0.max(0.0),
        (None, None) => 0.0,
    };
    let fidelity_ground = match &ground {
        Some((_, g)) => Some(fidelity(&ex.zeta, &g.to_density())?),
        None => None,
    };
    let bound = alpha + 2.0 * epsilon / cfg.p_used;
    let params = derive(n, h.gamma(), alpha, cfg.c).ok();
    let q_ab = ex.q_ab.iter().map(|(k, w)| (format!("{:0n$b},{:0n$b}", k.a, k.b, n = n), *w)).collect();
    Ok(ExtractionReport {
        n,
        p_used: cfg.p_used,
        epsilon,
        alpha,
        gamma: h.gamma(),
        energy,
        bound,
        slack: bound - energy,
        fidelity_ground,
        q_ab,
        c: cfg.c,
        eta_star: params.as_ref().map(|p| to_f64(&p.eta_star)),
        p_star: params.as_ref().map(|p| to_f64(&p.p_star)),
        in_regime: params.as_ref().map(|p| p.in_regime(epsilon)),
        zeta: ex.zeta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    /// `α + (2/p)·ε − tr(Hζ)` with the report's `p`.
    pub slack: f64,
    pub in_regime: bool,
}

pub fn check_knowledge_bound(report: &ExtractionReport, params: &GameParams) -> BoundCheck {
    BoundCheck {
        slack: report.alpha + 2.0 * report.epsilon / report.p_used - report.energy,
        in_regime: params.in_regime(report.epsilon),
    }
}
