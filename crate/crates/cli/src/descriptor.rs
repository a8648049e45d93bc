use std::fs;
use std::path::Path;

use poqlab::games::{GameSpec, Strategy};
use poqlab::hamiltonian::{XZHamiltonian, WITNESS};
use poqlab::qcore::{Layout, StateVector};
use poqlab::strategies::{
    bit_flip_bob, classical_random, depolarized, honest_ham, honest_lwpbt, honest_magic_square, Witness,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"preset": name, "delta": float?, "witness": "ground" | "file:..." | "maximally_mixed"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyDesc {
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Default for StrategyDesc {
    fn default() -> Self {
        Self { preset: "honest".into(), delta: None, witness: None }
    }
}

impl StrategyDesc {
    /// Inline JSON, a path to a JSON file, or a bare preset name.
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        let t = arg.trim();
        if t.starts_with('{') {
            return Ok(serde_json::from_str(t)?);
        }
        if Path::new(t).is_file() {
            return Ok(serde_json::from_str(&fs::read_to_string(t)?)?);
        }
        Ok(Self { preset: t.to_string(), ..Self::default() })
    }
}

/// What the strategy has to play.
pub enum Target<'a> {
    Ham(&'a XZHamiltonian),
    MagicSquare,
    Lwpbt(usize),
}

fn witness(h: &XZHamiltonian, spec: Option<&str>) -> Result<Witness, CliError> {
    let n = h.n();
    match spec.unwrap_or("ground") {
        "ground" => Ok(Witness::Pure(h.ground()?.1)),
        "maximally_mixed" => Ok(Witness::maximally_mixed(n)?),
        "zero" => Ok(Witness::Pure(StateVector::zero(Layout::new(&[(WITNESS, n)])?)?)),
        "plus" => Ok(Witness::Pure(StateVector::plus(WITNESS, n)?)),
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let s = StateVector::from_json(&fs::read_to_string(path)?)?;
                if s.num_qubits() != n {
                    return Err(CliError::Usage(format!("witness has {} qubits, expected {n}", s.num_qubits())));
                }
                Ok(Witness::Pure(s))
            }
            None => Err(CliError::Usage(format!("unknown witness `{other}`"))),
        },
    }
}

fn honest(target: &Target, desc: &StrategyDesc) -> Result<Strategy, CliError> {
    Ok(match target {
        Target::Ham(h) => honest_ham(h, &witness(h, desc.witness.as_deref())?)?,
        Target::MagicSquare => honest_magic_square()?,
        Target::Lwpbt(n) => honest_lwpbt(*n)?,
    })
}

/// Builds the strategy; `delta`, when present, depolarizes the EPR block of
/// any preset.
pub fn build(desc: &StrategyDesc, target: &Target, game: &GameSpec) -> Result<Strategy, CliError> {
    if desc.witness.is_some() && !matches!(target, Target::Ham(_)) {
        return Err(CliError::Usage("a witness only applies to Hamiltonian games".into()));
    }
    let base = match desc.preset.as_str() {
        "honest" => honest(target, desc)?,
        "depolarized" => {
            if desc.delta.is_none() {
                return Err(CliError::Usage("preset `depolarized` needs a delta".into()));
            }
            honest(target, desc)?
        }
        "bit_flip_bob" => bit_flip_bob(&honest(target, desc)?),
        "classical_random" => {
            if desc.delta.is_some() {
                return Err(CliError::Usage("classical_random shares no EPR pairs to depolarize".into()));
            }
            classical_random(game)?
        }
        other => return Err(CliError::Usage(format!("unknown strategy preset `{other}`"))),
    };
    match desc.delta {
        Some(d) => Ok(depolarized(&base, d)?),
        None => Ok(base),
    }
}
