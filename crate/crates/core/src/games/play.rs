use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GameSpec, Strategy};
use crate::error::{Error, Result};

/// Verifier randomness of one round: the sampled question entry and the
/// uniform draw deciding randomized rejections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub entry: usize,
    pub coin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub round: u64,
    pub theta: Theta,
    #[serde(rename = "qA")]
    pub q_a: String,
    #[serde(rename = "rA")]
    pub r_a: u64,
    #[serde(rename = "qB")]
    pub q_b: String,
    #[serde(rename = "rB")]
    pub r_b: u64,
    pub win: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayOutcome {
    pub wins: u64,
    pub transcripts: Vec<Transcript>,
}

impl PlayOutcome {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for t in &self.transcripts {
            out.push_str(&serde_json::to_string(t)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
    pub rounds: u64,
    pub wins: u64,
}

/// Hoeffding half-width `sqrt(ln(2/(1−c)) / 2N)` for confidence `c`.
pub fn hoeffding_half_width(rounds: u64, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * rounds as f64)).sqrt()
}

fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

/// Plays `rounds` independent rounds. Round `r` draws from stream `r` of the
/// seeded generator, so results do not depend on scheduling.
pub fn play(g: &GameSpec, s: &Strategy, seed: u64, rounds: u64) -> Result<PlayOutcome> {
    if rounds == 0 {
        return Err(Error::InvalidParameter { name: "rounds", msg: "must be at least 1".into() });
    }
    s.covers(g)?;
    let cumulative: Vec<f64> = g
        .entries()
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e.prob;
            Some(*acc)
        })
        .collect();
    let branch_cumulative: Vec<f64> = s
        .state()
        .branches()
        .iter()
        .scan(0.0, |acc, (w, _)| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let transcripts = (0..rounds)
        .into_par_iter()
        .map(|round| play_round(g, s, &cumulative, &branch_cumulative, seed, round))
        .collect::<Result<Vec<_>>>()?;
    let wins = transcripts.iter().filter(|t| t.win).count() as u64;
    Ok(PlayOutcome { wins, transcripts })
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    let target = u * cumulative.last().copied().unwrap_or(1.0);
    cumulative.partition_point(|&c| c <= target).min(cumulative.len() - 1)
}

fn play_round(
    g: &GameSpec,
    s: &Strategy,
    cumulative: &[f64],
    branch_cumulative: &[f64],
    seed: u64,
    round: u64,
) -> Result<Transcript> {
    let mut rng = round_rng(seed, round);
    let entry_idx = pick(cumulative, rng.random());
    let entry = &g.entries()[entry_idx];
    let psi = &s.state().branches()[pick(branch_cumulative, rng.random())].1;
    let (r_a, post) = s.alice_pvm(&entry.alice)?.measure(psi, &mut rng)?;
    let (r_b, _) = s.bob_pvm(&entry.bob)?.measure(&post, &mut rng)?;
    let coin: f64 = rng.random();
    let win = coin < entry.check.accept(r_a, r_b, g.n());
    Ok(Transcript {
        round,
        theta: Theta { entry: entry_idx, coin },
        q_a: entry.alice.to_string(),
        r_a,
        q_b: entry.bob.to_string(),
        r_b,
        win,
    })
}

/// Sampled value with a two-sided Hoeffding interval.
pub fn estimate_value(g: &GameSpec, s: &Strategy, seed: u64, rounds: u64, confidence: f64) -> Result<Estimate> {
    if !(0.0 < confidence && confidence < 1.0) {
        return Err(Error::InvalidParameter { name: "confidence", msg: format!("{confidence} outside (0, 1)") });
    }
    let out = play(g, s, seed, rounds)?;
    let mean = out.wins as f64 / rounds as f64;
    let half_width = hoeffding_half_width(rounds, confidence);
    Ok(Estimate {
        mean,
        half_width,
        lower: (mean - half_width).max(0.0),
        upper: (mean + half_width).min(1.0),
        confidence,
        rounds,
        wins: out.wins,
    })
}
