//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed constants below.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use poqlab::extractor::{
    extract, extract_state, ideal_swap, operator_distance, rigidity_deviation, swap_gadget, ExtractConfig,
    OracleAccess, StepOrder, AUX, OUT,
};
use poqlab::games::{
    exact_value, hamiltonian_game, hoeffding_half_width, lwpbt, magic_square, play, GameSpec, Strategy,
};
use poqlab::hamiltonian::{XZHamiltonian, WITNESS};
use poqlab::params::{derive, to_f64};
use poqlab::qcore::{fidelity, trace_distance, Layout, StateVector};
use poqlab::strategies::{classical_random, depolarized, honest_ham, honest_lwpbt, honest_magic_square, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VALUE_TOL: f64 = 1e-9;
const SEMI_HONEST_TOL: f64 = 1e-8;
const SWAP_TOL: f64 = 1e-9;
const FIDELITY_TOL: f64 = 1e-9;
const ENERGY_TOL: f64 = 1e-8;
const COMMUTE_TOL: f64 = 1e-10;
const SLACK_IDENTITY_TOL: f64 = 1e-8;
const RIGIDITY_TOL: f64 = 1e-9;
/// Deviations at or below this level count as equal when checking monotonicity.
const MONOTONE_TOL: f64 = 1e-12;
const C1_BUDGET: Duration = Duration::from_secs(60);
const C4_BUDGET: Duration = Duration::from_secs(300);
const MC_TRIALS: u64 = 50;
const MC_ROUNDS: u64 = 2_000;
const MC_CONFIDENCE: f64 = 0.99;
const MC_REQUIRED: u64 = 49;
const FIXTURES: [&str; 5] = ["Z", "ZZ", "mixed-2term", "random-3qubit", "shifted-2qubit"];
const DELTAS: [f64; 4] = [0.0, 0.02, 0.05, 0.1];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load(name: &str) -> XZHamiltonian {
    XZHamiltonian::parse(&std::fs::read_to_string(fixtures().join(format!("{name}.json"))).unwrap()).unwrap()
}

fn sidecar(name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(fixtures().join(format!("{name}.expected.json"))).unwrap()).unwrap()
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn witness_state(name: &str, h: &XZHamiltonian) -> Result<StateVector, String> {
    let layout = Layout::new(&[(WITNESS, h.n())]).map_err(e)?;
    match name {
        "ground" => Ok(h.ground().map_err(e)?.1),
        "zero" => StateVector::zero(layout).map_err(e),
        _ => StateVector::plus(WITNESS, h.n()).map_err(e),
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 =
        (exact_value(&magic_square().map_err(e)?, &honest_magic_square().map_err(e)?).map_err(e)? - 1.0).abs();
    for n in 2..=4 {
        let v = exact_value(&lwpbt(n).map_err(e)?, &honest_lwpbt(n).map_err(e)?).map_err(e)?;
        worst = worst.max((v - 1.0).abs());
    }
    let t = start.elapsed();
    check(worst <= VALUE_TOL && t <= C1_BUDGET, format!("max |value - 1| = {worst:.3e}, {:.2}s", t.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in FIXTURES {
        let h = load(name);
        let side = sidecar(name);
        for w in ["ground", "zero", "plus"] {
            let s = honest_ham(&h, &Witness::Pure(witness_state(w, &h)?)).map_err(e)?;
            for p in [0.1, 0.5] {
                let got = exact_value(&hamiltonian_game(&h, p).map_err(e)?, &s).map_err(e)?;
                let want = side["semi_honest_value"][w][p.to_string()].as_f64().ok_or("missing sidecar value")?;
                worst = worst.max((got - want).abs());
            }
        }
    }
    check(worst <= SEMI_HONEST_TOL, format!("30 cases, max deviation {worst:.3e}"))
}

fn gadget_distance(s: &Strategy) -> Result<f64, String> {
    let oracle = OracleAccess::new(s);
    let n = oracle.n().map_err(e)?;
    let layout = s.state().layout().clone();
    let epr = StateVector::epr_pairs(OUT, AUX, n).map_err(e)?;
    let full = layout.concat(epr.layout()).map_err(e)?;
    let u = swap_gadget(&oracle, &full, OUT, AUX).map_err(e)?;
    let v = ideal_swap(&full, "B", OUT).map_err(e)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..1usize << layout.num_qubits() {
        let input = StateVector::basis(layout.clone(), j).map_err(e)?.tensor(&epr).map_err(e)?;
        a.push(u.run_with(&input, &oracle).map_err(e)?);
        b.push(v.run(&input).map_err(e)?);
    }
    operator_distance(&a, &b).map_err(e)
}

fn criterion_3() -> Outcome {
    let z = load("Z");
    let mut dists = vec![gadget_distance(&honest_ham(&z, &Witness::Pure(z.ground().map_err(e)?.1)).map_err(e)?)?];
    for n in 2..=3 {
        dists.push(gadget_distance(&honest_lwpbt(n).map_err(e)?)?);
    }
    let worst = dists.iter().cloned().fold(0.0, f64::max);
    check(worst <= SWAP_TOL, format!("n = 1..3 distances [{}]", list(&dists)))
}

fn recovery(h: &XZHamiltonian, w: &StateVector) -> Result<(f64, f64), String> {
    let s = honest_ham(h, &Witness::Pure(w.clone())).map_err(e)?;
    let zeta = extract_state(&OracleAccess::new(&s), StepOrder::SwapThenTeleport).map_err(e)?.zeta;
    let f = fidelity(&zeta, &w.to_density()).map_err(e)?;
    let de = (h.energy(&zeta).map_err(e)? - h.energy_pure(w).map_err(e)?).abs();
    Ok((f, de))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let h = load("mixed-2term");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut min_f, mut max_de) = (1.0f64, 0.0f64);
    for _ in 0..20 {
        let w = StateVector::random(Layout::new(&[(WITNESS, 2)]).map_err(e)?, &mut rng).map_err(e)?;
        let (f, de) = recovery(&h, &w)?;
        min_f = min_f.min(f);
        max_de = max_de.max(de);
    }
    for name in FIXTURES {
        let h = load(name);
        let (f, de) = recovery(&h, &h.ground().map_err(e)?.1)?;
        min_f = min_f.min(f);
        max_de = max_de.max(de);
    }
    let t = start.elapsed();
    check(
        min_f >= 1.0 - FIDELITY_TOL && max_de <= ENERGY_TOL && t <= C4_BUDGET,
        format!("min fidelity 1 - {:.3e}, max energy gap {max_de:.3e}, {:.2}s", 1.0 - min_f, t.as_secs_f64()),
    )
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["mixed-2term", "random-3qubit"] {
        let h = load(name);
        let w = StateVector::random(Layout::new(&[(WITNESS, h.n())]).map_err(e)?, &mut rng).map_err(e)?;
        let base = honest_ham(&h, &Witness::Pure(w)).map_err(e)?;
        for delta in [0.0, 0.1] {
            let s = depolarized(&base, delta).map_err(e)?;
            let oracle = OracleAccess::new(&s);
            let a = extract_state(&oracle, StepOrder::SwapThenTeleport).map_err(e)?.zeta;
            let b = extract_state(&oracle, StepOrder::TeleportThenSwap).map_err(e)?.zeta;
            worst = worst.max(trace_distance(&a, &b).map_err(e)?);
        }
    }
    check(worst <= COMMUTE_TOL, format!("max trace distance {worst:.3e}"))
}

fn criterion_6() -> Outcome {
    let mut min_slack = f64::INFINITY;
    let mut identity_gap: f64 = 0.0;
    for name in ["ZZ", "mixed-2term", "shifted-2qubit"] {
        let h = load(name);
        let alpha = h.default_alpha().map_err(e)?;
        let params = derive(2, h.gamma(), alpha, 2.0).map_err(e)?;
        let base = honest_ham(&h, &Witness::Pure(h.ground().map_err(e)?.1)).map_err(e)?;
        for p in [to_f64(&params.p_star), 0.5] {
            let cfg = ExtractConfig { p_used: p, alpha: Some(alpha), c: 2.0, order: StepOrder::SwapThenTeleport };
            for delta in DELTAS {
                let s = depolarized(&base, delta).map_err(e)?;
                let r = extract(&OracleAccess::new(&s), &h, &cfg).map_err(e)?;
                min_slack = min_slack.min(r.slack);
                if delta == 0.0 {
                    identity_gap = identity_gap.max((r.slack - (h.gamma() + alpha)).abs());
                }
            }
        }
    }
    check(
        min_slack >= 0.0 && identity_gap <= SLACK_IDENTITY_TOL,
        format!("min slack {min_slack:.3e}, |slack - (gamma + alpha)| at delta = 0 <= {identity_gap:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut honest: f64 = 0.0;
    for n in 2..=3 {
        honest = honest.max(rigidity_deviation(&honest_lwpbt(n).map_err(e)?, n).map_err(e)?.max_deviation);
    }
    let base = honest_lwpbt(2).map_err(e)?;
    let mut devs = Vec::new();
    let mut constants = Vec::new();
    for delta in DELTAS {
        let r = rigidity_deviation(&depolarized(&base, delta).map_err(e)?, 2).map_err(e)?;
        devs.push(r.max_deviation);
        if delta > 0.0 {
            constants.push(r.constant_estimate.ok_or("no constant estimate for positive epsilon")?);
        }
    }
    let monotone = devs.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL);
    let finite = constants.iter().all(|c| c.is_finite());
    check(
        honest <= RIGIDITY_TOL && monotone && finite,
        format!("honest {honest:.3e}, sweep [{}], constants [{}]", list(&devs), list(&constants)),
    )
}

fn criterion_8() -> Outcome {
    let g = derive(2, 1.0, 0.5, 3.0).map_err(e)?;
    let worked = BigRational::new(BigInt::from(108), BigInt::from(115_964_116_992u64));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut identity = true;
    let mut ordered = true;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let gamma: f64 = rng.random_range(1e-3..=1.0);
        let alpha = rng.random_range(0.0..=gamma);
        let c = rng.random_range(1.0001..20.0);
        let p = derive(n, gamma, alpha, c).map_err(e)?;
        identity &= p.eta_star == &p.p_star * (&p.gamma + &p.alpha) / BigRational::from_integer(BigInt::from(2));
        ordered &= p.eta_hat <= p.eta_star;
    }
    check(
        g.p_star == worked && identity && ordered,
        format!("p* = {} (expected 108/115964116992), eta* identity {identity}, eta_hat <= eta* {ordered}", g.p_star),
    )
}

fn mc_hits(g: &GameSpec, s: &Strategy) -> Result<u64, String> {
    let exact = exact_value(g, s).map_err(e)?;
    let hw = hoeffding_half_width(MC_ROUNDS, MC_CONFIDENCE);
    let mut hits = 0;
    for seed in 0..MC_TRIALS {
        let out = play(g, s, seed, MC_ROUNDS).map_err(e)?;
        let mean = out.wins as f64 / MC_ROUNDS as f64;
        hits += u64::from((mean - exact).abs() <= hw);
    }
    Ok(hits)
}

fn criterion_9() -> Outcome {
    let ms = magic_square().map_err(e)?;
    let a = mc_hits(&ms, &classical_random(&ms).map_err(e)?)?;
    let h = load("mixed-2term");
    let g = hamiltonian_game(&h, 0.5).map_err(e)?;
    let b = mc_hits(&g, &honest_ham(&h, &Witness::Pure(witness_state("plus", &h)?)).map_err(e)?)?;
    check(a >= MC_REQUIRED && b >= MC_REQUIRED, format!("{a}/{MC_TRIALS} and {b}/{MC_TRIALS} inside the 99% interval"))
}

fn cli(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_poqlab")).args(args).output().map_err(e)?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn criterion_10() -> Outcome {
    let f = |n: &str| fixtures().join(format!("{n}.json")).to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = [
        vec!["ground", "--ham", &f("random-3qubit")],
        vec!["value", "--ham", &f("mixed-2term"), "--p", "0.5"],
        vec!["value", "--game", "lwpbt", "--n", "3"],
        vec![
            "extract",
            "--ham",
            &f("random-3qubit"),
            "--p",
            "0.5",
            "--strategy",
            r#"{"preset":"honest","delta":0.05}"#,
        ],
        vec!["rigidity", "--n", "3", "--delta", "0.05"],
        vec!["params", "--ham", &f("shifted-2qubit")],
        vec!["sweep", "--ham", &f("mixed-2term"), "--p", "0.5"],
        vec!["play", "--game", "ms", "--seed", "9", "--rounds", "1000"],
    ]
    .iter()
    .map(|c| c.iter().map(|s| s.to_string()).collect())
    .collect();
    let mut runs = 0;
    for cmd in &commands {
        for format in ["json", "csv", "table"] {
            let mut outputs = Vec::new();
            for threads in ["1", "4", "4"] {
                let mut args = cmd.clone();
                args.extend(["--format".into(), format.into(), "--threads".into(), threads.into()]);
                outputs.push(cli(&args)?);
                runs += 1;
            }
            if outputs.windows(2).any(|w| w[0] != w[1]) {
                return Err(format!("{} --format {format} differs between runs", cmd[0]));
            }
        }
    }
    Ok(format!("{runs} runs over {} commands byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("honest values", criterion_1),
        ("semi-honest formula", criterion_2),
        ("swap gadget", criterion_3),
        ("honest extraction", criterion_4),
        ("step commutation", criterion_5),
        ("knowledge bound slack", criterion_6),
        ("rigidity diagnostics", criterion_7),
        ("parameter algebra", criterion_8),
        ("Monte Carlo consistency", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
