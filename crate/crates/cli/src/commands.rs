use std::fs;
use std::path::Path;

use poqlab::extractor::{
    extract as run_extract, rigidity_deviation, ExtractConfig, ExtractionReport, OracleAccess, StepOrder,
};
use poqlab::games::{
    hamiltonian_game, hoeffding_half_width, lwpbt, magic_square, play as run_play, value_breakdown, GameSpec,
};
use poqlab::hamiltonian::XZHamiltonian;
use poqlab::params::{derive, to_f64, GameParams};
use serde_json::{json, Map, Value};

use crate::descriptor::{build, StrategyDesc, Target};
use crate::output::{num, Report};
use crate::{
    CliError, Ctx, ExtractArgs, GameArgs, GameKind, PArgs, ParamsArgs, PlayArgs, RigidityArgs, SweepArgs, ValueArgs,
};

fn load_ham(path: &Path) -> Result<XZHamiltonian, CliError> {
    let text = fs::read_to_string(path)?;
    let parsed = XZHamiltonian::parse_with_warnings(&text).map_err(|e| match e {
        poqlab::Error::Parse { line, msg } => CliError::Usage(format!("{}:{line}: {msg}", path.display())),
        other => other.into(),
    })?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.hamiltonian)
}

fn resolve_alpha(h: &XZHamiltonian, alpha: Option<f64>) -> Result<f64, CliError> {
    match alpha {
        Some(a) if !(0.0..=h.gamma()).contains(&a) => {
            Err(CliError::Usage(format!("--alpha {a} outside [0, gamma = {}]", h.gamma())))
        }
        Some(a) => Ok(a),
        None => Ok(h.default_alpha()?),
    }
}

/// `p` from `--p`, or `p*` from the derived parameters.
fn resolve_p(p: &PArgs, h: &XZHamiltonian, alpha: f64, c: f64) -> Result<(f64, Option<GameParams>), CliError> {
    let params = derive(h.n(), h.gamma(), alpha, c).ok();
    match (p.p, p.p_star) {
        (Some(p), _) if !(p > 0.0 && p <= 1.0) => Err(CliError::Usage(format!("--p {p} outside (0, 1]"))),
        (Some(p), _) => Ok((p, params)),
        (None, true) => {
            let params = derive(h.n(), h.gamma(), alpha, c)?;
            Ok((to_f64(&params.p_star), Some(params)))
        }
        (None, false) => Err(CliError::Usage("one of --p or --p-star is required".into())),
    }
}

struct Setup {
    game: GameSpec,
    desc: StrategyDesc,
    strategy: poqlab::games::Strategy,
    p: Option<f64>,
}

fn setup(a: &GameArgs) -> Result<Setup, CliError> {
    let desc = StrategyDesc::parse(&a.strategy)?;
    let h = a.ham.as_deref().map(load_ham).transpose()?;
    let (game, target, p) = match (&h, a.game) {
        (Some(h), None) => {
            let alpha = resolve_alpha(h, a.alpha)?;
            let (p, _) = resolve_p(&a.p, h, alpha, a.c)?;
            (hamiltonian_game(h, p)?, Target::Ham(h), Some(p))
        }
        (None, Some(kind)) => {
            if a.p.p.is_some() || a.p.p_star || a.alpha.is_some() {
                return Err(CliError::Usage("--p, --p-star and --alpha need --ham".into()));
            }
            match kind {
                GameKind::Ms => (magic_square()?, Target::MagicSquare, None),
                GameKind::Lwpbt => {
                    let n = a.n.ok_or_else(|| CliError::Usage("--game lwpbt needs --n".into()))?;
                    (lwpbt(n)?, Target::Lwpbt(n), None)
                }
            }
        }
        _ => return Err(CliError::Usage("exactly one of --ham or --game is required".into())),
    };
    let strategy = build(&desc, &target, &game)?;
    Ok(Setup { game, desc, strategy, p })
}

pub fn ground(ctx: &Ctx, ham: &Path, state: Option<&Path>) -> Result<(), CliError> {
    let h = load_ham(ham)?;
    let (l0, g) = h.ground()?;
    if let Some(path) = state {
        fs::write(path, g.to_json()? + "\n")?;
    }
    let json = json!({ "n": h.n(), "m": h.m(), "gamma": h.gamma(), "lambda0": l0 });
    let report = Report {
        json,
        columns: vec!["n".into(), "m".into(), "gamma".into(), "lambda0".into()],
        rows: vec![vec![h.n().to_string(), h.m().to_string(), num(h.gamma()), format!("{l0:.12}")]],
    };
    report.emit(ctx.format, ctx.out.as_deref())
}

pub fn value(ctx: &Ctx, a: &ValueArgs) -> Result<(), CliError> {
    let s = setup(&a.game)?;
    let b = value_breakdown(&s.game, &s.strategy)?;
    let mut json = Map::new();
    json.insert("game".into(), s.game.name().into());
    json.insert("n".into(), s.game.n().into());
    json.insert("p".into(), s.p.into());
    json.insert("strategy".into(), serde_json::to_value(&s.desc)?);
    json.insert("value".into(), b.value().into());
    json.insert("loss".into(), b.loss().into());
    for (t, v) in b.by_subtest() {
        json.insert(format!("value_{t}"), v.into());
    }
    Report::single(Value::Object(json)).emit(ctx.format, ctx.out.as_deref())
}

pub fn play(ctx: &Ctx, a: &PlayArgs) -> Result<(), CliError> {
    if !(0.0 < a.confidence && a.confidence < 1.0) {
        return Err(CliError::Usage(format!("--confidence {} outside (0, 1)", a.confidence)));
    }
    let s = setup(&a.game)?;
    let out = run_play(&s.game, &s.strategy, a.seed, a.rounds)?;
    if let Some(path) = &a.transcript {
        fs::write(path, out.to_jsonl()?)?;
    }
    let mean = out.wins as f64 / a.rounds as f64;
    let hw = hoeffding_half_width(a.rounds, a.confidence);
    let json = json!({
        "game": s.game.name(),
        "n": s.game.n(),
        "p": s.p,
        "seed": a.seed,
        "rounds": a.rounds,
        "wins": out.wins,
        "mean": mean,
        "half_width": hw,
        "lower": (mean - hw).max(0.0),
        "upper": (mean + hw).min(1.0),
        "confidence": a.confidence,
    });
    Report::single(json).emit(ctx.format, ctx.out.as_deref())
}

fn regime_warning(report: &ExtractionReport) -> Option<String> {
    match (report.in_regime, report.eta_star) {
        (Some(false), Some(eta)) => Some(format!("epsilon = {} exceeds eta* = {}", num(report.epsilon), num(eta))),
        _ => None,
    }
}

pub fn extract(ctx: &Ctx, a: &ExtractArgs) -> Result<(), CliError> {
    let h = load_ham(&a.ham)?;
    if h.n() > 4 {
        return Err(CliError::Usage(format!("extraction supports n <= 4, got {}", h.n())));
    }
    let desc = StrategyDesc::parse(&a.strategy)?;
    let alpha = resolve_alpha(&h, a.alpha)?;
    let (p, params) = resolve_p(&a.p, &h, alpha, a.c)?;
    let game = hamiltonian_game(&h, p)?;
    let s = build(&desc, &Target::Ham(&h), &game)?;
    let cfg = ExtractConfig { p_used: p, alpha: Some(alpha), c: a.c, order: StepOrder::SwapThenTeleport };
    let mut report = run_extract(&OracleAccess::new(&s), &h, &cfg)?;
    if a.sampled {
        let seed = a.seed.expect("clap enforces --seed with --sampled");
        let out = run_play(&game, &s, seed, a.rounds)?;
        report.epsilon = 1.0 - out.wins as f64 / a.rounds as f64;
        report.bound = report.alpha + 2.0 * report.epsilon / p;
        report.slack = report.bound - report.energy;
        report.in_regime = params.as_ref().map(|g| g.in_regime(report.epsilon));
    }
    if let Some(path) = &a.zeta {
        let m = report.zeta.matrix();
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        let dump = json!({ "dim": m.nrows(), "re": rows(|z| z.re), "im": rows(|z| z.im) });
        fs::write(path, serde_json::to_string(&dump)? + "\n")?;
    }
    let warning = regime_warning(&report);
    let mut json = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut json {
        map.insert("epsilon_mode".into(), (if a.sampled { "sampled" } else { "exact" }).into());
        map.insert("warnings".into(), warning.iter().cloned().collect::<Vec<_>>().into());
    }
    Report::single(json).emit(ctx.format, ctx.out.as_deref())?;
    finish(ctx, warning.into_iter().collect())
}

/// Prints warnings; under `--strict` they become an error.
fn finish(ctx: &Ctx, warnings: Vec<String>) -> Result<(), CliError> {
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match (ctx.strict, warnings.first()) {
        (true, Some(w)) => Err(CliError::OutOfRegime(w.clone())),
        _ => Ok(()),
    }
}

pub fn rigidity(ctx: &Ctx, a: &RigidityArgs) -> Result<(), CliError> {
    let mut desc = StrategyDesc::parse(&a.strategy)?;
    if a.delta.is_some() {
        desc.delta = a.delta;
    }
    let h = a.ham.as_deref().map(load_ham).transpose()?;
    let n = h.as_ref().map(|h| h.n()).or(a.n).expect("clap requires --ham or --n");
    let game = lwpbt(n)?;
    let target = match &h {
        Some(h) => Target::Ham(h),
        None => Target::Lwpbt(n),
    };
    let s = build(&desc, &target, &game)?;
    let r = rigidity_deviation(&s, n)?;
    let report = Report {
        json: serde_json::to_value(&r)?,
        columns: vec!["question".into(), "deviation".into()],
        rows: r.deviations.iter().map(|d| vec![d.question.clone(), num(d.deviation)]).collect(),
    };
    report.emit(ctx.format, ctx.out.as_deref())?;
    if ctx.format.is_none() && ctx.out.is_none() {
        println!("max_deviation  {}", num(r.max_deviation));
        println!("epsilon        {}", num(r.epsilon));
        println!("constant       {}", r.constant_estimate.map(num).unwrap_or_default());
    }
    Ok(())
}

pub fn params(ctx: &Ctx, a: &ParamsArgs) -> Result<(), CliError> {
    let (n, gamma, alpha) = match &a.ham {
        Some(path) => {
            let h = load_ham(path)?;
            let alpha = resolve_alpha(&h, a.alpha)?;
            (h.n(), h.gamma(), alpha)
        }
        None => (a.n.expect("clap requires --n"), a.gamma.expect("clap requires --gamma"), a.alpha.unwrap_or(0.0)),
    };
    let p = derive(n, gamma, alpha, a.c)?;
    Report::single(serde_json::to_value(p.table())?).emit(ctx.format, ctx.out.as_deref())
}

pub fn sweep(ctx: &Ctx, a: &SweepArgs) -> Result<(), CliError> {
    if a.delta.is_empty() {
        return Err(CliError::Usage("--delta grid is empty".into()));
    }
    if let Some(d) = a.delta.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(CliError::Usage(format!("delta {d} outside [0, 1]")));
    }
    let h = load_ham(&a.ham)?;
    let base = StrategyDesc::parse(&a.strategy)?;
    if base.delta.is_some() {
        return Err(CliError::Usage("the sweep sets delta itself; drop it from --strategy".into()));
    }
    let alpha = resolve_alpha(&h, a.alpha)?;
    let (p, _) = resolve_p(&a.p, &h, alpha, a.c)?;
    let game = hamiltonian_game(&h, p)?;
    let cfg = ExtractConfig { p_used: p, alpha: Some(alpha), c: a.c, order: StepOrder::SwapThenTeleport };
    let columns = ["delta", "epsilon", "energy", "bound", "slack", "max_rigidity_deviation", "rigidity_constant"];
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    let mut warnings = Vec::new();
    for &delta in &a.delta {
        let desc = StrategyDesc { delta: Some(delta), ..base.clone() };
        let s = build(&desc, &Target::Ham(&h), &game)?;
        let report = run_extract(&OracleAccess::new(&s), &h, &cfg)?;
        if let Some(w) = regime_warning(&report) {
            warnings.push(format!("delta = {delta}: {w}"));
        }
        // the anti-commutation test needs two sites
        let rig = if h.n() >= 2 { Some(rigidity_deviation(&s, h.n())?) } else { None };
        let dev = rig.as_ref().map(|r| r.max_deviation);
        let constant = rig.as_ref().and_then(|r| r.constant_estimate);
        rows.push(vec![
            num(delta),
            num(report.epsilon),
            num(report.energy),
            num(report.bound),
            num(report.slack),
            dev.map(num).unwrap_or_default(),
            constant.map(num).unwrap_or_default(),
        ]);
        docs.push(json!({
            "delta": delta,
            "epsilon": report.epsilon,
            "energy": report.energy,
            "bound": report.bound,
            "slack": report.slack,
            "max_rigidity_deviation": dev,
            "rigidity_constant": constant,
            "in_regime": report.in_regime,
        }));
    }
    let json = json!({ "n": h.n(), "gamma": h.gamma(), "alpha": alpha, "C": a.c, "p_used": p, "rows": docs });
    let report = Report { json, columns: columns.iter().map(|c| c.to_string()).collect(), rows };
    report.emit(ctx.format, ctx.out.as_deref())?;
    finish(ctx, warnings)
}
