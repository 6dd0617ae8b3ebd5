use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::domination::{closure_approx, f_shadow, integral_bound_check, proportional_copy, q_cutoff, q_profile, IntegralReport};
use crate::error::{Error, Result};
use crate::evasion::{
    bounded_casino_with, cesaro_density, ratio_min_extension_eps, stabilization_report, two_phase_casino,
    well_ordered_casino, window_start, Case, RatioCase, StabilizationReport, ViolationRecord,
};
use crate::martingale::{parse_history, validate_strategy, History, MartingaleRun, Outcome, Strategy};
use crate::value::Value;
use crate::wagerset::{scales_into, WagerSet};

use super::builtins::builtin;
use super::scenario::{Construction, Mode, OutcomeSource, Scenario};
use super::table::{num, opt_num, Table};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Everything a run produced, before it is written to disk.
#[derive(Clone, Debug)]
pub struct RunReport {
    /// The scenario with defaults materialized.
    pub scenario: Scenario,
    pub table: Option<Table>,
    pub summary: serde_json::Value,
    /// Run facts for the metadata sidecar: enumeration, normalization factors.
    pub details: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub trajectory: Option<PathBuf>,
    pub metadata: PathBuf,
    pub summary: PathBuf,
}

/// 2 for invariant traps (an implementation bug), 1 for everything else (bad input).
pub fn exit_code(err: &Error) -> i32 {
    if err.is_invariant_trap() {
        2
    } else {
        1
    }
}

/// `builtin:<name>` or a path to scenario JSON.
pub fn load_scenario(arg: &str) -> Result<Scenario> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin(name)
            .map(|b| b.scenario)
            .ok_or_else(|| Error::Scenario(format!("unknown built-in scenario `{name}`")));
    }
    Scenario::from_json_str(&std::fs::read_to_string(arg)?)
}

/// Loads, runs and writes artifacts to `out` or the scenario's output directory.
pub fn run_scenario(arg: &str, out: Option<&Path>) -> Result<(RunReport, Artifacts)> {
    let sc = load_scenario(arg)?;
    let report = run(&sc)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => PathBuf::from(report.scenario.output_dir.clone().expect("materialized")),
    };
    let artifacts = report.write(&dir)?;
    Ok((report, artifacts))
}

/// Executes a scenario in memory under its precision setting.
pub fn run(sc: &Scenario) -> Result<RunReport> {
    sc.check()?;
    let m = sc.materialized();
    let precision = m.precision.expect("materialized");
    precision.scoped(|| dispatch(m))
}

impl RunReport {
    pub fn csv(&self) -> Result<Option<Vec<u8>>> {
        self.table.as_ref().map(Table::to_csv).transpose()
    }

    pub fn metadata(&self) -> serde_json::Value {
        json!({
            "scenario": self.scenario,
            "crateVersion": env!("CARGO_PKG_VERSION"),
            "details": self.details,
            "files": {
                "trajectory": self.table.as_ref().map(|_| TRAJECTORY_FILE),
                "summary": SUMMARY_FILE,
            },
        })
    }

    pub fn write(&self, dir: &Path) -> Result<Artifacts> {
        std::fs::create_dir_all(dir)?;
        let trajectory = match self.csv()? {
            Some(bytes) => {
                let p = dir.join(TRAJECTORY_FILE);
                std::fs::write(&p, bytes)?;
                Some(p)
            }
            None => None,
        };
        let metadata = dir.join(METADATA_FILE);
        std::fs::write(&metadata, pretty(&self.metadata())?)?;
        let summary = dir.join(SUMMARY_FILE);
        std::fs::write(&summary, pretty(&self.summary)?)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            trajectory,
            metadata,
            summary,
        })
    }
}

fn pretty(v: &serde_json::Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn dispatch(sc: Scenario) -> Result<RunReport> {
    let (table, body, details) = match sc.mode {
        Mode::Simulate => simulate(&sc)?,
        Mode::CheckScaling => check_scaling(&sc)?,
        Mode::Dominate => dominate(&sc)?,
        Mode::EvadeBounded => evade_bounded(&sc)?,
        Mode::EvadeWellOrdered => evade_well_ordered(&sc)?,
        Mode::RatioMin | Mode::DensityReport => ratio_min(&sc)?,
        Mode::Validate => validate(&sc)?,
    };
    let mut summary = match body {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("summaries are objects"),
    };
    summary.insert("scenario".into(), json!(sc.name));
    summary.insert("mode".into(), json!(sc.mode.label()));
    Ok(RunReport {
        scenario: sc,
        table,
        summary: serde_json::Value::Object(summary),
        details,
    })
}

type ModeOutput = (Option<Table>, serde_json::Value, serde_json::Value);

fn field<'a, T>(v: &'a Option<T>, name: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Scenario(format!("missing field `{name}`")))
}

fn build_all(specs: &[crate::martingale::StrategySpec]) -> Result<Vec<Strategy>> {
    specs.iter().map(|s| s.build()).collect()
}

/// Fair coin flips from a ChaCha8 stream seeded with `seed`.
pub fn seeded_history(seed: u64, len: usize) -> History {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| if rng.gen_bool(0.5) { Outcome::Heads } else { Outcome::Tails })
        .collect()
}

pub fn outcome_sequence(src: &OutcomeSource, horizon: usize) -> Result<History> {
    match src {
        OutcomeSource::Seeded { seed } => Ok(seeded_history(*seed, horizon)),
        OutcomeSource::Fixed { history, repeat } => {
            let h = parse_history(history)?;
            if h.is_empty() {
                return Err(Error::Scenario("field `casino.history` is empty".into()));
            }
            if h.len() < horizon && !repeat {
                return Err(Error::Scenario(
                    "field `casino.history` is shorter than the horizon and `repeat` is off".into(),
                ));
            }
            Ok(h.iter().copied().cycle().take(horizon).collect())
        }
        OutcomeSource::TwoPhase { .. } => Err(Error::Scenario(
            "field `casino`: twoPhase outcomes depend on the gamblers and cannot be precomputed".into(),
        )),
    }
}

/// Step count through the last nonzero wager, and nonzero wagers from `start` on.
fn activity(incs: &[Value], start: usize) -> (usize, usize) {
    let last = incs.iter().rposition(|x| !x.is_zero()).map_or(0, |t| t + 1);
    (last, incs.iter().skip(start).filter(|x| !x.is_zero()).count())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GamblerSummary {
    index: usize,
    name: String,
    initial: Value,
    final_wealth: Value,
    threshold: Value,
    success: bool,
    bankrupt_at: Option<usize>,
    last_active_step: usize,
    active_in_window: usize,
    stabilized: bool,
}

fn gambler_summary(index: usize, run: &MartingaleRun, margin: &Value, start: usize) -> Result<GamblerSummary> {
    let initial = run.wealths()[0].clone();
    let threshold = &initial + margin;
    let (last, active) = activity(run.increments(), start);
    Ok(GamblerSummary {
        index,
        name: run.name().to_string(),
        success: !run.is_bankrupt() && run.wealth().try_ge(&threshold)?,
        final_wealth: run.wealth().clone(),
        initial,
        threshold,
        bankrupt_at: run.is_bankrupt().then(|| run.t()),
        last_active_step: last,
        active_in_window: active,
        stabilized: active == 0,
    })
}

fn outcome_cell(o: Option<Outcome>) -> String {
    o.map(|o| o.as_char().to_string()).unwrap_or_default()
}

fn simulate(sc: &Scenario) -> Result<ModeOutput> {
    let horizon = *field(&sc.horizon, "horizon")?;
    let th = sc.thresholds();
    let start = window_start(horizon, &th.window_fraction)?;
    let strategies = build_all(&sc.strategies)?;
    if let OutcomeSource::TwoPhase { lead } = field(&sc.casino, "casino")? {
        let run = two_phase_casino(&strategies[0], &strategies[1], lead, horizon)?;
        let mut table = Table::new(["t", "outcome", "phase", "w0", "w1", "inc0", "inc1"]);
        for s in &run.states {
            table.push(vec![
                s.t.to_string(),
                outcome_cell(s.outcome),
                s.phase.map(|p| p.label().to_string()).unwrap_or_default(),
                num(&s.w0),
                num(&s.w1),
                opt_num(s.inc0.as_ref()),
                opt_num(s.inc1.as_ref()),
            ]);
        }
        let gamblers = vec![
            gambler_summary(0, &run.gambler0, &th.success_margin, start)?,
            gambler_summary(1, &run.gambler1, &th.success_margin, start)?,
        ];
        let body = json!({
            "horizon": horizon,
            "windowStart": start,
            "switchStep": run.switch_step,
            "gamblers": gamblers,
        });
        return Ok((Some(table), body, json!({"casino": "twoPhase"})));
    }
    let outcomes = outcome_sequence(field(&sc.casino, "casino")?, horizon)?;
    let mut runs = Vec::with_capacity(strategies.len());
    for s in &strategies {
        let mut r = s.run();
        r.play(&outcomes)?;
        runs.push(r);
    }
    let n = runs.len();
    let mut header = vec!["t".to_string(), "outcome".to_string()];
    header.extend((0..n).map(|i| format!("w{i}")));
    header.extend((0..n).map(|i| format!("inc{i}")));
    let mut table = Table::new(header);
    for t in 0..=horizon {
        let mut row = vec![t.to_string(), outcome_cell(outcomes.get(t).copied())];
        for r in &runs {
            // A bankrupt run stops; its wealth is frozen from then on.
            row.push(num(r.wealths().get(t).unwrap_or_else(|| r.wealth())));
        }
        for r in &runs {
            row.push(opt_num(r.increments().get(t)));
        }
        table.push(row);
    }
    let gamblers = runs
        .iter()
        .enumerate()
        .map(|(i, r)| gambler_summary(i, r, &th.success_margin, start))
        .collect::<Result<Vec<_>>>()?;
    let body = json!({
        "horizon": horizon,
        "windowStart": start,
        "gamblers": gamblers,
    });
    Ok((Some(table), body, json!({})))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfilePoint {
    x: Value,
    q: Value,
}

fn profile_summary(sc: &Scenario) -> Result<Option<serde_json::Value>> {
    let Some(p) = &sc.profile else { return Ok(None) };
    let (a, b) = (field(&sc.a, "a")?, field(&sc.b, "b")?);
    let qs = q_profile(a, b, &p.m, &p.points)?;
    let cutoff = q_cutoff(&p.points, &qs);
    let points: Vec<ProfilePoint> = p
        .points
        .iter()
        .zip(qs)
        .map(|(x, q)| ProfilePoint { x: x.clone(), q })
        .collect();
    Ok(Some(json!({"m": p.m, "points": points, "cutoff": cutoff})))
}

fn check_scaling(sc: &Scenario) -> Result<ModeOutput> {
    let (a, b) = (field(&sc.a, "a")?, field(&sc.b, "b")?);
    let mut body = serde_json::to_value(scales_into(a, b)?)?;
    if let Some(p) = profile_summary(sc)? {
        body["profile"] = p;
    }
    Ok((None, body, json!({})))
}

/// Membership in `set ∪ {0}` with a cache; wagers repeat a lot.
struct Membership {
    set: WagerSet,
    cache: HashMap<Value, bool>,
}

impl Membership {
    fn new(set: &WagerSet) -> Membership {
        Membership {
            set: WagerSet::with_zero(set.clone()),
            cache: HashMap::new(),
        }
    }

    fn contains(&mut self, inc: &Value) -> Result<bool> {
        let w = inc.try_abs()?;
        if let Some(hit) = self.cache.get(&w) {
            return Ok(*hit);
        }
        let hit = self.set.contains(&w)?;
        self.cache.insert(w, hit);
        Ok(hit)
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DominateSummary {
    construction: String,
    horizon: usize,
    m_initial: Value,
    m_final: Value,
    s_initial: Value,
    s_final: Value,
    m_success: bool,
    s_success: bool,
    /// Steps where the constructed strategy's wager left its target set.
    wager_violations: Option<usize>,
    /// Nodes on the path where a construction-specific comparison with M failed.
    dominance_violations: Option<usize>,
    integral: Option<IntegralReport>,
}

fn dominate(sc: &Scenario) -> Result<ModeOutput> {
    let horizon = *field(&sc.horizon, "horizon")?;
    let th = sc.thresholds();
    let m = sc.strategies[0].build()?;
    let construction = field(&sc.construction, "construction")?;
    let (s, label, target) = match construction {
        Construction::FShadow => (f_shadow(&m, field(&sc.scaling, "scaling")?)?, "fShadow", sc.b.as_ref()),
        Construction::Proportional { r } => (proportional_copy(&m, r.clone())?, "proportional", sc.b.as_ref()),
        Construction::ClosureApprox => {
            let a = field(&sc.a, "a")?;
            (closure_approx(&m, a)?, "closureApprox", Some(a))
        }
    };
    let outcomes = outcome_sequence(field(&sc.casino, "casino")?, horizon)?;
    let (mut mr, mut sr) = (m.run(), s.run());
    let mut member = target.map(Membership::new);
    let mut wager_violations = 0;
    let mut dominance_violations = 0;
    let mut table = Table::new(["t", "outcome", "M", "S", "M_inc", "S_inc"]);
    let compare = |mw: &Value, sw: &Value| -> Result<bool> {
        Ok(match construction {
            Construction::ClosureApprox => sw.try_gt(mw)?,
            Construction::Proportional { r } => sw.try_eq(&mw.checked_mul(r)?)?,
            Construction::FShadow => true,
        })
    };
    for (t, &o) in outcomes.iter().enumerate() {
        let (mi, si) = (mr.pending_increment()?, sr.pending_increment()?);
        if mr.is_bankrupt() {
            return Err(Error::Scenario(format!("field `strategies[0]`: bets beyond its wealth at step {t}")));
        }
        if sr.is_bankrupt() {
            return Err(Error::InvariantViolation {
                step: t,
                detail: format!("the {label} strategy bets beyond its wealth"),
            });
        }
        if let Some(mb) = member.as_mut() {
            if !mb.contains(&si)? {
                wager_violations += 1;
            }
        }
        if !compare(mr.wealth(), sr.wealth())? {
            dominance_violations += 1;
        }
        table.push(vec![
            t.to_string(),
            o.as_char().to_string(),
            num(mr.wealth()),
            num(sr.wealth()),
            num(&mi),
            num(&si),
        ]);
        mr.step(o)?;
        sr.step(o)?;
    }
    if !compare(mr.wealth(), sr.wealth())? {
        dominance_violations += 1;
    }
    table.push(vec![
        horizon.to_string(),
        String::new(),
        num(mr.wealth()),
        num(sr.wealth()),
        String::new(),
        String::new(),
    ]);
    let integral = match construction {
        Construction::FShadow => Some(integral_bound_check(&mr, &sr, field(&sc.scaling, "scaling")?)?),
        _ => None,
    };
    let (m0, s0) = (mr.wealths()[0].clone(), sr.wealths()[0].clone());
    let summary = DominateSummary {
        construction: label.into(),
        horizon,
        m_success: mr.wealth().try_ge(&(&m0 + &th.success_margin))?,
        s_success: sr.wealth().try_ge(&(&s0 + &th.success_margin))?,
        m_final: mr.wealth().clone(),
        s_final: sr.wealth().clone(),
        m_initial: m0,
        s_initial: s0,
        wager_violations: member.map(|_| wager_violations),
        dominance_violations: (!matches!(construction, Construction::FShadow)).then_some(dominance_violations),
        integral,
    };
    let mut body = serde_json::to_value(summary)?;
    if let Some(p) = profile_summary(sc)? {
        body["profile"] = p;
    }
    Ok((Some(table), body, json!({"constructed": s.name()})))
}

fn case_label(c: Option<Case>) -> String {
    match c {
        Some(Case::Adversarial) => "I".into(),
        Some(Case::RatioMinimizing) => "II".into(),
        None => String::new(),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CaseCounts {
    adversarial: usize,
    ratio_minimizing: usize,
}

fn case_counts<'a>(cases: impl Iterator<Item = &'a Option<Case>>) -> CaseCounts {
    let mut c = CaseCounts {
        adversarial: 0,
        ratio_minimizing: 0,
    };
    for case in cases.flatten() {
        match case {
            Case::Adversarial => c.adversarial += 1,
            Case::RatioMinimizing => c.ratio_minimizing += 1,
        }
    }
    c
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvadeSummary {
    horizon: usize,
    opponents: usize,
    m_initial: Value,
    m_final: Value,
    threshold: Value,
    /// Final wealth reaches the threshold and M never went into debt.
    success: bool,
    m_never_negative: bool,
    /// Well-ordered case: `m(t) >= g(t)` on every row.
    #[serde(skip_serializing_if = "Option::is_none")]
    m_at_least_g: Option<bool>,
    /// Bounded case: `min k(t)` over the window is at least the opponent count.
    #[serde(skip_serializing_if = "Option::is_none")]
    k_window_min_covers_opponents: Option<bool>,
    cases: CaseCounts,
    violations: Vec<ViolationRecord>,
    fragility_violations: usize,
    stabilization: StabilizationReport,
}

fn opponent_header(base: &[&str], users: usize) -> Vec<String> {
    let mut h: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    h.extend((1..=users).map(|j| format!("n_{j}")));
    h
}

fn evade_bounded(sc: &Scenario) -> Result<ModeOutput> {
    let (a, b) = (field(&sc.a, "a")?, field(&sc.b, "b")?);
    let horizon = *field(&sc.horizon, "horizon")?;
    let th = sc.thresholds();
    let cfg = field(&sc.casino_config, "casinoConfig")?;
    let opponents = build_all(&sc.opponents)?;
    let run = bounded_casino_with(a, b, &opponents, horizon, cfg, sc.padding_first.unwrap_or(false))?;
    let users = opponents.len();
    let mut table = Table::new(opponent_header(&["t", "outcome", "m", "k", "case", "acting_index", "S_k"], users));
    for s in &run.states {
        let mut row = vec![
            s.t.to_string(),
            outcome_cell(s.outcome),
            num(&s.m),
            s.k.to_string(),
            case_label(s.case),
            s.acting_index.map(|i| i.to_string()).unwrap_or_default(),
            num(&s.s_k),
        ];
        row.extend(s.n.iter().map(num));
        table.push(row);
    }
    let stabilization = stabilization_report(&run.k_series(), "k", &run.opponent_runs, &th.window_fraction)?;
    let m0 = run.m_initial().clone();
    let m_final = run.states.last().expect("initial row").m.clone();
    let threshold = &m0 + &th.success_margin;
    let mut never_negative = true;
    for s in &run.states {
        never_negative &= !s.m.is_negative()?;
    }
    let summary = EvadeSummary {
        horizon,
        opponents: users,
        success: never_negative && m_final.try_ge(&threshold)?,
        m_never_negative: never_negative,
        m_at_least_g: None,
        k_window_min_covers_opponents: Some(stabilization.index_window_min.is_some_and(|k| k >= users as u64)),
        cases: case_counts(run.states.iter().map(|s| &s.case)),
        fragility_violations: 0,
        violations: run.violations.clone(),
        stabilization,
        m_initial: m0,
        m_final,
        threshold,
    };
    let details = json!({
        "enumeration": run.enumeration,
        "normalization": {"rA": run.normalization.r_a, "rB": run.normalization.r_b},
        "paddingFirst": run.padding_first,
        "opponentNames": run.opponent_runs.iter().map(|r| r.name()).collect::<Vec<_>>(),
    });
    Ok((Some(table), serde_json::to_value(summary)?, details))
}

fn evade_well_ordered(sc: &Scenario) -> Result<ModeOutput> {
    let (a, b) = (field(&sc.a, "a")?, field(&sc.b, "b")?);
    let horizon = *field(&sc.horizon, "horizon")?;
    let th = sc.thresholds();
    let cfg = field(&sc.casino_config, "casinoConfig")?;
    let opponents = build_all(&sc.opponents)?;
    let run = well_ordered_casino(a, b, &opponents, horizon, cfg)?;
    let users = opponents.len();
    let mut table = Table::new(opponent_header(
        &["t", "outcome", "m", "m_inc", "g", "p", "mu", "case", "acting_index"],
        users,
    ));
    let mut m_at_least_g = true;
    let mut never_negative = true;
    for s in &run.states {
        m_at_least_g &= s.m.try_ge(&s.g)?;
        never_negative &= !s.m.is_negative()?;
        let mut row = vec![
            s.t.to_string(),
            outcome_cell(s.outcome),
            num(&s.m),
            opt_num(s.m_inc.as_ref()),
            num(&s.g),
            s.p.to_string(),
            num(&s.mu),
            case_label(s.case),
            s.acting_index.map(|i| i.to_string()).unwrap_or_default(),
        ];
        row.extend(s.n.iter().map(num));
        table.push(row);
    }
    let stabilization = stabilization_report(&run.p_series(), "p", &run.opponent_runs, &th.window_fraction)?;
    let (m0, m_final) = (run.m_initial().clone(), run.m_final().clone());
    let threshold = &m0 + &th.success_margin;
    let summary = EvadeSummary {
        horizon,
        opponents: users,
        success: never_negative && m_final.try_ge(&threshold)?,
        m_never_negative: never_negative,
        m_at_least_g: Some(m_at_least_g),
        k_window_min_covers_opponents: None,
        cases: case_counts(run.states.iter().map(|s| &s.case)),
        fragility_violations: run.violations.iter().filter(|v| v.kind == "fragility").count(),
        violations: run.violations.clone(),
        stabilization,
        m_initial: m0,
        m_final,
        threshold,
    };
    let details = json!({
        "enumeration": run.enumeration,
        "normalization": {"rA": run.r_a, "rB": run.r_b},
        "opponentNames": run.opponent_runs.iter().map(|r| r.name()).collect::<Vec<_>>(),
    });
    Ok((Some(table), serde_json::to_value(summary)?, details))
}

fn ratio_case_label(c: RatioCase) -> &'static str {
    match c {
        RatioCase::Decrease => "decrease",
        RatioCase::TieIncrease => "tie",
        RatioCase::BothZero => "zero",
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DensityPoint {
    length: usize,
    density: Value,
    density_decimal: f64,
}

fn ratio_min(sc: &Scenario) -> Result<ModeOutput> {
    let horizon = *field(&sc.horizon, "horizon")?;
    let n = sc.strategies[0].build()?;
    let m = sc.strategies[1].build()?;
    let prefix = parse_history(sc.prefix.as_deref().unwrap_or(""))?;
    let epsilon = sc.density.as_ref().map_or_else(|| Value::ratio(1, 10), |d| d.epsilon.clone());
    let trace = ratio_min_extension_eps(&n, &m, &prefix, horizon, &epsilon)?;
    let mut table = Table::new(["t", "outcome", "N", "M", "ratio", "N_inc", "M_inc", "case"]);
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut non_increasing = true;
    for (i, r) in trace.iter().enumerate() {
        *counts.entry(ratio_case_label(r.case)).or_default() += 1;
        if i > 0 {
            non_increasing &= r.ratio.try_le(&trace[i - 1].ratio)?;
        }
        table.push(vec![
            r.step.to_string(),
            r.outcome.as_char().to_string(),
            num(&r.n),
            num(&r.m),
            num(&r.ratio),
            num(&r.n_inc),
            num(&r.m_inc),
            ratio_case_label(r.case).into(),
        ]);
    }
    let last = trace.last().expect("horizon >= 1");
    let (n_final, m_final) = (last.outcome.apply(&last.n, &last.n_inc), last.outcome.apply(&last.m, &last.m_inc));
    non_increasing &= last.limit_estimate.try_le(&last.ratio)?;
    table.push(vec![
        (last.step + 1).to_string(),
        String::new(),
        num(&n_final),
        num(&m_final),
        num(&last.limit_estimate),
        String::new(),
        String::new(),
        String::new(),
    ]);
    let mut body = json!({
        "horizon": horizon,
        "prefixLength": prefix.len(),
        "initialRatio": trace[0].ratio,
        "finalRatio": last.limit_estimate,
        "nFinal": n_final,
        "mFinal": m_final,
        "nonIncreasing": non_increasing,
        "cases": {
            "decrease": counts.get("decrease").copied().unwrap_or(0),
            "tieIncrease": counts.get("tie").copied().unwrap_or(0),
            "bothZero": counts.get("zero").copied().unwrap_or(0),
        },
        "epsilon": epsilon,
        "deviations": last.deviations,
    });
    if let Some(d) = &sc.density {
        let mut points = Vec::with_capacity(d.windows.len());
        for &w in &d.windows {
            let density = Value::from_rational(cesaro_density(&trace[..w], &last.limit_estimate, &d.epsilon)?);
            points.push(DensityPoint {
                length: w,
                density_decimal: density.to_f64(),
                density,
            });
        }
        let mut monotone = true;
        for pair in points.windows(2) {
            monotone &= pair[1].density.try_le(&pair[0].density)?;
        }
        body["densities"] = serde_json::to_value(&points)?;
        body["densitiesNonIncreasing"] = json!(monotone);
        body["finalDensity"] = json!(points.last().map(|p| p.density.clone()));
    }
    Ok((Some(table), body, json!({"n": n.name(), "m": m.name()})))
}

fn validate(sc: &Scenario) -> Result<ModeOutput> {
    let a = field(&sc.a, "a")?;
    let depth = *field(&sc.depth, "depth")?;
    let s = sc.strategies[0].build()?;
    let report = validate_strategy(&s, a, depth)?;
    Ok((None, json!({"valid": report.is_valid(), "report": report}), json!({"strategy": s.name()})))
}
