//! Acceptance criteria 1-10: one PASS/FAIL line each; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use duel::domination::{closure_approx, f_shadow, integral_bound_check, q_cutoff, q_profile, ScalingFunction};
use duel::evasion::ratio_min_extension;
use duel::harness::{builtin, run, seeded_history, RunReport};
use duel::martingale::{
    always_heads, always_tails, copycat, ruler_martingale, scripted, stop_on_bankrupt, threshold_switcher,
    wealth_fraction, MartingaleRun, Outcome, Rounding, Strategy,
};
use duel::wagerset::{scales_into, ExponentRange, Sieve};
use duel::{Result, ScalingAnswer, Value, WagerSet};

/// Wall-clock budgets per criterion.
const BUDGET_1: Duration = Duration::from_secs(5);
const BUDGET_2: Duration = Duration::from_secs(10);
const BUDGET_6: Duration = Duration::from_secs(60);
const BUDGET_7: Duration = Duration::from_secs(120);
const BUDGET_8: Duration = Duration::from_secs(120);
const BUDGET_9: Duration = Duration::from_secs(5);

/// Criterion 6: deviation density ceiling at the last window.
const DENSITY_CEILING: (i64, i64) = (1, 20);

struct Outcome_ {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Outcome_> {
    Ok(Outcome_ {
        pass,
        detail: detail.into(),
    })
}

fn within(start: Instant, budget: Duration) -> (bool, String) {
    let e = start.elapsed();
    (e <= budget, format!("{:.2}s of {}s", e.as_secs_f64(), budget.as_secs()))
}

fn report_of(name: &str) -> Result<RunReport> {
    run(&builtin(name).expect("catalogued").scenario)
}

fn get<'a>(v: &'a serde_json::Value, path: &str) -> &'a serde_json::Value {
    v.pointer(path).unwrap_or(&serde_json::Value::Null)
}

fn value_at(v: &serde_json::Value, path: &str) -> Value {
    serde_json::from_value(get(v, path).clone()).expect("summary value")
}

// 1. Two-phase casino with each admissible gambler 1.
fn criterion_1() -> Result<Outcome_> {
    let start = Instant::now();
    let b = WagerSet::finite([Value::one()])?;
    let g0 = threshold_switcher(Value::int(2), Value::one(), Value::int(10));
    let variants = [
        copycat(&g0, Value::ratio(1, 2), Rounding::Ceil, Some(Value::int(10)))?,
        always_heads(Value::one(), Value::int(10)),
        always_tails(Value::one(), Value::int(10)),
    ];
    let base = builtin("intro-1-2-vs-1").expect("catalogued").scenario;
    let mut pass = true;
    let mut notes = Vec::new();
    for g1 in &variants {
        let runs = duel::evasion::two_phase_casino(&g0, &stop_on_bankrupt(g1, &b)?, &Value::int(3), 10_000)?;
        let (w0, w1) = (runs.gambler0.wealth(), runs.gambler1.wealth());
        let idle = runs.gambler1.increments()[8_000..].iter().all(Value::is_zero);
        let ok = w0.try_ge(&Value::int(110))? && w1.try_le(&Value::int(14))? && idle;
        pass &= ok;
        notes.push(format!("{}: w0={} w1={}", g1.name(), w0, w1));
    }
    // The catalogued scenario reports the same through its summary.
    let r = run(&base)?;
    pass &= get(&r.summary, "/gamblers/0/success") == &serde_json::json!(true)
        && get(&r.summary, "/gamblers/1/success") == &serde_json::json!(false);
    let (fast, t) = within(start, BUDGET_1);
    verdict(pass && fast, format!("{}; {t}", notes.join("; ")))
}

fn subsets_up_to_3(n: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for a in 1..=n {
        out.push(vec![a]);
        for b in a + 1..=n {
            out.push(vec![a, b]);
            for c in b + 1..=n {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// Brute force: some ratio `b / a` sends every element of `a_set` into `b_set`.
fn oracle_scales(a_set: &[i64], b_set: &[i64]) -> Option<BigRational> {
    let bs: BTreeSet<BigRational> = b_set.iter().map(|&b| BigRational::from_integer(b.into())).collect();
    for &a in a_set {
        for b in &bs {
            let r = b / BigRational::from_integer(BigInt::from(a));
            if a_set.iter().all(|&x| bs.contains(&(&r * BigRational::from_integer(x.into())))) {
                return Some(r);
            }
        }
    }
    None
}

// 2. Finite-set scaling against the brute-force oracle.
fn criterion_2() -> Result<Outcome_> {
    let start = Instant::now();
    let subsets = subsets_up_to_3(8);
    let sets: Vec<WagerSet> = subsets
        .iter()
        .map(|s| WagerSet::finite(s.iter().map(|&x| Value::int(x))))
        .collect::<Result<_>>()?;
    let mut disagreements = 0;
    let mut pairs = 0;
    for (i, a) in sets.iter().enumerate() {
        for (j, b) in sets.iter().enumerate() {
            pairs += 1;
            let ours = scales_into(a, b)?;
            let agree = match (&ours, oracle_scales(&subsets[i], &subsets[j])) {
                (ScalingAnswer::Yes { r }, Some(_)) => {
                    // The witness itself must work.
                    subsets[i].iter().all(|&x| {
                        let y = r.mul_rational(&BigRational::from_integer(x.into()));
                        b.contains(&y).unwrap_or(false)
                    })
                }
                (ScalingAnswer::No, None) => true,
                _ => false,
            };
            if !agree {
                disagreements += 1;
            }
        }
    }
    let (fast, t) = within(start, BUDGET_2);
    verdict(
        disagreements == 0 && fast,
        format!("{pairs} pairs, {disagreements} disagreements; {t}"),
    )
}

fn shadow_certificate(m: &Strategy, f: &ScalingFunction, b: &WagerSet, history: &[Outcome]) -> Result<(bool, usize)> {
    let s = f_shadow(m, f)?;
    let (mut mr, mut sr) = (m.run(), s.run());
    mr.play(history)?;
    sr.play(history)?;
    if mr.t() != history.len() || sr.t() != history.len() {
        return Ok((false, 0));
    }
    let report = integral_bound_check(&mr, &sr, f)?;
    let set = WagerSet::with_zero(b.clone());
    let mut legal = true;
    let mut seen = BTreeSet::new();
    for w in sr.increments() {
        let w = w.try_abs()?;
        if seen.insert(w.to_string()) {
            legal &= set.contains(&w)?;
        }
    }
    Ok((report.passed() && legal, report.steps_checked))
}

// 3. Integral certificates for the two scaling functions over 100 seeded sequences each.
fn criterion_3() -> Result<Outcome_> {
    let start = Instant::now();
    const LEN: usize = 10_000;
    let fractions = [Value::ratio(1, 4), Value::ratio(1, 2), Value::ratio(3, 4), Value::one()];
    let unit = WagerSet::interval(Value::zero(), Value::one());
    let dyadic_b = WagerSet::geometric(Value::int(2), ExponentRange::NonPositive);
    let mut failures = Vec::new();
    let mut steps = 0;
    for i in 0..100u64 {
        let h = seeded_history(10_000 + i, LEN);
        let frac = fractions[i as usize % fractions.len()].clone();
        let initial = Value::int(1 << (i % 5));
        let m = wealth_fraction(frac, true, initial)?;
        let (ok, n) = shadow_certificate(&m, &ScalingFunction::MinReciprocal, &unit, &h)?;
        steps += n;
        if !ok {
            failures.push(format!("minReciprocal seed {i}"));
        }
        let (ok, n) = shadow_certificate(&m, &ScalingFunction::DyadicFloor, &dyadic_b, &h)?;
        steps += n;
        if !ok {
            failures.push(format!("dyadicFloor seed {i}"));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{steps} steps checked, failures: {:?}; {:.1}s",
            failures,
            start.elapsed().as_secs_f64()
        ),
    )
}

/// A history-dependent strategy wagering `1` or `1 + 1/n` (`n <= 8`), both in the closure of `{1 + 1/n}`.
fn random_closure_strategy(seed: u64) -> Strategy {
    Strategy::from_fn(format!("random-closure({seed})"), Value::int(30), move |h, _| {
        let code = h.iter().fold(h.len() as u64, |acc, o| {
            acc.wrapping_mul(3).wrapping_add(if *o == Outcome::Heads { 1 } else { 2 })
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ code.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let n: i64 = rng.gen_range(0..=8);
        let w = if n == 0 { Value::one() } else { Value::ratio(n + 1, n) };
        if rng.gen_bool(0.5) {
            w
        } else {
            -w
        }
    })
}

fn all_nodes_dominated(mr: &MartingaleRun, sr: &MartingaleRun, depth: usize, nodes: &mut usize) -> Result<bool> {
    *nodes += 1;
    if !sr.wealth().try_gt(mr.wealth())? {
        return Ok(false);
    }
    if depth == 0 {
        return Ok(true);
    }
    for o in [Outcome::Heads, Outcome::Tails] {
        let (mut m2, mut s2) = (mr.clone(), sr.clone());
        m2.step(o)?;
        s2.step(o)?;
        if !all_nodes_dominated(&m2, &s2, depth - 1, nodes)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// 4. Closure approximation beats its target on every node of the depth-12 tree.
fn criterion_4() -> Result<Outcome_> {
    let a = WagerSet::HarmonicShifted;
    let mut bad = Vec::new();
    let mut nodes = 0;
    for seed in 0..20 {
        let m = random_closure_strategy(seed);
        let s = closure_approx(&m, &a)?;
        if !all_nodes_dominated(&m.run(), &s.run(), 12, &mut nodes)? {
            bad.push(seed);
        }
    }
    verdict(bad.is_empty(), format!("{nodes} nodes over 20 strategies, failing seeds {bad:?}"))
}

// 5. Every ratio-minimizing run completes with traps armed and no recorded violations.
fn criterion_5(bounded: &RunReport) -> Result<Outcome_> {
    let m = ruler_martingale(&WagerSet::HarmonicShifted, None)?;
    let pairs = [
        copycat(&m, Value::one(), Rounding::Floor, None)?,
        scripted(vec![Value::one(), Value::int(-2), Value::int(3)], true, Value::int(40)),
        always_tails(Value::one(), Value::int(100)),
    ];
    let mut steps = 0;
    for n in &pairs {
        let n = stop_on_bankrupt(n, &WagerSet::integers())?;
        // Traps on any ratio increase.
        steps += ratio_min_extension(&n, &m, &[], 4_096)?.len();
    }
    let violations = get(&bounded.summary, "/violations").as_array().map_or(1, Vec::len);
    verdict(
        violations == 0,
        format!("{steps} standalone steps plus the bounded run: {violations} violations"),
    )
}

// 6. Windowed deviation density of the integer copycat against the {1 + 1/n} ruler.
fn criterion_6() -> Result<Outcome_> {
    let start = Instant::now();
    let r = report_of("harmonic-ratio-density")?;
    let dens: Vec<Value> = get(&r.summary, "/densities")
        .as_array()
        .expect("densities")
        .iter()
        .map(|d| serde_json::from_value(d["density"].clone()).expect("density"))
        .collect();
    let mut monotone = true;
    for w in dens.windows(2) {
        monotone &= w[1].try_le(&w[0])?;
    }
    let last = dens.last().expect("windows");
    let low = last.try_le(&Value::ratio(DENSITY_CEILING.0, DENSITY_CEILING.1))?;
    let inline = get(&r.summary, "/nonIncreasing") == &serde_json::json!(true);
    let (fast, t) = within(start, BUDGET_6);
    let shown: Vec<String> = dens.iter().map(|d| d.to_string()).collect();
    verdict(
        monotone && low && inline && fast,
        format!("densities [{}]; {t}", shown.join(", ")),
    )
}

// 7. Bounded-case evasion.
fn criterion_7(r: &RunReport, elapsed: Duration) -> Result<Outcome_> {
    let s = &r.summary;
    let m0 = value_at(s, "/mInitial");
    let m1 = value_at(s, "/mFinal");
    let grew = m1.try_gt(&(&m0 + &Value::int(50)))?;
    let cutoff = 80_000;
    let lasts: Vec<u64> = get(s, "/stabilization/opponents")
        .as_array()
        .expect("opponents")
        .iter()
        .map(|o| o["lastActiveStep"].as_u64().expect("step"))
        .collect();
    let early = lasts.iter().all(|&t| (t as usize) < cutoff);
    let users = get(s, "/opponents").as_u64().expect("count");
    let kmin = get(s, "/stabilization/indexWindowMin").as_u64().unwrap_or(0);
    let pass = grew && early && kmin >= users && elapsed <= BUDGET_7;
    verdict(
        pass,
        format!(
            "m {} -> {:.1}; last wagers {lasts:?}; min k over window {kmin} >= {users}; {:.2}s",
            m0,
            m1.to_f64(),
            elapsed.as_secs_f64()
        ),
    )
}

// 8. Well-ordered-case evasion, cross-checked against the trajectory rows.
fn criterion_8(r: &RunReport, elapsed: Duration) -> Result<Outcome_> {
    let s = &r.summary;
    let fragility = get(s, "/fragilityViolations").as_u64().unwrap_or(u64::MAX);
    let table = r.table.as_ref().expect("trajectory");
    let (mi, gi) = (table.column("m").expect("m"), table.column("g").expect("g"));
    let rows_ok = table.rows.iter().all(|row| {
        let (m, g): (f64, f64) = (row[mi].parse().unwrap(), row[gi].parse().unwrap());
        m >= g
    });
    let stable = get(s, "/stabilization/allStabilized") == &serde_json::json!(true);
    let m0 = value_at(s, "/mInitial");
    let m1 = value_at(s, "/mFinal");
    let grew = m1.try_ge(&(&m0 + &Value::int(25)))?;
    let pass = fragility == 0 && rows_ok && stable && grew && elapsed <= BUDGET_8;
    verdict(
        pass,
        format!(
            "fragility violations {fragility}; m >= g on all {} rows: {rows_ok}; m {m0} -> {m1}; {:.2}s",
            table.rows.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Largest `r` in `{0} ∪ (B ∩ (0, cap])` with `r k` in `B` for every integer `k <= x`, B = Z+ minus cubes.
fn direct_q(x: i64, cap: i64) -> i64 {
    let is_cube = |n: i64| {
        let c = (n as f64).cbrt().round() as i64;
        (c - 1..=c + 1).any(|d| d > 0 && d * d * d == n)
    };
    (1..=cap)
        .rev()
        .find(|&r| (1..=x).all(|k| !is_cube(r * k)))
        .unwrap_or(0)
}

// 9. q-profile cutoff for the density-one sieve.
fn criterion_9() -> Result<Outcome_> {
    let start = Instant::now();
    let b = WagerSet::sieve(Sieve::ProductWithPolynomial { coeffs: vec![0, 0, 1] });
    let xs: Vec<Value> = (1..=100).map(Value::int).collect();
    let qs = q_profile(&WagerSet::integers(), &b, &Value::int(3), &xs)?;
    let cutoff = q_cutoff(&xs, &qs);
    let direct: Vec<Value> = (1..=100).map(|x| Value::int(direct_q(x, 3))).collect();
    let direct_cutoff = (1..=100).find(|&x| (x..=100).all(|y| direct_q(y, 3) == 0));
    let matches = qs == direct && cutoff == direct_cutoff.map(Value::int);
    let zero_after = match &cutoff {
        Some(c) => xs.iter().zip(&qs).all(|(x, q)| x.try_lt(c).unwrap_or(true) || q.is_zero()),
        None => false,
    };
    let (fast, t) = within(start, BUDGET_9);
    verdict(
        matches && zero_after && fast,
        format!(
            "cutoff {:?}, direct enumeration {direct_cutoff:?}; {t}",
            cutoff.map(|c| c.to_string())
        ),
    )
}

// 10. Byte-identical trajectories on re-runs.
fn criterion_10(first: &[(&str, Vec<u8>)]) -> Result<Outcome_> {
    let mut same = Vec::new();
    for (name, bytes) in first {
        let again = report_of(name)?.csv()?.expect("trajectory");
        same.push(format!("{name}: {}", if &again == bytes { "identical" } else { "DIFFERENT" }));
        if &again != bytes {
            return verdict(false, same.join("; "));
        }
    }
    verdict(true, same.join("; "))
}

fn timed(name: &str) -> Result<(RunReport, Duration)> {
    let start = Instant::now();
    let r = report_of(name)?;
    Ok((r, start.elapsed()))
}

fn main() {
    // Run the two long scenarios once and share them between criteria.
    let bounded = timed("harmonic-shifted-vs-integers");
    let well_ordered = timed("evens-vs-odds");
    let intro = report_of("intro-1-2-vs-1");

    let results: Vec<(&str, Result<Outcome_>)> = vec![
        ("two-phase worked example", criterion_1()),
        ("finite-set scaling oracle", criterion_2()),
        ("domination certificates", criterion_3()),
        ("closure approximation", criterion_4()),
        (
            "ratio-minimization monotonicity",
            bounded.as_ref().map_err(clone_err).and_then(|(r, _)| criterion_5(r)),
        ),
        ("Cesaro density", criterion_6()),
        (
            "bounded-case evasion",
            bounded.as_ref().map_err(clone_err).and_then(|(r, e)| criterion_7(r, *e)),
        ),
        (
            "well-ordered-case evasion",
            well_ordered.as_ref().map_err(clone_err).and_then(|(r, e)| criterion_8(r, *e)),
        ),
        ("q-profile cutoff", criterion_9()),
        ("determinism", {
            let first = (|| -> Result<Vec<(&str, Vec<u8>)>> {
                let pick = |r: &Result<RunReport>| -> Result<Vec<u8>> {
                    Ok(r.as_ref().map_err(clone_err)?.csv()?.expect("trajectory"))
                };
                Ok(vec![
                    ("intro-1-2-vs-1", pick(&intro)?),
                    ("harmonic-shifted-vs-integers", pick(&bounded.as_ref().map(|(r, _)| r.clone()).map_err(clone_err))?),
                    ("evens-vs-odds", pick(&well_ordered.as_ref().map(|(r, _)| r.clone()).map_err(clone_err))?),
                ])
            })();
            first.and_then(|f| criterion_10(&f))
        }),
    ];

    let mut failed = 0;
    for (i, (name, r)) in results.into_iter().enumerate() {
        let (pass, detail) = match r {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<34} {}  {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn clone_err(e: &duel::Error) -> duel::Error {
    duel::Error::InvalidState(e.to_string())
}
