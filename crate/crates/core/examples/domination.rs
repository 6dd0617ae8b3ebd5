//! Dominating constructions: the f-shadow with its integral certificate, closure approximation, q-profiles.

use duel::domination::{closure_approx, f_shadow, integral_bound_check, q_cutoff, q_profile, ScalingFunction};
use duel::harness::seeded_history;
use duel::martingale::{ruler_martingale, wealth_fraction};
use duel::wagerset::Sieve;
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    // Any strategy over the nonnegative reals is shadowed by one over [0, 1].
    let m = wealth_fraction(Value::ratio(1, 2), false, Value::one())?;
    let f = ScalingFunction::MinReciprocal;
    let s = f_shadow(&m, &f)?;
    let history = seeded_history(7, 2_000);
    let (mut mr, mut sr) = (m.run(), s.run());
    mr.play(&history)?;
    sr.play(&history)?;
    let report = integral_bound_check(&mr, &sr, &f)?;
    println!("f-shadow over 2000 steps: {report:?}");
    let max_wager = sr.increments().iter().map(|w| w.to_f64().abs()).fold(0.0, f64::max);
    println!("largest shadow wager {max_wager:.4} (must be at most 1)");

    // Closure approximation: an A-strategy that stays ahead of M.
    let a = WagerSet::HarmonicShifted;
    let m = ruler_martingale(&a, None)?;
    let s = closure_approx(&m, &a)?;
    let (mut mr, mut sr) = (m.run(), s.run());
    let h = seeded_history(3, 64);
    mr.play(&h)?;
    sr.play(&h)?;
    println!("closure approx: M = {:.4}, S = {:.4}", mr.wealth().to_f64(), sr.wealth().to_f64());

    // q-profile: the largest legal proportional bet at scale x, capped at 3.
    let b = WagerSet::sieve(Sieve::ProductWithPolynomial { coeffs: vec![0, 0, 1] });
    let xs: Vec<Value> = (1..=20).map(Value::int).collect();
    let qs = q_profile(&WagerSet::integers(), &b, &Value::int(3), &xs)?;
    let shown: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
    println!("q profile on 1..20: {}", shown.join(" "));
    println!("cutoff: {:?}", q_cutoff(&xs, &qs).map(|c| c.to_string()));
    Ok(())
}
