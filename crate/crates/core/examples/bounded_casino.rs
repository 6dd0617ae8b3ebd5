//! The bounded-case casino: {1 + 1/n} against integer bettors.

use duel::evasion::{bounded_casino, stabilization_report, CasinoConfig};
use duel::martingale::{always_heads, scripted, threshold_switcher};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let opponents = [
        always_heads(Value::one(), Value::int(10)),
        threshold_switcher(Value::int(2), Value::one(), Value::int(10)),
        scripted(vec![Value::one(), Value::int(-2), Value::int(3)], true, Value::int(10)),
    ];
    let run = bounded_casino(
        &WagerSet::HarmonicShifted,
        &WagerSet::integers(),
        &opponents,
        5_000,
        &CasinoConfig::default(),
    )?;
    println!("enumeration: {}", run.enumeration);
    for s in run.states.iter().step_by(1_000) {
        println!("t = {:>5}  m = {:>10.3}  k = {:>5}  case = {:?}", s.t, s.m.to_f64(), s.k, s.case);
    }
    let rep = stabilization_report(&run.k_series(), "k", &run.opponent_runs, &Value::ratio(1, 5))?;
    for o in &rep.opponents {
        println!("{:<45} last bet at step {:>3}, final wealth {}", o.name, o.last_active_step, o.final_wealth);
    }
    println!("min k over the last 20%: {:?}", rep.index_window_min);
    Ok(())
}
