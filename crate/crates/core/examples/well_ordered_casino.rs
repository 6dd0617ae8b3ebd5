//! The well-ordered casino: even wagers against odd-wager opponents.

use duel::evasion::{stabilization_report, well_ordered_casino, CasinoConfig};
use duel::martingale::{always_heads, always_tails, threshold_switcher};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let opponents = [
        always_heads(Value::one(), Value::int(10)),
        always_tails(Value::int(3), Value::int(20)),
        threshold_switcher(Value::int(5), Value::one(), Value::int(30)),
    ];
    let run = well_ordered_casino(
        &WagerSet::multiples_of(Value::int(2)),
        &WagerSet::odd_integers(),
        &opponents,
        10_000,
        &CasinoConfig::default(),
    )?;
    println!("enumeration: {}", run.enumeration);
    for s in run.states.iter().step_by(2_000) {
        println!(
            "t = {:>5}  m = {:>8}  g = {:>8.3}  p = {:>5}  mu = {}",
            s.t,
            s.m,
            s.g.to_f64(),
            s.p,
            s.mu
        );
    }
    let rep = stabilization_report(&run.p_series(), "p", &run.opponent_runs, &Value::ratio(1, 5))?;
    println!("all opponents stopped betting: {}", rep.all_stabilized);
    println!("violations: {}", run.violations.len());
    Ok(())
}
