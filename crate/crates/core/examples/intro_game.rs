//! Wagers {1, 2} against {1}: the two-phase casino.

use duel::evasion::two_phase_casino;
use duel::martingale::{always_heads, history_string, stop_on_bankrupt, threshold_switcher};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let g0 = threshold_switcher(Value::int(2), Value::one(), Value::int(10));
    let g1 = stop_on_bankrupt(&always_heads(Value::one(), Value::int(10)), &WagerSet::finite([Value::one()])?)?;
    let run = two_phase_casino(&g0, &g1, &Value::int(3), 40)?;
    println!("outcomes: {}", history_string(&run.history));
    println!("switch at step {:?}", run.switch_step);
    for s in &run.states {
        println!(
            "t = {:>2}  phase = {:<6}  w0 = {:>3}  w1 = {:>3}",
            s.t,
            s.phase.map_or("", |p| p.label()),
            s.w0,
            s.w1
        );
    }
    Ok(())
}
