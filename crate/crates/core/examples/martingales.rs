//! Strategy zoo, the ruler martingale, and exhaustive validation against a wager set.

use duel::martingale::{
    history_string, parse_history, ruler_martingale, validate_strategy, StrategySpec,
};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let a = WagerSet::finite([Value::one(), Value::int(2)])?;
    let ruler = ruler_martingale(&a, None)?;
    let wagers: Vec<String> = (0..8)
        .map(|h| ruler.scheduled_increment(h).map_or("?".into(), |v| v.to_string()))
        .collect();
    println!("ruler over {{1, 2}}: wagers at t = 1..8: {}", wagers.join(","));

    let spec: StrategySpec = serde_json::from_str(
        r#"{"kind": "copycat", "ratio": "1/2", "rounding": "ceil",
            "target": {"kind": "ruler", "set": {"kind": "finite", "elements": ["1", "2"]}}}"#,
    )?;
    let history = parse_history("HHTHTTHTHH")?;
    for s in [ruler.clone(), spec.build()?] {
        let mut run = s.run();
        run.play(&history)?;
        let ledger: Vec<String> = run.wealths().iter().map(|w| w.to_string()).collect();
        println!("{:<40} on {}: {}", run.name(), history_string(&history), ledger.join(" "));
    }

    for initial in [4, 24] {
        let s = ruler_martingale(&a, Some(Value::int(initial)))?;
        let report = validate_strategy(&s, &a, 12)?;
        println!(
            "ruler with initial {initial:>2}: {} nodes, {} violations",
            report.nodes_checked, report.total_violations
        );
    }
    Ok(())
}
