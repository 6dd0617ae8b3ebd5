//! Scenario files: run a built-in and a custom scenario, write artifacts and a plot script.

use duel::harness::{builtin_scenarios, emit_plot_script, run, Scenario};
use duel::Result;

fn main() -> Result<()> {
    for b in builtin_scenarios() {
        println!("{:<30} {}", b.name, b.expected);
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenarios/short-evens-vs-odds.json");
    let sc = Scenario::from_json_str(&std::fs::read_to_string(path)?)?;
    let report = run(&sc)?;
    println!("{}", serde_json::to_string_pretty(&report.summary["stabilization"]["allStabilized"])?);

    let dir = std::env::temp_dir().join("duel-example");
    let artifacts = report.write(&dir)?;
    let script = emit_plot_script(artifacts.trajectory.as_deref().expect("evasion runs have a trajectory"))?;
    println!("artifacts in {}, plot script {}", artifacts.dir.display(), script.display());
    Ok(())
}
