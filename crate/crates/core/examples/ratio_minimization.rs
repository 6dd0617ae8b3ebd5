//! Ratio minimization of an integer copycat against the {1 + 1/n} ruler, with deviation densities.

use duel::evasion::{cesaro_density, ratio_min_extension};
use duel::martingale::{copycat, ruler_martingale, stop_on_bankrupt, Rounding};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let m = ruler_martingale(&WagerSet::HarmonicShifted, None)?;
    let n = stop_on_bankrupt(
        &copycat(&m, Value::one(), Rounding::Nearest, None)?,
        &WagerSet::integers(),
    )?;
    let trace = ratio_min_extension(&n, &m, &[], 1 << 14)?;
    let last = trace.last().expect("non-empty trace");
    println!("ratio N/M: {} -> {}", trace[0].ratio, last.limit_estimate);
    let eps = Value::ratio(1, 10);
    for k in [8, 10, 12, 14] {
        let d = cesaro_density(&trace[..1 << k], &last.limit_estimate, &eps)?;
        println!("window 2^{k:<2}: deviation density {d}");
    }
    Ok(())
}
