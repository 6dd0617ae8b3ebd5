//! Finite-horizon evidence that each opponent eventually stops betting.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingale::MartingaleRun;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OpponentStability {
    /// 1-based position in the user's opponent list.
    pub index: usize,
    pub name: String,
    /// Empirical `T_i`: the step count through the last nonzero wager, 0 if it never bet.
    pub last_active_step: usize,
    pub final_wealth: Value,
    pub active_in_window: usize,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilizationReport {
    pub horizon: usize,
    pub window_start: usize,
    pub opponents: Vec<OpponentStability>,
    /// `k` for the bounded construction, `p` for the well-ordered one.
    pub index_label: String,
    /// Minimum of the index over `window_start..=horizon`.
    pub index_window_min: Option<u64>,
    pub index_final: Option<u64>,
    pub all_stabilized: bool,
}

/// `out[i] = min(xs[i..])`.
pub fn suffix_minima(xs: &[u64]) -> Vec<u64> {
    let mut out = xs.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].min(out[i + 1]);
    }
    out
}

/// First step of the final `fraction` of the horizon.
pub fn window_start(horizon: usize, fraction: &Value) -> Result<usize> {
    if fraction.is_negative()? || fraction.try_gt(&Value::one())? {
        return Err(Error::InvalidValue("window fraction must lie in [0, 1]".into()));
    }
    let len: BigInt = fraction.mul_rational(&BigInt::from(horizon).into()).try_floor()?;
    Ok(horizon - len.to_usize().unwrap_or(horizon))
}

/// `index_series` holds `k(t)` or `p(t)` for `t = 0..=horizon`.
pub fn stabilization_report(
    index_series: &[u64],
    index_label: &str,
    opponent_runs: &[MartingaleRun],
    fraction: &Value,
) -> Result<StabilizationReport> {
    let horizon = index_series.len().saturating_sub(1);
    let start = window_start(horizon, fraction)?;
    let opponents = opponent_runs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let incs = r.increments();
            let last = incs.iter().rposition(|x| !x.is_zero()).map_or(0, |t| t + 1);
            let active = incs.iter().skip(start).filter(|x| !x.is_zero()).count();
            OpponentStability {
                index: i + 1,
                name: r.name().to_string(),
                last_active_step: last,
                final_wealth: r.wealth().clone(),
                active_in_window: active,
                stabilized: active == 0,
            }
        })
        .collect::<Vec<_>>();
    Ok(StabilizationReport {
        horizon,
        window_start: start,
        all_stabilized: opponents.iter().all(|o| o.stabilized),
        opponents,
        index_label: index_label.to_string(),
        index_window_min: index_series.get(start..).and_then(|w| w.iter().min().copied()),
        index_final: index_series.last().copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{constant_wealth, parse_history};

    #[test]
    fn suffix_minima_are_monotone() {
        assert_eq!(suffix_minima(&[3, 1, 4, 1, 5, 9, 2, 6]), vec![1, 1, 1, 1, 2, 2, 2, 6]);
        assert!(suffix_minima(&[]).is_empty());
    }

    #[test]
    fn constant_opponents_never_act() {
        let mut r = constant_wealth(Value::int(4)).run();
        r.play(&parse_history("HTHTTTHH").unwrap()).unwrap();
        let rep = stabilization_report(&[1; 9], "k", &[r], &Value::ratio(1, 5)).unwrap();
        assert_eq!(rep.window_start, 7);
        assert_eq!(rep.opponents[0].last_active_step, 0);
        assert!(rep.all_stabilized);
        assert_eq!(rep.index_window_min, Some(1));
    }
}
