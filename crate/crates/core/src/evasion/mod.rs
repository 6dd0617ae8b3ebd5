//! The adversarial side: casino sequences on which one martingale succeeds while a family fails.

mod bounded;
mod intro;
mod ratio;
mod stability;
mod well_ordered;

use std::collections::HashMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingale::{stop_on_bankrupt, MartingaleRun, Outcome, Strategy};
use crate::value::Value;
use crate::wagerset::WagerSet;

pub use bounded::{bounded_casino, bounded_casino_with, count_below, BoundedCasinoRun, BoundedCasinoState};
pub use intro::{two_phase_casino, IntroPhase, IntroRun, IntroState};
pub use ratio::{
    cesaro_density, cmp_ratios, ratio_min_choice, ratio_min_extension, ratio_min_extension_eps, ratio_min_outcome, RatioCase,
    RatioMinTrace,
};
pub use stability::{stabilization_report, suffix_minima, window_start, OpponentStability, StabilizationReport};
pub use well_ordered::{block_length, fragility, gradual, well_ordered_casino, PrefixRepetition, WellOrderedCasinoRun, WellOrderedCasinoState};

/// Which branch of a casino construction chose the outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Case {
    /// Play against the least-indexed active fragile opponent.
    Adversarial,
    /// Ratio-minimize against the next opponent.
    RatioMinimizing,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CasinoConfig {
    /// Wrap every opponent so it stops betting once it cannot place a legal wager.
    #[serde(default = "default_true")]
    pub stop_on_bankrupt: bool,
    /// Reject opponent wagers outside `B ∪ {0}`.
    #[serde(default = "default_true")]
    pub check_opponent_sets: bool,
    /// Also show opponents the casino martingale's bet each step.
    #[serde(default)]
    pub share_bets: bool,
    /// Abort on the first invariant violation instead of recording it.
    #[serde(default = "default_true")]
    pub trap_violations: bool,
    /// Initial value of the bounded-case ruler martingale (after normalization).
    #[serde(default)]
    pub ruler_initial: Option<Value>,
}

impl Default for CasinoConfig {
    fn default() -> Self {
        CasinoConfig {
            stop_on_bankrupt: true,
            check_opponent_sets: true,
            share_bets: false,
            trap_violations: true,
            ruler_initial: None,
        }
    }
}

/// An invariant that failed while traps were disabled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ViolationRecord {
    pub step: usize,
    pub kind: String,
    pub detail: String,
}

/// Either aborts with `err` or records it, per the configuration.
fn report(cfg: &CasinoConfig, log: &mut Vec<ViolationRecord>, err: Error) -> Result<()> {
    if cfg.trap_violations {
        return Err(err);
    }
    let (step, kind) = match &err {
        Error::MonotonicityViolation { step } => (*step, "monotonicity"),
        Error::FragilityAssertionFailed { step, .. } => (*step, "fragility"),
        Error::InvariantViolation { step, .. } => (*step, "invariant"),
        _ => return Err(err),
    };
    log.push(ViolationRecord {
        step,
        kind: kind.into(),
        detail: err.to_string(),
    });
    Ok(())
}

/// `A' = A / sup A` and `B' = B / inf(B \ {0})`, with both factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalizedPair {
    pub a: WagerSet,
    pub b: WagerSet,
    pub r_a: Value,
    pub r_b: Value,
}

fn rescale(r: &Value, s: &WagerSet) -> WagerSet {
    if r == &Value::one() {
        s.clone()
    } else {
        WagerSet::scaled(r.clone(), s.clone())
    }
}

/// Bits of the enclosure used when `1/x` is irrational; keeps the fallback factor short.
const FACTOR_BITS: u32 = 20;

/// `1/x` when representable; otherwise a rational `r` with `r x <= 1` (`below`) or `r x >= 1`.
pub(crate) fn unit_factor(x: &Value, below: bool) -> Result<Value> {
    match x.recip() {
        Err(Error::Unsupported(_)) => {
            let (lo, hi) = x.enclosure(FACTOR_BITS);
            let d = if below { hi } else { lo };
            if !d.is_positive() {
                return Err(Error::InvalidValue(format!("cannot normalize by {x}")));
            }
            Ok(Value::from_rational(d.recip()))
        }
        other => other,
    }
}

/// Irrational extremes fall back to rational factors giving `sup A' <= 1 <= inf(B' \ {0})`.
pub fn normalize_pair(a: &WagerSet, b: &WagerSet) -> Result<NormalizedPair> {
    a.validate()?;
    b.validate()?;
    let sup = a.bounds()?.sup.finite().cloned().ok_or(Error::UnboundedA)?;
    let bb = b.bounds()?;
    if !bb.bounded_away_from_zero {
        return Err(Error::BNotBoundedAwayFromZero);
    }
    let inf = bb.inf_nonzero.finite().cloned().ok_or(Error::EmptySet)?;
    let (r_a, r_b) = (unit_factor(&sup, true)?, unit_factor(&inf, false)?);
    Ok(NormalizedPair {
        a: rescale(&r_a, a),
        b: rescale(&r_b, b),
        r_a,
        r_b,
    })
}

/// The user's opponents with their raw ledgers and normalized wealths.
#[derive(Debug)]
struct Pool {
    runs: Vec<MartingaleRun>,
    /// Wealth in normalized units (`scale` times the raw ledger).
    wealth: Vec<Value>,
    scale: Value,
    set: WagerSet,
    check: bool,
    share: bool,
    membership: HashMap<Value, bool>,
}

impl Pool {
    fn new(opponents: &[Strategy], b: &WagerSet, scale: Value, cfg: &CasinoConfig) -> Result<Pool> {
        let mut runs = Vec::with_capacity(opponents.len());
        for o in opponents {
            let s = if cfg.stop_on_bankrupt {
                stop_on_bankrupt(o, b)?
            } else {
                o.clone()
            };
            runs.push(s.run());
        }
        let wealth = runs
            .iter()
            .map(|r| r.wealth().checked_mul(&scale))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pool {
            runs,
            wealth,
            scale,
            set: WagerSet::with_zero(b.clone()),
            check: cfg.check_opponent_sets,
            share: cfg.share_bets,
            membership: HashMap::new(),
        })
    }

    fn len(&self) -> usize {
        self.runs.len()
    }

    /// Normalized signed increments at the current step.
    fn increments(&mut self, step: usize) -> Result<Vec<Value>> {
        let mut out = Vec::with_capacity(self.runs.len());
        for i in 0..self.runs.len() {
            let raw = self.runs[i].pending_increment()?;
            if self.check && !raw.is_zero() {
                let w = raw.try_abs()?;
                let ok = match self.membership.get(&w) {
                    Some(hit) => *hit,
                    None => {
                        let hit = self.set.contains(&w)?;
                        self.membership.insert(w.clone(), hit);
                        hit
                    }
                };
                if !ok {
                    return Err(Error::OpponentOutsideWagerSet {
                        index: i + 1,
                        step,
                        wager: raw.to_string(),
                    });
                }
            }
            out.push(raw.checked_mul(&self.scale)?);
        }
        Ok(out)
    }

    fn step(&mut self, outcome: Outcome, incs: &[Value], m_inc: &Value) -> Result<()> {
        for (i, run) in self.runs.iter_mut().enumerate() {
            run.step(outcome)?;
            if self.share {
                run.observe_bets(std::slice::from_ref(m_inc));
            }
            self.wealth[i] = outcome.apply(&self.wealth[i], &incs[i]);
        }
        Ok(())
    }
}

/// The outcome that makes a bet of signed increment `inc` lose.
fn against(inc: &Value) -> Result<Outcome> {
    Ok(if inc.is_positive()? { Outcome::Tails } else { Outcome::Heads })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wagerset::ExponentRange;

    #[test]
    fn normalization() {
        let a = WagerSet::finite([Value::one(), Value::int(2)]).unwrap();
        let b = WagerSet::multiples_of(Value::int(3));
        let n = normalize_pair(&a, &b).unwrap();
        assert_eq!((n.r_a, n.r_b), (Value::ratio(1, 2), Value::ratio(1, 3)));
        assert_eq!(n.a.bounds().unwrap().sup.finite(), Some(&Value::one()));
        assert_eq!(n.b.bounds().unwrap().inf_nonzero.finite(), Some(&Value::one()));
        let unit = WagerSet::finite([Value::one()]).unwrap();
        let n = normalize_pair(&unit, &WagerSet::integers()).unwrap();
        assert_eq!(n.a, unit);
        assert_eq!(n.b, WagerSet::integers());
        assert!(matches!(
            normalize_pair(&WagerSet::half_line(Value::one()), &unit),
            Err(Error::UnboundedA)
        ));
        let g = WagerSet::geometric(Value::int(2), ExponentRange::NonPositive);
        assert!(matches!(normalize_pair(&unit, &g), Err(Error::BNotBoundedAwayFromZero)));
        // sup {1, pi} = pi has no representable reciprocal: a rational factor just below it.
        let a = WagerSet::finite([Value::one(), Value::pi()]).unwrap();
        let b = WagerSet::finite([Value::pi()]).unwrap();
        let n = normalize_pair(&a, &b).unwrap();
        let sup = n.a.bounds().unwrap().sup.finite().cloned().unwrap();
        assert!(sup.try_le(&Value::one()).unwrap() && sup.try_gt(&Value::ratio(999, 1000)).unwrap());
        let inf = n.b.bounds().unwrap().inf_nonzero.finite().cloned().unwrap();
        assert!(inf.try_ge(&Value::one()).unwrap() && inf.try_lt(&Value::ratio(1001, 1000)).unwrap());
    }
}
