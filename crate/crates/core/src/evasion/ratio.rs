//! Ratio-minimizing outcomes and extensions, and the Cesàro deviation density.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingale::{Outcome, Strategy};
use crate::value::Value;

/// Which priority rule picked a ratio-minimizing outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RatioCase {
    /// The ratio strictly decreases.
    Decrease,
    /// The ratio is unchanged and the denominator grows.
    TieIncrease,
    /// Both increments vanish; Heads by convention.
    BothZero,
}

/// The `N/M`-ratio-minimizing outcome at a node with values `n`, `m` and increments `n_inc`, `m_inc`.
pub fn ratio_min_outcome(n: &Value, m: &Value, n_inc: &Value, m_inc: &Value) -> Result<Outcome> {
    Ok(ratio_min_choice(n, m, n_inc, m_inc)?.0)
}

pub fn ratio_min_choice(n: &Value, m: &Value, n_inc: &Value, m_inc: &Value) -> Result<(Outcome, RatioCase)> {
    if !m.is_positive()? {
        return Err(Error::InvalidState(format!("ratio minimization needs M > 0, got {m}")));
    }
    if n_inc.is_zero() && m_inc.is_zero() {
        return Ok((Outcome::Heads, RatioCase::BothZero));
    }
    let mut tie_up = None;
    for o in [Outcome::Heads, Outcome::Tails] {
        let (nx, mx) = (o.apply(n, n_inc), o.apply(m, m_inc));
        if !mx.is_positive()? {
            continue;
        }
        match cmp_ratios(&nx, &mx, n, m)? {
            Ordering::Less => return Ok((o, RatioCase::Decrease)),
            Ordering::Equal if tie_up.is_none() && mx.try_cmp(m)? == Ordering::Greater => tie_up = Some(o),
            _ => {}
        }
    }
    tie_up
        .map(|o| (o, RatioCase::TieIncrease))
        .ok_or_else(|| Error::InvalidState("no ratio-minimizing outcome: is N nonnegative?".into()))
}

/// `n1/m1` against `n0/m0` for positive `m0`, `m1`, by cross-multiplying; no quotient is formed,
/// so an irrational `M` is fine as long as the `N` values are rational.
pub fn cmp_ratios(n1: &Value, m1: &Value, n0: &Value, m0: &Value) -> Result<Ordering> {
    n1.checked_mul(m0)?.try_cmp(&n0.checked_mul(m1)?)
}

/// One step of a ratio-minimizing extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RatioMinTrace {
    pub step: usize,
    pub n: Value,
    pub m: Value,
    pub ratio: Value,
    pub n_inc: Value,
    pub m_inc: Value,
    pub outcome: Outcome,
    pub case: RatioCase,
    /// The ratio after this step: the running estimate of the limit.
    pub limit_estimate: Value,
    /// Steps so far with `|N' - L M'| > epsilon` against the running estimate `L`.
    pub deviations: u64,
}

pub fn ratio_min_extension(n: &Strategy, m: &Strategy, prefix: &[Outcome], steps: usize) -> Result<Vec<RatioMinTrace>> {
    ratio_min_extension_eps(n, m, prefix, steps, &Value::ratio(1, 10))
}

/// Extends `prefix` by `steps` ratio-minimizing outcomes, asserting the ratio never increases.
pub fn ratio_min_extension_eps(
    n: &Strategy,
    m: &Strategy,
    prefix: &[Outcome],
    steps: usize,
    epsilon: &Value,
) -> Result<Vec<RatioMinTrace>> {
    let mut at = 0;
    ratio_min_inner(n, m, prefix, steps, epsilon, &mut at).map_err(|e| e.at_step(at))
}

fn ratio_min_inner(
    n: &Strategy,
    m: &Strategy,
    prefix: &[Outcome],
    steps: usize,
    epsilon: &Value,
    at: &mut usize,
) -> Result<Vec<RatioMinTrace>> {
    let (mut nr, mut mr) = (n.run(), m.run());
    for &o in prefix {
        nr.step(o)?;
        mr.step(o)?;
    }
    let mut trace = Vec::with_capacity(steps);
    let mut deviations = 0u64;
    for _ in 0..steps {
        let step = nr.t();
        *at = step;
        let (nw, mw) = (nr.wealth().clone(), mr.wealth().clone());
        let (ni, mi) = (nr.pending_increment()?, mr.pending_increment()?);
        for r in [&nr, &mr] {
            if r.is_bankrupt() {
                return Err(Error::InvalidValue(format!(
                    "{} bets more than its wealth; wrap it in stopOnBankrupt",
                    r.name()
                )));
            }
        }
        let (outcome, case) = ratio_min_choice(&nw, &mw, &ni, &mi)?;
        nr.step(outcome)?;
        mr.step(outcome)?;
        let ratio = nw.checked_div(&mw)?;
        let next = nr.wealth().checked_div(mr.wealth())?;
        let ord = next.try_cmp(&ratio)?;
        if ord == Ordering::Greater || (case == RatioCase::Decrease && ord != Ordering::Less) {
            return Err(Error::MonotonicityViolation { step });
        }
        if (&ni - &next.checked_mul(&mi)?).try_abs()?.try_cmp(epsilon)? == Ordering::Greater {
            deviations += 1;
        }
        trace.push(RatioMinTrace {
            step,
            n: nw,
            m: mw,
            ratio,
            n_inc: ni,
            m_inc: mi,
            outcome,
            case,
            limit_estimate: next,
            deviations,
        });
    }
    Ok(trace)
}

/// Fraction of trace steps with `|N' - L M'| > epsilon`.
pub fn cesaro_density(trace: &[RatioMinTrace], l: &Value, epsilon: &Value) -> Result<BigRational> {
    if trace.is_empty() {
        return Err(Error::InvalidValue("empty trace".into()));
    }
    let mut hits = 0usize;
    for e in trace {
        let d = (&e.n_inc - &l.checked_mul(&e.m_inc)?).try_abs()?;
        if d.try_cmp(epsilon)? == Ordering::Greater {
            hits += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(trace.len())))
}
