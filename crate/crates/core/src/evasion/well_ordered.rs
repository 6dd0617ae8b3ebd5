//! Martingale and casino sequence for a well-ordered B.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{against, report, Case, CasinoConfig, Pool, ViolationRecord};
use crate::error::{Error, Result};
use crate::martingale::{History, MartingaleRun, Outcome, Strategy};
use crate::value::Value;
use crate::wagerset::{DenseEnumeration, WagerSet};

/// `x_1; x_1, x_2; x_1, x_2, x_3; ...` over the nonzero enumerated elements, scaled so `x_1 = 1`.
#[derive(Debug)]
pub struct PrefixRepetition {
    source: DenseEnumeration,
    xs: Vec<Value>,
    scale: Value,
}

impl PrefixRepetition {
    pub fn new(a: &WagerSet) -> Result<PrefixRepetition> {
        let mut source = a.dense_enumeration()?;
        let first = source.find(|x| !x.is_zero()).ok_or(Error::EmptySet)?;
        let scale = first.recip()?;
        Ok(PrefixRepetition {
            source,
            xs: vec![Value::one()],
            scale,
        })
    }

    pub fn label(&self) -> String {
        self.source.label().to_string()
    }

    /// The factor applied to A so that the first element is 1.
    pub fn scale(&self) -> &Value {
        &self.scale
    }

    fn x(&mut self, j: usize) -> Result<Value> {
        while self.xs.len() < j {
            let next = self.source.find(|x| !x.is_zero()).ok_or(Error::EmptySet)?;
            self.xs.push(next.checked_mul(&self.scale)?);
        }
        Ok(self.xs[j - 1].clone())
    }

    /// `a_k` for `k >= 1`.
    pub fn a(&mut self, k: usize) -> Result<Value> {
        // Round r covers positions r(r-1)/2 + 1 ..= r(r+1)/2.
        let mut r = ((2.0 * k as f64).sqrt() as usize).max(1);
        while r * (r + 1) / 2 < k {
            r += 1;
        }
        while r > 1 && (r - 1) * r / 2 >= k {
            r -= 1;
        }
        self.x(k - (r - 1) * r / 2)
    }
}

/// `g(t)` inside a block of `a_k` wagers that started at `s` and lasts `f` steps.
pub fn gradual(t: u64, s: u64, f: u64, a_k: &Value, a_next: &Value) -> Result<Value> {
    if !a_k.try_lt(a_next)? {
        return Ok(a_k.clone());
    }
    let w_k = BigInt::from(s + f - t);
    let w_n = BigInt::from(t - s);
    let sum = &a_k.mul_rational(&w_k.into()) + &a_next.mul_rational(&w_n.into());
    Ok(sum.mul_rational(&num_rational::BigRational::new(BigInt::one(), BigInt::from(f))))
}

/// Least admissible block length `max(1, ceil(max(m, |(a_next - a_k) / a_k|)))`.
pub fn block_length(m: &Value, a_k: &Value, a_next: &Value) -> Result<u64> {
    let jump = (a_next - a_k).try_abs()?.checked_div(a_k)?;
    let c = m.try_max(&jump)?.try_ceil()?;
    Ok(c.to_u64().ok_or_else(|| Error::InvalidState("block length overflow".into()))?.max(1))
}

/// Largest `p` with `m - (g - 1) > ν_p`, where `ν_p = p + n_1 + ... + n_p` and opponents past
/// the list are zero martingales. Returns `(p, ν_p)`.
pub fn fragility(m: &Value, g: &Value, n: &[Value]) -> Result<(u64, Value)> {
    let lhs = &(m - g) + &Value::one();
    let mut nu = Value::zero();
    if !nu.try_lt(&lhs)? {
        return Err(Error::InvalidState(format!("m - (g - 1) = {lhs} is not positive")));
    }
    for (p, x) in n.iter().enumerate() {
        let next = &(&nu + x) + &Value::one();
        if !next.try_lt(&lhs)? {
            return Ok((p as u64, nu));
        }
        nu = next;
    }
    let extra: BigInt = (&lhs - &nu).try_ceil()? - BigInt::one();
    let extra = extra.to_u64().ok_or_else(|| Error::InvalidState("fragility index overflow".into()))?;
    Ok((n.len() as u64 + extra, &nu + &Value::from_bigint(extra.into())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WellOrderedCasinoState {
    pub t: usize,
    pub outcome: Option<Outcome>,
    pub m: Value,
    /// `a_k`, the current wager (always on Heads); `None` on the final row.
    pub m_inc: Option<Value>,
    pub g: Value,
    pub p: u64,
    pub nu_p: Value,
    pub mu: Value,
    /// Index into the repeated dense sequence.
    pub seq_index: usize,
    pub block_start: u64,
    pub block_len: u64,
    pub case: Option<Case>,
    pub acting_index: Option<u64>,
    /// `n_{p+1} / μ` when `μ > 0`.
    pub q: Option<Value>,
    pub n: Vec<Value>,
}

#[derive(Debug)]
pub struct WellOrderedCasinoRun {
    /// Factor applied to A so that `a_1 = 1`.
    pub r_a: Value,
    /// Factor applied to B so that `inf(B \ {0}) = 1`.
    pub r_b: Value,
    pub enumeration: String,
    pub history: History,
    pub opponent_runs: Vec<MartingaleRun>,
    pub states: Vec<WellOrderedCasinoState>,
    pub violations: Vec<ViolationRecord>,
}

impl WellOrderedCasinoRun {
    pub fn m_initial(&self) -> &Value {
        &self.states[0].m
    }

    pub fn m_final(&self) -> &Value {
        &self.states.last().expect("at least the initial row").m
    }

    pub fn p_series(&self) -> Vec<u64> {
        self.states.iter().map(|s| s.p).collect()
    }
}

struct Pending {
    outcome: Outcome,
    case: Case,
    acting: u64,
    p: u64,
    g: Value,
    m_inc: Value,
}

pub fn well_ordered_casino(
    a: &WagerSet,
    b: &WagerSet,
    opponents: &[Strategy],
    horizon: usize,
    cfg: &CasinoConfig,
) -> Result<WellOrderedCasinoRun> {
    let mut at = 0;
    well_ordered_inner(a, b, opponents, horizon, cfg, &mut at).map_err(|e| e.at_step(at))
}

fn well_ordered_inner(
    a: &WagerSet,
    b: &WagerSet,
    opponents: &[Strategy],
    horizon: usize,
    cfg: &CasinoConfig,
    at: &mut usize,
) -> Result<WellOrderedCasinoRun> {
    a.validate()?;
    b.validate()?;
    if !b.is_well_ordered()? {
        return Err(Error::NotWellOrdered);
    }
    let inf = b.bounds()?.inf_nonzero.finite().cloned().ok_or(Error::EmptySet)?;
    let r_b = super::unit_factor(&inf, false)?;
    let mut seq = PrefixRepetition::new(a)?;
    let mut pool = Pool::new(opponents, b, r_b.clone(), cfg)?;
    let users = pool.len() as u64;
    let mut states = Vec::with_capacity(horizon + 1);
    let mut violations = Vec::new();
    let mut history = Vec::with_capacity(horizon);

    let mut m = seq.a(1)?;
    let (mut k, mut s) = (1usize, 0u64);
    let mut f = block_length(&m, &seq.a(1)?, &seq.a(2)?)?;
    let mut pending: Option<Pending> = None;

    for t in 0..=horizon {
        *at = t;
        let (a_k, a_next) = (seq.a(k)?, seq.a(k + 1)?);
        let g = gradual(t as u64, s, f, &a_k, &a_next)?;
        if g.try_gt(&m)? {
            let detail = format!("bankroll m = {m} below g = {g}");
            report(cfg, &mut violations, Error::InvariantViolation { step: t, detail })?;
        }
        let (p, nu_p) = fragility(&m, &g, &pool.wealth)?;
        let mu = &m - &(&nu_p + &Value::one());

        if let Some(prev) = pending.take() {
            let step = t - 1;
            match prev.outcome {
                Outcome::Tails if g != Value::one() => {
                    let detail = format!("g = {g} after Tails");
                    report(cfg, &mut violations, Error::InvariantViolation { step, detail })?;
                }
                Outcome::Heads if (&g - &prev.g).try_gt(&prev.m_inc)? => {
                    let detail = format!("g rose from {} to {g} above the wager {}", prev.g, prev.m_inc);
                    report(cfg, &mut violations, Error::InvariantViolation { step, detail })?;
                }
                _ => {}
            }
            let need = match prev.case {
                Case::Adversarial => prev.acting,
                Case::RatioMinimizing => prev.p,
            };
            if p < need {
                let detail = format!("p fell from {} to {p} after a {:?} step", prev.p, prev.case);
                report(cfg, &mut violations, Error::FragilityAssertionFailed { step, detail })?;
            }
        }

        let q = if mu.is_positive()? {
            let n_next = pool.wealth.get(p as usize).cloned().unwrap_or_else(Value::zero);
            Some(n_next.checked_div(&mu)?)
        } else {
            None
        };
        let mut state = WellOrderedCasinoState {
            t,
            outcome: None,
            m: m.clone(),
            m_inc: None,
            g: g.clone(),
            p,
            nu_p,
            mu: mu.clone(),
            seq_index: k,
            block_start: s,
            block_len: f,
            case: None,
            acting_index: None,
            q,
            n: pool.wealth.clone(),
        };
        if t == horizon {
            states.push(state);
            break;
        }

        let incs = pool.increments(t)?;
        let active = (1..=p.min(users)).find(|j| !incs[*j as usize - 1].is_zero());
        let (outcome, case, acting) = match active {
            Some(j) => (against(&incs[j as usize - 1])?, Case::Adversarial, j),
            None => {
                let j = p + 1;
                let (n, n_inc) = if j <= users {
                    (pool.wealth[j as usize - 1].clone(), incs[j as usize - 1].clone())
                } else {
                    (Value::zero(), Value::zero())
                };
                let tails = mu.is_positive()? && n_inc.checked_mul(&mu)?.try_gt(&n.checked_mul(&a_k)?)?;
                let o = if tails { Outcome::Tails } else { Outcome::Heads };
                (o, Case::RatioMinimizing, j)
            }
        };
        state.outcome = Some(outcome);
        state.m_inc = Some(a_k.clone());
        state.case = Some(case);
        state.acting_index = Some(acting);
        states.push(state);

        m = outcome.apply(&m, &a_k);
        pool.step(outcome, &incs, &a_k)?;
        history.push(outcome);
        let next_t = t as u64 + 1;
        if outcome == Outcome::Tails {
            k = 1;
            s = next_t;
            f = block_length(&m, &seq.a(1)?, &seq.a(2)?)?;
        } else if next_t == s + f {
            k += 1;
            s = next_t;
            f = block_length(&m, &seq.a(k)?, &seq.a(k + 1)?)?;
        }
        pending = Some(Pending {
            outcome,
            case,
            acting,
            p,
            g,
            m_inc: a_k,
        });
    }

    Ok(WellOrderedCasinoRun {
        r_a: seq.scale().clone(),
        r_b,
        enumeration: format!("prefix-repetition({})", seq.label()),
        history,
        opponent_runs: pool.runs,
        states,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{always_heads, constant_wealth};

    #[test]
    fn prefix_repetition_order() {
        let mut seq = PrefixRepetition::new(&WagerSet::multiples_of(Value::int(2))).unwrap();
        let got: Vec<Value> = (1..=10).map(|k| seq.a(k).unwrap()).collect();
        let want: Vec<Value> = [1, 1, 2, 1, 2, 3, 1, 2, 3, 4].iter().map(|x| Value::int(*x)).collect();
        assert_eq!(got, want);
        assert_eq!(seq.scale(), &Value::ratio(1, 2));
    }

    #[test]
    fn gradual_interpolation() {
        let (one, three) = (Value::one(), Value::int(3));
        assert_eq!(gradual(5, 5, 2, &one, &three).unwrap(), Value::one());
        assert_eq!(gradual(6, 5, 2, &one, &three).unwrap(), Value::int(2));
        assert_eq!(gradual(6, 5, 2, &three, &one).unwrap(), three);
        assert_eq!(block_length(&Value::ratio(3, 2), &one, &three).unwrap(), 2);
        assert_eq!(block_length(&Value::ratio(1, 2), &three, &three).unwrap(), 1);
    }

    #[test]
    fn fragility_example() {
        let n = [Value::int(3), Value::int(5), Value::one()];
        let (p, nu) = fragility(&Value::int(12), &Value::one(), &n).unwrap();
        assert_eq!((p, nu.clone()), (2, Value::int(10)));
        assert_eq!(&Value::int(12) - &(&nu + &Value::one()), Value::one());
        // Zero martingales past the list: ν_3 = 11 < 12 with only two opponents.
        let (p, _) = fragility(&Value::int(12), &Value::one(), &n[..2]).unwrap();
        assert_eq!(p, 3);
    }

    #[test]
    fn requires_well_ordered_b() {
        let b = WagerSet::interval(Value::one(), Value::int(2));
        let err = well_ordered_casino(&WagerSet::integers(), &b, &[], 10, &CasinoConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NotWellOrdered));
    }

    #[test]
    fn no_opponents_all_heads() {
        let run = well_ordered_casino(&WagerSet::integers(), &WagerSet::odd_integers(), &[], 200, &CasinoConfig::default())
            .unwrap();
        assert!(run.history.iter().all(|o| *o == Outcome::Heads));
        assert!(run.m_final().try_gt(&Value::int(200)).unwrap());
        let c = [constant_wealth(Value::int(5))];
        let run = well_ordered_casino(&WagerSet::integers(), &WagerSet::odd_integers(), &c, 50, &CasinoConfig::default())
            .unwrap();
        assert!(run.violations.is_empty());
    }

    #[test]
    fn single_odd_opponent_stops() {
        let opp = [always_heads(Value::int(3), Value::int(9))];
        let run = well_ordered_casino(
            &WagerSet::multiples_of(Value::int(2)),
            &WagerSet::odd_integers(),
            &opp,
            5000,
            &CasinoConfig::default(),
        )
        .unwrap();
        let last = run.opponent_runs[0].increments().iter().rposition(|x| !x.is_zero());
        assert!(last.is_none_or(|l| l < 4000), "{last:?}");
        assert!(run.m_final().try_gt(run.m_initial()).unwrap());
    }
}
