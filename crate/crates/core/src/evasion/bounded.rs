//! Casino sequence for a bounded A against a B bounded away from zero.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::ratio::{cmp_ratios, ratio_min_choice};
use super::{against, normalize_pair, report, Case, CasinoConfig, NormalizedPair, Pool, ViolationRecord};
use crate::error::{Error, Result};
use crate::martingale::{ruler_martingale, History, MartingaleRun, Outcome, Strategy};
use crate::value::Value;
use crate::wagerset::WagerSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundedCasinoState {
    pub t: usize,
    /// The outcome chosen at `t`; `None` on the final row.
    pub outcome: Option<Outcome>,
    pub m: Value,
    pub m_inc: Option<Value>,
    pub k: u64,
    pub s_k: Value,
    pub case: Option<Case>,
    /// Virtual index of the opponent attacked (Case I) or ratio-minimized against (Case II).
    pub acting_index: Option<u64>,
    /// Normalized wealth of each user opponent.
    pub n: Vec<Value>,
}

#[derive(Debug)]
pub struct BoundedCasinoRun {
    pub normalization: NormalizedPair,
    pub enumeration: String,
    pub padding_first: bool,
    pub history: History,
    pub m_run: MartingaleRun,
    pub opponent_runs: Vec<MartingaleRun>,
    pub states: Vec<BoundedCasinoState>,
    pub violations: Vec<ViolationRecord>,
}

impl BoundedCasinoRun {
    pub fn k_series(&self) -> Vec<u64> {
        self.states.iter().map(|s| s.k).collect()
    }

    pub fn m_initial(&self) -> &Value {
        &self.m_run.wealths()[0]
    }

    /// Virtual index of user opponent `j` (1-based).
    pub fn virtual_index(&self, j: usize) -> u64 {
        virtual_of_user(j, self.padding_first)
    }
}

fn virtual_of_user(j: usize, padding_first: bool) -> u64 {
    if padding_first {
        2 * j as u64
    } else {
        2 * j as u64 - 1
    }
}

/// Values at virtual indices `1..=2U`: users interleaved with constant-1 padding.
fn virtual_prefix(users: &[Value], padding_first: bool) -> Vec<Value> {
    let mut out = Vec::with_capacity(2 * users.len());
    for u in users {
        if padding_first {
            out.push(Value::one());
            out.push(u.clone());
        } else {
            out.push(u.clone());
            out.push(Value::one());
        }
    }
    out
}

/// `k = max{i : S_i < m}` and `S_k`, where the values beyond `prefix` are all 1.
pub fn count_below(m: &Value, prefix: &[Value]) -> Result<(u64, Value)> {
    let mut s = Value::zero();
    for (i, x) in prefix.iter().enumerate() {
        let next = &s + x;
        if !next.try_lt(m)? {
            return Ok((i as u64, s));
        }
        s = next;
    }
    // Beyond the prefix S grows by 1 per index: the count of j >= 1 with s + j < m.
    let extra: BigInt = (m - &s).try_ceil()? - BigInt::one();
    let extra = u64::try_from(extra).map_err(|_| Error::InvalidState("active index out of range".into()))?;
    Ok((prefix.len() as u64 + extra, &s + &Value::from_bigint(extra.into())))
}

/// `α(t)` compared under the convention that a proper prefix is greater than its extensions.
fn alpha_cmp(a: &[BigInt], ka: u64, b: &[BigInt], kb: u64) -> Ordering {
    let common = ka.min(kb).min(a.len() as u64) as usize;
    for i in 0..common {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    // Entries past the stored prefix are all 1 in both tuples.
    kb.cmp(&ka)
}

struct Pending {
    case: Case,
    acting: u64,
    floors: Vec<BigInt>,
    k: u64,
    acting_wealth: Option<(usize, Value)>,
}

pub fn bounded_casino(
    a: &WagerSet,
    b: &WagerSet,
    opponents: &[Strategy],
    horizon: usize,
    cfg: &CasinoConfig,
) -> Result<BoundedCasinoRun> {
    bounded_casino_with(a, b, opponents, horizon, cfg, false)
}

/// As [`bounded_casino`]; `padding_first` puts constant-1 padding at odd virtual indices instead.
pub fn bounded_casino_with(
    a: &WagerSet,
    b: &WagerSet,
    opponents: &[Strategy],
    horizon: usize,
    cfg: &CasinoConfig,
    padding_first: bool,
) -> Result<BoundedCasinoRun> {
    let mut at = 0;
    bounded_inner(a, b, opponents, horizon, cfg, padding_first, &mut at).map_err(|e| e.at_step(at))
}

fn bounded_inner(
    a: &WagerSet,
    b: &WagerSet,
    opponents: &[Strategy],
    horizon: usize,
    cfg: &CasinoConfig,
    padding_first: bool,
    at: &mut usize,
) -> Result<BoundedCasinoRun> {
    let norm = normalize_pair(a, b)?;
    let m_strategy = ruler_martingale(&norm.a, cfg.ruler_initial.clone())?;
    let mut mr = m_strategy.run();
    let mut pool = Pool::new(opponents, b, norm.r_b.clone(), cfg)?;
    let users = pool.len();
    let mut states = Vec::with_capacity(horizon + 1);
    let mut violations = Vec::new();
    let mut pending: Option<Pending> = None;

    for t in 0..=horizon {
        *at = t;
        let m = mr.wealth().clone();
        let prefix = virtual_prefix(&pool.wealth, padding_first);
        let (k, s_k) = count_below(&m, &prefix)?;
        let floors: Vec<BigInt> = prefix.iter().map(|x| x.try_floor()).collect::<Result<_>>()?;

        if let Some(p) = pending.take() {
            let ord = alpha_cmp(&floors, k, &p.floors, p.k);
            let ok = match p.case {
                Case::Adversarial => ord == Ordering::Less,
                Case::RatioMinimizing => ord != Ordering::Greater,
            };
            if !ok {
                let detail = format!("alpha did not decrease after a {:?} step (k {} -> {k})", p.case, p.k);
                report(cfg, &mut violations, Error::InvariantViolation { step: t - 1, detail })?;
            }
            if let Some((j, before)) = p.acting_wealth {
                if (&before - &pool.wealth[j]).try_lt(&Value::one())? {
                    let detail = format!("opponent at virtual index {} lost less than 1", p.acting);
                    report(cfg, &mut violations, Error::InvariantViolation { step: t - 1, detail })?;
                }
            }
        }
        if !s_k.try_lt(&m)? {
            let detail = format!("S_k = {s_k} is not below m = {m}");
            report(cfg, &mut violations, Error::InvariantViolation { step: t, detail })?;
        }

        if t == horizon {
            states.push(BoundedCasinoState {
                t,
                outcome: None,
                m,
                m_inc: None,
                k,
                s_k,
                case: None,
                acting_index: None,
                n: pool.wealth.clone(),
            });
            break;
        }

        let m_inc = mr.pending_increment()?;
        if mr.is_bankrupt() {
            return Err(Error::InvariantViolation {
                step: t,
                detail: format!("casino martingale wagers {m_inc} with wealth {m}"),
            });
        }
        let incs = pool.increments(t)?;

        // Case I: the least active index among 1..=k; only user slots can be active.
        let active = (1..=users)
            .map(|j| (j, virtual_of_user(j, padding_first)))
            .take_while(|(_, v)| *v <= k)
            .find(|(j, _)| !incs[j - 1].is_zero());
        let (outcome, case, acting, acting_wealth) = match active {
            Some((j, v)) => (against(&incs[j - 1])?, Case::Adversarial, v, Some((j - 1, pool.wealth[j - 1].clone()))),
            None => {
                let target = k + 1;
                let user = (1..=users).find(|j| virtual_of_user(*j, padding_first) == target);
                let (n, n_inc) = match user {
                    Some(j) => (pool.wealth[j - 1].clone(), incs[j - 1].clone()),
                    None => (Value::one(), Value::zero()),
                };
                let reserve = &m - &s_k;
                if !reserve.is_positive()? {
                    return Err(Error::InvariantViolation {
                        step: t,
                        detail: format!("reserve m - S = {reserve} is not positive"),
                    });
                }
                // In Case II the reserve's increment is M' since the first k opponents are idle.
                let (o, _) = ratio_min_choice(&n, &reserve, &n_inc, &m_inc)?;
                let (nx, rx) = (o.apply(&n, &n_inc), o.apply(&reserve, &m_inc));
                if !rx.is_positive()? || cmp_ratios(&nx, &rx, &n, &reserve)? == Ordering::Greater {
                    report(cfg, &mut violations, Error::MonotonicityViolation { step: t })?;
                }
                (o, Case::RatioMinimizing, target, None)
            }
        };

        states.push(BoundedCasinoState {
            t,
            outcome: Some(outcome),
            m,
            m_inc: Some(m_inc.clone()),
            k,
            s_k,
            case: Some(case),
            acting_index: Some(acting),
            n: pool.wealth.clone(),
        });
        mr.step(outcome)?;
        pool.step(outcome, &incs, &m_inc)?;
        pending = Some(Pending {
            case,
            acting,
            floors,
            k,
            acting_wealth,
        });
    }

    Ok(BoundedCasinoRun {
        enumeration: norm.a.enumeration_label(),
        normalization: norm,
        padding_first,
        history: mr.history().to_vec(),
        m_run: mr,
        opponent_runs: pool.runs,
        states,
        violations,
    })
}
