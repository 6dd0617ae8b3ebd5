//! History-independent martingale wagering `a_{v2(t)}` on Heads at step `t`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Bettor, Outcome, Strategy};
use crate::error::{Error, Result};
use crate::value::Value;
use crate::wagerset::WagerSet;

/// Enumeration index used at step `t >= 1`: the 2-adic valuation of `t`.
pub fn ruler_index(t: u64) -> u32 {
    assert!(t >= 1, "steps are counted from 1");
    t.trailing_zeros()
}

/// `64 * min(sup A, 1)`; `None` when A is unbounded.
pub fn default_ruler_initial(a: &WagerSet) -> Result<Option<Value>> {
    let b = a.bounds()?;
    Ok(match b.sup.finite() {
        Some(sup) => Some(sup.try_min(&Value::one())?.mul_rational(&BigRational::from_integer(64.into()))),
        None => None,
    })
}

#[derive(Clone, Debug)]
struct RulerBettor {
    /// The first 64 enumerated elements: enough for every valuation of a `u64` step.
    wagers: Arc<Vec<Value>>,
}

impl RulerBettor {
    fn at(&self, h: usize) -> Value {
        self.wagers[ruler_index(h as u64 + 1) as usize].clone()
    }
}

impl Bettor for RulerBettor {
    fn increment(&self, history: &[Outcome], _wealth: &Value) -> Result<Value> {
        Ok(self.at(history.len()))
    }

    fn scheduled_increment(&self, h: usize) -> Option<Value> {
        Some(self.at(h))
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

pub fn ruler_martingale(a: &WagerSet, initial: Option<Value>) -> Result<Strategy> {
    let wagers: Vec<Value> = a.dense_enumeration()?.take(64).collect();
    let initial = match initial {
        Some(v) => v,
        None => default_ruler_initial(a)?.ok_or_else(|| {
            Error::InvalidValue("an unbounded wager set needs an explicit initial value".into())
        })?,
    };
    if !initial.is_positive()? {
        return Err(Error::InvalidValue("initial value must be positive".into()));
    }
    Ok(Strategy::new(
        format!("ruler({})", a.enumeration_label()),
        initial,
        RulerBettor {
            wagers: Arc::new(wagers),
        },
    )
    .with_declared_set(a.clone()))
}

/// Fraction of steps `1 <= t <= horizon` whose wager is within `epsilon` of `a`.
pub fn visit_density(s: &Strategy, a: &Value, epsilon: &Value, horizon: usize) -> Result<BigRational> {
    if horizon == 0 {
        return Err(Error::InvalidValue("horizon must be at least 1".into()));
    }
    if !s.is_history_independent() {
        return Err(Error::NotHistoryIndependent);
    }
    let mut hits = 0u64;
    for h in 0..horizon {
        let x = s.scheduled_increment(h).expect("history independent").try_abs()?;
        if (&x - a).try_abs()?.try_lt(epsilon)? {
            hits += 1;
        }
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(horizon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::rat;
    use num_traits::One;

    #[test]
    fn valuation_indices() {
        let idx: Vec<u32> = (1..=8).map(ruler_index).collect();
        assert_eq!(idx, [0, 1, 0, 2, 0, 1, 0, 3]);
    }

    #[test]
    fn finite_ruler_wagers() {
        let a = WagerSet::finite([Value::int(1), Value::int(2)]).unwrap();
        let s = ruler_martingale(&a, None).unwrap();
        let w: Vec<Value> = (0..8).map(|h| s.scheduled_increment(h).unwrap()).collect();
        let want: Vec<Value> = [1, 2, 1, 1, 1, 2, 1, 2].iter().map(|x| Value::int(*x)).collect();
        assert_eq!(w, want);
        assert_eq!(s.initial_value(), &Value::int(64));
    }

    #[test]
    fn densities() {
        let a = WagerSet::finite([Value::int(1), Value::int(2)]).unwrap();
        let s = ruler_martingale(&a, None).unwrap();
        let horizon = 1 << 16;
        // Oracle: count odd valuations directly.
        let odd = (1..=horizon as u64).filter(|t| t.trailing_zeros() % 2 == 1).count();
        let d = visit_density(&s, &Value::int(2), &Value::ratio(1, 2), horizon).unwrap();
        assert_eq!(d, BigRational::new(BigInt::from(odd), BigInt::from(horizon)));
        let d1 = visit_density(&s, &Value::int(1), &Value::ratio(1, 2), horizon).unwrap();
        assert!(d1 >= rat(1, 2));
        assert_eq!(&d + &d1, BigRational::one());
        let far = visit_density(&s, &Value::int(5), &Value::ratio(1, 100), horizon).unwrap();
        assert_eq!(far, BigRational::from_integer(0.into()));
    }

    #[test]
    fn unbounded_needs_initial() {
        assert!(ruler_martingale(&WagerSet::integers(), None).is_err());
        assert!(ruler_martingale(&WagerSet::integers(), Some(Value::int(100))).is_ok());
    }

    #[test]
    fn history_dependent_density_rejected() {
        let s = Strategy::from_fn("f", Value::one(), |h, _| Value::int(h.len() as i64 % 2));
        assert!(matches!(
            visit_density(&s, &Value::one(), &Value::one(), 4),
            Err(Error::NotHistoryIndependent)
        ));
    }
}
