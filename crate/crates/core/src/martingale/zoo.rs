//! Named opponent strategies and their JSON specs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ruler_martingale, Bettor, Outcome, Strategy, Tracked};
use crate::error::{Error, Result};
use crate::value::Value;
use crate::wagerset::{Extended, WagerSet};

fn default_initial() -> Value {
    Value::int(10)
}

/// How a copycat rounds the magnitude of its scaled increment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Rounding {
    #[default]
    None,
    Floor,
    Nearest,
    Ceil,
    /// Largest odd integer not above the magnitude, or 0 below 1.
    FloorOdd,
}

impl Rounding {
    pub fn apply(self, x: &Value) -> Result<Value> {
        if self == Rounding::None || x.is_zero() {
            return Ok(x.clone());
        }
        let negative = x.is_negative()?;
        let mag = x.try_abs()?;
        let n: BigInt = match self {
            Rounding::None => unreachable!(),
            Rounding::Floor => mag.try_floor()?,
            Rounding::Ceil => mag.try_ceil()?,
            Rounding::Nearest => (&mag + &Value::ratio(1, 2)).try_floor()?,
            Rounding::FloorOdd => {
                let f = mag.try_floor()?;
                if f.is_zero() {
                    f
                } else if f.is_even() {
                    f - 1
                } else {
                    f
                }
            }
        };
        let v = Value::from_bigint(n);
        Ok(if negative { -v } else { v })
    }
}

/// Serializable description of a strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum StrategySpec {
    /// Never bets; wealth stays `c`.
    ConstantWealth { c: Value },
    AlwaysHeads {
        wager: Value,
        #[serde(default = "default_initial")]
        initial: Value,
    },
    AlwaysTails {
        wager: Value,
        #[serde(default = "default_initial")]
        initial: Value,
    },
    /// Bets `first` on Heads until the first Tails, then `then` on Heads forever.
    ThresholdSwitcher {
        first: Value,
        then: Value,
        #[serde(default = "default_initial")]
        initial: Value,
    },
    /// Fixed signed increments; after the list, repeat it or bet 0.
    Scripted {
        wagers: Vec<Value>,
        #[serde(default)]
        repeat: bool,
        #[serde(default = "default_initial")]
        initial: Value,
    },
    /// `ratio` times the target's increments, rounded; initial defaults to `ratio` times the target's.
    Copycat {
        target: Box<StrategySpec>,
        ratio: Value,
        #[serde(default)]
        rounding: Rounding,
        #[serde(default)]
        initial: Option<Value>,
    },
    /// Bets 0 forever once wealth drops below the least nonzero wager or cannot cover the next bet.
    StopOnBankrupt { inner: Box<StrategySpec>, set: WagerSet },
    Ruler {
        set: WagerSet,
        #[serde(default)]
        initial: Option<Value>,
    },
    /// Bets `fraction` of current wealth on Heads, optionally rounded down to a power of two.
    WealthFraction {
        fraction: Value,
        #[serde(default)]
        dyadic: bool,
        #[serde(default = "default_initial")]
        initial: Value,
    },
}

const KINDS: &[&str] = &[
    "constantWealth",
    "alwaysHeads",
    "alwaysTails",
    "thresholdSwitcher",
    "scripted",
    "copycat",
    "stopOnBankrupt",
    "ruler",
    "wealthFraction",
];

impl StrategySpec {
    /// Parses a strategy description, reporting unknown kinds as `UnknownSpec`.
    pub fn from_json(v: &serde_json::Value) -> Result<StrategySpec> {
        check_kinds(v)?;
        Ok(serde_json::from_value(v.clone())?)
    }

    pub fn build(&self) -> Result<Strategy> {
        Ok(match self {
            StrategySpec::ConstantWealth { c } => constant_wealth(c.clone()),
            StrategySpec::AlwaysHeads { wager, initial } => always_heads(wager.clone(), initial.clone()),
            StrategySpec::AlwaysTails { wager, initial } => always_tails(wager.clone(), initial.clone()),
            StrategySpec::ThresholdSwitcher { first, then, initial } => {
                threshold_switcher(first.clone(), then.clone(), initial.clone())
            }
            StrategySpec::Scripted { wagers, repeat, initial } => {
                scripted(wagers.clone(), *repeat, initial.clone())
            }
            StrategySpec::Copycat { target, ratio, rounding, initial } => {
                copycat(&target.build()?, ratio.clone(), *rounding, initial.clone())?
            }
            StrategySpec::StopOnBankrupt { inner, set } => stop_on_bankrupt(&inner.build()?, set)?,
            StrategySpec::Ruler { set, initial } => ruler_martingale(set, initial.clone())?,
            StrategySpec::WealthFraction { fraction, dyadic, initial } => {
                wealth_fraction(fraction.clone(), *dyadic, initial.clone())?
            }
        })
    }
}

fn check_kinds(v: &serde_json::Value) -> Result<()> {
    if let Some(obj) = v.as_object() {
        match obj.get("kind").and_then(|k| k.as_str()) {
            Some(k) if KINDS.contains(&k) => {}
            Some(k) => return Err(Error::UnknownSpec(k.to_string())),
            None => return Err(Error::UnknownSpec("missing \"kind\"".into())),
        }
        for key in ["target", "inner"] {
            if let Some(nested) = obj.get(key) {
                check_kinds(nested)?;
            }
        }
    }
    Ok(())
}

/// Bets a fixed signed schedule that ignores the history.
#[derive(Clone, Debug)]
struct Schedule {
    wagers: Vec<Value>,
    repeat: bool,
}

impl Schedule {
    fn at(&self, h: usize) -> Value {
        match self.wagers.len() {
            0 => Value::zero(),
            n if h < n => self.wagers[h].clone(),
            n if self.repeat => self.wagers[h % n].clone(),
            _ => Value::zero(),
        }
    }
}

impl Bettor for Schedule {
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

pub fn constant_wealth(c: Value) -> Strategy {
    Strategy::new("constantWealth", c, Schedule { wagers: vec![], repeat: false })
}

pub fn always_heads(wager: Value, initial: Value) -> Strategy {
    Strategy::new(format!("alwaysHeads({wager})"), initial, Schedule { wagers: vec![wager], repeat: true })
}

pub fn always_tails(wager: Value, initial: Value) -> Strategy {
    Strategy::new(format!("alwaysTails({wager})"), initial, Schedule { wagers: vec![-wager], repeat: true })
}

pub fn scripted(wagers: Vec<Value>, repeat: bool, initial: Value) -> Strategy {
    Strategy::new(format!("scripted[{}]", wagers.len()), initial, Schedule { wagers, repeat })
}

#[derive(Clone, Debug)]
struct Switcher {
    first: Value,
    then: Value,
    switched: bool,
}

impl Bettor for Switcher {
    fn increment(&self, _history: &[Outcome], _wealth: &Value) -> Result<Value> {
        Ok(if self.switched {
            self.then.clone()
        } else {
            self.first.clone()
        })
    }

    fn observe(&mut self, _history: &[Outcome], _wealth: &Value, outcome: Outcome) -> Result<()> {
        self.switched |= outcome == Outcome::Tails;
        Ok(())
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

pub fn threshold_switcher(first: Value, then: Value, initial: Value) -> Strategy {
    Strategy::new(format!("thresholdSwitcher({first},{then})"), initial, Switcher { first, then, switched: false })
}

#[derive(Clone, Debug)]
struct Copycat {
    target: Tracked,
    ratio: Value,
    rounding: Rounding,
}

impl Bettor for Copycat {
    fn increment(&self, history: &[Outcome], _wealth: &Value) -> Result<Value> {
        self.rounding.apply(&self.target.increment(history)?.checked_mul(&self.ratio)?)
    }

    fn observe(&mut self, history: &[Outcome], _wealth: &Value, outcome: Outcome) -> Result<()> {
        self.target.advance(history, outcome)
    }

    fn observe_bets(&mut self, bets: &[Value]) {
        self.target.observe_bets(bets);
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// Follows `target` on its own ledger and bets `ratio` times its increments.
pub fn copycat(target: &Strategy, ratio: Value, rounding: Rounding, initial: Option<Value>) -> Result<Strategy> {
    if !ratio.is_positive()? {
        return Err(Error::InvalidValue("copycat ratio must be positive".into()));
    }
    let initial = match initial {
        Some(v) => v,
        None => target.initial_value().checked_mul(&ratio)?,
    };
    let name = format!("copycat({}, {ratio})", target.name());
    Ok(Strategy::new(
        name,
        initial,
        Copycat {
            target: Tracked::new(target),
            ratio,
            rounding,
        },
    ))
}

#[derive(Clone, Debug)]
struct StopOnBankrupt {
    inner: Box<dyn Bettor>,
    /// Least nonzero wager; `None` when the set has no nonzero element.
    floor: Option<Value>,
    stopped: bool,
}

impl StopOnBankrupt {
    fn must_stop(&self, history: &[Outcome], wealth: &Value) -> Result<bool> {
        if self.stopped {
            return Ok(true);
        }
        match &self.floor {
            None => return Ok(true),
            Some(f) if wealth.try_lt(f)? => return Ok(true),
            _ => {}
        }
        let inc = self.inner.increment(history, wealth)?;
        wealth.try_lt(&inc.try_abs()?)
    }
}

impl Bettor for StopOnBankrupt {
    fn increment(&self, history: &[Outcome], wealth: &Value) -> Result<Value> {
        if self.must_stop(history, wealth)? {
            return Ok(Value::zero());
        }
        self.inner.increment(history, wealth)
    }

    fn observe(&mut self, history: &[Outcome], wealth: &Value, outcome: Outcome) -> Result<()> {
        if self.must_stop(history, wealth)? {
            self.stopped = true;
        }
        self.inner.observe(history, wealth, outcome)
    }

    fn observe_bets(&mut self, bets: &[Value]) {
        self.inner.observe_bets(bets);
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// Wraps `inner` so it stops betting for good once it cannot place a legal wager.
pub fn stop_on_bankrupt(inner: &Strategy, set: &WagerSet) -> Result<Strategy> {
    let floor = match set.bounds()?.inf_nonzero {
        Extended::Finite(v) => Some(v),
        Extended::Infinity(_) => None,
    };
    let s = Strategy::new(
        format!("stopOnBankrupt({})", inner.name()),
        inner.initial_value().clone(),
        StopOnBankrupt {
            inner: inner.start(),
            floor,
            stopped: false,
        },
    );
    Ok(s.with_declared_set(WagerSet::with_zero(set.clone())))
}

#[derive(Clone, Debug)]
struct WealthFraction {
    fraction: BigRational,
    dyadic: bool,
}

impl Bettor for WealthFraction {
    fn increment(&self, _history: &[Outcome], wealth: &Value) -> Result<Value> {
        let w = wealth
            .as_rational()
            .ok_or_else(|| Error::Unsupported("wealth fraction needs rational wealth".into()))?;
        let x = w * &self.fraction;
        if !self.dyadic || !x.is_positive() {
            return Ok(Value::from_rational(x));
        }
        Ok(Value::from_rational(dyadic_floor(&x)))
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// Largest `2^k`, `k` any integer, not above `x > 0`.
pub(crate) fn dyadic_floor(x: &BigRational) -> BigRational {
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let pow = |k: i64| {
        let one = BigInt::one();
        if k >= 0 {
            BigRational::from_integer(one << k as usize)
        } else {
            BigRational::new(one.clone(), one << (-k) as usize)
        }
    };
    while &pow(k) > x {
        k -= 1;
    }
    while &pow(k + 1) <= x {
        k += 1;
    }
    pow(k)
}

/// Bets `fraction` (in `[0, 1]`) of current wealth on Heads every step.
pub fn wealth_fraction(fraction: Value, dyadic: bool, initial: Value) -> Result<Strategy> {
    let f = fraction
        .as_rational()
        .cloned()
        .ok_or_else(|| Error::InvalidValue("wealth fraction must be rational".into()))?;
    if f.is_negative() || f > BigRational::one() {
        return Err(Error::InvalidValue("wealth fraction must lie in [0, 1]".into()));
    }
    let name = format!("wealthFraction({fraction}{})", if dyadic { ", dyadic" } else { "" });
    Ok(Strategy::new(name, initial, WealthFraction { fraction: f, dyadic }))
}

/// `r` times `s`: initial value and every increment scaled exactly.
pub fn proportional(s: &Strategy, r: Value) -> Result<Strategy> {
    copycat(s, r, Rounding::None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(s: &Strategy, outcomes: &str) -> super::super::MartingaleRun {
        let mut r = s.run();
        r.play(&super::super::parse_history(outcomes).unwrap()).unwrap();
        r
    }

    #[test]
    fn copycat_halves_always_heads() {
        let c = copycat(&always_heads(Value::int(2), Value::int(10)), Value::ratio(1, 2), Rounding::None, None).unwrap();
        let r = run(&c, "HHTH");
        assert_eq!(r.increments(), &[Value::one(), Value::one(), Value::one(), Value::one()]);
        assert_eq!(r.wealth(), &Value::int(7));
    }

    #[test]
    fn switcher_switches_after_first_tails() {
        let s = threshold_switcher(Value::int(2), Value::one(), Value::int(10));
        let r = run(&s, "HHTHT");
        let want: Vec<Value> = [2, 2, 2, 1, 1].iter().map(|x| Value::int(*x)).collect();
        assert_eq!(r.increments(), want.as_slice());
    }

    #[test]
    fn stop_on_bankrupt_freezes() {
        let b = WagerSet::finite([Value::one()]).unwrap();
        let s = stop_on_bankrupt(&always_heads(Value::one(), Value::one()), &b).unwrap();
        let r = run(&s, "THHHH");
        assert_eq!(r.wealths().last().unwrap(), &Value::zero());
        assert!(r.increments()[1..].iter().all(|x| x.is_zero()));
        assert!(!r.is_bankrupt());
    }

    #[test]
    fn stop_is_permanent_even_if_wealth_recovers() {
        // Wagers 3 with wealth 2 after a loss of a smaller bet: stops, and stays stopped.
        let b = WagerSet::integers();
        let inner = scripted(vec![Value::one(), Value::int(3), Value::one()], true, Value::int(3));
        let s = stop_on_bankrupt(&inner, &b).unwrap();
        let r = run(&s, "THHHHH");
        assert!(r.increments()[1..].iter().all(|x| x.is_zero()));
    }

    #[test]
    fn wealth_fraction_bets() {
        let s = wealth_fraction(Value::ratio(1, 3), false, Value::int(9)).unwrap();
        let r = run(&s, "HT");
        assert_eq!(r.increments(), &[Value::int(3), Value::int(4)]);
        let d = wealth_fraction(Value::ratio(1, 2), true, Value::int(7)).unwrap();
        let r = run(&d, "TT");
        // 7/2 -> 2; 5/2 -> 2.
        assert_eq!(r.increments(), &[Value::int(2), Value::int(2)]);
        assert_eq!(dyadic_floor(&crate::value::rat(3, 8)), crate::value::rat(1, 4));
        assert!(wealth_fraction(Value::int(2), false, Value::one()).is_err());
    }

    #[test]
    fn rounding_modes() {
        let x = Value::ratio(-7, 2);
        assert_eq!(Rounding::Floor.apply(&x).unwrap(), Value::int(-3));
        assert_eq!(Rounding::Ceil.apply(&x).unwrap(), Value::int(-4));
        assert_eq!(Rounding::Nearest.apply(&x).unwrap(), Value::int(-4));
        assert_eq!(Rounding::FloorOdd.apply(&Value::int(4)).unwrap(), Value::int(3));
        assert_eq!(Rounding::FloorOdd.apply(&Value::ratio(1, 2)).unwrap(), Value::zero());
        assert_eq!(Rounding::None.apply(&x).unwrap(), x);
    }

    #[test]
    fn specs_from_json() {
        let v: serde_json::Value = serde_json::json!({
            "kind": "copycat", "ratio": "1/2",
            "target": {"kind": "alwaysHeads", "wager": "2/1"}
        });
        let spec = StrategySpec::from_json(&v).unwrap();
        let s = spec.build().unwrap();
        assert_eq!(s.initial_value(), &Value::int(5));
        let bad = serde_json::json!({"kind": "martingaleOfDoom"});
        assert!(matches!(StrategySpec::from_json(&bad), Err(Error::UnknownSpec(k)) if k == "martingaleOfDoom"));
        let nested = serde_json::json!({"kind": "stopOnBankrupt", "set": {"kind": "harmonicShifted"}, "inner": {"kind": "nope"}});
        assert!(matches!(StrategySpec::from_json(&nested), Err(Error::UnknownSpec(_))));
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<StrategySpec>(&text).unwrap(), spec);
    }

    #[test]
    fn proportional_scaling_of_switcher() {
        let s = proportional(&threshold_switcher(Value::int(2), Value::one(), Value::int(10)), Value::int(2)).unwrap();
        let r = run(&s, "HTH");
        let want: Vec<Value> = [4, 4, 2].iter().map(|x| Value::int(*x)).collect();
        assert_eq!(r.increments(), want.as_slice());
        assert_eq!(r.wealths()[0], Value::int(20));
    }
}
