//! Martingales as betting rules plus wealth ledgers along one evolving history.

mod ruler;
mod validate;
mod zoo;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;
use crate::wagerset::WagerSet;

pub use ruler::{default_ruler_initial, ruler_index, ruler_martingale, visit_density};
pub use validate::{validate_strategy, validate_strategy_capped, ValidationReport, Violation, ViolationKind, DEFAULT_DEPTH_CAP};
pub use zoo::{
    always_heads, always_tails, constant_wealth, copycat, proportional, scripted, stop_on_bankrupt,
    threshold_switcher, wealth_fraction, Rounding, StrategySpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "H")]
    Heads,
    #[serde(rename = "T")]
    Tails,
}

impl Outcome {
    pub fn as_char(self) -> char {
        match self {
            Outcome::Heads => 'H',
            Outcome::Tails => 'T',
        }
    }

    pub fn from_char(c: char) -> Option<Outcome> {
        match c {
            'H' | 'h' => Some(Outcome::Heads),
            'T' | 't' => Some(Outcome::Tails),
            _ => None,
        }
    }

    pub fn opposite(self) -> Outcome {
        match self {
            Outcome::Heads => Outcome::Tails,
            Outcome::Tails => Outcome::Heads,
        }
    }

    /// Wealth after betting the signed increment `inc` and seeing this outcome.
    pub fn apply(self, wealth: &Value, inc: &Value) -> Value {
        match self {
            Outcome::Heads => wealth + inc,
            Outcome::Tails => wealth - inc,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

pub type History = Vec<Outcome>;

pub fn history_string(h: &[Outcome]) -> String {
    h.iter().map(|o| o.as_char()).collect()
}

pub fn parse_history(s: &str) -> Result<History> {
    s.chars()
        .map(|c| Outcome::from_char(c).ok_or_else(|| Error::InvalidValue(format!("bad outcome {c:?}"))))
        .collect()
}

/// The mutable state of a running betting rule. Increments are signed: positive bets on Heads.
pub trait Bettor: Send + Sync + fmt::Debug {
    /// The increment at the end of `history`, given current wealth. Must be deterministic.
    fn increment(&self, history: &[Outcome], wealth: &Value) -> Result<Value>;

    /// Advance internal state past `outcome`; `history` and `wealth` are as before the step.
    fn observe(&mut self, _history: &[Outcome], _wealth: &Value, _outcome: Outcome) -> Result<()> {
        Ok(())
    }

    /// Richer observation hook: the other players' signed bets at the step just played.
    fn observe_bets(&mut self, _bets: &[Value]) {}

    /// Increment at history length `h` for rules that ignore the history.
    fn scheduled_increment(&self, _h: usize) -> Option<Value> {
        None
    }

    fn clone_box(&self) -> Box<dyn Bettor>;
}

impl Clone for Box<dyn Bettor> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// A betting rule with an initial value and an optional declared wager set.
#[derive(Clone, Debug)]
pub struct Strategy {
    name: String,
    initial: Value,
    proto: Arc<dyn Bettor>,
    declared: Option<WagerSet>,
}

impl Strategy {
    pub fn new(name: impl Into<String>, initial: Value, bettor: impl Bettor + 'static) -> Strategy {
        Strategy {
            name: name.into(),
            initial,
            proto: Arc::new(bettor),
            declared: None,
        }
    }

    pub fn from_box(name: impl Into<String>, initial: Value, bettor: Box<dyn Bettor>) -> Strategy {
        Strategy {
            name: name.into(),
            initial,
            proto: Arc::from(bettor),
            declared: None,
        }
    }

    /// Strategy given by a pure function of history and wealth.
    pub fn from_fn(
        name: impl Into<String>,
        initial: Value,
        f: impl Fn(&[Outcome], &Value) -> Value + Send + Sync + 'static,
    ) -> Strategy {
        Strategy::new(name, initial, FnBettor(Arc::new(f)))
    }

    pub fn with_declared_set(mut self, set: WagerSet) -> Strategy {
        self.declared = Some(set);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial_value(&self) -> &Value {
        &self.initial
    }

    pub fn declared_set(&self) -> Option<&WagerSet> {
        self.declared.as_ref()
    }

    /// A fresh bettor at the empty history.
    pub fn start(&self) -> Box<dyn Bettor> {
        self.proto.clone_box()
    }

    /// Signed increment at history length `h` when the rule ignores the history.
    pub fn scheduled_increment(&self, h: usize) -> Option<Value> {
        self.proto.scheduled_increment(h)
    }

    pub fn is_history_independent(&self) -> bool {
        self.proto.scheduled_increment(0).is_some()
    }

    pub fn run(&self) -> MartingaleRun {
        MartingaleRun::new(self)
    }
}

type IncrementFn = dyn Fn(&[Outcome], &Value) -> Value + Send + Sync;

#[derive(Clone)]
struct FnBettor(Arc<IncrementFn>);

impl fmt::Debug for FnBettor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnBettor")
    }
}

impl Bettor for FnBettor {
    fn increment(&self, history: &[Outcome], wealth: &Value) -> Result<Value> {
        Ok((self.0)(history, wealth))
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// A bettor together with its own wealth, for wrappers that follow an inner strategy.
#[derive(Clone, Debug)]
pub struct Tracked {
    bettor: Box<dyn Bettor>,
    wealth: Value,
}

impl Tracked {
    pub fn new(strategy: &Strategy) -> Tracked {
        Tracked {
            bettor: strategy.start(),
            wealth: strategy.initial_value().clone(),
        }
    }

    pub fn wealth(&self) -> &Value {
        &self.wealth
    }

    pub fn increment(&self, history: &[Outcome]) -> Result<Value> {
        self.bettor.increment(history, &self.wealth)
    }

    pub fn advance(&mut self, history: &[Outcome], outcome: Outcome) -> Result<()> {
        let inc = self.increment(history)?;
        self.bettor.observe(history, &self.wealth, outcome)?;
        self.wealth = outcome.apply(&self.wealth, &inc);
        Ok(())
    }

    pub fn observe_bets(&mut self, bets: &[Value]) {
        self.bettor.observe_bets(bets);
    }
}

/// Wealth ledger of one strategy along one history.
#[derive(Clone, Debug)]
pub struct MartingaleRun {
    name: String,
    bettor: Box<dyn Bettor>,
    history: History,
    wealth: Vec<Value>,
    increments: Vec<Value>,
    pending: Option<Value>,
    bankrupt: bool,
}

impl MartingaleRun {
    pub fn new(strategy: &Strategy) -> MartingaleRun {
        MartingaleRun {
            name: strategy.name.clone(),
            bettor: strategy.start(),
            history: Vec::new(),
            wealth: vec![strategy.initial.clone()],
            increments: Vec::new(),
            pending: None,
            bankrupt: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t(&self) -> usize {
        self.history.len()
    }

    pub fn history(&self) -> &[Outcome] {
        &self.history
    }

    pub fn wealth(&self) -> &Value {
        self.wealth.last().expect("ledger starts with the initial value")
    }

    pub fn wealths(&self) -> &[Value] {
        &self.wealth
    }

    pub fn increments(&self) -> &[Value] {
        &self.increments
    }

    pub fn is_bankrupt(&self) -> bool {
        self.bankrupt
    }

    /// The increment the strategy is about to bet; flags bankruptcy when it exceeds wealth.
    pub fn pending_increment(&mut self) -> Result<Value> {
        if let Some(p) = &self.pending {
            return Ok(p.clone());
        }
        let inc = self.bettor.increment(&self.history, self.wealth())?;
        if self.wealth().try_lt(&inc.try_abs()?)? {
            self.bankrupt = true;
        }
        self.pending = Some(inc.clone());
        Ok(inc)
    }

    /// Both successor wealths: `(after Heads, after Tails)`.
    pub fn branch_wealths(&mut self) -> Result<(Value, Value)> {
        let inc = self.pending_increment()?;
        Ok((self.wealth() + &inc, self.wealth() - &inc))
    }

    pub fn step(&mut self, outcome: Outcome) -> Result<()> {
        let inc = self.pending_increment()?;
        if self.bankrupt {
            return Err(Error::SteppedBankruptRun { t: self.t() });
        }
        let before = self.wealth().clone();
        self.bettor.observe(&self.history, &before, outcome)?;
        self.history.push(outcome);
        self.wealth.push(outcome.apply(&before, &inc));
        self.increments.push(inc);
        self.pending = None;
        Ok(())
    }

    pub fn observe_bets(&mut self, bets: &[Value]) {
        self.bettor.observe_bets(bets);
    }

    /// Steps through `outcomes`, stopping early if the strategy would bet money it lacks.
    pub fn play(&mut self, outcomes: &[Outcome]) -> Result<()> {
        for &o in outcomes {
            self.pending_increment()?;
            if self.bankrupt {
                break;
            }
            self.step(o)?;
        }
        Ok(())
    }
}

/// Finite-horizon success: never in debt and final wealth at least `threshold`.
pub fn success_at_horizon(run: &MartingaleRun, threshold: &Value) -> Result<bool> {
    Ok(!run.is_bankrupt() && threshold.try_le(run.wealth())?)
}
