//! Exhaustive check of a strategy over the full binary tree to a fixed depth.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{history_string, Bettor, Outcome, Strategy};
use crate::error::{Error, Result};
use crate::value::Value;
use crate::wagerset::WagerSet;

pub const DEFAULT_DEPTH_CAP: usize = 22;

/// Violations kept in the report; the total count is always exact.
const MAX_LISTED: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ViolationKind {
    /// `|M'(σ)|` is not in the wager set.
    NotInSet,
    /// `M(σ) < |M'(σ)|`.
    Debt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub history: String,
    pub kind: ViolationKind,
    pub wealth: Value,
    pub increment: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub depth: usize,
    pub nodes_checked: u64,
    pub total_violations: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.total_violations == 0
    }
}

struct Walker<'a> {
    set: &'a WagerSet,
    depth: usize,
    membership: HashMap<Value, bool>,
    report: ValidationReport,
}

impl Walker<'_> {
    fn in_set(&mut self, x: &Value) -> Result<bool> {
        if let Some(hit) = self.membership.get(x) {
            return Ok(*hit);
        }
        let ans = self.set.contains(x)?;
        self.membership.insert(x.clone(), ans);
        Ok(ans)
    }

    fn flag(&mut self, history: &[Outcome], kind: ViolationKind, wealth: &Value, inc: &Value) {
        self.report.total_violations += 1;
        if self.report.violations.len() < MAX_LISTED {
            self.report.violations.push(Violation {
                history: history_string(history),
                kind,
                wealth: wealth.clone(),
                increment: inc.clone(),
            });
        }
    }

    fn visit(&mut self, bettor: &dyn Bettor, history: &mut Vec<Outcome>, wealth: &Value) -> Result<()> {
        if history.len() >= self.depth {
            return Ok(());
        }
        self.report.nodes_checked += 1;
        let inc = bettor.increment(history, wealth)?;
        let wager = inc.try_abs()?;
        if !self.in_set(&wager)? {
            self.flag(history, ViolationKind::NotInSet, wealth, &inc);
        }
        if wealth.try_lt(&wager)? {
            self.flag(history, ViolationKind::Debt, wealth, &inc);
        }
        for o in [Outcome::Heads, Outcome::Tails] {
            let mut child = bettor.clone_box();
            child.observe(history, wealth, o)?;
            let next = o.apply(wealth, &inc);
            history.push(o);
            let r = self.visit(child.as_ref(), history, &next);
            history.pop();
            r?;
        }
        Ok(())
    }
}

/// Walks every history of length `< depth` and reports wagers outside `set` and bets beyond wealth.
pub fn validate_strategy(s: &Strategy, set: &WagerSet, depth: usize) -> Result<ValidationReport> {
    validate_strategy_capped(s, set, depth, DEFAULT_DEPTH_CAP)
}

pub fn validate_strategy_capped(s: &Strategy, set: &WagerSet, depth: usize, cap: usize) -> Result<ValidationReport> {
    if depth > cap {
        return Err(Error::DepthCapExceeded { depth, cap });
    }
    let mut w = Walker {
        set,
        depth,
        membership: HashMap::new(),
        report: ValidationReport {
            depth,
            nodes_checked: 0,
            total_violations: 0,
            violations: Vec::new(),
        },
    };
    let root = s.start();
    w.visit(root.as_ref(), &mut Vec::new(), s.initial_value())?;
    Ok(w.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::ruler_martingale;

    fn constant(inc: i64, initial: i64) -> Strategy {
        Strategy::from_fn("c", Value::int(initial), move |_, _| Value::int(inc))
    }

    #[test]
    fn constant_one_is_valid() {
        let a = WagerSet::finite([Value::one()]).unwrap();
        let r = validate_strategy(&constant(1, 10), &a, 10).unwrap();
        assert_eq!(r.nodes_checked, (1 << 10) - 1);
        // Ten straight losses never happen before depth 10 ends: wealth stays >= 1.
        assert!(r.is_valid(), "{:?}", r.violations.first());
    }

    #[test]
    fn debt_at_root() {
        let a = WagerSet::finite([Value::int(2)]).unwrap();
        let r = validate_strategy(&constant(2, 1), &a, 3).unwrap();
        assert_eq!(r.violations[0].history, "");
        assert_eq!(r.violations[0].kind, ViolationKind::Debt);
    }

    #[test]
    fn zero_wager_needs_zero_in_set() {
        let a = WagerSet::finite([Value::one()]).unwrap();
        let r = validate_strategy(&constant(0, 1), &a, 2).unwrap();
        assert_eq!(r.total_violations, 3);
        assert!(r.violations.iter().all(|v| v.kind == ViolationKind::NotInSet));
        let r = validate_strategy(&constant(0, 1), &WagerSet::with_zero(a), 2).unwrap();
        assert!(r.is_valid());
    }

    #[test]
    fn ruler_over_one_two() {
        let a = WagerSet::finite([Value::int(1), Value::int(2)]).unwrap();
        let s = ruler_martingale(&a, None).unwrap();
        assert!(validate_strategy(&s, &a, 12).unwrap().is_valid());
    }

    #[test]
    fn cap_is_enforced() {
        let a = WagerSet::finite([Value::one()]).unwrap();
        assert!(matches!(
            validate_strategy(&constant(1, 1), &a, 23),
            Err(Error::DepthCapExceeded { depth: 23, cap: 22 })
        ));
    }
}
