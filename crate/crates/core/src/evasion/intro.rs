//! The two-phase casino for the gambling-house example: A = {1, 2} against B = {1}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingale::{History, MartingaleRun, Outcome, Strategy};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IntroPhase {
    /// Heads until gambler 0 leads by more than the margin.
    Lead,
    /// The single Tails that makes gambler 0 switch wagers.
    Switch,
    /// Against gambler 1's bet, Heads when he bets nothing.
    Adversarial,
}

impl IntroPhase {
    pub fn label(self) -> &'static str {
        match self {
            IntroPhase::Lead => "1",
            IntroPhase::Switch => "switch",
            IntroPhase::Adversarial => "2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntroState {
    pub t: usize,
    pub outcome: Option<Outcome>,
    pub phase: Option<IntroPhase>,
    pub w0: Value,
    pub w1: Value,
    pub inc0: Option<Value>,
    pub inc1: Option<Value>,
}

#[derive(Debug)]
pub struct IntroRun {
    pub history: History,
    pub gambler0: MartingaleRun,
    pub gambler1: MartingaleRun,
    pub states: Vec<IntroState>,
    /// First step of the adversarial phase, if reached.
    pub switch_step: Option<usize>,
}

/// Phase 1: Heads until `w0 - w1 > lead`; then one Tails; then always against gambler 1.
pub fn two_phase_casino(g0: &Strategy, g1: &Strategy, lead: &Value, horizon: usize) -> Result<IntroRun> {
    let mut at = 0;
    intro_inner(g0, g1, lead, horizon, &mut at).map_err(|e| e.at_step(at))
}

fn intro_inner(g0: &Strategy, g1: &Strategy, lead: &Value, horizon: usize, at: &mut usize) -> Result<IntroRun> {
    let (mut r0, mut r1) = (g0.run(), g1.run());
    let mut states = Vec::with_capacity(horizon + 1);
    let mut phase = IntroPhase::Lead;
    let mut switch_step = None;
    for t in 0..=horizon {
        *at = t;
        let (w0, w1) = (r0.wealth().clone(), r1.wealth().clone());
        if t == horizon {
            states.push(IntroState {
                t,
                outcome: None,
                phase: None,
                w0,
                w1,
                inc0: None,
                inc1: None,
            });
            break;
        }
        let (i0, i1) = (r0.pending_increment()?, r1.pending_increment()?);
        for (who, r) in [(0, &r0), (1, &r1)] {
            if r.is_bankrupt() {
                return Err(Error::InvalidState(format!("gambler {who} bets beyond wealth at step {t}")));
            }
        }
        if phase == IntroPhase::Lead && (&w0 - &w1).try_gt(lead)? {
            phase = IntroPhase::Switch;
        }
        let outcome = match phase {
            IntroPhase::Lead => Outcome::Heads,
            IntroPhase::Switch => Outcome::Tails,
            IntroPhase::Adversarial if i1.is_zero() => Outcome::Heads,
            IntroPhase::Adversarial => super::against(&i1)?,
        };
        states.push(IntroState {
            t,
            outcome: Some(outcome),
            phase: Some(phase),
            w0,
            w1,
            inc0: Some(i0),
            inc1: Some(i1),
        });
        r0.step(outcome)?;
        r1.step(outcome)?;
        if phase == IntroPhase::Switch {
            phase = IntroPhase::Adversarial;
            switch_step = Some(t + 1);
        }
    }
    Ok(IntroRun {
        history: r0.history().to_vec(),
        gambler0: r0,
        gambler1: r1,
        states,
        switch_step,
    })
}
