use serde::{Deserialize, Serialize};

use crate::domination::ScalingFunction;
use crate::error::{Error, Result};
use crate::evasion::CasinoConfig;
use crate::martingale::StrategySpec;
use crate::value::{Precision, Value};
use crate::wagerset::WagerSet;

use super::builtins::builtin;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Run `strategies` against a fixed, seeded or two-phase outcome sequence.
    Simulate,
    /// Decide whether `a` scales into the closure of `b`.
    CheckScaling,
    /// Build a B-strategy from `strategies[0]` and certify it along a sequence.
    Dominate,
    EvadeBounded,
    #[serde(rename = "evade-wellordered")]
    EvadeWellOrdered,
    /// Ratio-minimize `strategies[0]` (N) against `strategies[1]` (M).
    RatioMin,
    /// Exhaustively check `strategies[0]` against `a` to `depth`.
    Validate,
    /// Ratio minimization plus windowed deviation densities.
    DensityReport,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::CheckScaling => "check-scaling",
            Mode::Dominate => "dominate",
            Mode::EvadeBounded => "evade-bounded",
            Mode::EvadeWellOrdered => "evade-wellordered",
            Mode::RatioMin => "ratio-min",
            Mode::Validate => "validate",
            Mode::DensityReport => "density-report",
        }
    }

    fn uses_horizon(self) -> bool {
        !matches!(self, Mode::CheckScaling | Mode::Validate)
    }
}

/// Where the outcomes come from in `simulate` and `dominate`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum OutcomeSource {
    /// Heads until gambler 0 leads by more than `lead`, one Tails, then against gambler 1.
    TwoPhase { lead: Value },
    /// A literal `H`/`T` string, cycled when `repeat` is set.
    Fixed {
        history: String,
        #[serde(default = "default_true")]
        repeat: bool,
    },
    /// Fair coin flips from a ChaCha8 stream.
    Seeded { seed: u64 },
}

/// How `dominate` derives its B-strategy from `strategies[0]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum Construction {
    /// The f-shadow of M; needs `scaling`.
    FShadow,
    /// `r` times M.
    Proportional { r: Value },
    /// An `a`-strategy approximating M's closure wagers; needs `a`.
    ClosureApprox,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Thresholds {
    /// Success proxy: final wealth at least initial plus this.
    #[serde(default = "default_margin")]
    pub success_margin: Value,
    /// Trailing share of the horizon in which opponents must not bet.
    #[serde(default = "default_window")]
    pub window_fraction: Value,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            success_margin: default_margin(),
            window_fraction: default_window(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DensitySpec {
    #[serde(default = "default_epsilon")]
    pub epsilon: Value,
    /// Prefix lengths of the trace at which the deviation density is reported.
    pub windows: Vec<usize>,
}

/// Sample points for `q_M(x)` with bankroll cap `m`, over `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProfileSpec {
    pub m: Value,
    pub points: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Built-in scenario whose fields this one overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extends: Option<String>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<WagerSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<WagerSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strategies: Vec<StrategySpec>,
    #[serde(default)]
    pub opponents: Vec<StrategySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casino: Option<OutcomeSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingFunction>,
    /// Outcomes played before ratio minimization starts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casino_config: Option<CasinoConfig>,
    /// Bounded case: constant padding at odd virtual indices, users at even ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padding_first: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<Precision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

fn default_true() -> bool {
    true
}

fn default_margin() -> Value {
    Value::int(50)
}

fn default_window() -> Value {
    Value::ratio(1, 5)
}

fn default_epsilon() -> Value {
    Value::ratio(1, 10)
}

pub const DEFAULT_DEPTH: usize = 10;

impl Scenario {
    /// Parses scenario JSON, resolving `extends` against the built-ins.
    pub fn from_json_str(text: &str) -> Result<Scenario> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        Scenario::from_json(raw)
    }

    pub fn from_json(raw: serde_json::Value) -> Result<Scenario> {
        let merged = match raw.get("extends").and_then(|e| e.as_str()) {
            Some(base) => {
                let b = builtin(base).ok_or_else(|| Error::Scenario(format!("unknown built-in scenario `{base}`")))?;
                let mut obj = match serde_json::to_value(&b.scenario)? {
                    serde_json::Value::Object(m) => m,
                    _ => unreachable!("scenarios serialize as objects"),
                };
                let serde_json::Value::Object(over) = raw else {
                    return Err(Error::Scenario("scenario must be a JSON object".into()));
                };
                obj.extend(over);
                serde_json::Value::Object(obj)
            }
            None => {
                if let Some(e) = raw.get("extends") {
                    if !e.is_null() {
                        return Err(Error::Scenario("field `extends` must be a string".into()));
                    }
                }
                raw
            }
        };
        let sc: Scenario = serde_path_to_error::deserialize(merged)
            .map_err(|e| Error::Scenario(format!("field `{}`: {}", e.path(), e.inner())))?;
        sc.check()?;
        Ok(sc)
    }

    fn require<T>(&self, v: &Option<T>, field: &str) -> Result<()> {
        if v.is_none() {
            return Err(Error::Scenario(format!(
                "mode `{}` requires field `{field}`",
                self.mode.label()
            )));
        }
        Ok(())
    }

    fn strategy_count(&self, n: usize, what: &str) -> Result<()> {
        if self.strategies.len() != n {
            return Err(Error::Scenario(format!(
                "mode `{}` requires field `strategies` with exactly {n} entries ({what}), got {}",
                self.mode.label(),
                self.strategies.len()
            )));
        }
        Ok(())
    }

    /// Mode-specific required fields, horizon at least 1, known `extends`.
    pub fn check(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Scenario("field `name` must be non-empty".into()));
        }
        if let Some(e) = &self.extends {
            if builtin(e).is_none() {
                return Err(Error::Scenario(format!("unknown built-in scenario `{e}`")));
            }
        }
        if self.mode.uses_horizon() {
            self.require(&self.horizon, "horizon")?;
            if self.horizon == Some(0) {
                return Err(Error::Scenario("field `horizon` must be at least 1".into()));
            }
        }
        match self.mode {
            Mode::Simulate => {
                self.require(&self.casino, "casino")?;
                if self.strategies.is_empty() {
                    return Err(Error::Scenario("mode `simulate` requires field `strategies`".into()));
                }
                if matches!(self.casino, Some(OutcomeSource::TwoPhase { .. })) {
                    self.strategy_count(2, "gambler 0 and gambler 1")?;
                }
            }
            Mode::CheckScaling => {
                self.require(&self.a, "a")?;
                self.require(&self.b, "b")?;
            }
            Mode::Dominate => {
                self.strategy_count(1, "the martingale to dominate")?;
                self.require(&self.casino, "casino")?;
                self.require(&self.construction, "construction")?;
                if matches!(self.casino, Some(OutcomeSource::TwoPhase { .. })) {
                    return Err(Error::Scenario("field `casino`: twoPhase needs two gamblers; use fixed or seeded".into()));
                }
                match self.construction {
                    Some(Construction::FShadow) => self.require(&self.scaling, "scaling")?,
                    Some(Construction::ClosureApprox) => self.require(&self.a, "a")?,
                    _ => {}
                }
            }
            Mode::EvadeBounded | Mode::EvadeWellOrdered => {
                self.require(&self.a, "a")?;
                self.require(&self.b, "b")?;
            }
            Mode::RatioMin => self.strategy_count(2, "N then M")?,
            Mode::DensityReport => {
                self.strategy_count(2, "N then M")?;
                self.require(&self.density, "density")?;
                let d = self.density.as_ref().expect("checked");
                let h = self.horizon.expect("checked");
                if d.windows.is_empty() || d.windows.iter().any(|w| *w == 0 || *w > h) {
                    return Err(Error::Scenario(
                        "field `density.windows` must be non-empty with lengths in 1..=horizon".into(),
                    ));
                }
            }
            Mode::Validate => {
                self.strategy_count(1, "the strategy to validate")?;
                self.require(&self.a, "a")?;
            }
        }
        Ok(())
    }

    /// The scenario with every default the run relies on written out.
    pub fn materialized(&self) -> Scenario {
        let mut s = self.clone();
        s.precision = Some(s.precision.unwrap_or_else(Precision::current));
        s.output_dir = Some(s.output_dir.clone().unwrap_or_else(|| format!("out/{}", s.name)));
        match s.mode {
            Mode::Simulate | Mode::Dominate | Mode::EvadeBounded | Mode::EvadeWellOrdered => {
                s.thresholds.get_or_insert_with(Thresholds::default);
            }
            Mode::Validate => {
                s.depth.get_or_insert(DEFAULT_DEPTH);
            }
            Mode::RatioMin | Mode::DensityReport => {
                s.prefix.get_or_insert_with(String::new);
            }
            Mode::CheckScaling => {}
        }
        if matches!(s.mode, Mode::EvadeBounded | Mode::EvadeWellOrdered) {
            s.casino_config.get_or_insert_with(CasinoConfig::default);
        }
        if s.mode == Mode::EvadeBounded {
            s.padding_first.get_or_insert(false);
        }
        s
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds.clone().unwrap_or_default()
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
