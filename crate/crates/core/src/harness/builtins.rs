use serde::Serialize;
use serde_json::json;

use super::scenario::Scenario;

/// A catalogued scenario with the result it is expected to show.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    /// Shape of the summary a correct run produces.
    pub expected: &'static str,
    pub scenario: Scenario,
}

fn ints() -> serde_json::Value {
    json!({"kind": "integerMultiples", "step": "1"})
}

fn harmonic_ruler_copycat(rounding: &str, initial: Option<&str>) -> serde_json::Value {
    let mut c = json!({
        "kind": "copycat",
        "target": {"kind": "ruler", "set": {"kind": "harmonicShifted"}},
        "ratio": "1",
        "rounding": rounding,
    });
    if let Some(i) = initial {
        c["initial"] = json!(i);
    }
    c
}

fn entries() -> Vec<(&'static str, &'static str, &'static str, serde_json::Value)> {
    let profile_points: Vec<String> = (1..=100).map(|x| x.to_string()).collect();
    vec![
        (
            "intro-1-2-vs-1",
            "Wagers {1, 2} against {1}: a two-phase casino lets gambler 0 win while gambler 1 goes broke.",
            "gamblers[0].success = true; gamblers[1].success = false with no wagers in the final window",
            json!({
                "mode": "simulate",
                "a": {"kind": "finite", "elements": ["1", "2"]},
                "b": {"kind": "finite", "elements": ["1"]},
                "strategies": [
                    {"kind": "thresholdSwitcher", "first": "2", "then": "1", "initial": "10"},
                    {"kind": "stopOnBankrupt",
                     "inner": {"kind": "alwaysHeads", "wager": "1", "initial": "10"},
                     "set": {"kind": "finite", "elements": ["1"]}}
                ],
                "horizon": 10000,
                "casino": {"kind": "twoPhase", "lead": "3"},
                "thresholds": {"successMargin": "100", "windowFraction": "1/5"}
            }),
        ),
        (
            "evens-vs-odds",
            "Even wagers evade odd ones: the well-ordered casino defeats three odd-wager opponents.",
            "success = true; mAtLeastG = true; violations = 0; stabilization.allStabilized = true",
            json!({
                "mode": "evade-wellordered",
                "a": {"kind": "integerMultiples", "step": "2"},
                "b": {"kind": "integerSieve", "excluded": {"rule": "multiplesOf", "modulus": 2}},
                "opponents": [
                    {"kind": "alwaysHeads", "wager": "1", "initial": "10"},
                    {"kind": "alwaysTails", "wager": "3", "initial": "20"},
                    {"kind": "thresholdSwitcher", "first": "5", "then": "1", "initial": "30"}
                ],
                "horizon": 100000,
                "thresholds": {"successMargin": "25", "windowFraction": "1/5"}
            }),
        ),
        (
            "harmonic-shifted-vs-integers",
            "{1 + 1/n} evades the positive integers: the bounded casino against four integer bettors.",
            "success = true; stabilization.allStabilized = true; kWindowMinCoversOpponents = true",
            json!({
                "mode": "evade-bounded",
                "a": {"kind": "harmonicShifted"},
                "b": ints(),
                "opponents": [
                    {"kind": "alwaysHeads", "wager": "1", "initial": "10"},
                    {"kind": "thresholdSwitcher", "first": "1", "then": "1", "initial": "10"},
                    {"kind": "scripted", "wagers": ["1", "-2", "0", "3"], "repeat": true, "initial": "10"},
                    harmonic_ruler_copycat("nearest", Some("10"))
                ],
                "horizon": 100000,
                "thresholds": {"successMargin": "50", "windowFraction": "1/5"}
            }),
        ),
        (
            "reciprocals-vs-V",
            "{1/n} evades V = {0} ∪ [1, inf): the bounded casino with real wagers of size at least 1.",
            "success = true; stabilization.allStabilized = true",
            json!({
                "mode": "evade-bounded",
                "a": {"kind": "harmonicReciprocal"},
                "b": {"kind": "withZero", "inner": {"kind": "halfLine", "lo": "1"}},
                "opponents": [
                    {"kind": "alwaysHeads", "wager": "3/2", "initial": "10"},
                    {"kind": "thresholdSwitcher", "first": "5/2", "then": "1", "initial": "10"},
                    {"kind": "copycat",
                     "target": {"kind": "ruler", "set": {"kind": "harmonicReciprocal"}},
                     "ratio": "1", "rounding": "ceil", "initial": "10"}
                ],
                "horizon": 20000,
                "thresholds": {"successMargin": "50", "windowFraction": "1/5"}
            }),
        ),
        (
            "rplus-vs-unit-interval",
            "The nonnegative reals and [0, 1] are equivalent: the f-shadow with f = min(1/x, 1) certifies domination.",
            "integral.stepViolations = 0; integral.cumulativeViolations = 0; wagerViolations = 0",
            json!({
                "mode": "dominate",
                "a": {"kind": "halfLine", "lo": "0"},
                "b": {"kind": "closedInterval", "lo": "0", "hi": "1"},
                "strategies": [{"kind": "wealthFraction", "fraction": "1/2", "initial": "1"}],
                "construction": {"kind": "fShadow"},
                "scaling": {"kind": "minReciprocal"},
                "casino": {"kind": "seeded", "seed": 1},
                "horizon": 2000
            }),
        ),
        (
            "dyadic-powers",
            "{2^n : n in Z} and {2^n : n <= 0} are equivalent: the f-shadow with the dyadic floor certifies domination.",
            "integral.stepViolations = 0; integral.cumulativeViolations = 0; wagerViolations = 0",
            json!({
                "mode": "dominate",
                "a": {"kind": "geometricPowers", "base": "2", "exponents": "all"},
                "b": {"kind": "withZero", "inner": {"kind": "geometricPowers", "base": "2", "exponents": "nonPositive"}},
                "strategies": [{"kind": "wealthFraction", "fraction": "1/2", "dyadic": true, "initial": "1"}],
                "construction": {"kind": "fShadow"},
                "scaling": {"kind": "dyadicFloor"},
                "casino": {"kind": "seeded", "seed": 2},
                "horizon": 2000
            }),
        ),
        (
            "sieve-density-one",
            "The positive integers do not scale into Z+ minus the cubes, a set of density one; q_M vanishes from a cutoff on.",
            "scales = No; profile.cutoff = 9",
            json!({
                "mode": "check-scaling",
                "a": ints(),
                "b": {"kind": "integerSieve", "excluded": {"rule": "productWithPolynomial", "coeffs": [0, 0, 1]}},
                "profile": {"m": "3", "points": profile_points}
            }),
        ),
        (
            "pi-vs-integers",
            "{1, pi} contains two rationally independent numbers, so it does not scale into the positive integers.",
            "scales = No",
            json!({
                "mode": "check-scaling",
                "a": {"kind": "finite", "elements": ["1", {"const": "pi"}]},
                "b": ints()
            }),
        ),
        (
            "harmonic-ratio-density",
            "An integer copycat ratio-minimized against the {1 + 1/n} ruler: deviations from the limiting ratio thin out.",
            "nonIncreasing = true; densities non-increasing; final density <= 1/20",
            json!({
                "mode": "density-report",
                "strategies": [
                    {"kind": "stopOnBankrupt", "inner": harmonic_ruler_copycat("nearest", None), "set": ints()},
                    {"kind": "ruler", "set": {"kind": "harmonicShifted"}}
                ],
                "horizon": 65536,
                "density": {"epsilon": "1/10", "windows": [1024, 4096, 16384, 65536]}
            }),
        ),
        (
            "ruler-validate",
            "The ruler martingale over {1, 2} with a generous bankroll is a legal {1, 2}-martingale to depth 12.",
            "valid = true",
            json!({
                "mode": "validate",
                "a": {"kind": "finite", "elements": ["1", "2"]},
                "strategies": [{"kind": "ruler", "set": {"kind": "finite", "elements": ["1", "2"]}, "initial": "24"}],
                "depth": 12
            }),
        ),
    ]
}

/// The scenario catalogue.
pub fn builtin_scenarios() -> Vec<Builtin> {
    entries()
        .into_iter()
        .map(|(name, description, expected, mut body)| {
            body["name"] = json!(name);
            body["description"] = json!(description);
            let scenario: Scenario =
                serde_json::from_value(body).unwrap_or_else(|e| panic!("built-in {name} is malformed: {e}"));
            Builtin {
                name,
                description,
                expected,
                scenario,
            }
        })
        .collect()
}

pub fn builtin(name: &str) -> Option<Builtin> {
    builtin_scenarios().into_iter().find(|b| b.name == name)
}
