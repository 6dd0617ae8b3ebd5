use proptest::prelude::*;

use duel::evasion::{
    bounded_casino, cesaro_density, count_below, ratio_min_extension, suffix_minima, well_ordered_casino, CasinoConfig,
    RatioCase,
};
use duel::martingale::{
    always_heads, always_tails, copycat, ruler_martingale, scripted, stop_on_bankrupt, threshold_switcher, Outcome, Rounding, Strategy,
};
use duel::{Value, WagerSet};

fn int_opponent(kind: u8, w: i64, init: i64) -> Strategy {
    let (w, init) = (Value::int(w), Value::int(init));
    match kind % 4 {
        0 => always_heads(w, init),
        1 => always_tails(w, init),
        2 => threshold_switcher(w, Value::one(), init),
        _ => scripted(vec![w.clone(), -w, Value::zero()], true, init),
    }
}

fn odd_opponent(kind: u8, w: i64, init: i64) -> Strategy {
    int_opponent(kind, 2 * w - 1, init)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn count_below_matches_brute_force(prefix in prop::collection::vec(1i64..=5, 0..6), m in 0i64..=40) {
        let vals: Vec<Value> = prefix.iter().copied().map(Value::int).collect();
        let (k, s) = count_below(&Value::int(m), &vals).unwrap();
        // Extend with ones and take the largest k with S_k < m.
        let mut partial = vec![0i64];
        for i in 0..(prefix.len() + 50) {
            let x = prefix.get(i).copied().unwrap_or(1);
            partial.push(partial.last().unwrap() + x);
        }
        let want = (0..partial.len()).rev().find(|&i| partial[i] < m);
        match want {
            Some(i) => {
                prop_assert_eq!(k, i as u64);
                prop_assert_eq!(s, Value::int(partial[i]));
            }
            None => prop_assert!(m <= 0),
        }
    }

    #[test]
    fn suffix_minima_agrees_with_direct(xs in prop::collection::vec(0u64..50, 0..30)) {
        let got = suffix_minima(&xs);
        for i in 0..xs.len() {
            prop_assert_eq!(got[i], *xs[i..].iter().min().unwrap());
        }
    }

    /// Each ratio-minimizing step leaves `N / M` no larger than before.
    #[test]
    fn ratio_never_increases(kind in 0u8..4, w in 1i64..=3, init in 5i64..=40, steps in 1usize..300) {
        let m = ruler_martingale(&WagerSet::HarmonicShifted, None).unwrap();
        let n = stop_on_bankrupt(&int_opponent(kind, w, init), &WagerSet::integers()).unwrap();
        let trace = ratio_min_extension(&n, &m, &[], steps).unwrap();
        for e in &trace {
            prop_assert!(e.limit_estimate.try_le(&e.ratio).unwrap());
            if e.case == RatioCase::BothZero {
                prop_assert_eq!(e.outcome, Outcome::Heads);
            }
        }
        for pair in trace.windows(2) {
            prop_assert!(pair[1].ratio.try_le(&pair[0].ratio).unwrap());
        }
    }

    /// Small bounded-casino runs finish with traps armed, keep `m >= 0`, and cover every opponent.
    #[test]
    fn bounded_casino_small(ops in prop::collection::vec((0u8..4, 1i64..=3, 1i64..=15), 1..=3)) {
        let opps: Vec<Strategy> = ops.iter().map(|&(k, w, i)| int_opponent(k, w, i)).collect();
        let run = bounded_casino(&WagerSet::HarmonicShifted, &WagerSet::integers(), &opps, 600, &CasinoConfig::default()).unwrap();
        prop_assert!(run.violations.is_empty());
        for s in &run.states {
            prop_assert!(!s.m.is_negative().unwrap());
        }
        let last = run.states.last().unwrap();
        prop_assert!(last.k >= opps.len() as u64);
    }

    #[test]
    fn well_ordered_casino_small(ops in prop::collection::vec((0u8..4, 1i64..=3, 1i64..=15), 1..=3)) {
        let opps: Vec<Strategy> = ops.iter().map(|&(k, w, i)| odd_opponent(k, w, i)).collect();
        let run = well_ordered_casino(
            &WagerSet::multiples_of(Value::int(2)),
            &WagerSet::odd_integers(),
            &opps,
            600,
            &CasinoConfig::default(),
        ).unwrap();
        prop_assert!(run.violations.is_empty());
        for s in &run.states {
            prop_assert!(s.m.try_ge(&s.g).unwrap());
        }
    }
}

#[test]
fn bankrupt_opponents_are_rejected() {
    let m = ruler_martingale(&WagerSet::HarmonicShifted, None).unwrap();
    let n = always_tails(Value::int(3), Value::int(4));
    let err = ratio_min_extension(&n, &m, &[], 50).unwrap_err();
    assert!(err.to_string().contains("stopOnBankrupt"), "{err}");
}

#[test]
fn density_of_a_floor_copycat_is_small() {
    let m = ruler_martingale(&WagerSet::HarmonicShifted, None).unwrap();
    let n = copycat(&m, Value::one(), Rounding::Floor, None).unwrap();
    let n = stop_on_bankrupt(&n, &WagerSet::integers()).unwrap();
    let trace = ratio_min_extension(&n, &m, &[], 512).unwrap();
    let l = trace.last().unwrap().limit_estimate.clone();
    let d = cesaro_density(&trace, &l, &Value::ratio(1, 10)).unwrap();
    assert!(d <= num_rational::BigRational::new(1.into(), 4.into()), "density {d}");
}
