use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use duel::wagerset::{scales_into, Sieve};
use duel::{ScalingAnswer, Value, WagerSet};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Every map `x -> r x` sending `A` into `B` sends `min A` to some `b`, so `r = b / min A` is exhaustive.
fn oracle(a: &BTreeSet<BigRational>, b: &BTreeSet<BigRational>) -> bool {
    let lo = a.iter().next().expect("nonempty");
    b.iter().any(|y| {
        let r = y / lo;
        a.iter().all(|x| b.contains(&(&r * x)))
    })
}

fn set_of(xs: &BTreeSet<BigRational>) -> WagerSet {
    WagerSet::finite(xs.iter().cloned().map(Value::from_rational)).unwrap()
}

fn rationals(max: usize) -> impl Strategy<Value = BTreeSet<BigRational>> {
    prop::collection::btree_set((1i64..=12, 1i64..=4).prop_map(|(n, d)| q(n, d)), 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn finite_scaling_matches_oracle(a in rationals(4), b in rationals(5)) {
        let ans = scales_into(&set_of(&a), &set_of(&b)).unwrap();
        match &ans {
            ScalingAnswer::Yes { r } => {
                prop_assert!(oracle(&a, &b));
                let bs = set_of(&b);
                for x in &a {
                    prop_assert!(bs.contains(&r.mul_rational(x)).unwrap());
                }
            }
            ScalingAnswer::No => prop_assert!(!oracle(&a, &b)),
            ScalingAnswer::Unknown => prop_assert!(false, "finite pairs are decidable"),
        }
    }

    #[test]
    fn every_set_scales_into_its_own_multiple(a in rationals(4), k in 1i64..=6) {
        let b: BTreeSet<BigRational> = a.iter().map(|x| x * q(k, 1)).collect();
        prop_assert!(scales_into(&set_of(&a), &set_of(&b)).unwrap().witness().is_some());
    }

    #[test]
    fn finite_integer_sets_scale_into_the_integers(a in prop::collection::btree_set(1i64..=50, 1..=6)) {
        let a = WagerSet::finite(a.into_iter().map(Value::int)).unwrap();
        prop_assert!(scales_into(&a, &WagerSet::integers()).unwrap().witness().is_some());
    }
}

#[test]
fn rationally_independent_elements_do_not_scale_into_a_lattice() {
    let a = WagerSet::finite([Value::one(), Value::pi()]).unwrap();
    assert_eq!(scales_into(&a, &WagerSet::integers()).unwrap(), ScalingAnswer::No);
}

#[test]
fn integers_do_not_scale_into_a_density_one_sieve() {
    let b = WagerSet::sieve(Sieve::ProductWithPolynomial { coeffs: vec![0, 0, 1] });
    assert_eq!(scales_into(&WagerSet::integers(), &b).unwrap(), ScalingAnswer::No);
}

#[test]
fn evens_scale_into_the_integers_but_not_the_odds() {
    let evens = WagerSet::multiples_of(Value::int(2));
    assert!(scales_into(&evens, &WagerSet::integers()).unwrap().witness().is_some());
    let odds = WagerSet::odd_integers();
    assert!(scales_into(&odds, &WagerSet::integers()).unwrap().witness().is_some());
    assert_eq!(scales_into(&WagerSet::integers(), &odds).unwrap(), ScalingAnswer::No);
}
