//! Wager sets: membership, bounds, order structure and the scaling query.

use duel::wagerset::{scales_into, ExponentRange, Sieve};
use duel::{Result, Value, WagerSet};

fn main() -> Result<()> {
    let sets = [
        ("{1, 2}", WagerSet::finite([Value::one(), Value::int(2)])?),
        ("Z+", WagerSet::integers()),
        ("odd integers", WagerSet::odd_integers()),
        ("{1 + 1/n}", WagerSet::HarmonicShifted),
        ("{1/n}", WagerSet::HarmonicReciprocal),
        ("{2^n : n <= 0}", WagerSet::geometric(Value::int(2), ExponentRange::NonPositive)),
        ("Z+ minus cubes", WagerSet::sieve(Sieve::ProductWithPolynomial { coeffs: vec![0, 0, 1] })),
    ];
    for (name, s) in &sets {
        let b = s.bounds()?;
        println!(
            "{name:<16} 3/2 in S: {:<5}  27 in S: {:<5}  sup: {:<8} well ordered: {}",
            s.contains(&Value::ratio(3, 2))?,
            s.contains(&Value::int(27))?,
            b.sup.finite().map_or("inf".to_string(), |v| v.to_string()),
            s.is_well_ordered()?,
        );
    }

    let pairs = [
        ("{1, 2} into Z+", WagerSet::finite([Value::one(), Value::int(2)])?, WagerSet::integers()),
        ("{1, pi} into Z+", WagerSet::finite([Value::one(), Value::pi()])?, WagerSet::integers()),
        ("Z+ into odds", WagerSet::integers(), WagerSet::odd_integers()),
        ("evens into Z+", WagerSet::multiples_of(Value::int(2)), WagerSet::integers()),
    ];
    for (name, a, b) in &pairs {
        println!("{name:<18} {}", serde_json::to_string(&scales_into(a, b)?)?);
    }
    Ok(())
}
