use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integers removed from the positive integers by an `IntegerSieve`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "camelCase")]
pub enum Sieve {
    /// An explicit finite list.
    Finite { values: Vec<u64> },
    /// Every multiple of `modulus`; `modulus = 2` leaves the odd integers.
    MultiplesOf { modulus: u64 },
    /// `{ n * phi(n) : n >= 1 }` with `phi(n) = sum coeffs[i] * n^i`.
    ProductWithPolynomial { coeffs: Vec<u64> },
}

impl Sieve {
    pub fn validate(&self) -> Result<()> {
        match self {
            Sieve::Finite { values } => {
                if values.contains(&0) {
                    return Err(Error::InvalidSet("sieve values must be positive".into()));
                }
            }
            Sieve::MultiplesOf { modulus } => {
                if *modulus < 2 {
                    return Err(Error::InvalidSet(
                        "sieve modulus must be at least 2".into(),
                    ));
                }
            }
            Sieve::ProductWithPolynomial { coeffs } => {
                if coeffs.iter().all(|c| *c == 0) {
                    return Err(Error::InvalidSet(
                        "sieve polynomial must have a nonzero coefficient".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn phi(coeffs: &[u64], n: &BigInt) -> BigInt {
        coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * n + BigInt::from(*c))
    }

    /// `n * phi(n)`, strictly increasing in `n >= 1`.
    pub fn product_term(coeffs: &[u64], n: &BigInt) -> BigInt {
        n * Sieve::phi(coeffs, n)
    }

    pub fn excludes(&self, x: &BigInt) -> bool {
        if !x.is_positive() {
            return false;
        }
        match self {
            Sieve::Finite { values } => x.to_u64().is_some_and(|v| values.contains(&v)),
            Sieve::MultiplesOf { modulus } => x.is_multiple_of(&BigInt::from(*modulus)),
            Sieve::ProductWithPolynomial { coeffs } => {
                // phi(n) >= 1 for n >= 1, so n <= x; bisect on the increasing map.
                let (mut lo, mut hi) = (BigInt::one(), x.clone());
                while lo <= hi {
                    let mid: BigInt = (&lo + &hi) >> 1;
                    match Sieve::product_term(coeffs, &mid).cmp(x) {
                        std::cmp::Ordering::Equal => return true,
                        std::cmp::Ordering::Less => lo = mid + 1,
                        std::cmp::Ordering::Greater => hi = mid - 1,
                    }
                }
                false
            }
        }
    }

    /// Smallest `k` such that no multiple of `k` is excluded, searched up to `bound`.
    /// `Ok(None)` is an exact "no ideal survives".
    pub fn surviving_ideal(&self, bound: u64) -> Result<Option<u64>> {
        match self {
            Sieve::Finite { values } => {
                let k = (1..=bound)
                    .find(|k| values.iter().all(|v| v % k != 0))
                    .ok_or_else(|| Error::Unsupported("no surviving ideal below the bound".into()))?;
                Ok(Some(k))
            }
            // k*m is excluded for every k.
            Sieve::MultiplesOf { .. } => Ok(None),
            // k*phi(k) is an excluded multiple of k.
            Sieve::ProductWithPolynomial { .. } => Ok(None),
        }
    }

    /// Ideals `rZ+` (r <= bound) wholly covered by the excluded set, checked up to `bound`.
    pub fn covered_ideals(&self, bound: u64) -> Vec<u64> {
        match self {
            Sieve::Finite { .. } => Vec::new(),
            Sieve::MultiplesOf { modulus } => vec![*modulus],
            Sieve::ProductWithPolynomial { .. } => (1..=bound.min(1000))
                .filter(|r| {
                    (1..=bound / r).all(|k| self.excludes(&BigInt::from(k * r)))
                })
                .collect(),
        }
    }

    /// Smallest positive integer that survives the sieve.
    pub fn first_survivor(&self, bound: u64) -> Result<u64> {
        (1..=bound.max(2))
            .find(|n| !self.excludes(&BigInt::from(*n)))
            .ok_or_else(|| Error::InvalidSet("sieve excludes every integer below the bound".into()))
    }

    /// Excluded integers up to `x`, ascending.
    pub fn excluded_up_to(&self, x: u64) -> Vec<u64> {
        match self {
            Sieve::Finite { values } => {
                let mut v: Vec<u64> = values.iter().copied().filter(|v| *v <= x).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            Sieve::MultiplesOf { modulus } => (1..=x / modulus).map(|k| k * modulus).collect(),
            Sieve::ProductWithPolynomial { coeffs } => {
                let mut out = Vec::new();
                let mut n = BigInt::one();
                loop {
                    let t = Sieve::product_term(coeffs, &n);
                    match t.to_u64() {
                        Some(v) if v <= x => out.push(v),
                        _ => break,
                    }
                    n += 1;
                }
                out
            }
        }
    }
}
