//! Deterministic dense enumerations of `S \ {0}` and window searches over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{ExponentRange, WagerSet};
use crate::error::{Error, Result};
use crate::value::Value;

/// Elements scanned by the generic window search before giving up.
pub const DEFAULT_WINDOW_SCAN: usize = 100_000;

/// Dyadic levels tried by the interval window search.
const MAX_DYADIC_LEVEL: usize = 4096;

type Stream = Box<dyn Iterator<Item = Value> + Send>;

/// An infinite, deterministic stream dense in `S \ {0}`.
pub struct DenseEnumeration {
    label: String,
    inner: Stream,
}

impl std::fmt::Debug for DenseEnumeration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseEnumeration").field("label", &self.label).finish()
    }
}

impl DenseEnumeration {
    pub fn label(&self) -> &str {
        &self.label
    }
}

impl Iterator for DenseEnumeration {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        self.inner.next()
    }
}

fn dyadic_unit() -> impl Iterator<Item = BigRational> {
    // 1, 1/2, 1/4, 3/4, 1/8, 3/8, ...
    std::iter::once(BigRational::one()).chain((1u32..).flat_map(|level| {
        let den = BigInt::one() << level as usize;
        (0..(1u64 << (level - 1).min(62))).map(move |i| BigRational::new(BigInt::from(2 * i + 1), den.clone()))
    }))
}

fn half_line_offsets() -> impl Iterator<Item = BigRational> {
    // Block k lists j/2^k for 1 <= j <= k 2^k, skipping points already listed by block k-1.
    (1u32..).flat_map(|k| {
        let den = 1u64 << k.min(62);
        let top = k as u64 * den;
        let prev_top = (k as u64 - 1) * den;
        (1..=top)
            .filter(move |j| j % 2 == 1 || *j > prev_top)
            .map(move |j| BigRational::new(BigInt::from(j), BigInt::from(den)))
    })
}

fn zigzag(range: ExponentRange) -> Box<dyn Iterator<Item = i64> + Send> {
    match range {
        ExponentRange::NonNegative => Box::new(0i64..),
        ExponentRange::NonPositive => Box::new((0i64..).map(|n| -n)),
        ExponentRange::All => Box::new(std::iter::once(0).chain((1i64..).flat_map(|n| [n, -n]))),
    }
}

fn rational_pow(b: &BigRational, n: i64) -> BigRational {
    let p = num_traits::pow(b.clone(), n.unsigned_abs() as usize);
    if n < 0 {
        p.recip()
    } else {
        p
    }
}

impl WagerSet {
    /// Human-readable name of the enumeration order, recorded in run metadata.
    pub fn enumeration_label(&self) -> String {
        match self {
            WagerSet::Finite { .. } => "finite-cyclic".into(),
            WagerSet::IntegerMultiples { .. } => "multiples-ascending".into(),
            WagerSet::ClosedInterval { .. } => "interval-dyadic-breadth-first".into(),
            WagerSet::HalfLine { .. } => "half-line-dyadic-blocks".into(),
            WagerSet::GeometricPowers { .. } => "geometric-exponent-zigzag".into(),
            WagerSet::HarmonicShifted => "harmonic-shifted-index".into(),
            WagerSet::HarmonicReciprocal => "harmonic-reciprocal-index".into(),
            WagerSet::IntegerSieve { .. } => "sieve-survivors-ascending".into(),
            WagerSet::WithZero { inner } => inner.enumeration_label(),
            WagerSet::UnionOf { parts } => format!(
                "round-robin({})",
                parts.iter().map(|p| p.enumeration_label()).collect::<Vec<_>>().join(",")
            ),
            WagerSet::Scaled { inner, .. } => format!("scaled({})", inner.enumeration_label()),
        }
    }

    pub fn dense_enumeration(&self) -> Result<DenseEnumeration> {
        Ok(DenseEnumeration {
            label: self.enumeration_label(),
            inner: self.stream()?,
        })
    }

    fn stream(&self) -> Result<Stream> {
        self.validate()?;
        Ok(match self {
            WagerSet::Finite { elements } => {
                if elements.is_empty() {
                    return Err(Error::EmptySet);
                }
                Box::new(elements.clone().into_iter().cycle())
            }
            WagerSet::IntegerMultiples { step } => {
                let step = step.clone();
                Box::new((1i64..).map(move |k| step.mul_rational(&BigRational::from_integer(k.into()))))
            }
            WagerSet::ClosedInterval { lo, hi } => {
                if lo.try_eq(hi)? {
                    if lo.is_zero() {
                        return Err(Error::EmptySet);
                    }
                    Box::new(std::iter::repeat(lo.clone()))
                } else {
                    let (lo, width) = (lo.clone(), hi - lo);
                    Box::new(dyadic_unit().map(move |d| &lo + &width.mul_rational(&d)))
                }
            }
            WagerSet::HalfLine { lo } => {
                let lo = lo.clone();
                let offsets: Stream = Box::new(half_line_offsets().map(Value::from_rational));
                if lo.is_zero() {
                    offsets
                } else {
                    // Keep lo itself in the stream: it is the least element.
                    Box::new(std::iter::once(lo.clone()).chain(offsets.map(move |d| &lo + &d)))
                }
            }
            WagerSet::GeometricPowers { base, exponents } => {
                let b = base.as_rational().expect("validated").clone();
                Box::new(zigzag(*exponents).map(move |n| Value::from_rational(rational_pow(&b, n))))
            }
            WagerSet::HarmonicShifted => {
                Box::new((1i64..).map(|n| Value::from_rational(BigRational::one() + BigRational::new(1.into(), n.into()))))
            }
            WagerSet::HarmonicReciprocal => Box::new((1i64..).map(|n| Value::ratio(1, n))),
            WagerSet::IntegerSieve { excluded } => {
                let excluded = excluded.clone();
                Box::new(
                    (1i64..)
                        .filter(move |n| !excluded.excludes(&BigInt::from(*n)))
                        .map(Value::int),
                )
            }
            WagerSet::WithZero { inner } => inner.stream()?,
            WagerSet::UnionOf { parts } => {
                let mut streams = Vec::new();
                for p in parts {
                    match p.stream() {
                        Ok(s) => streams.push(s),
                        Err(Error::EmptySet) => {}
                        Err(e) => return Err(e),
                    }
                }
                if streams.is_empty() {
                    return Err(Error::EmptySet);
                }
                let mut i = 0usize;
                Box::new(std::iter::from_fn(move || {
                    let n = streams.len();
                    let v = streams[i % n].next();
                    i += 1;
                    v
                }))
            }
            WagerSet::Scaled { r, inner } => {
                let r = r.clone();
                let inner = inner.stream()?;
                Box::new(inner.map(move |v| v.checked_mul(&r).expect("scaling by a validated factor")))
            }
        })
    }

    /// The first enumerated element inside the open window `(lo, hi)`.
    pub fn first_in_window(&self, lo: &Value, hi: &Value) -> Result<Option<Value>> {
        self.first_in_window_with(lo, hi, DEFAULT_WINDOW_SCAN)
    }

    pub fn first_in_window_with(&self, lo: &Value, hi: &Value, scan: usize) -> Result<Option<Value>> {
        if !lo.try_lt(hi)? || !hi.is_positive()? {
            return Ok(None);
        }
        let inside = |x: &Value| -> Result<bool> { Ok(lo.try_lt(x)? && x.try_lt(hi)?) };
        let answer = match self {
            WagerSet::Finite { elements } => {
                for e in elements {
                    if inside(e)? {
                        return Ok(Some(e.clone()));
                    }
                }
                return Ok(None);
            }
            WagerSet::IntegerMultiples { step } => {
                let k: BigInt = lo.checked_div(step)?.try_floor()? + BigInt::one();
                let k = k.max(BigInt::one());
                Some(step.mul_rational(&BigRational::from_integer(k)))
            }
            WagerSet::HarmonicShifted => {
                // Elements decrease along the enumeration: take the largest one below hi.
                let one = Value::one();
                if !one.try_lt(hi)? {
                    return Ok(None);
                }
                let n = if Value::int(2).try_lt(hi)? {
                    BigInt::one()
                } else {
                    (hi - &one).recip()?.try_floor()? + 1
                };
                Some(Value::from_rational(BigRational::one() + BigRational::from_integer(n).recip()))
            }
            WagerSet::HarmonicReciprocal => {
                let n = if Value::one().try_lt(hi)? {
                    BigInt::one()
                } else {
                    hi.recip()?.try_floor()? + 1
                };
                Some(Value::from_rational(BigRational::from_integer(n).recip()))
            }
            WagerSet::ClosedInterval { lo: a, hi: b } if !a.try_eq(b)? => {
                let width = b - a;
                let dl = to_unit(lo, a, &width)?;
                let dh = to_unit(hi, a, &width)?;
                let one = Value::one();
                if !dl.try_lt(&one)? || !dh.is_positive()? {
                    return Ok(None);
                }
                if one.try_lt(&dh)? {
                    return Ok(Some(b.clone()));
                }
                let mut found = None;
                for level in 1..=MAX_DYADIC_LEVEL {
                    let den = BigRational::from_integer(BigInt::one() << level);
                    let scaled = dl.mul_rational(&den);
                    let mut j: BigInt = scaled.try_floor()? + BigInt::one();
                    if !j.is_positive() {
                        j = BigInt::one();
                    }
                    if (&j % 2u32).is_zero() {
                        j += 1;
                    }
                    let d = BigRational::new(j, den.to_integer());
                    if Value::from_rational(d.clone()).try_lt(&dh)? {
                        found = Some(a + &width.mul_rational(&d));
                        break;
                    }
                }
                match found {
                    Some(x) => Some(x),
                    None => return self.scan_window(lo, hi, scan),
                }
            }
            _ => return self.scan_window(lo, hi, scan),
        };
        match answer {
            Some(x) if inside(&x)? => Ok(Some(x)),
            _ => Ok(None),
        }
    }

    fn scan_window(&self, lo: &Value, hi: &Value, scan: usize) -> Result<Option<Value>> {
        for x in self.dense_enumeration()?.take(scan) {
            if lo.try_lt(&x)? && x.try_lt(hi)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// `(x - origin) / width`
fn to_unit(x: &Value, origin: &Value, width: &Value) -> Result<Value> {
    (x - origin).checked_div(width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wagerset::Sieve;

    fn take(s: &WagerSet, n: usize) -> Vec<String> {
        s.dense_enumeration().unwrap().take(n).map(|v| v.to_string()).collect()
    }

    #[test]
    fn catalogue_orders() {
        let f = WagerSet::finite([Value::int(1), Value::int(2)]).unwrap();
        assert_eq!(take(&f, 4), ["1", "2", "1", "2"]);
        let i = WagerSet::interval(Value::zero(), Value::one());
        assert_eq!(take(&i, 7), ["1", "1/2", "1/4", "3/4", "1/8", "3/8", "5/8"]);
        assert_eq!(take(&WagerSet::HarmonicShifted, 3), ["2", "3/2", "4/3"]);
        assert_eq!(take(&WagerSet::HarmonicReciprocal, 3), ["1", "1/2", "1/3"]);
        assert_eq!(take(&WagerSet::odd_integers(), 4), ["1", "3", "5", "7"]);
        let g = WagerSet::geometric(Value::int(2), ExponentRange::All);
        assert_eq!(take(&g, 5), ["1", "2", "1/2", "4", "1/4"]);
        let h = WagerSet::half_line(Value::zero());
        assert_eq!(take(&h, 3), ["1/2", "1", "1/4"]);
        let cubes = WagerSet::sieve(Sieve::ProductWithPolynomial { coeffs: vec![0, 0, 1] });
        assert_eq!(take(&cubes, 7), ["2", "3", "4", "5", "6", "7", "9"]);
    }

    #[test]
    fn empty_sets_error() {
        let e = WagerSet::Finite { elements: vec![] };
        assert!(matches!(e.dense_enumeration(), Err(Error::EmptySet)));
        let z = WagerSet::with_zero(WagerSet::interval(Value::zero(), Value::zero()));
        assert!(matches!(z.dense_enumeration(), Err(Error::EmptySet)));
    }

    #[test]
    fn half_line_blocks_are_dense_and_distinct() {
        let h = WagerSet::half_line(Value::zero());
        let first: Vec<Value> = h.dense_enumeration().unwrap().take(2 + 6 + 16).collect();
        let mut sorted = crate::wagerset::sort_dedup(first.clone()).unwrap();
        assert_eq!(sorted.len(), first.len());
        // Blocks 1..=3 cover every multiple of 1/8 in (0, 3].
        sorted.retain(|v| v.try_le(&Value::int(3)).unwrap());
        assert_eq!(sorted.len(), 24);
    }

    #[test]
    fn window_shortcuts_agree_with_scan() {
        let sets = [
            WagerSet::HarmonicShifted,
            WagerSet::HarmonicReciprocal,
            WagerSet::interval(Value::zero(), Value::one()),
            WagerSet::interval(Value::ratio(1, 3), Value::int(2)),
            WagerSet::multiples_of(Value::ratio(3, 2)),
            WagerSet::finite([Value::int(1), Value::int(5), Value::int(9)]).unwrap(),
        ];
        let windows = [(0, 1, 2, 1), (1, 1, 3, 2), (5, 4, 6, 4), (1, 10, 1, 8), (7, 5, 11, 5), (0, 1, 1, 100), (3, 1, 10, 1)];
        for s in &sets {
            for (a, b, c, d) in windows {
                let (lo, hi) = (Value::ratio(a, b), Value::ratio(c, d));
                let fast = s.first_in_window(&lo, &hi).unwrap();
                let slow = s.scan_window(&lo, &hi, 20_000).unwrap();
                assert_eq!(fast, slow, "{s:?} window ({lo}, {hi})");
            }
        }
    }

    #[test]
    fn closure_window_pick() {
        let i = WagerSet::interval(Value::zero(), Value::one());
        assert_eq!(i.first_in_window(&Value::zero(), &Value::int(2)).unwrap(), Some(Value::one()));
    }
}
