//! Wager sets: a closed catalogue of subsets of the nonnegative reals with
//! exact structural queries.

mod enumerate;
mod scaling;
mod sieve;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;

pub use enumerate::{DenseEnumeration, DEFAULT_WINDOW_SCAN};
pub use scaling::{scales_into, scales_into_with, ScalingAnswer, ScalingConfig};
pub use sieve::Sieve;

pub const DEFAULT_SIEVE_BOUND: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExponentRange {
    All,
    NonPositive,
    NonNegative,
}

impl ExponentRange {
    pub fn admits(self, n: i64) -> bool {
        match self {
            ExponentRange::All => true,
            ExponentRange::NonPositive => n <= 0,
            ExponentRange::NonNegative => n >= 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum WagerSet {
    Finite { elements: Vec<Value> },
    /// `{step, 2 step, 3 step, ...}`
    IntegerMultiples { step: Value },
    ClosedInterval { lo: Value, hi: Value },
    /// `[lo, inf)`
    HalfLine { lo: Value },
    /// `{base^n}` over the exponent range; the base must be rational.
    GeometricPowers { base: Value, exponents: ExponentRange },
    /// `{1 + 1/n : n >= 1}`
    HarmonicShifted,
    /// `{1/n : n >= 1}`
    HarmonicReciprocal,
    /// Positive integers minus the sieve.
    IntegerSieve { excluded: Sieve },
    WithZero { inner: Box<WagerSet> },
    UnionOf { parts: Vec<WagerSet> },
    Scaled { r: Value, inner: Box<WagerSet> },
}

/// Sup or inf that may be infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extended {
    Finite(Value),
    Infinity(InfinityTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "Infinity")]
    Infinity,
}

impl Extended {
    pub const INFINITY: Extended = Extended::Infinity(InfinityTag::Infinity);

    pub fn finite(&self) -> Option<&Value> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity(_))
    }

    fn try_cmp(&self, other: &Extended) -> Result<Ordering> {
        Ok(match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.try_cmp(b)?,
            (Extended::Finite(_), _) => Ordering::Less,
            (_, Extended::Finite(_)) => Ordering::Greater,
            _ => Ordering::Equal,
        })
    }

    fn scale(&self, r: &Value) -> Result<Extended> {
        Ok(match self {
            Extended::Finite(v) => Extended::Finite(v.checked_mul(r)?),
            inf => inf.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bounds {
    pub sup: Extended,
    /// Inf of `S \ {0}`; `Infinity` when that set is empty.
    pub inf_nonzero: Extended,
    pub bounded_away_from_zero: bool,
    pub contains_zero: bool,
}

fn positive_integer(x: &Value) -> Option<BigInt> {
    x.as_integer().filter(|n| n.is_positive())
}

impl WagerSet {
    pub fn finite(elements: impl IntoIterator<Item = Value>) -> Result<WagerSet> {
        let mut elements: Vec<Value> = elements.into_iter().collect();
        let mut err = None;
        elements.sort_by(|a, b| {
            a.try_cmp(b).unwrap_or_else(|e| {
                err.get_or_insert(e);
                Ordering::Equal
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        elements.dedup();
        let set = WagerSet::Finite { elements };
        set.validate()?;
        Ok(set)
    }

    pub fn integers() -> WagerSet {
        WagerSet::IntegerMultiples { step: Value::one() }
    }

    pub fn multiples_of(step: Value) -> WagerSet {
        WagerSet::IntegerMultiples { step }
    }

    pub fn interval(lo: Value, hi: Value) -> WagerSet {
        WagerSet::ClosedInterval { lo, hi }
    }

    pub fn half_line(lo: Value) -> WagerSet {
        WagerSet::HalfLine { lo }
    }

    pub fn geometric(base: Value, exponents: ExponentRange) -> WagerSet {
        WagerSet::GeometricPowers { base, exponents }
    }

    pub fn sieve(excluded: Sieve) -> WagerSet {
        WagerSet::IntegerSieve { excluded }
    }

    pub fn odd_integers() -> WagerSet {
        WagerSet::sieve(Sieve::MultiplesOf { modulus: 2 })
    }

    pub fn with_zero(inner: WagerSet) -> WagerSet {
        WagerSet::WithZero {
            inner: Box::new(inner),
        }
    }

    pub fn scaled(r: Value, inner: WagerSet) -> WagerSet {
        WagerSet::Scaled {
            r,
            inner: Box::new(inner),
        }
    }

    /// Checks descriptor invariants. Sieve lint findings are warnings, see [`WagerSet::lint`].
    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: &Value, what: &str| -> Result<()> {
            if v.is_negative()? {
                return Err(Error::InvalidSet(format!("{what} must be nonnegative, got {v}")));
            }
            Ok(())
        };
        match self {
            WagerSet::Finite { elements } => {
                for w in elements.windows(2) {
                    if !w[0].try_lt(&w[1])? {
                        return Err(Error::InvalidSet(
                            "finite elements must be sorted and distinct".into(),
                        ));
                    }
                }
                for e in elements {
                    if !e.is_positive()? {
                        return Err(Error::InvalidSet(format!(
                            "finite elements must be positive (wrap in withZero for 0), got {e}"
                        )));
                    }
                }
            }
            WagerSet::IntegerMultiples { step } => {
                if !step.is_positive()? {
                    return Err(Error::InvalidSet("step must be positive".into()));
                }
            }
            WagerSet::ClosedInterval { lo, hi } => {
                nonneg(lo, "lo")?;
                if hi.try_lt(lo)? {
                    return Err(Error::InvalidSet("interval needs lo <= hi".into()));
                }
            }
            WagerSet::HalfLine { lo } => nonneg(lo, "lo")?,
            WagerSet::GeometricPowers { base, .. } => {
                let b = base.as_rational().ok_or_else(|| {
                    Error::Unsupported("geometric powers need a rational base".into())
                })?;
                if !b.is_positive() || b.is_one() {
                    return Err(Error::InvalidSet("base must be positive and not 1".into()));
                }
            }
            WagerSet::HarmonicShifted | WagerSet::HarmonicReciprocal => {}
            WagerSet::IntegerSieve { excluded } => excluded.validate()?,
            WagerSet::WithZero { inner } => inner.validate()?,
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    p.validate()?;
                }
            }
            WagerSet::Scaled { r, inner } => {
                if !r.is_positive()? {
                    return Err(Error::InvalidSet("scale must be positive".into()));
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Non-fatal findings: sieves whose excluded set swallows a whole ideal.
    pub fn lint(&self, sieve_bound: u64) -> Vec<String> {
        let mut out = Vec::new();
        self.lint_into(sieve_bound, &mut out);
        out
    }

    fn lint_into(&self, bound: u64, out: &mut Vec<String>) {
        match self {
            WagerSet::IntegerSieve { excluded } => {
                for r in excluded.covered_ideals(bound) {
                    out.push(format!(
                        "sieve excludes the full ideal {{{r}, {}, {}, ...}} (checked up to {bound})",
                        2 * r,
                        3 * r
                    ));
                }
            }
            WagerSet::WithZero { inner } | WagerSet::Scaled { inner, .. } => {
                inner.lint_into(bound, out)
            }
            WagerSet::UnionOf { parts } => parts.iter().for_each(|p| p.lint_into(bound, out)),
            _ => {}
        }
    }

    /// Exact membership.
    pub fn contains(&self, x: &Value) -> Result<bool> {
        if x.is_negative()? {
            return Ok(false);
        }
        Ok(match self {
            WagerSet::Finite { elements } => {
                for e in elements {
                    if e.try_eq(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            WagerSet::IntegerMultiples { step } => match x.rational_multiple_of(step)? {
                Some(q) => q.is_integer() && q.is_positive(),
                None => false,
            },
            WagerSet::ClosedInterval { lo, hi } => lo.try_le(x)? && x.try_le(hi)?,
            WagerSet::HalfLine { lo } => lo.try_le(x)?,
            WagerSet::GeometricPowers { base, exponents } => {
                geometric_exponent(base, x)?.is_some_and(|n| exponents.admits(n))
            }
            WagerSet::HarmonicShifted => match x.try_is_rational()? {
                true => {
                    let q = x.rational_part();
                    q > &BigRational::one() && (q - BigRational::one()).recip().is_integer()
                }
                false => false,
            },
            WagerSet::HarmonicReciprocal => match x.try_is_rational()? {
                true => {
                    let q = x.rational_part();
                    q.is_positive() && q <= &BigRational::one() && q.recip().is_integer()
                }
                false => false,
            },
            WagerSet::IntegerSieve { excluded } => {
                if !x.try_is_rational()? {
                    return Ok(false);
                }
                positive_integer(x).is_some_and(|n| !excluded.excludes(&n))
            }
            WagerSet::WithZero { inner } => x.is_zero() || inner.contains(x)?,
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    if p.contains(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            WagerSet::Scaled { r, inner } => inner.contains(&x.checked_div(r)?)?,
        })
    }

    /// Membership in the topological closure.
    pub fn closure_contains(&self, x: &Value) -> Result<bool> {
        if x.is_negative()? {
            return Ok(false);
        }
        Ok(match self {
            WagerSet::GeometricPowers { base, exponents } => {
                let b = base.as_rational().expect("validated rational base");
                let zero_limit = match exponents {
                    ExponentRange::All => true,
                    ExponentRange::NonPositive => b > &BigRational::one(),
                    ExponentRange::NonNegative => b < &BigRational::one(),
                };
                (zero_limit && x.is_zero()) || self.contains(x)?
            }
            WagerSet::HarmonicShifted => x.try_eq(&Value::one())? || self.contains(x)?,
            WagerSet::HarmonicReciprocal => x.is_zero() || self.contains(x)?,
            WagerSet::WithZero { inner } => x.is_zero() || inner.closure_contains(x)?,
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    if p.closure_contains(x)? {
                        return Ok(true);
                    }
                }
                false
            }
            WagerSet::Scaled { r, inner } => inner.closure_contains(&x.checked_div(r)?)?,
            // Finite, integer lattices, sieves and closed intervals are closed.
            _ => self.contains(x)?,
        })
    }

    pub fn bounds(&self) -> Result<Bounds> {
        let fin = |v: Value| Extended::Finite(v);
        let b = match self {
            WagerSet::Finite { elements } => match (elements.first(), elements.last()) {
                (Some(lo), Some(hi)) => Bounds {
                    sup: fin(hi.clone()),
                    inf_nonzero: fin(lo.clone()),
                    bounded_away_from_zero: true,
                    contains_zero: false,
                },
                _ => Bounds {
                    sup: fin(Value::zero()),
                    inf_nonzero: Extended::INFINITY,
                    bounded_away_from_zero: true,
                    contains_zero: false,
                },
            },
            WagerSet::IntegerMultiples { step } => Bounds {
                sup: Extended::INFINITY,
                inf_nonzero: fin(step.clone()),
                bounded_away_from_zero: true,
                contains_zero: false,
            },
            WagerSet::ClosedInterval { lo, hi } => {
                if hi.is_zero() {
                    Bounds {
                        sup: fin(Value::zero()),
                        inf_nonzero: Extended::INFINITY,
                        bounded_away_from_zero: true,
                        contains_zero: true,
                    }
                } else {
                    Bounds {
                        sup: fin(hi.clone()),
                        inf_nonzero: fin(lo.clone()),
                        bounded_away_from_zero: lo.is_positive()?,
                        contains_zero: lo.is_zero(),
                    }
                }
            }
            WagerSet::HalfLine { lo } => Bounds {
                sup: Extended::INFINITY,
                inf_nonzero: fin(lo.clone()),
                bounded_away_from_zero: lo.is_positive()?,
                contains_zero: lo.is_zero(),
            },
            WagerSet::GeometricPowers { base, exponents } => {
                let big = base.as_rational().expect("validated") > &BigRational::one();
                // Orient so that "up" means towards infinity.
                let (up, down) = match (exponents, big) {
                    (ExponentRange::All, _) => (true, true),
                    (ExponentRange::NonNegative, true) | (ExponentRange::NonPositive, false) => {
                        (true, false)
                    }
                    _ => (false, true),
                };
                Bounds {
                    sup: if up { Extended::INFINITY } else { fin(Value::one()) },
                    inf_nonzero: fin(if down { Value::zero() } else { Value::one() }),
                    bounded_away_from_zero: !down,
                    contains_zero: false,
                }
            }
            WagerSet::HarmonicShifted => Bounds {
                sup: fin(Value::int(2)),
                inf_nonzero: fin(Value::one()),
                bounded_away_from_zero: true,
                contains_zero: false,
            },
            WagerSet::HarmonicReciprocal => Bounds {
                sup: fin(Value::one()),
                inf_nonzero: fin(Value::zero()),
                bounded_away_from_zero: false,
                contains_zero: false,
            },
            WagerSet::IntegerSieve { excluded } => Bounds {
                sup: Extended::INFINITY,
                inf_nonzero: fin(Value::from(excluded.first_survivor(DEFAULT_SIEVE_BOUND)? as i64)),
                bounded_away_from_zero: true,
                contains_zero: false,
            },
            WagerSet::WithZero { inner } => {
                let mut b = inner.bounds()?;
                b.contains_zero = true;
                b
            }
            WagerSet::UnionOf { parts } => {
                let mut acc: Option<Bounds> = None;
                for p in parts {
                    let b = p.bounds()?;
                    acc = Some(match acc {
                        None => b,
                        Some(a) => Bounds {
                            sup: if a.sup.try_cmp(&b.sup)? == Ordering::Less { b.sup } else { a.sup },
                            inf_nonzero: if b.inf_nonzero.try_cmp(&a.inf_nonzero)? == Ordering::Less {
                                b.inf_nonzero
                            } else {
                                a.inf_nonzero
                            },
                            bounded_away_from_zero: a.bounded_away_from_zero
                                && b.bounded_away_from_zero,
                            contains_zero: a.contains_zero || b.contains_zero,
                        },
                    });
                }
                acc.unwrap_or(Bounds {
                    sup: fin(Value::zero()),
                    inf_nonzero: Extended::INFINITY,
                    bounded_away_from_zero: true,
                    contains_zero: false,
                })
            }
            WagerSet::Scaled { r, inner } => {
                let b = inner.bounds()?;
                Bounds {
                    sup: b.sup.scale(r)?,
                    inf_nonzero: b.inf_nonzero.scale(r)?,
                    ..b
                }
            }
        };
        Ok(b)
    }

    /// No point of the nonnegative reals is approached from above by elements of the set.
    pub fn is_well_ordered(&self) -> Result<bool> {
        Ok(match self {
            WagerSet::Finite { .. } | WagerSet::IntegerMultiples { .. } | WagerSet::IntegerSieve { .. } => {
                true
            }
            WagerSet::ClosedInterval { lo, hi } => lo.try_eq(hi)?,
            WagerSet::HalfLine { .. } => false,
            WagerSet::GeometricPowers { base, exponents } => {
                let big = base.as_rational().expect("validated") > &BigRational::one();
                matches!(
                    (exponents, big),
                    (ExponentRange::NonNegative, true) | (ExponentRange::NonPositive, false)
                )
            }
            WagerSet::HarmonicShifted | WagerSet::HarmonicReciprocal => false,
            WagerSet::WithZero { inner } | WagerSet::Scaled { inner, .. } => inner.is_well_ordered()?,
            // A finite union of well-ordered sets is well ordered: the closure of a finite
            // union is the union of closures, so no component can accumulate onto another.
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    if !p.is_well_ordered()? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// The closure has no accumulation point at all (every bounded region meets finitely many points).
    pub fn is_locally_finite(&self) -> Result<bool> {
        Ok(match self {
            WagerSet::GeometricPowers { .. } => self.is_well_ordered()?,
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    if !p.is_locally_finite()? {
                        return Ok(false);
                    }
                }
                true
            }
            WagerSet::WithZero { inner } | WagerSet::Scaled { inner, .. } => inner.is_locally_finite()?,
            other => other.is_well_ordered()?,
        })
    }

    /// Infinitely many elements inside some bounded region.
    pub fn has_finite_accumulation(&self) -> Result<bool> {
        Ok(match self {
            WagerSet::Finite { .. } => false,
            WagerSet::UnionOf { parts } => {
                for p in parts {
                    if p.has_finite_accumulation()? {
                        return Ok(true);
                    }
                }
                false
            }
            WagerSet::WithZero { inner } | WagerSet::Scaled { inner, .. } => {
                inner.has_finite_accumulation()?
            }
            WagerSet::ClosedInterval { lo, hi } => !lo.try_eq(hi)?,
            other => !other.is_locally_finite()?,
        })
    }

    pub fn is_finite(&self) -> bool {
        match self {
            WagerSet::Finite { .. } => true,
            WagerSet::ClosedInterval { lo, hi } => lo == hi,
            WagerSet::WithZero { inner } | WagerSet::Scaled { inner, .. } => inner.is_finite(),
            WagerSet::UnionOf { parts } => parts.iter().all(|p| p.is_finite()),
            _ => false,
        }
    }

    /// `S ∩ [0, x]` ascending, when finite and enumerable; `None` otherwise.
    pub fn elements_up_to(&self, x: &Value) -> Result<Option<Vec<Value>>> {
        let limit = |v: &Value| v.try_le(x);
        Ok(Some(match self {
            WagerSet::Finite { elements } => {
                let mut out = Vec::new();
                for e in elements {
                    if limit(e)? {
                        out.push(e.clone());
                    }
                }
                out
            }
            WagerSet::IntegerMultiples { step } => {
                let n = x.checked_div(step)?.try_floor()?;
                let n = n.to_i64().ok_or_else(|| Error::Unsupported("range too large".into()))?;
                (1..=n.max(0)).map(|k| step.mul_rational(&BigRational::from_integer(k.into()))).collect()
            }
            WagerSet::IntegerSieve { excluded } => {
                let n = x.try_floor()?.to_u64().unwrap_or(0);
                let removed = excluded.excluded_up_to(n);
                (1..=n)
                    .filter(|k| removed.binary_search(k).is_err())
                    .map(|k| Value::from(k as i64))
                    .collect()
            }
            WagerSet::ClosedInterval { lo, hi } => {
                if x.try_lt(lo)? {
                    Vec::new()
                } else if lo.try_eq(hi)? {
                    vec![lo.clone()]
                } else {
                    return Ok(None);
                }
            }
            WagerSet::HalfLine { lo } => {
                if x.try_lt(lo)? {
                    Vec::new()
                } else {
                    return Ok(None);
                }
            }
            WagerSet::HarmonicShifted => {
                if x.try_le(&Value::one())? {
                    Vec::new()
                } else {
                    return Ok(None);
                }
            }
            WagerSet::HarmonicReciprocal => {
                if x.is_positive()? {
                    return Ok(None);
                }
                Vec::new()
            }
            WagerSet::GeometricPowers { base, .. } => {
                if !self.is_well_ordered()? {
                    if x.is_positive()? {
                        return Ok(None);
                    }
                    return Ok(Some(Vec::new()));
                }
                let b = base.as_rational().expect("validated").clone();
                let mut out = Vec::new();
                let mut p = Value::one();
                let step = if b > BigRational::one() { b } else { b.recip() };
                while limit(&p)? {
                    out.push(p.clone());
                    p = p.mul_rational(&step);
                }
                out
            }
            WagerSet::WithZero { inner } => match inner.elements_up_to(x)? {
                Some(mut v) => {
                    if !x.is_negative()? {
                        v.insert(0, Value::zero());
                    }
                    v
                }
                None => return Ok(None),
            },
            WagerSet::UnionOf { parts } => {
                let mut all = Vec::new();
                for p in parts {
                    match p.elements_up_to(x)? {
                        Some(v) => all.extend(v),
                        None => return Ok(None),
                    }
                }
                sort_dedup(all)?
            }
            WagerSet::Scaled { r, inner } => match inner.elements_up_to(&x.checked_div(r)?)? {
                Some(v) => v.into_iter().map(|e| e.checked_mul(r)).collect::<Result<_>>()?,
                None => return Ok(None),
            },
        }))
    }
}

pub(crate) fn sort_dedup(mut v: Vec<Value>) -> Result<Vec<Value>> {
    let mut err = None;
    v.sort_by(|a, b| {
        a.try_cmp(b).unwrap_or_else(|e| {
            err.get_or_insert(e);
            Ordering::Equal
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    v.dedup();
    Ok(v)
}

/// `Some(n)` when `x = base^n` exactly.
fn geometric_exponent(base: &Value, x: &Value) -> Result<Option<i64>> {
    let b = base
        .as_rational()
        .ok_or_else(|| Error::Unsupported("geometric powers need a rational base".into()))?;
    if !x.try_is_rational()? {
        return Ok(None);
    }
    let q = x.rational_part();
    if !q.is_positive() {
        return Ok(None);
    }
    let one = BigRational::one();
    if q == &one {
        return Ok(Some(0));
    }
    // Walk outward from 1 in the direction of q.
    let (step, sign) = if (q > &one) == (b > &one) { (b.clone(), 1) } else { (b.recip(), -1) };
    let mut p = one;
    let mut n = 0i64;
    let increasing = step > BigRational::one();
    loop {
        p = &p * &step;
        n += 1;
        match p.cmp(q) {
            Ordering::Equal => return Ok(Some(sign * n)),
            Ordering::Greater if increasing => return Ok(None),
            Ordering::Less if !increasing => return Ok(None),
            _ => {}
        }
    }
}
