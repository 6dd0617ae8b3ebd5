//! Deciding whether `rA ⊆ closure(B)` for some `r > 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{geometric_exponent, Extended, ExponentRange, WagerSet, DEFAULT_SIEVE_BOUND};
use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scales")]
pub enum ScalingAnswer {
    Yes { r: Value },
    No,
    Unknown,
}

impl ScalingAnswer {
    pub fn witness(&self) -> Option<&Value> {
        match self {
            ScalingAnswer::Yes { r } => Some(r),
            _ => None,
        }
    }

    fn map_r(self, f: impl FnOnce(Value) -> Result<Value>) -> Result<ScalingAnswer> {
        Ok(match self {
            ScalingAnswer::Yes { r } => ScalingAnswer::Yes { r: f(r)? },
            other => other,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingConfig {
    /// Search bound for sieve questions.
    pub sieve_bound: u64,
    /// Elements of `B` tried as images of `min A` when no structural rule applies.
    pub candidate_scan: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            sieve_bound: DEFAULT_SIEVE_BOUND,
            candidate_scan: 2_000,
        }
    }
}

pub fn scales_into(a: &WagerSet, b: &WagerSet) -> Result<ScalingAnswer> {
    scales_into_with(a, b, &ScalingConfig::default())
}

/// `Err` only for malformed descriptors; undecidable comparisons degrade to `Unknown`.
pub fn scales_into_with(a: &WagerSet, b: &WagerSet, cfg: &ScalingConfig) -> Result<ScalingAnswer> {
    a.validate()?;
    b.validate()?;
    match decide(a, b, cfg) {
        Err(Error::UndecidableComparison { .. }) | Err(Error::Unsupported(_)) => Ok(ScalingAnswer::Unknown),
        other => other,
    }
}

fn yes(r: Value) -> Result<ScalingAnswer> {
    Ok(ScalingAnswer::Yes { r })
}

fn decide(a: &WagerSet, b: &WagerSet, cfg: &ScalingConfig) -> Result<ScalingAnswer> {
    // Peel scalings: (rs)A0 ⊆ tB0 iff (rs/t)A0 ⊆ B0.
    if let WagerSet::Scaled { r: s, inner } = a {
        return decide(inner, b, cfg)?.map_r(|r| r.checked_mul(s));
    }
    if let WagerSet::Scaled { r: t, inner } = b {
        return decide(a, inner, cfg)?.map_r(|r| r.checked_mul(t));
    }
    if let WagerSet::WithZero { inner } = a {
        if !b.closure_contains(&Value::zero())? {
            return Ok(ScalingAnswer::No);
        }
        return decide(inner, b, cfg);
    }
    if let WagerSet::WithZero { inner } = b {
        // A has no zero here, so only the nonzero part of B matters.
        return decide(a, inner, cfg);
    }
    if let Some(elements) = finite_elements(a)? {
        if elements.is_empty() {
            return yes(Value::one());
        }
        return finite_into(&elements, b, cfg);
    }
    if a == b {
        return yes(Value::one());
    }
    if let Some(no) = structural_no(a, b)? {
        return Ok(no);
    }
    infinite_into(a, b, cfg)
}

/// Elements of a finite (possibly union-of-finite) descriptor.
fn finite_elements(a: &WagerSet) -> Result<Option<Vec<Value>>> {
    Ok(match a {
        WagerSet::Finite { elements } => Some(elements.clone()),
        WagerSet::ClosedInterval { lo, hi } if lo == hi => {
            Some(if lo.is_zero() { vec![] } else { vec![lo.clone()] })
        }
        WagerSet::UnionOf { parts } => {
            let mut all = Vec::new();
            for p in parts {
                match finite_elements(p)? {
                    Some(v) => all.extend(v),
                    None => return Ok(None),
                }
            }
            Some(super::sort_dedup(all)?)
        }
        WagerSet::Scaled { r, inner } => match finite_elements(inner)? {
            Some(v) => Some(v.iter().map(|x| x.checked_mul(r)).collect::<Result<_>>()?),
            None => None,
        },
        _ => None,
    })
}

/// `a_i / a_0` for every element, or `None` if some ratio is provably irrational.
fn ratios(elements: &[Value]) -> Result<Option<Vec<BigRational>>> {
    let a0 = &elements[0];
    let mut out = Vec::with_capacity(elements.len());
    for a in elements {
        match a.rational_multiple_of(a0)? {
            Some(q) => out.push(q),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn all_in_closure(r: &Value, elements: &[Value], b: &WagerSet) -> Result<bool> {
    for a in elements {
        if !b.closure_contains(&a.checked_mul(r)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn lcm_of_denominators(qs: &[BigRational]) -> BigInt {
    qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

fn finite_into(elements: &[Value], b: &WagerSet, cfg: &ScalingConfig) -> Result<ScalingAnswer> {
    let a0 = &elements[0];
    let amax = elements.last().expect("nonempty");
    match b {
        WagerSet::Finite { elements: bs } => {
            // The image of min A is some b; each candidate is checked against all of A.
            for b0 in bs {
                let r = b0.checked_div(a0)?;
                if all_in_closure(&r, elements, b)? {
                    return yes(r);
                }
            }
            Ok(ScalingAnswer::No)
        }
        WagerSet::IntegerMultiples { step } => {
            let Some(qs) = ratios(elements)? else {
                return Ok(ScalingAnswer::No);
            };
            // r a0 = L step with L clearing every denominator of a/a0.
            let l = BigRational::from_integer(lcm_of_denominators(&qs));
            yes(step.mul_rational(&l).checked_div(a0)?)
        }
        WagerSet::IntegerSieve { excluded } => {
            let Some(qs) = ratios(elements)? else {
                return Ok(ScalingAnswer::No);
            };
            let l = lcm_of_denominators(&qs);
            for k in 1..=cfg.sieve_bound {
                let j = &l * BigInt::from(k);
                let jr = BigRational::from_integer(j.clone());
                if qs.iter().all(|q| !excluded.excludes(&(q * &jr).to_integer())) {
                    return yes(Value::from_bigint(j).checked_div(a0)?);
                }
            }
            Ok(ScalingAnswer::Unknown)
        }
        WagerSet::GeometricPowers { base, exponents } => {
            let Some(qs) = ratios(elements)? else {
                return Ok(ScalingAnswer::No);
            };
            let mut ns = Vec::new();
            for q in &qs {
                match geometric_exponent(base, &Value::from_rational(q.clone()))? {
                    Some(n) => ns.push(n),
                    None => return Ok(ScalingAnswer::No),
                }
            }
            let m = match exponents {
                ExponentRange::All => 0,
                ExponentRange::NonNegative => -ns.iter().min().copied().unwrap_or(0),
                ExponentRange::NonPositive => -ns.iter().max().copied().unwrap_or(0),
            };
            let b = base.as_rational().expect("validated");
            let bm = if m >= 0 {
                num_traits::pow(b.clone(), m as usize)
            } else {
                num_traits::pow(b.recip(), (-m) as usize)
            };
            yes(Value::from_rational(bm).checked_div(a0)?)
        }
        WagerSet::HarmonicReciprocal => {
            let Some(qs) = ratios(elements)? else {
                return Ok(ScalingAnswer::No);
            };
            // r a0 = 1/N and r a = q/N must be unit fractions: N = lcm of numerators works.
            let n = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.numer()));
            yes(Value::from_rational(BigRational::from_integer(n).recip()).checked_div(a0)?)
        }
        WagerSet::HarmonicShifted => {
            let Some(qs) = ratios(elements)? else {
                return Ok(ScalingAnswer::No);
            };
            let q = qs.last().expect("nonempty").clone();
            if q.is_one() {
                return yes(a0.recip()?);
            }
            // r amax = 1 + 1/m with r a0 >= 1 forces m <= 1/(q - 1).
            let bound = (q - BigRational::one()).recip().floor().to_integer();
            let mut m = BigInt::one();
            while m <= bound {
                let top = BigRational::one() + BigRational::from_integer(m.clone()).recip();
                let r = Value::from_rational(top).checked_div(amax)?;
                if all_in_closure(&r, elements, b)? {
                    return yes(r);
                }
                m += 1;
            }
            Ok(ScalingAnswer::No)
        }
        WagerSet::ClosedInterval { .. } | WagerSet::HalfLine { .. } => {
            let bounds = WagerSet::Finite { elements: elements.to_vec() }.bounds()?;
            interval_target(&bounds.sup, &bounds.inf_nonzero, b)
        }
        _ => {
            if let Some(no) = ratio_spread_no(&Extended::Finite(amax.clone()), &Extended::Finite(a0.clone()), b)? {
                return Ok(no);
            }
            for b0 in b.dense_enumeration()?.take(cfg.candidate_scan) {
                let r = b0.checked_div(a0)?;
                if all_in_closure(&r, elements, b)? {
                    return yes(r);
                }
            }
            Ok(ScalingAnswer::Unknown)
        }
    }
}

/// Exact answer for closed interval and half-line targets from sup and inf of A.
fn interval_target(sup: &Extended, inf: &Extended, b: &WagerSet) -> Result<ScalingAnswer> {
    let inf = inf.finite().expect("A has nonzero elements");
    match b {
        WagerSet::ClosedInterval { lo, hi } => {
            let Some(sup) = sup.finite() else {
                return Ok(ScalingAnswer::No);
            };
            if hi.is_zero() {
                return Ok(ScalingAnswer::No);
            }
            let r = hi.checked_div(sup)?;
            if lo.try_le(&inf.checked_mul(&r)?)? {
                yes(r)
            } else {
                Ok(ScalingAnswer::No)
            }
        }
        WagerSet::HalfLine { lo } => {
            if lo.is_zero() {
                yes(Value::one())
            } else if inf.is_zero() {
                Ok(ScalingAnswer::No)
            } else {
                yes(lo.checked_div(inf)?)
            }
        }
        _ => unreachable!("interval targets only"),
    }
}

/// rA ⊆ closure(B) forces sup A / inf A <= sup B / inf B and compatible zero-accumulation.
fn ratio_spread_no(sup_a: &Extended, inf_a: &Extended, b: &WagerSet) -> Result<Option<ScalingAnswer>> {
    let bb = b.bounds()?;
    let (Some(sa), Some(ia)) = (sup_a.finite(), inf_a.finite()) else {
        return Ok(None);
    };
    if ia.is_zero() {
        return Ok((bb.bounded_away_from_zero).then_some(ScalingAnswer::No));
    }
    if let (Some(sb), Some(ib)) = (bb.sup.finite(), bb.inf_nonzero.finite()) {
        if ib.is_positive()? && sb.checked_div(ib)?.try_lt(&sa.checked_div(ia)?)? {
            return Ok(Some(ScalingAnswer::No));
        }
    }
    Ok(None)
}

fn structural_no(a: &WagerSet, b: &WagerSet) -> Result<Option<ScalingAnswer>> {
    // Infinitely many points in a bounded region cannot land in a locally finite closure.
    if a.has_finite_accumulation()? && b.is_locally_finite()? {
        return Ok(Some(ScalingAnswer::No));
    }
    if b.is_finite() {
        return Ok(Some(ScalingAnswer::No));
    }
    let ba = a.bounds()?;
    let bb = b.bounds()?;
    if ba.sup.is_infinite() && !bb.sup.is_infinite() {
        return Ok(Some(ScalingAnswer::No));
    }
    if !ba.bounded_away_from_zero && bb.bounded_away_from_zero {
        return Ok(Some(ScalingAnswer::No));
    }
    ratio_spread_no(&ba.sup, &ba.inf_nonzero, b)
}

/// `Some(s)` when every element of A is a positive integer multiple of `s`.
fn integer_lattice_step(a: &WagerSet) -> Option<Value> {
    match a {
        WagerSet::IntegerMultiples { step } => Some(step.clone()),
        WagerSet::IntegerSieve { .. } => Some(Value::one()),
        WagerSet::GeometricPowers { base, exponents: ExponentRange::NonNegative } => {
            base.as_integer().map(|_| Value::one())
        }
        _ => None,
    }
}

fn infinite_into(a: &WagerSet, b: &WagerSet, cfg: &ScalingConfig) -> Result<ScalingAnswer> {
    if let WagerSet::ClosedInterval { .. } | WagerSet::HalfLine { .. } = b {
        let ba = a.bounds()?;
        return interval_target(&ba.sup, &ba.inf_nonzero, b);
    }
    if let Some(s) = integer_lattice_step(a) {
        match b {
            WagerSet::IntegerMultiples { step: t } => return yes(t.checked_div(&s)?),
            WagerSet::IntegerSieve { excluded } => {
                if let Some(j) = excluded.surviving_ideal(cfg.sieve_bound)? {
                    return yes(Value::from(j as i64).checked_div(&s)?);
                }
                // No ideal survives: a full lattice cannot land anywhere; a thinner A might.
                if let WagerSet::IntegerMultiples { .. } = a {
                    return Ok(ScalingAnswer::No);
                }
            }
            _ => {}
        }
    }
    if let (
        WagerSet::GeometricPowers { base: ba, exponents: ra },
        WagerSet::GeometricPowers { base: bb, exponents: rb },
    ) = (a, b)
    {
        return geometric_into(ba, *ra, bb, *rb);
    }
    Ok(ScalingAnswer::Unknown)
}

/// Orient a geometric family so its base exceeds 1.
fn oriented(base: &Value, range: ExponentRange) -> (BigRational, ExponentRange) {
    let b = base.as_rational().expect("validated").clone();
    if b > BigRational::one() {
        (b, range)
    } else {
        let flipped = match range {
            ExponentRange::All => ExponentRange::All,
            ExponentRange::NonNegative => ExponentRange::NonPositive,
            ExponentRange::NonPositive => ExponentRange::NonNegative,
        };
        (b.recip(), flipped)
    }
}

fn geometric_into(
    base_a: &Value,
    range_a: ExponentRange,
    base_b: &Value,
    range_b: ExponentRange,
) -> Result<ScalingAnswer> {
    let (ba, ra) = oriented(base_a, range_a);
    let (bb, rb) = oriented(base_b, range_b);
    // Consecutive elements of A differ by the factor ba, which must be a power of bb.
    let Some(k) = geometric_exponent(&Value::from_rational(bb), &Value::from_rational(ba))? else {
        return Ok(ScalingAnswer::No);
    };
    debug_assert!(k > 0);
    let fits = matches!(
        (ra, rb),
        (_, ExponentRange::All)
            | (ExponentRange::NonNegative, ExponentRange::NonNegative)
            | (ExponentRange::NonPositive, ExponentRange::NonPositive)
    );
    if fits {
        yes(Value::one())
    } else {
        Ok(ScalingAnswer::No)
    }
}
