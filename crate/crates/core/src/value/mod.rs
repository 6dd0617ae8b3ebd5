//! Exact real values: a rational part plus rational multiples of named
//! irrational constants.
//!
//! Rational values compare exactly. Values with irrational parts compare by
//! refining interval enclosures until they separate, up to the configured cap.

mod consts;

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use consts::{ln_enclosure, NamedConst};

pub const DEFAULT_BITS: u32 = 128;
pub const DEFAULT_CAP_BITS: u32 = 1024;
pub const PRECISION_ENV: &str = "DUEL_PRECISION_BITS";

/// Enclosure precision used by comparisons: start width and refinement cap, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Precision {
    pub bits: u32,
    pub cap_bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: DEFAULT_BITS,
            cap_bits: DEFAULT_CAP_BITS,
        }
    }
}

thread_local! {
    static OVERRIDE: Cell<Option<Precision>> = const { Cell::new(None) };
}

impl Precision {
    /// Process default, honouring `DUEL_PRECISION_BITS`.
    pub fn global() -> Precision {
        static GLOBAL: OnceLock<Precision> = OnceLock::new();
        *GLOBAL.get_or_init(|| {
            let mut p = Precision::default();
            if let Some(bits) = std::env::var(PRECISION_ENV)
                .ok()
                .and_then(|s| s.trim().parse::<u32>().ok())
                .filter(|b| *b > 0)
            {
                p.bits = bits;
                p.cap_bits = p.cap_bits.max(bits);
            }
            p
        })
    }

    /// Precision in effect on this thread.
    pub fn current() -> Precision {
        OVERRIDE.with(|o| o.get()).unwrap_or_else(Precision::global)
    }

    /// Runs `f` with `self` as the thread's precision.
    pub fn scoped<R>(self, f: impl FnOnce() -> R) -> R {
        let prev = OVERRIDE.with(|o| o.replace(Some(self)));
        let out = f();
        OVERRIDE.with(|o| o.set(prev));
        out
    }
}

/// `rational + sum(coeff * constant)`; terms are sorted by constant with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Value {
    rational: BigRational,
    terms: Vec<(NamedConst, BigRational)>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Value {
    pub fn zero() -> Value {
        Value::from_rational(BigRational::zero())
    }

    pub fn one() -> Value {
        Value::int(1)
    }

    pub fn int(n: i64) -> Value {
        Value::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Value {
        Value::from_rational(rat(n, d))
    }

    pub fn from_rational(rational: BigRational) -> Value {
        Value {
            rational,
            terms: Vec::new(),
        }
    }

    pub fn from_bigint(n: BigInt) -> Value {
        Value::from_rational(BigRational::from_integer(n))
    }

    pub fn constant(c: NamedConst) -> Value {
        Value {
            rational: BigRational::zero(),
            terms: vec![(c, BigRational::one())],
        }
    }

    pub fn pi() -> Value {
        Value::constant(NamedConst::Pi)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.terms.is_empty().then_some(&self.rational)
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn terms(&self) -> &[(NamedConst, BigRational)] {
        &self.terms
    }

    /// True when the value is provably irrational: exactly one constant term.
    pub fn is_certainly_irrational(&self) -> bool {
        self.terms.len() == 1
    }

    /// Rationality decided where possible; mixed-constant values are undecided.
    pub fn try_is_rational(&self) -> Result<bool> {
        match self.terms.len() {
            0 => Ok(true),
            1 => Ok(false),
            _ => Err(Error::UndecidableComparison {
                bits: Precision::current().cap_bits,
            }),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.rational.is_zero()
    }

    pub fn mul_rational(&self, r: &BigRational) -> Value {
        if r.is_zero() {
            return Value::zero();
        }
        Value {
            rational: &self.rational * r,
            terms: self.terms.iter().map(|(c, k)| (*c, k * r)).collect(),
        }
    }

    pub fn checked_mul(&self, other: &Value) -> Result<Value> {
        match (self.as_rational(), other.as_rational()) {
            (Some(a), _) => Ok(other.mul_rational(a)),
            (_, Some(b)) => Ok(self.mul_rational(b)),
            _ => Err(Error::Unsupported(format!(
                "product of two irrational values {self} * {other}"
            ))),
        }
    }

    pub fn checked_div(&self, other: &Value) -> Result<Value> {
        if other.is_zero() {
            return Err(Error::InvalidValue("division by zero".into()));
        }
        if let Some(b) = other.as_rational() {
            return Ok(self.mul_rational(&b.recip()));
        }
        match self.rational_multiple_of(other)? {
            Some(q) => Ok(Value::from_rational(q)),
            None => Err(Error::Unsupported(format!(
                "quotient {self} / {other} is not representable"
            ))),
        }
    }

    /// `Some(q)` when `self == q * other` exactly, `None` when provably not.
    pub fn rational_multiple_of(&self, other: &Value) -> Result<Option<BigRational>> {
        if other.is_zero() {
            return Ok(self.is_zero().then(BigRational::zero));
        }
        // Pick the candidate ratio from the first nonzero component of `other`.
        let q = if let Some((c, k)) = other.terms.first() {
            let mine = self
                .terms
                .iter()
                .find(|(d, _)| d == c)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(BigRational::zero);
            mine / k
        } else {
            &self.rational / &other.rational
        };
        let diff = self - &other.mul_rational(&q);
        if diff.is_zero() {
            return Ok(Some(q));
        }
        // Nonzero difference: with at most one constant involved it is certainly nonzero,
        // and then no other q can work either (the representation is unique).
        let involved: std::collections::BTreeSet<_> = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(c, _)| *c)
            .collect();
        if involved.len() <= 1 {
            Ok(None)
        } else {
            Err(Error::UndecidableComparison {
                bits: Precision::current().cap_bits,
            })
        }
    }

    pub fn recip(&self) -> Result<Value> {
        Value::one().checked_div(self)
    }

    /// Closed rational interval of width roughly `2^-bits` containing the value.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (c, k) in &self.terms {
            let (clo, chi) = c.enclosure(bits);
            if k.is_positive() {
                lo += k * &clo;
                hi += k * &chi;
            } else {
                lo += k * &chi;
                hi += k * &clo;
            }
        }
        (lo, hi)
    }

    /// Exact comparison, refining enclosures up to the current precision cap.
    pub fn try_cmp(&self, other: &Value) -> Result<Ordering> {
        if self.terms.is_empty() && other.terms.is_empty() {
            return Ok(self.rational.cmp(&other.rational));
        }
        let diff = self - other;
        diff.sign_of()
    }

    fn sign_of(&self) -> Result<Ordering> {
        if self.terms.is_empty() {
            return Ok(self.rational.cmp(&BigRational::zero()));
        }
        let prec = Precision::current();
        let mut bits = prec.bits.max(16);
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            if bits >= prec.cap_bits {
                return Err(Error::UndecidableComparison { bits });
            }
            bits = (bits * 2).min(prec.cap_bits);
        }
    }

    pub fn signum(&self) -> Result<Ordering> {
        self.sign_of()
    }

    pub fn try_lt(&self, other: &Value) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Less)
    }

    pub fn try_le(&self, other: &Value) -> Result<bool> {
        Ok(self.try_cmp(other)? != Ordering::Greater)
    }

    pub fn try_gt(&self, other: &Value) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Greater)
    }

    pub fn try_ge(&self, other: &Value) -> Result<bool> {
        Ok(self.try_cmp(other)? != Ordering::Less)
    }

    pub fn try_eq(&self, other: &Value) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Equal)
    }

    pub fn is_positive(&self) -> Result<bool> {
        Ok(self.sign_of()? == Ordering::Greater)
    }

    pub fn is_negative(&self) -> Result<bool> {
        Ok(self.sign_of()? == Ordering::Less)
    }

    pub fn try_abs(&self) -> Result<Value> {
        Ok(if self.is_negative()? { -self } else { self.clone() })
    }

    pub fn try_max(&self, other: &Value) -> Result<Value> {
        Ok(if self.try_lt(other)? {
            other.clone()
        } else {
            self.clone()
        })
    }

    pub fn try_min(&self, other: &Value) -> Result<Value> {
        Ok(if other.try_lt(self)? {
            other.clone()
        } else {
            self.clone()
        })
    }

    pub fn try_floor(&self) -> Result<BigInt> {
        if let Some(r) = self.as_rational() {
            return Ok(r.floor().to_integer());
        }
        let prec = Precision::current();
        let mut bits = prec.bits.max(16);
        loop {
            let (lo, hi) = self.enclosure(bits);
            let (flo, fhi) = (lo.floor(), hi.floor());
            if flo == fhi {
                return Ok(flo.to_integer());
            }
            if bits >= prec.cap_bits {
                return Err(Error::UndecidableComparison { bits });
            }
            bits = (bits * 2).min(prec.cap_bits);
        }
    }

    pub fn try_ceil(&self) -> Result<BigInt> {
        Ok(-(-self).try_floor()?)
    }

    /// The rational value as an integer, if it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(64);
        ((lo + hi) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    fn normalize(mut self) -> Value {
        self.terms.retain(|(_, k)| !k.is_zero());
        self.terms.sort_by_key(|(c, _)| *c);
        self
    }

    fn combine(&self, other: &Value, sign: i64) -> Value {
        let s = BigRational::from_integer(BigInt::from(sign));
        let mut terms = self.terms.clone();
        for (c, k) in &other.terms {
            let add = k * &s;
            match terms.iter_mut().find(|(d, _)| d == c) {
                Some((_, v)) => *v += add,
                None => terms.push((*c, add)),
            }
        }
        Value {
            rational: &self.rational + &other.rational * s,
            terms,
        }
        .normalize()
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        if self.terms.is_empty() && rhs.terms.is_empty() {
            return Value::from_rational(&self.rational + &rhs.rational);
        }
        self.combine(rhs, 1)
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        if self.terms.is_empty() && rhs.terms.is_empty() {
            return Value::from_rational(&self.rational - &rhs.rational);
        }
        self.combine(rhs, -1)
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        &self + &rhs
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        &self - &rhs
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        Value {
            rational: -&self.rational,
            terms: self.terms.iter().map(|(c, k)| (*c, -k)).collect(),
        }
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        -&self
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Value {
        Value::int(n)
    }
}

impl From<BigRational> for Value {
    fn from(r: BigRational) -> Value {
        Value::from_rational(r)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{}", self.rational);
        }
        let mut first = true;
        if !self.rational.is_zero() {
            write!(f, "{}", self.rational)?;
            first = false;
        }
        for (c, k) in &self.terms {
            if !first {
                f.write_str(if k.is_negative() { "-" } else { "+" })?;
            } else if k.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let k = k.abs();
            if k.is_one() {
                write!(f, "{}", c.name())?;
            } else {
                write!(f, "{}*{}", k, c.name())?;
            }
        }
        Ok(())
    }
}

/// `"p/q"` with the denominator always present.
/// `p/q` in lowest terms, or just `p` for integers.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidValue(format!("cannot parse rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10).pow(frac.len() as u32);
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

impl FromStr for Value {
    type Err = Error;
    fn from_str(s: &str) -> Result<Value> {
        if let Some(c) = NamedConst::from_name(s.trim()) {
            return Ok(Value::constant(c));
        }
        parse_rational(s).map(Value::from_rational)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let bits = Precision::current().bits;
        if self.terms.is_empty() {
            return serializer.serialize_str(&rational_to_string(&self.rational));
        }
        if self.rational.is_zero() && self.terms.len() == 1 && self.terms[0].1.is_one() {
            let mut map = serializer.serialize_map(Some(2))?;
            map.serialize_entry("const", self.terms[0].0.name())?;
            map.serialize_entry("bits", &bits)?;
            return map.end();
        }
        #[derive(Serialize)]
        struct Term<'a> {
            #[serde(rename = "const")]
            name: &'a str,
            coeff: String,
        }
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(c, k)| Term {
                name: c.name(),
                coeff: rational_to_string(k),
            })
            .collect();
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("rational", &rational_to_string(&self.rational))?;
        map.serialize_entry("terms", &terms)?;
        map.serialize_entry("bits", &bits)?;
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Text(String),
    Int(i64),
    Const {
        #[serde(rename = "const")]
        name: String,
        #[serde(default)]
        bits: Option<u32>,
    },
    Affine {
        rational: String,
        terms: Vec<TermRepr>,
        #[serde(default)]
        bits: Option<u32>,
    },
}

#[derive(Deserialize)]
struct TermRepr {
    #[serde(rename = "const")]
    name: String,
    coeff: String,
}

fn check_bits<E: de::Error>(bits: Option<u32>) -> std::result::Result<(), E> {
    match bits {
        Some(0) => Err(E::custom("enclosure bits must be positive")),
        Some(b) if b > Precision::current().cap_bits.max(DEFAULT_CAP_BITS) => {
            Err(E::custom(format!("enclosure bits {b} exceed the precision cap")))
        }
        _ => Ok(()),
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Value, D::Error> {
        let constant = |name: &str| {
            NamedConst::from_name(name)
                .ok_or_else(|| de::Error::custom(format!("unknown constant {name:?}")))
        };
        match ValueRepr::deserialize(deserializer)? {
            ValueRepr::Text(s) => parse_rational(&s)
                .map(Value::from_rational)
                .map_err(de::Error::custom),
            ValueRepr::Int(n) => Ok(Value::int(n)),
            ValueRepr::Const { name, bits } => {
                check_bits(bits)?;
                Ok(Value::constant(constant(&name)?))
            }
            ValueRepr::Affine {
                rational,
                terms,
                bits,
            } => {
                check_bits(bits)?;
                let mut v = Value::from_rational(parse_rational(&rational).map_err(de::Error::custom)?);
                for t in terms {
                    let k = parse_rational(&t.coeff).map_err(de::Error::custom)?;
                    v = &v + &Value::constant(constant(&t.name)?).mul_rational(&k);
                }
                Ok(v)
            }
        }
    }
}

/// Rational gcd: largest `g` with every input an integer multiple of `g`.
pub fn rational_gcd<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> Option<BigRational> {
    let mut acc: Option<(BigInt, BigInt)> = None;
    for r in values {
        let (n, d) = (r.numer().abs(), r.denom().clone());
        acc = Some(match acc {
            None => (n, d),
            Some((an, ad)) => (an.gcd(&n), ad.lcm(&d)),
        });
    }
    acc.map(|(n, d)| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = Value::ratio(1, 3);
        let b = Value::ratio(1, 6);
        assert_eq!(&a + &b, Value::ratio(1, 2));
        assert_eq!(&a - &b, Value::ratio(1, 6));
        assert_eq!(a.checked_mul(&b).unwrap(), Value::ratio(1, 18));
        assert_eq!(a.checked_div(&b).unwrap(), Value::int(2));
    }

    #[test]
    fn pi_compares_decidably() {
        let pi = Value::pi();
        assert_eq!(pi.try_cmp(&Value::int(3)).unwrap(), Ordering::Greater);
        assert_eq!(pi.try_cmp(&Value::ratio(22, 7)).unwrap(), Ordering::Less);
        assert_eq!(pi.try_cmp(&Value::ratio(314159, 100000)).unwrap(), Ordering::Greater);
        let two_pi = pi.mul_rational(&rat(2, 1));
        assert!(two_pi.try_eq(&(&pi + &pi)).unwrap());
        assert_eq!(two_pi.checked_div(&pi).unwrap(), Value::int(2));
        assert_eq!(pi.try_floor().unwrap(), BigInt::from(3));
        assert_eq!(pi.try_ceil().unwrap(), BigInt::from(4));
    }

    #[test]
    fn near_miss_hits_a_small_cap() {
        // A rational within 2^-100 of pi: a low cap cannot separate them, the default can.
        let (lo, hi) = NamedConst::Pi.enclosure(100);
        let near = Value::from_rational((lo + hi) / rat(2, 1));
        let p = Precision { bits: 8, cap_bits: 16 };
        let r = p.scoped(|| Value::pi().try_cmp(&near));
        assert!(matches!(r, Err(Error::UndecidableComparison { .. })));
        assert!(Precision::default().scoped(|| Value::pi().try_cmp(&near)).is_ok());
    }

    #[test]
    fn rational_multiple_detection() {
        let pi = Value::pi();
        assert_eq!(pi.rational_multiple_of(&Value::one()).unwrap(), None);
        assert_eq!(Value::one().rational_multiple_of(&pi).unwrap(), None);
        let v = &pi.mul_rational(&rat(3, 2)) + &Value::zero();
        assert_eq!(v.rational_multiple_of(&pi).unwrap(), Some(rat(3, 2)));
        let mixed = &Value::pi() + &Value::constant(NamedConst::Sqrt2);
        assert!(mixed.rational_multiple_of(&Value::pi()).is_err());
    }

    #[test]
    fn json_forms() {
        let v: Value = serde_json::from_str("\"3/2\"").unwrap();
        assert_eq!(v, Value::ratio(3, 2));
        assert_eq!(serde_json::to_string(&Value::int(3)).unwrap(), "\"3\"");
        let pi: Value = serde_json::from_str(r#"{"const":"pi","bits":128}"#).unwrap();
        assert_eq!(pi, Value::pi());
        let s = Precision::default().scoped(|| serde_json::to_string(&pi).unwrap());
        assert_eq!(s, r#"{"const":"pi","bits":128}"#);
        let aff = &Value::ratio(1, 2) + &Value::pi().mul_rational(&rat(-2, 1));
        let back: Value = serde_json::from_str(&serde_json::to_string(&aff).unwrap()).unwrap();
        assert_eq!(back, aff);
        assert!(serde_json::from_str::<Value>(r#"{"const":"e"}"#).is_err());
        assert_eq!(serde_json::from_str::<Value>("\"0.25\"").unwrap(), Value::ratio(1, 4));
    }

    #[test]
    fn display() {
        assert_eq!(Value::ratio(-3, 4).to_string(), "-3/4");
        let v = &Value::one() - &Value::pi().mul_rational(&rat(1, 2));
        assert_eq!(v.to_string(), "1-1/2*pi");
    }

    #[test]
    fn gcd_of_rationals() {
        let g = rational_gcd([rat(1, 2), rat(3, 4), rat(3, 1)].iter()).unwrap();
        assert_eq!(g, rat(1, 4));
    }
}
