//! Rational enclosures of the named irrational constants and of natural logarithms.
//!
//! Everything is computed in fixed point over `BigInt` with an explicit error
//! budget counted in units in the last place, then returned as a closed
//! rational interval `[lo, hi]` with `hi - lo <= 2^-bits`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

const GUARD_BITS: u32 = 32;

type Enclosure = (BigRational, BigRational);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedConst {
    Pi,
    Sqrt2,
    #[serde(rename = "log2_3")]
    Log2Of3,
}

impl NamedConst {
    pub fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::Sqrt2 => "sqrt2",
            NamedConst::Log2Of3 => "log2_3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "pi" => Some(NamedConst::Pi),
            "sqrt2" => Some(NamedConst::Sqrt2),
            "log2_3" => Some(NamedConst::Log2Of3),
            _ => None,
        }
    }

    /// Closed rational interval of width at most `2^-bits` containing the constant.
    pub fn enclosure(self, bits: u32) -> (BigRational, BigRational) {
        static CACHE: OnceLock<Mutex<HashMap<(NamedConst, u32), Enclosure>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.lock().unwrap().get(&(self, bits)) {
            return hit.clone();
        }
        let computed = match self {
            NamedConst::Pi => pi_enclosure(bits),
            NamedConst::Sqrt2 => sqrt2_enclosure(bits),
            NamedConst::Log2Of3 => log2_3_enclosure(bits),
        };
        cache.lock().unwrap().insert((self, bits), computed.clone());
        computed
    }
}

fn pow2(p: u32) -> BigInt {
    BigInt::one() << p as usize
}

fn interval(center: BigInt, err: BigInt, p: u32) -> (BigRational, BigRational) {
    let den = pow2(p);
    (
        BigRational::new(&center - &err, den.clone()),
        BigRational::new(center + err, den),
    )
}

/// floor(atan(1/x) * 2^p) up to the returned ulp error.
fn atan_inv(x: u64, p: u32) -> (BigInt, BigInt) {
    let x2 = BigInt::from(x * x);
    let mut power = pow2(p) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    (sum, BigInt::from(2 * k + 4))
}

/// atanh(u/v) * 2^p for 0 <= u/v <= 1/3, with ulp error bound.
fn atanh_ratio(u: &BigInt, v: &BigInt, p: u32) -> (BigInt, BigInt) {
    let u2 = u * u;
    let v2 = v * v;
    let mut power = (pow2(p) * u) / v;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = power * &u2 / &v2;
        k += 1;
    }
    (sum, BigInt::from(3 * k + 6))
}

fn pi_enclosure(bits: u32) -> (BigRational, BigRational) {
    let p = bits + GUARD_BITS;
    let (a, ea) = atan_inv(5, p);
    let (b, eb) = atan_inv(239, p);
    let center = BigInt::from(16) * a - BigInt::from(4) * b;
    let err = BigInt::from(16) * ea + BigInt::from(4) * eb;
    interval(center, err, p)
}

fn sqrt2_enclosure(bits: u32) -> (BigRational, BigRational) {
    let p = bits + GUARD_BITS;
    let s = (BigInt::from(2) << (2 * p as usize)).sqrt();
    let den = pow2(p);
    (
        BigRational::new(s.clone(), den.clone()),
        BigRational::new(s + 1, den),
    )
}

fn ln2_fixed(p: u32) -> (BigInt, BigInt) {
    let (a, e) = atanh_ratio(&BigInt::one(), &BigInt::from(3), p);
    (a * 2, e * 2)
}

fn log2_3_enclosure(bits: u32) -> (BigRational, BigRational) {
    // log2(3) = 1 + ln(3/2) / ln 2, ln(3/2) = 2 atanh(1/5).
    let p = bits + GUARD_BITS;
    let (l15, e15) = atanh_ratio(&BigInt::one(), &BigInt::from(5), p);
    let (l15, e15) = (l15 * 2, e15 * 2);
    let (l2, e2) = ln2_fixed(p);
    let lo = BigRational::new(&l15 - &e15, &l2 + &e2);
    let hi = BigRational::new(&l15 + &e15, &l2 - &e2);
    (lo + BigRational::one(), hi + BigRational::one())
}

/// Enclosure of `ln q` for rational `q > 0`, width at most about `2^-bits`.
pub fn ln_enclosure(q: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(q.is_positive(), "ln of a nonpositive rational");
    if q.is_one() {
        return (BigRational::zero(), BigRational::zero());
    }
    // q = 2^k * z with z in [1, 2).
    let mut k: i64 = q.numer().bits() as i64 - q.denom().bits() as i64;
    let mut z = scale_pow2(q, -k);
    while z < BigRational::one() {
        k -= 1;
        z = scale_pow2(q, -k);
    }
    while z >= BigRational::from_integer(BigInt::from(2)) {
        k += 1;
        z = scale_pow2(q, -k);
    }
    let extra = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let p = bits + GUARD_BITS + extra;
    let y = (&z - BigRational::one()) / (&z + BigRational::one());
    let (a, ea) = atanh_ratio(y.numer(), y.denom(), p);
    let (l2, e2) = ln2_fixed(p);
    let kb = BigInt::from(k);
    let center = a * 2 + &kb * l2;
    let err = ea * 2 + kb.abs() * e2;
    interval(center, err, p)
}

fn scale_pow2(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        q * BigRational::from_integer(pow2(e as u32))
    } else {
        q / BigRational::from_integer(pow2((-e) as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn mid(iv: &(BigRational, BigRational)) -> f64 {
        ((&iv.0 + &iv.1) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap()
    }

    fn width_ok(iv: &(BigRational, BigRational), bits: u32) {
        let w = &iv.1 - &iv.0;
        assert!(w >= BigRational::zero());
        assert!(w <= BigRational::new(BigInt::one(), pow2(bits)));
    }

    #[test]
    fn constants_match_f64() {
        for bits in [16, 128, 512] {
            let pi = NamedConst::Pi.enclosure(bits);
            width_ok(&pi, bits);
            assert!((mid(&pi) - std::f64::consts::PI).abs() < 1e-12);
            let s = NamedConst::Sqrt2.enclosure(bits);
            width_ok(&s, bits);
            assert!((mid(&s) - std::f64::consts::SQRT_2).abs() < 1e-12);
            let l = NamedConst::Log2Of3.enclosure(bits);
            width_ok(&l, bits);
            assert!((mid(&l) - 3f64.log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn known_pi_digits_inside() {
        // 3.14159265358979323846264338327950288 truncated and rounded up.
        let (lo, hi) = NamedConst::Pi.enclosure(128);
        let below: BigRational = BigRational::new(
            "314159265358979323846264338327950288".parse().unwrap(),
            BigInt::from(10).pow(35),
        );
        let above = &below + BigRational::new(BigInt::one(), BigInt::from(10).pow(35));
        assert!(lo >= below && hi <= above);
    }

    #[test]
    fn ln_matches_f64() {
        for (n, d) in [(3, 2), (1, 3), (1000, 7), (5, 4), (2, 1), (1, 1024)] {
            let q = BigRational::new(BigInt::from(n), BigInt::from(d));
            let iv = ln_enclosure(&q, 64);
            assert!(iv.0 <= iv.1);
            let w = (&iv.1 - &iv.0).to_f64().unwrap();
            assert!(w < 1e-18, "width {w}");
            assert!((mid(&iv) - (n as f64 / d as f64).ln()).abs() < 1e-12);
        }
    }
}
