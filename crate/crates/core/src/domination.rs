//! Constructions witnessing that one wager set anticipates another.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::martingale::{self, history_string, Bettor, MartingaleRun, Outcome, Strategy, Tracked};
use crate::value::{ln_enclosure, Precision, Value};
use crate::wagerset::WagerSet;

/// A non-increasing, nonnegative function on `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ScalingFunction {
    Constant { r: Value },
    /// `min(1/x, 1)`
    MinReciprocal,
    /// `min(1/2^floor(log2 x), 1)`
    DyadicFloor,
    /// `values[0]` on `[0, b_1)`, `values[i]` on `[b_i, b_{i+1})`, `values[k]` on `[b_k, inf)`.
    PiecewiseRational { breakpoints: Vec<Value>, values: Vec<Value> },
    /// `q_m(x) = max(P(x) ∩ [0, m])`.
    QProfile { a: Box<WagerSet>, b: Box<WagerSet>, m: Value },
}

/// `base + ln(ln_arg)`; `ln_arg = 1` means a plain value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Integral {
    pub base: Value,
    pub ln_arg: BigRational,
}

impl Integral {
    fn plain(base: Value) -> Integral {
        Integral {
            base,
            ln_arg: BigRational::one(),
        }
    }

    fn minus(&self, other: &Integral) -> Integral {
        Integral {
            base: &self.base - &other.base,
            ln_arg: &self.ln_arg / &other.ln_arg,
        }
    }

    /// Decides `lhs >= self` exactly, refining enclosures up to the precision cap.
    pub fn is_at_most(&self, lhs: &Value) -> Result<bool> {
        let d = lhs - &self.base;
        if self.ln_arg.is_one() {
            return Ok(!d.is_negative()?);
        }
        // ln of a rational other than 1 is irrational, so the comparison is never a tie.
        let prec = Precision::current();
        let mut bits = prec.bits.max(16);
        loop {
            let (dlo, dhi) = d.enclosure(bits);
            let (llo, lhi) = ln_enclosure(&self.ln_arg, bits);
            if dlo >= lhi {
                return Ok(true);
            }
            if dhi < llo {
                return Ok(false);
            }
            if bits >= prec.cap_bits {
                return Err(Error::UndecidableComparison { bits });
            }
            bits = (bits * 2).min(prec.cap_bits);
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.base.to_f64() + self.ln_arg.to_f64().unwrap_or(f64::NAN).ln()
    }
}

fn rational_of(x: &Value, what: &str) -> Result<BigRational> {
    x.as_rational()
        .cloned()
        .ok_or_else(|| Error::Unsupported(format!("{what} needs a rational argument, got {x}")))
}

fn pow2(k: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << k as usize)
}

impl ScalingFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalingFunction::Constant { r } => {
                if r.is_negative()? {
                    return Err(Error::InvalidValue("constant scaling must be nonnegative".into()));
                }
            }
            ScalingFunction::PiecewiseRational { breakpoints, values } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidValue("piecewise needs one more value than breakpoints".into()));
                }
                for v in breakpoints.iter().chain(values) {
                    rational_of(v, "piecewise scaling")?;
                }
                for w in breakpoints.windows(2) {
                    if !w[0].try_lt(&w[1])? {
                        return Err(Error::InvalidValue("breakpoints must increase".into()));
                    }
                }
                if let Some(b) = breakpoints.first() {
                    if !b.is_positive()? {
                        return Err(Error::InvalidValue("breakpoints must be positive".into()));
                    }
                }
                for w in values.windows(2) {
                    if w[0].try_lt(&w[1])? {
                        return Err(Error::InvalidValue("piecewise scaling must be non-increasing".into()));
                    }
                }
                if values.last().expect("nonempty").is_negative()? {
                    return Err(Error::InvalidValue("piecewise scaling must be nonnegative".into()));
                }
            }
            ScalingFunction::QProfile { a, b, m } => {
                a.validate()?;
                b.validate()?;
                if m.is_negative()? {
                    return Err(Error::InvalidValue("profile cap must be nonnegative".into()));
                }
            }
            ScalingFunction::MinReciprocal | ScalingFunction::DyadicFloor => {}
        }
        Ok(())
    }

    pub fn eval(&self, x: &Value) -> Result<Value> {
        if x.is_negative()? {
            return Err(Error::InvalidValue(format!("scaling function evaluated at {x} < 0")));
        }
        match self {
            ScalingFunction::Constant { r } => Ok(r.clone()),
            ScalingFunction::MinReciprocal => {
                if x.try_le(&Value::one())? {
                    Ok(Value::one())
                } else {
                    x.recip()
                }
            }
            ScalingFunction::DyadicFloor => {
                let q = rational_of(x, "dyadic floor")?;
                match dyadic_exponent(&q) {
                    Some(k) if k >= 1 => Ok(Value::from_rational(pow2(k).recip())),
                    _ => Ok(Value::one()),
                }
            }
            ScalingFunction::PiecewiseRational { breakpoints, values } => {
                let i = breakpoints.iter().take_while(|b| b.try_le(x).unwrap_or(false)).count();
                Ok(values[i].clone())
            }
            ScalingFunction::QProfile { a, b, m } => {
                Ok(q_profile(a, b, m, std::slice::from_ref(x))?.remove(0))
            }
        }
    }

    /// `f(0)`.
    pub fn at_zero(&self) -> Result<Value> {
        self.eval(&Value::zero())
    }

    /// `F(x) = ∫_0^x f`, in closed form.
    pub fn antiderivative(&self, x: &Value) -> Result<Integral> {
        if x.is_negative()? {
            return Err(Error::InvalidState(format!("wealth {x} left the domain [0, inf)")));
        }
        Ok(match self {
            ScalingFunction::Constant { r } => Integral::plain(r.checked_mul(x)?),
            ScalingFunction::MinReciprocal => {
                let q = rational_of(x, "reciprocal integral")?;
                if q <= BigRational::one() {
                    Integral::plain(x.clone())
                } else {
                    Integral {
                        base: Value::one(),
                        ln_arg: q,
                    }
                }
            }
            ScalingFunction::DyadicFloor => {
                let q = rational_of(x, "dyadic integral")?;
                match dyadic_exponent(&q) {
                    Some(k) if k >= 1 => {
                        // Each full block [2^j, 2^{j+1}) with j >= 1 contributes exactly 1.
                        let p = pow2(k);
                        let v = BigRational::from_integer(BigInt::from(2 + (k - 1))) + (&q - &p) / &p;
                        Integral::plain(Value::from_rational(v))
                    }
                    _ => Integral::plain(x.clone()),
                }
            }
            ScalingFunction::PiecewiseRational { breakpoints, values } => {
                let mut acc = Value::zero();
                let mut left = Value::zero();
                for (i, b) in breakpoints.iter().enumerate() {
                    if x.try_le(b)? {
                        break;
                    }
                    acc = &acc + &values[i].checked_mul(&(b - &left))?;
                    left = b.clone();
                }
                let i = breakpoints.iter().take_while(|b| b.try_lt(x).unwrap_or(false)).count();
                Integral::plain(&acc + &values[i].checked_mul(&(x - &left))?)
            }
            ScalingFunction::QProfile { a, b, m } => {
                // q only changes where A ∩ [0, x] gains an element.
                let pts = a
                    .elements_up_to(x)?
                    .ok_or_else(|| Error::Unsupported("profile integral needs A ∩ [0, x] finite".into()))?;
                let mut acc = Value::zero();
                let mut left = Value::zero();
                let mut level = m.clone();
                for p in pts.iter().filter(|p| p.is_positive().unwrap_or(false)) {
                    acc = &acc + &level.checked_mul(&(p - &left))?;
                    left = p.clone();
                    level = q_profile(a, b, m, std::slice::from_ref(p))?.remove(0);
                }
                Integral::plain(&acc + &level.checked_mul(&(x - &left))?)
            }
        })
    }

    /// `∫_lo^hi f` (negative when `hi < lo`).
    pub fn integral(&self, lo: &Value, hi: &Value) -> Result<Integral> {
        Ok(self.antiderivative(hi)?.minus(&self.antiderivative(lo)?))
    }
}

/// `k` with `2^k <= q < 2^{k+1}` for `q >= 1`; `None` below 1.
fn dyadic_exponent(q: &BigRational) -> Option<u32> {
    if q < &BigRational::one() {
        return None;
    }
    let fl = q.floor().to_integer();
    Some((fl.bits() - 1) as u32)
}

/// Exact copy of `m` at scale `r`.
pub fn proportional_copy(m: &Strategy, r: Value) -> Result<Strategy> {
    martingale::proportional(m, r)
}

#[derive(Clone, Debug)]
struct Shadow {
    inner: Tracked,
    f: ScalingFunction,
}

impl Bettor for Shadow {
    fn increment(&self, history: &[Outcome], _wealth: &Value) -> Result<Value> {
        let inc = self.inner.increment(history)?;
        if inc.is_zero() {
            return Ok(inc);
        }
        self.f.eval(self.inner.wealth())?.checked_mul(&inc)
    }

    fn observe(&mut self, history: &[Outcome], _wealth: &Value, outcome: Outcome) -> Result<()> {
        self.inner.advance(history, outcome)
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// `S(ε) = f(0) M(ε)` and `S'(σ) = f(M(σ)) M'(σ)`.
pub fn f_shadow(m: &Strategy, f: &ScalingFunction) -> Result<Strategy> {
    f.validate()?;
    let initial = f.at_zero()?.checked_mul(m.initial_value())?;
    Ok(Strategy::new(
        format!("shadow({})", m.name()),
        initial,
        Shadow {
            inner: Tracked::new(m),
            f: f.clone(),
        },
    ))
}

#[derive(Clone, Debug)]
struct ClosureApprox {
    inner: Tracked,
    set: WagerSet,
    zero_allowed: bool,
}

impl Bettor for ClosureApprox {
    fn increment(&self, history: &[Outcome], _wealth: &Value) -> Result<Value> {
        let target = self.inner.increment(history)?;
        if target.is_zero() && self.zero_allowed {
            return Ok(target);
        }
        let eps = Value::from_rational(BigRational::new(BigInt::one(), BigInt::one() << history.len()));
        let w = target.try_abs()?;
        let pick = self
            .set
            .first_in_window(&(&w - &eps), &(&w + &eps))?
            .ok_or_else(|| Error::EmptyWindow {
                history: history_string(history),
            })?;
        Ok(if target.is_negative()? { -pick } else { pick })
    }

    fn observe(&mut self, history: &[Outcome], _wealth: &Value, outcome: Outcome) -> Result<()> {
        self.inner.advance(history, outcome)
    }

    fn clone_box(&self) -> Box<dyn Bettor> {
        Box::new(self.clone())
    }
}

/// An A-strategy tracking a strategy over the closure of A: `S(ε) = M(ε) + 2`, and each wager is
/// the first enumerated element of A within `2^-|σ|` of `|M'(σ)|`.
pub fn closure_approx(m: &Strategy, a: &WagerSet) -> Result<Strategy> {
    a.validate()?;
    Ok(Strategy::new(
        format!("closureApprox({})", m.name()),
        m.initial_value() + &Value::int(2),
        ClosureApprox {
            inner: Tracked::new(m),
            set: a.clone(),
            zero_allowed: a.contains(&Value::zero())?,
        },
    )
    .with_declared_set(a.clone()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegralReport {
    pub steps_checked: usize,
    pub step_violations: usize,
    pub cumulative_violations: usize,
    pub first_step_violation: Option<usize>,
    pub first_cumulative_violation: Option<usize>,
}

impl IntegralReport {
    pub fn passed(&self) -> bool {
        self.step_violations == 0 && self.cumulative_violations == 0
    }
}

/// Checks `S(n+1) - S(n) >= ∫_{M(n)}^{M(n+1)} f` for every step and `S(n) >= ∫_0^{M(n)} f` for every n.
pub fn integral_bound_check(m_run: &MartingaleRun, s_run: &MartingaleRun, f: &ScalingFunction) -> Result<IntegralReport> {
    if m_run.history() != s_run.history() {
        return Err(Error::MismatchedRuns(format!(
            "lengths {} and {}",
            m_run.t(),
            s_run.t()
        )));
    }
    let (mw, sw) = (m_run.wealths(), s_run.wealths());
    let mut rep = IntegralReport {
        steps_checked: m_run.t(),
        ..Default::default()
    };
    let mut prev_f = f.antiderivative(&mw[0])?;
    if !prev_f.is_at_most(&sw[0])? {
        rep.cumulative_violations += 1;
        rep.first_cumulative_violation = Some(0);
    }
    for n in 0..m_run.t() {
        let next_f = f.antiderivative(&mw[n + 1])?;
        if !next_f.minus(&prev_f).is_at_most(&(&sw[n + 1] - &sw[n]))? {
            rep.step_violations += 1;
            rep.first_step_violation.get_or_insert(n);
        }
        if !next_f.is_at_most(&sw[n + 1])? {
            rep.cumulative_violations += 1;
            rep.first_cumulative_violation.get_or_insert(n + 1);
        }
        prev_f = next_f;
    }
    Ok(rep)
}

/// `q_m(x) = max{t in [0, m] : t (A ∩ [0, x]) ⊆ closure(B) ∪ {0}}` for each `x`.
pub fn q_profile(a: &WagerSet, b: &WagerSet, m: &Value, xs: &[Value]) -> Result<Vec<Value>> {
    xs.iter().map(|x| q_at(a, b, m, x)).collect()
}

fn q_at(a: &WagerSet, b: &WagerSet, m: &Value, x: &Value) -> Result<Value> {
    let elements: Vec<Value> = a
        .elements_up_to(x)?
        .ok_or_else(|| Error::Unsupported(format!("A ∩ [0, {x}] is not a finite enumerable set")))?
        .into_iter()
        .filter(|v| !v.is_zero())
        .collect();
    if elements.is_empty() || m.is_zero() {
        return Ok(m.clone());
    }
    let amin = &elements[0];
    let amax = elements.last().expect("nonempty");
    match b {
        WagerSet::ClosedInterval { lo, hi } => {
            let t = m.try_min(&hi.checked_div(amax)?)?;
            return Ok(if lo.try_le(&t.checked_mul(amin)?)? { t } else { Value::zero() });
        }
        WagerSet::HalfLine { lo } => {
            return Ok(if lo.try_le(&m.checked_mul(amin)?)? { m.clone() } else { Value::zero() });
        }
        _ => {}
    }
    // t amin must be an element of closure(B) not above m amin: try those, largest first.
    let top = m.checked_mul(amin)?;
    let mut images = b
        .elements_up_to(&top)?
        .ok_or_else(|| Error::Unsupported(format!("B ∩ [0, {top}] is not a finite enumerable set")))?;
    images.reverse();
    'candidates: for image in images {
        if image.is_zero() {
            continue;
        }
        let t = image.checked_div(amin)?;
        for e in &elements[1..] {
            let y = t.checked_mul(e)?;
            if !b.closure_contains(&y)? {
                continue 'candidates;
            }
        }
        return Ok(t);
    }
    Ok(Value::zero())
}

/// Least sampled `x` from which the profile is identically zero over the rest of the sample.
pub fn q_cutoff(xs: &[Value], qs: &[Value]) -> Option<Value> {
    let mut cutoff = None;
    for (x, q) in xs.iter().zip(qs).rev() {
        if !q.is_zero() {
            break;
        }
        cutoff = Some(x.clone());
    }
    cutoff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{always_heads, parse_history, threshold_switcher};
    use crate::wagerset::ExponentRange;

    fn v(n: i64, d: i64) -> Value {
        Value::ratio(n, d)
    }

    #[test]
    fn scaling_function_values() {
        let f = ScalingFunction::MinReciprocal;
        assert_eq!(f.eval(&Value::int(4)).unwrap(), v(1, 4));
        assert_eq!(f.at_zero().unwrap(), Value::one());
        let g = ScalingFunction::DyadicFloor;
        assert_eq!(g.eval(&Value::int(8)).unwrap(), v(1, 8));
        assert_eq!(g.eval(&Value::int(15)).unwrap(), v(1, 8));
        assert_eq!(g.eval(&v(3, 2)).unwrap(), Value::one());
        assert_eq!(g.eval(&v(1, 8)).unwrap(), Value::one());
    }

    #[test]
    fn shadow_wagers() {
        // M(σ) = 4, M'(σ) = 4 under min(1/x, 1) gives 1; under the dyadic floor with 8 gives 1.
        let m = always_heads(Value::int(4), Value::int(4));
        let s = f_shadow(&m, &ScalingFunction::MinReciprocal).unwrap();
        assert_eq!(s.run().pending_increment().unwrap(), Value::one());
        let m = always_heads(Value::int(8), Value::int(8));
        let s = f_shadow(&m, &ScalingFunction::DyadicFloor).unwrap();
        assert_eq!(s.run().pending_increment().unwrap(), Value::one());
    }

    #[test]
    fn constant_shadow_is_proportional() {
        let m = threshold_switcher(Value::int(2), Value::one(), Value::int(10));
        let r = v(3, 2);
        let s = f_shadow(&m, &ScalingFunction::Constant { r: r.clone() }).unwrap();
        let p = proportional_copy(&m, r.clone()).unwrap();
        let h = parse_history("HHTHTTHH").unwrap();
        let (mut a, mut b) = (s.run(), p.run());
        a.play(&h).unwrap();
        b.play(&h).unwrap();
        assert_eq!(a.wealths(), b.wealths());
        let mut base = m.run();
        base.play(&h).unwrap();
        let scaled: Vec<Value> = base.wealths().iter().map(|w| w.checked_mul(&r).unwrap()).collect();
        assert_eq!(a.wealths(), scaled.as_slice());
    }

    #[test]
    fn antiderivatives() {
        let f = ScalingFunction::DyadicFloor;
        // Independent block sum: 2 on [0,2], then 1 per doubling.
        for (x, want) in [(2, 2), (4, 3), (8, 4), (16, 5)] {
            assert_eq!(f.antiderivative(&Value::int(x)).unwrap(), Integral::plain(Value::int(want)));
        }
        assert_eq!(f.antiderivative(&Value::int(6)).unwrap(), Integral::plain(v(7, 2)));
        let g = ScalingFunction::MinReciprocal;
        let i = g.antiderivative(&Value::int(8)).unwrap();
        assert!((i.to_f64() - (1.0 + 8f64.ln())).abs() < 1e-12);
        assert_eq!(g.antiderivative(&v(1, 2)).unwrap(), Integral::plain(v(1, 2)));
        let p = ScalingFunction::PiecewiseRational {
            breakpoints: vec![Value::one(), Value::int(3)],
            values: vec![Value::int(2), Value::one(), Value::zero()],
        };
        p.validate().unwrap();
        assert_eq!(p.antiderivative(&Value::int(10)).unwrap(), Integral::plain(Value::int(4)));
        assert_eq!(p.antiderivative(&Value::int(2)).unwrap(), Integral::plain(Value::int(3)));
        assert_eq!(p.eval(&Value::one()).unwrap(), Value::one());
    }

    #[test]
    fn ln_comparisons() {
        let i = Integral {
            base: Value::one(),
            ln_arg: crate::value::rat(8, 1),
        };
        // 1 + ln 8 ≈ 3.0794
        assert!(i.is_at_most(&v(30795, 10000)).unwrap());
        assert!(!i.is_at_most(&v(30794, 10000)).unwrap());
    }

    #[test]
    fn increasing_piecewise_rejected() {
        let p = ScalingFunction::PiecewiseRational {
            breakpoints: vec![Value::one()],
            values: vec![Value::one(), Value::int(2)],
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn integral_check_on_ascending_wealth() {
        let m = always_heads(Value::one(), Value::one());
        for f in [ScalingFunction::MinReciprocal, ScalingFunction::DyadicFloor, ScalingFunction::Constant { r: v(1, 3) }] {
            let s = f_shadow(&m, &f).unwrap();
            let h = parse_history("HHHHHHHTTHHTHTTTH").unwrap();
            let (mut a, mut b) = (m.run(), s.run());
            a.play(&h).unwrap();
            b.play(&h).unwrap();
            let rep = integral_bound_check(&a, &b, &f).unwrap();
            assert!(rep.passed(), "{f:?}: {rep:?}");
            assert_eq!(rep.steps_checked, h.len());
        }
    }

    #[test]
    fn mismatched_runs() {
        let m = always_heads(Value::one(), Value::int(3));
        let (mut a, b) = (m.run(), m.run());
        a.step(Outcome::Heads).unwrap();
        assert!(matches!(
            integral_bound_check(&a, &b, &ScalingFunction::MinReciprocal),
            Err(Error::MismatchedRuns(_))
        ));
    }

    #[test]
    fn closure_approx_examples() {
        let unit = WagerSet::interval(Value::zero(), Value::one());
        let m = always_heads(Value::one(), Value::int(5));
        let s = closure_approx(&m, &unit).unwrap();
        assert_eq!(s.initial_value(), &Value::int(7));
        assert_eq!(s.run().pending_increment().unwrap(), Value::one());
        let one = WagerSet::finite([Value::one()]).unwrap();
        let s = closure_approx(&m, &one).unwrap();
        let mut r = s.run();
        r.play(&parse_history("HTTHH").unwrap()).unwrap();
        assert!(r.increments().iter().all(|x| x == &Value::one()));
        // Wagers of 1 cannot be approximated inside {2}.
        let two = WagerSet::finite([Value::int(2)]).unwrap();
        let s = closure_approx(&m, &two).unwrap();
        assert!(matches!(s.run().pending_increment(), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn q_profile_examples() {
        let a = WagerSet::finite([Value::one(), Value::int(2)]).unwrap();
        let b = WagerSet::finite([Value::one(), Value::int(2), Value::int(3)]).unwrap();
        assert_eq!(q_profile(&a, &b, &Value::int(2), &[Value::int(2)]).unwrap(), vec![Value::one()]);
        let z = WagerSet::integers();
        let qs = q_profile(&z, &z, &Value::int(5), &[Value::one(), Value::int(50)]).unwrap();
        assert_eq!(qs, vec![Value::int(5), Value::int(5)]);
        let unit = WagerSet::interval(Value::zero(), Value::one());
        let g = WagerSet::geometric(Value::int(2), ExponentRange::NonNegative);
        let qs = q_profile(&g, &unit, &Value::one(), &[Value::int(4)]).unwrap();
        assert_eq!(qs, vec![v(1, 4)]);
    }
}
