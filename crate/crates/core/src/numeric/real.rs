use std::cmp::Ordering;
use std::fmt;

use super::big::BigScalar;
use super::log::LogScalar;
use crate::error::{Error, Result};

/// Magnitudes with `|ln|x|| > LOG_SWITCH` are kept in log form.
pub const LOG_SWITCH: f64 = 20_000.0;

/// Largest `|ln|x||` for which binary products are attempted directly.
const DIRECT_PRODUCT_LIMIT: f64 = 1.0e9;

/// A point coordinate: an ordinary binary float, or a log-domain value whose
/// magnitude is astronomically small or large.
///
/// Values are normalized: the `Log` variant is only used beyond [`LOG_SWITCH`],
/// and `NearUnit` only when the gap to `±1` is below `1e-20`.
#[derive(Clone, Debug)]
pub enum Real {
    Big(BigScalar),
    Log(LogScalar),
    /// `sign * (1 - gap)` with a tiny positive `gap`, so that collar
    /// coordinates at the far end of `[0, 1]` keep their distance to the end.
    NearUnit { sign: i8, gap: Box<Real> },
}

/// `ln` of the largest gap kept in `NearUnit` form.
const NEAR_UNIT_LN: f64 = -46.0;

impl Real {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        Real::Big(BigScalar::from_f64(x, bits))
    }

    pub fn zero(bits: usize) -> Self {
        Real::Big(BigScalar::zero(bits))
    }

    pub fn one(bits: usize) -> Self {
        Real::Big(BigScalar::one(bits))
    }

    pub fn from_big(x: BigScalar) -> Self {
        Real::Big(x)
    }

    pub fn from_log(l: LogScalar, bits: usize) -> Result<Self> {
        match l.logmag() {
            None => Ok(Real::zero(bits)),
            Some(lm) if lm.to_f64().abs() <= LOG_SWITCH => Ok(Real::Big(l.to_big(bits)?)),
            Some(_) => Ok(Real::Log(l)),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            Real::Big(x) => x.bits(),
            Real::Log(l) => l.logmag().map_or(super::DEFAULT_BITS, BigScalar::bits),
            Real::NearUnit { gap, .. } => gap.bits(),
        }
    }

    /// `sign * (1 - gap)`, normalized.
    pub fn near_unit(sign: i8, gap: Real) -> Result<Real> {
        let bits = gap.bits();
        if gap.signum() <= 0 || gap.ln_abs_f64() > NEAR_UNIT_LN {
            let v = Real::one(bits).sub(&gap)?;
            return Ok(if sign < 0 { v.neg() } else { v });
        }
        Ok(Real::NearUnit { sign: sign.signum(), gap: Box::new(gap) })
    }

    /// Same value with any `NearUnit` form rounded to a binary float.
    fn flat(&self) -> Real {
        match self {
            Real::NearUnit { .. } => Real::Big(self.to_big().expect("near-unit values are finite")),
            _ => self.clone(),
        }
    }

    pub fn is_near_unit(&self) -> bool {
        matches!(self, Real::NearUnit { .. })
    }

    fn is_exact_unit(&self) -> Option<i8> {
        match self {
            Real::Big(x) if x.abs() == BigScalar::one(x.bits()) => Some(x.signum()),
            _ => None,
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, Real::Log(_))
    }

    pub fn signum(&self) -> i8 {
        match self {
            Real::Big(x) => x.signum(),
            Real::Log(l) => l.sign(),
            Real::NearUnit { sign, .. } => *sign,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    /// Estimate of `ln|x|` as `f64`.
    pub fn ln_abs_f64(&self) -> f64 {
        match self {
            Real::Big(x) => x.ln_abs_estimate(),
            Real::Log(l) => l.logmag_f64(),
            Real::NearUnit { gap, .. } => -gap.to_f64(),
        }
    }

    pub fn to_log(&self) -> Result<LogScalar> {
        match self {
            Real::Big(x) => LogScalar::from_big(x),
            Real::Log(l) => Ok(l.clone()),
            Real::NearUnit { .. } => LogScalar::from_big(&self.to_big()?),
        }
    }

    /// Binary value; tiny log values flush to zero, huge ones are a range error.
    pub fn to_big(&self) -> Result<BigScalar> {
        match self {
            Real::Big(x) => Ok(x.clone()),
            Real::Log(l) => {
                if l.logmag_f64() < 0.0 {
                    Ok(BigScalar::zero(self.bits()))
                } else {
                    Err(Error::Range(format!("value {l} does not fit a binary float")))
                }
            }
            Real::NearUnit { sign, gap } => {
                let v = &BigScalar::one(self.bits()) - &gap.to_big()?;
                Ok(if *sign < 0 { -v } else { v })
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Big(x) => x.to_f64(),
            Real::Log(l) => {
                if l.logmag_f64() < 0.0 {
                    0.0
                } else {
                    l.sign() as f64 * f64::INFINITY
                }
            }
            Real::NearUnit { sign, gap } => *sign as f64 * (1.0 - gap.to_f64()),
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Big(x) => Real::Big(-x),
            Real::Log(l) => Real::Log(l.neg()),
            Real::NearUnit { sign, gap } => Real::NearUnit { sign: -sign, gap: gap.clone() },
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Big(x) => Real::Big(x.abs()),
            Real::Log(l) => Real::Log(l.abs()),
            Real::NearUnit { gap, .. } => Real::NearUnit { sign: 1, gap: gap.clone() },
        }
    }

    pub fn add(&self, other: &Real) -> Result<Real> {
        if let Some(r) = self.add_near_unit(other)? {
            return Ok(r);
        }
        if let Some(r) = other.add_near_unit(self)? {
            return Ok(r);
        }
        let (a, b) = (self.flat(), other.flat());
        let (this, other) = (&a, &b);
        if let (Real::Big(a), Real::Big(b)) = (this, other) {
            return Ok(Real::Big(a + b));
        }
        if this.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(this.clone());
        }
        let bits = this.bits().max(other.bits());
        let gap = (bits as f64 + 16.0) * std::f64::consts::LN_2;
        let (la, lb) = (this.ln_abs_f64(), other.ln_abs_f64());
        if la - lb > gap {
            return Ok(this.clone());
        }
        if lb - la > gap {
            return Ok(other.clone());
        }
        Real::from_log(this.to_log()?.add(&other.to_log()?)?, bits)
    }

    /// Sums that create, cancel or shift a `NearUnit` value exactly.
    fn add_near_unit(&self, other: &Real) -> Result<Option<Real>> {
        match (self, other) {
            (Real::NearUnit { sign, gap }, Real::NearUnit { sign: s2, gap: g2 }) if *s2 == -*sign => {
                let d = g2.sub(gap)?;
                Ok(Some(if *sign < 0 { d.neg() } else { d }))
            }
            (Real::NearUnit { sign, gap }, _) if other.is_exact_unit() == Some(-*sign) => {
                Ok(Some(if *sign < 0 { (**gap).clone() } else { gap.neg() }))
            }
            (Real::NearUnit { sign, gap }, _)
                if !matches!(other, Real::NearUnit { .. }) && other.ln_abs_f64() < NEAR_UNIT_LN =>
            {
                // sign (1 - gap) + t = sign (1 - (gap - sign t))
                let shifted = if *sign < 0 { gap.add(other)? } else { gap.sub(other)? };
                Ok(Some(Real::near_unit(*sign, shifted)?))
            }
            (_, Real::NearUnit { .. }) => Ok(None),
            _ => match self.is_exact_unit() {
                Some(s) if other.signum() == -s && other.ln_abs_f64() < NEAR_UNIT_LN => {
                    Ok(Some(Real::near_unit(s, other.abs())?))
                }
                _ => Ok(None),
            },
        }
    }

    pub fn sub(&self, other: &Real) -> Result<Real> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Result<Real> {
        if self.is_near_unit() || other.is_near_unit() {
            return self.flat().mul(&other.flat());
        }
        let bits = self.bits().max(other.bits());
        if self.is_zero() || other.is_zero() {
            return Ok(Real::zero(bits));
        }
        if let (Real::Big(a), Real::Big(b)) = (self, other) {
            if (a.ln_abs_estimate() + b.ln_abs_estimate()).abs() < DIRECT_PRODUCT_LIMIT {
                return Ok(Real::Big(a * b));
            }
        }
        Real::from_log(self.to_log()?.mul(&other.to_log()?), bits)
    }

    pub fn div(&self, other: &Real) -> Result<Real> {
        if self.is_near_unit() || other.is_near_unit() {
            return self.flat().div(&other.flat());
        }
        if other.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let bits = self.bits().max(other.bits());
        if self.is_zero() {
            return Ok(Real::zero(bits));
        }
        if let (Real::Big(a), Real::Big(b)) = (self, other) {
            if (a.ln_abs_estimate() - b.ln_abs_estimate()).abs() < DIRECT_PRODUCT_LIMIT {
                return Ok(Real::Big(a / b));
            }
        }
        Real::from_log(self.to_log()?.div(&other.to_log()?)?, bits)
    }

    pub fn scale(&self, k: &BigScalar) -> Result<Real> {
        self.mul(&Real::Big(k.clone()))
    }

    pub fn powi(&self, n: i32) -> Result<Real> {
        if self.is_near_unit() {
            return self.flat().powi(n);
        }
        let bits = self.bits();
        if n == 0 {
            return Ok(Real::one(bits));
        }
        if let Real::Big(x) = self {
            if x.is_zero() {
                return if n > 0 { Ok(self.clone()) } else { Err(Error::Domain("zero to a negative power".into())) };
            }
            if (x.ln_abs_estimate() * n as f64).abs() < DIRECT_PRODUCT_LIMIT {
                return Ok(Real::Big(x.powi(n)));
            }
        }
        Real::from_log(self.to_log()?.powi(n)?, bits)
    }

    pub fn sqrt(&self) -> Result<Real> {
        if self.is_near_unit() {
            return self.flat().sqrt();
        }
        match self {
            Real::Big(x) => Ok(Real::Big(x.sqrt()?)),
            Real::Log(l) => Real::from_log(l.sqrt()?, self.bits()),
            Real::NearUnit { .. } => unreachable!(),
        }
    }

    pub fn exp(&self) -> Result<Real> {
        if self.is_near_unit() {
            return self.flat().exp();
        }
        let bits = self.bits();
        match self {
            Real::Big(x) => {
                if x.to_f64().abs() > LOG_SWITCH {
                    Ok(Real::Log(LogScalar::positive(x.clone())))
                } else {
                    Ok(Real::Big(x.exp()))
                }
            }
            Real::Log(l) if l.logmag_f64() < 0.0 => Ok(Real::one(bits)),
            Real::Log(l) => Err(Error::Range(format!("exp of {l} overflows"))),
            Real::NearUnit { .. } => unreachable!(),
        }
    }

    pub fn ln(&self) -> Result<Real> {
        if let Real::NearUnit { sign: 1, gap } = self {
            return match &**gap {
                Real::Big(g) => Ok(Real::Big((-g).ln1p()?)),
                g => Ok(g.neg()),
            };
        }
        match self {
            Real::Big(x) => Ok(Real::Big(x.ln()?)),
            Real::Log(l) => Ok(Real::Big(l.ln()?)),
            Real::NearUnit { .. } => Err(Error::Domain("ln of non-positive value".into())),
        }
    }

    pub fn sin(&self) -> Result<Real> {
        if self.is_near_unit() {
            return self.flat().sin();
        }
        match self {
            Real::Big(x) => Ok(Real::Big(x.sin())),
            Real::Log(l) if l.logmag_f64() < 0.0 => Ok(self.clone()),
            Real::Log(_) => Err(Error::Range("sin of an out-of-range argument".into())),
            Real::NearUnit { .. } => unreachable!(),
        }
    }

    pub fn cos(&self) -> Result<Real> {
        if self.is_near_unit() {
            return self.flat().cos();
        }
        match self {
            Real::Big(x) => Ok(Real::Big(x.cos())),
            Real::Log(l) if l.logmag_f64() < 0.0 => Ok(Real::one(self.bits())),
            Real::Log(_) => Err(Error::Range("cos of an out-of-range argument".into())),
            Real::NearUnit { .. } => unreachable!(),
        }
    }

    /// Four-quadrant arctangent of `y / x`.
    pub fn atan2(y: &Real, x: &Real) -> Result<Real> {
        if y.is_near_unit() || x.is_near_unit() {
            return Real::atan2(&y.flat(), &x.flat());
        }
        if let (Real::Big(yb), Real::Big(xb)) = (y, x) {
            return Ok(Real::Big(BigScalar::atan2(yb, xb)));
        }
        let bits = y.bits().max(x.bits());
        if y.is_zero() && x.is_zero() {
            return Ok(Real::zero(bits));
        }
        let m = if y.abs() >= x.abs() { y.abs() } else { x.abs() };
        let (ys, xs) = (y.div(&m)?, x.div(&m)?);
        match (&ys, &xs) {
            (Real::Big(yb), Real::Big(xb)) => Ok(Real::Big(BigScalar::atan2(yb, xb))),
            // |y| << |x|: angle is y/x near 0 or pi
            (Real::Log(_), Real::Big(xb)) => {
                if xb.is_negative() {
                    let pi = Real::Big(BigScalar::pi(bits));
                    if ys.signum() < 0 { pi.neg().sub(&ys.div(&xs)?) } else { pi.add(&ys.div(&xs)?) }
                } else {
                    ys.div(&xs)
                }
            }
            // |x| << |y|: angle is +-pi/2 - x/y
            (Real::Big(yb), _) => {
                let half_pi = &BigScalar::pi(bits) * &BigScalar::from_f64(0.5, bits);
                let base = if yb.is_negative() { -half_pi } else { half_pi };
                Real::Big(base).sub(&xs.div(&ys)?)
            }
            _ => Err(Error::Range("atan2 of two negligible arguments".into())),
        }
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Real::Big(a), Real::Big(b)) => a.partial_cmp(b),
            (Real::NearUnit { .. }, _) | (_, Real::NearUnit { .. }) => {
                Some(self.sub(other).ok()?.signum().cmp(&0))
            }
            _ => self.to_log().ok()?.partial_cmp(&other.to_log().ok()?),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Big(x) => write!(f, "{:e}", x.to_f64()),
            Real::Log(l) => write!(f, "{l}"),
            Real::NearUnit { sign, gap } => write!(f, "{}(1-{gap})", if *sign < 0 { "-" } else { "" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 256;

    fn tiny(lm: f64) -> Real {
        Real::from_log(LogScalar::positive(BigScalar::from_f64(lm, B)), B).unwrap()
    }

    #[test]
    fn normalization() {
        assert!(!tiny(-100.0).is_log());
        assert!(tiny(-1e6).is_log());
        assert_eq!(tiny(-1e6).to_f64(), 0.0);
    }

    #[test]
    fn negligible_addends_vanish() {
        let one = Real::one(B);
        let s = one.add(&tiny(-1e6)).unwrap();
        assert!(!s.is_log());
        assert_eq!(s.to_f64(), 1.0);
        let z = Real::zero(B).add(&tiny(-1e6)).unwrap();
        assert!(z.is_log());
    }

    #[test]
    fn comparable_log_terms_combine() {
        let a = tiny(-1e6);
        let s = a.add(&a).unwrap();
        let expected = -1e6 + std::f64::consts::LN_2;
        assert!((s.ln_abs_f64() - expected).abs() < 1e-9);
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn products_and_roots_stay_in_log_form() {
        let a = tiny(-1e6);
        let p = a.mul(&Real::from_f64(2.0, B)).unwrap();
        assert!((p.ln_abs_f64() - (-1e6 + std::f64::consts::LN_2)).abs() < 1e-9);
        assert!((a.sqrt().unwrap().ln_abs_f64() + 5e5).abs() < 1e-9);
        assert!((a.powi(2).unwrap().ln_abs_f64() + 2e6).abs() < 1e-6);
        assert!((a.ln().unwrap().to_f64() + 1e6).abs() < 1e-9);
        let q = Real::one(B).div(&a).unwrap();
        assert!((q.ln_abs_f64() - 1e6).abs() < 1e-9);
    }

    #[test]
    fn transcendental_small_argument_rules() {
        let a = tiny(-1e6);
        assert_eq!(a.exp().unwrap().to_f64(), 1.0);
        assert!(a.sin().unwrap().is_log());
        assert_eq!(a.cos().unwrap().to_f64(), 1.0);
        let ang = Real::atan2(&a, &Real::from_f64(-1.0, B)).unwrap();
        assert!((ang.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        let ang = Real::atan2(&a, &a.mul(&Real::from_f64(1.0, B)).unwrap()).unwrap();
        assert!((ang.to_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let ang = Real::atan2(&Real::from_f64(-2.0, B), &a).unwrap();
        assert!((ang.to_f64() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let big = Real::from_f64(5e4, B).exp().unwrap();
        assert!(big.is_log());
    }

    #[test]
    fn near_unit_keeps_the_gap() {
        let g = tiny(-1e6);
        let one = Real::one(B);
        let s = one.sub(&g).unwrap();
        assert!(s.is_near_unit());
        assert!(s < one);
        assert!(s > Real::from_f64(0.5, B));
        let back = one.sub(&s).unwrap();
        assert!(back.is_log());
        assert!((back.ln_abs_f64() + 1e6).abs() < 1e-9);
        assert!((s.sub(&one).unwrap().ln_abs_f64() + 1e6).abs() < 1e-9);
        assert_eq!(s.sub(&one).unwrap().signum(), -1);
        let small = Real::from_f64(1e-30, B);
        let s2 = one.sub(&small).unwrap();
        assert!(s2.is_near_unit());
        let d = one.sub(&s2).unwrap().to_f64();
        assert!((d - 1e-30).abs() < 1e-45);
        assert_eq!(s.mul(&Real::from_f64(2.0, B)).unwrap().to_f64(), 2.0);
        assert!(!one.sub(&Real::from_f64(1e-3, B)).unwrap().is_near_unit());
        assert!(s.neg().add(&one).unwrap().is_log());
    }
}
