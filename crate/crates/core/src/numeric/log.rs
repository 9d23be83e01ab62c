use std::cmp::Ordering;
use std::fmt;

use super::big::BigScalar;
use crate::error::{Error, Result};

/// `ln` of the largest magnitude a [`BigScalar`] can hold (binary exponent limit `2^31`).
const BIG_LN_LIMIT: f64 = 1.48e9;

/// Sign plus natural log of the magnitude.
///
/// Values like `exp(-exp(1/y))` for small `y` are far outside any binary
/// exponent range but have a perfectly ordinary logarithm.
#[derive(Clone, Debug)]
pub struct LogScalar {
    sign: i8,
    logmag: Option<BigScalar>,
}

impl LogScalar {
    pub fn zero() -> Self {
        LogScalar { sign: 0, logmag: None }
    }

    /// `sign * exp(logmag)`; `sign` must be `-1` or `+1`.
    pub fn new(sign: i8, logmag: BigScalar) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        LogScalar { sign: sign.signum(), logmag: Some(logmag) }
    }

    pub fn positive(logmag: BigScalar) -> Self {
        Self::new(1, logmag)
    }

    pub fn from_big(x: &BigScalar) -> Result<Self> {
        match x.signum() {
            0 => Ok(Self::zero()),
            s => Ok(LogScalar { sign: s, logmag: Some(x.abs().ln()?) }),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|x|`; `None` for zero.
    pub fn logmag(&self) -> Option<&BigScalar> {
        self.logmag.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Converts back to a binary float, failing when the magnitude is out of range.
    pub fn to_big(&self, bits: usize) -> Result<BigScalar> {
        let Some(lm) = &self.logmag else {
            return Ok(BigScalar::zero(bits));
        };
        let l = lm.to_f64();
        if l.abs() > BIG_LN_LIMIT {
            return Err(Error::Range(format!("exp({l:e}) is outside the binary exponent range")));
        }
        let m = lm.exp();
        Ok(if self.sign < 0 { -m } else { m })
    }

    /// Like [`to_big`](Self::to_big) but flushes underflow to zero.
    pub fn to_big_saturating(&self, bits: usize) -> Result<BigScalar> {
        match &self.logmag {
            Some(lm) if lm.to_f64() < -BIG_LN_LIMIT => Ok(BigScalar::zero(bits)),
            _ => self.to_big(bits),
        }
    }

    pub fn neg(&self) -> Self {
        LogScalar { sign: -self.sign, logmag: self.logmag.clone() }
    }

    pub fn abs(&self) -> Self {
        LogScalar { sign: self.sign.abs(), logmag: self.logmag.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (&self.logmag, &other.logmag) {
            (Some(a), Some(b)) => LogScalar { sign: self.sign * other.sign, logmag: Some(a + b) },
            _ => Self::zero(),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        match (&self.logmag, &other.logmag) {
            (_, None) => Err(Error::Domain("division by zero".into())),
            (None, _) => Ok(Self::zero()),
            (Some(a), Some(b)) => Ok(LogScalar { sign: self.sign * other.sign, logmag: Some(a - b) }),
        }
    }

    pub fn powi(&self, n: i32) -> Result<Self> {
        match &self.logmag {
            None if n > 0 => Ok(Self::zero()),
            None => Err(Error::Domain("zero to a non-positive power".into())),
            Some(lm) => {
                let sign = if n % 2 == 0 { 1 } else { self.sign };
                Ok(LogScalar { sign, logmag: Some(lm * &BigScalar::from_i64(n as i64, lm.bits())) })
            }
        }
    }

    pub fn sqrt(&self) -> Result<Self> {
        match &self.logmag {
            None => Ok(Self::zero()),
            Some(_) if self.sign < 0 => Err(Error::Domain("sqrt of negative value".into())),
            Some(lm) => Ok(LogScalar { sign: 1, logmag: Some(lm * &BigScalar::from_f64(0.5, lm.bits())) }),
        }
    }

    /// `ln x` for `x > 0`.
    pub fn ln(&self) -> Result<BigScalar> {
        match (&self.logmag, self.sign) {
            (Some(lm), 1) => Ok(lm.clone()),
            _ => Err(Error::Domain("ln of non-positive value".into())),
        }
    }

    /// Sum of two log-domain values (log-sum-exp with signs).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (Some(a), Some(b)) = (&self.logmag, &other.logmag) else {
            return Ok(if self.is_zero() { other.clone() } else { self.clone() });
        };
        let (hi, lo, s_hi, s_lo) = if a >= b {
            (a, b, self.sign, other.sign)
        } else {
            (b, a, other.sign, self.sign)
        };
        let ratio = (lo - hi).exp();
        let t = if s_hi == s_lo { ratio } else { -ratio };
        if t == BigScalar::from_i64(-1, t.bits()) {
            return Ok(Self::zero());
        }
        Ok(LogScalar { sign: s_hi, logmag: Some(hi + &t.ln1p()?) })
    }

    /// Logarithmic magnitude as `f64` (`-inf` for zero).
    pub fn logmag_f64(&self) -> f64 {
        self.logmag.as_ref().map_or(f64::NEG_INFINITY, BigScalar::to_f64)
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && self.logmag == other.logmag
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            o => return Some(o),
        }
        match (&self.logmag, &other.logmag) {
            (Some(a), Some(b)) => {
                let o = a.partial_cmp(b)?;
                Some(if self.sign < 0 { o.reverse() } else { o })
            }
            _ => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.logmag {
            None => write!(f, "0"),
            Some(lm) => write!(f, "{}exp({:e})", if self.sign < 0 { "-" } else { "" }, lm.to_f64()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_big() {
        let x = BigScalar::from_f64(-0.37, 256);
        let l = LogScalar::from_big(&x).unwrap();
        assert_eq!(l.sign(), -1);
        let back = l.to_big(256).unwrap();
        assert!(((&back - &x) / x).abs().to_f64() < 1e-70);
    }

    #[test]
    fn multiplication_adds_logs() {
        let a = LogScalar::positive(BigScalar::from_f64(-1e30, 256));
        let b = LogScalar::new(-1, BigScalar::from_f64(-2e30, 256));
        let c = a.mul(&b);
        assert_eq!(c.sign(), -1);
        assert!((c.logmag_f64() + 3e30).abs() < 1e15);
        assert!(c.to_big(256).is_err());
        assert!(c.to_big_saturating(256).unwrap().is_zero());
    }

    #[test]
    fn signed_sum() {
        let b = 256;
        let x = LogScalar::from_big(&BigScalar::from_f64(3.0, b)).unwrap();
        let y = LogScalar::from_big(&BigScalar::from_f64(-1.0, b)).unwrap();
        let s = x.add(&y).unwrap().to_big(b).unwrap();
        assert!((s.to_f64() - 2.0).abs() < 1e-60);
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn ordering() {
        let b = 128;
        let small = LogScalar::positive(BigScalar::from_f64(-1e9, b));
        let smaller = LogScalar::positive(BigScalar::from_f64(-2e9, b));
        assert!(smaller < small);
        assert!(small.neg() < smaller.neg());
        assert!(LogScalar::zero() < smaller);
    }
}
