//! Arbitrary-precision binary floating point backed by `astro-float`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::{Error, Result};

/// Default mantissa width in bits.
pub const DEFAULT_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A real number with a configurable binary mantissa.
///
/// Binary operations run at the larger of the two operand precisions.
#[derive(Clone)]
pub struct BigScalar(BigFloat);

impl BigScalar {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        if x == 0.0 {
            // the backend's f64 zero carries no mantissa and loses the precision
            return Self::from_i64(0, bits);
        }
        BigScalar(BigFloat::from_f64(x, bits))
    }

    pub fn from_i64(x: i64, bits: usize) -> Self {
        BigScalar(BigFloat::from_i64(x, bits))
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_i64(0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn pi(bits: usize) -> Self {
        BigScalar(with_consts(|cc| cc.pi(bits, RM)))
    }

    pub fn ln2(bits: usize) -> Self {
        BigScalar(with_consts(|cc| cc.ln_2(bits, RM)))
    }

    /// Parses a decimal literal such as `"-1.25e-3"`.
    pub fn parse(s: &str, bits: usize) -> Result<Self> {
        let v = with_consts(|cc| BigFloat::parse(s.trim(), Radix::Dec, bits, RM, cc));
        if v.is_nan() {
            return Err(Error::Parameter(format!("not a decimal number: {s:?}")));
        }
        Ok(BigScalar(v))
    }

    /// Full-precision decimal rendering; `parse` at the same precision restores the value.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    pub fn bits(&self) -> usize {
        match self.0.mantissa_max_bit_len() {
            Some(b) if b > 0 => b,
            _ => DEFAULT_BITS,
        }
    }

    /// Rounds to a new precision.
    pub fn with_bits(&self, bits: usize) -> Self {
        let mut v = self.0.clone();
        if v.set_precision(bits, RM).is_err() {
            return self.clone();
        }
        BigScalar(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn signum(&self) -> i8 {
        if self.0.is_zero() {
            0
        } else if self.0.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Binary exponent `e` with `|x| = m * 2^e`, `m` in `[1/2, 1)`.
    pub fn exponent(&self) -> Option<i32> {
        if self.0.is_zero() {
            None
        } else {
            self.0.exponent()
        }
    }

    /// Nearest `f64`; saturates to zero or infinity outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let top = *words.last().unwrap_or(&0) as f64 / 18446744073709551616.0;
        let mag = if exp > 1100 {
            f64::INFINITY
        } else if exp < -1200 {
            0.0
        } else {
            top * 2f64.powi(exp)
        };
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Cheap estimate of `ln|x|` from the exponent and leading word.
    pub fn ln_abs_estimate(&self) -> f64 {
        match self.0.as_raw_parts() {
            Some((words, _, _, exp, _)) if !self.0.is_zero() => {
                let top = *words.last().unwrap_or(&0) as f64 / 18446744073709551616.0;
                top.ln() + exp as f64 * std::f64::consts::LN_2
            }
            _ => f64::NEG_INFINITY,
        }
    }

    fn p2(&self, other: &Self) -> usize {
        self.bits().max(other.bits())
    }

    pub fn abs(&self) -> Self {
        BigScalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        BigScalar(self.0.reciprocal(self.bits(), RM))
    }

    pub fn powi(&self, n: i32) -> Self {
        let bits = self.bits();
        let mut acc = BigScalar::one(bits);
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.bits();
        BigScalar(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    /// Natural logarithm; `x <= 0` is a domain error.
    pub fn ln(&self) -> Result<Self> {
        if self.signum() <= 0 {
            return Err(Error::Domain(format!("ln of non-positive value {:e}", self.to_f64())));
        }
        let p = self.bits();
        Ok(BigScalar(with_consts(|cc| self.0.ln(p, RM, cc))))
    }

    /// `ln(1 + x)` without cancellation for small `x`.
    pub fn ln1p(&self) -> Result<Self> {
        let bits = self.bits();
        if self.is_zero() {
            return Ok(BigScalar::zero(bits));
        }
        let e = self.exponent().unwrap_or(0);
        if e <= -(bits as i32) - 2 {
            // |x| < 2^-bits: ln(1+x) = x - x^2/2 to working precision
            let half = BigScalar::from_f64(0.5, bits);
            return Ok(self - &(&(self * self) * &half));
        }
        let extra = if e < 0 { (-e) as usize } else { 0 };
        let wide = bits + extra + 64;
        let onep = &BigScalar::one(wide) + &self.with_bits(wide);
        Ok(onep.ln()?.with_bits(bits))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative value {:e}", self.to_f64())));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        Ok(BigScalar(self.0.sqrt(self.bits(), RM)))
    }

    pub fn sin(&self) -> Self {
        let p = self.bits();
        BigScalar(with_consts(|cc| self.0.sin(p, RM, cc)))
    }

    pub fn cos(&self) -> Self {
        let p = self.bits();
        BigScalar(with_consts(|cc| self.0.cos(p, RM, cc)))
    }

    pub fn atan(&self) -> Self {
        let p = self.bits();
        BigScalar(with_consts(|cc| self.0.atan(p, RM, cc)))
    }

    pub fn asin(&self) -> Result<Self> {
        if self.abs() > BigScalar::one(self.bits()) {
            return Err(Error::Domain("asin argument outside [-1, 1]".into()));
        }
        let p = self.bits();
        Ok(BigScalar(with_consts(|cc| self.0.asin(p, RM, cc))))
    }

    /// Four-quadrant arctangent of `y / x`; `atan2(0, 0) = 0`.
    pub fn atan2(y: &Self, x: &Self) -> Self {
        let bits = y.p2(x);
        if x.is_zero() && y.is_zero() {
            return BigScalar::zero(bits);
        }
        let half_pi = &BigScalar::pi(bits) * &BigScalar::from_f64(0.5, bits);
        if y.abs() > x.abs() {
            let base = (x / y).atan();
            if y.is_negative() {
                &(-&half_pi) - &base
            } else {
                &half_pi - &base
            }
        } else {
            let base = (y / x).atan();
            if !x.is_negative() {
                base
            } else if y.is_negative() {
                &base - &BigScalar::pi(bits)
            } else {
                &base + &BigScalar::pi(bits)
            }
        }
    }

    pub fn max(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

macro_rules! bin_op {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&BigScalar> for &BigScalar {
            type Output = BigScalar;
            fn $m(self, rhs: &BigScalar) -> BigScalar {
                BigScalar(self.0.$inner(&rhs.0, self.p2(rhs), RM))
            }
        }
        impl $tr<BigScalar> for BigScalar {
            type Output = BigScalar;
            fn $m(self, rhs: BigScalar) -> BigScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigScalar> for BigScalar {
            type Output = BigScalar;
            fn $m(self, rhs: &BigScalar) -> BigScalar {
                (&self).$m(rhs)
            }
        }
    };
}

bin_op!(Add, add, add);
bin_op!(Sub, sub, sub);
bin_op!(Mul, mul, mul);
bin_op!(Div, div, div);

impl Neg for &BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar(BigFloat::neg(&self.0))
    }
}

impl Neg for BigScalar {
    type Output = BigScalar;
    fn neg(self) -> BigScalar {
        BigScalar(self.0.neg())
    }
}

impl PartialEq for BigScalar {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for BigScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigScalar({:e}, {} bits)", self.to_f64(), self.bits())
    }
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_from_f64_keeps_precision() {
        let z = BigScalar::from_f64(0.0, 192);
        assert_eq!(z.bits(), 192);
        let s = (&z * &z).sqrt().unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn elementary_values() {
        let b = DEFAULT_BITS;
        let one = BigScalar::one(b);
        assert!((one.exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(BigScalar::from_f64(2.0, b).ln().unwrap().to_f64() - std::f64::consts::LN_2 < 1e-16);
        assert!((BigScalar::pi(b).to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(BigScalar::from_f64(-3.5, b).to_f64(), -3.5);
        assert!(BigScalar::zero(b).ln().is_err());
        assert!(BigScalar::from_f64(-1.0, b).sqrt().is_err());
    }

    #[test]
    fn ln1p_keeps_tiny_arguments() {
        let b = DEFAULT_BITS;
        let x = BigScalar::parse("1e-40", b).unwrap();
        let rel = (&(&x.ln1p().unwrap() - &x) / &x).to_f64();
        assert!((rel + 5e-41).abs() < 1e-50);
        let tiny = BigScalar::from_f64(-1e5, b).exp();
        assert_eq!(tiny.ln1p().unwrap(), tiny);
    }

    #[test]
    fn atan2_quadrants() {
        let b = 128;
        let f = |y: f64, x: f64| BigScalar::atan2(&BigScalar::from_f64(y, b), &BigScalar::from_f64(x, b)).to_f64();
        for &(y, x) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0), (3.0, 0.1), (-3.0, 0.0), (0.0, -2.0)] {
            assert!((f(y, x) - y.atan2(x)).abs() < 1e-15, "{y} {x}");
        }
    }

    #[test]
    fn to_f64_extremes() {
        let b = 256;
        assert_eq!(BigScalar::from_f64(-1e6, b).exp().to_f64(), 0.0);
        assert!(BigScalar::from_f64(1e6, b).exp().to_f64().is_infinite());
        let v = BigScalar::from_f64(-40.0, b).exp();
        assert!((v.ln_abs_estimate() + 40.0).abs() < 1e-9);
    }
}
