//! Transverse stretch profiles: `phi`, `phi^2` and the blended profile `chi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{phi, phi2, BigScalar, LogScalar, Real};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Blend {
    /// `b(t) = phi(u) / (phi(u) + phi(1 - u))`, `u = (t - y0) / (y1 - y0)`.
    #[default]
    #[serde(rename = "phi-step")]
    PhiStep,
}

/// `chi = phi^2` on `(0, y0]`, the identity on `[y1, 1)`, and a log-linear
/// blend of the two in between.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiProfile {
    pub y0: f64,
    pub y1: f64,
    #[serde(default)]
    pub blend: Blend,
}

impl Default for ChiProfile {
    fn default() -> Self {
        ChiProfile { y0: 0.2, y1: 0.8, blend: Blend::PhiStep }
    }
}

/// Natural logs of the smallest values of the three terms of `(log chi)'`
/// over the certificate grid. The terms underflow `f64` near `y0`, so the
/// check runs in big floats and only the logs are reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityCertificate {
    pub points: usize,
    /// `(1 - b) * (log phi^2)'`
    pub ln_min_stretch_term: f64,
    /// `b / t`
    pub ln_min_identity_term: f64,
    /// `b' * (log t - log phi^2(t))`
    pub ln_min_blend_term: f64,
}

const CERT_BITS: usize = 128;

const MAX_NEWTON: usize = 60;

/// Builds and certifies a profile.
pub fn build_chi(y0: f64, y1: f64) -> Result<ChiProfile> {
    let p = ChiProfile { y0, y1, blend: Blend::PhiStep };
    p.validate()?;
    p.certify(1000)?;
    Ok(p)
}

/// Logistic blend weight and its derivative in `t` (f64).
fn weight_f64(p: &ChiProfile, t: f64) -> (f64, f64) {
    let w = p.y1 - p.y0;
    let v = (t - p.y0) / w;
    if v <= 0.0 {
        return (0.0, 0.0);
    }
    if v >= 1.0 {
        return (1.0, 0.0);
    }
    let e = 1.0 / v - 1.0 / (1.0 - v);
    let b = if e > 0.0 {
        let q = (-e).exp();
        q / (1.0 + q)
    } else {
        1.0 / (1.0 + e.exp())
    };
    let db = b * (1.0 - b) * (1.0 / (v * v) + 1.0 / ((1.0 - v) * (1.0 - v))) / w;
    (b, db)
}

/// Blend weight `b`, its complement `1 - b` (computed without cancellation)
/// and `b'` in `t`.
fn weight_big(p: &ChiProfile, t: &BigScalar) -> (BigScalar, BigScalar, BigScalar) {
    let bits = t.bits();
    let one = BigScalar::one(bits);
    let zero = BigScalar::zero(bits);
    let y0 = BigScalar::from_f64(p.y0, bits);
    let w = &BigScalar::from_f64(p.y1, bits) - &y0;
    let v = &(t - &y0) / &w;
    if v.signum() <= 0 {
        return (zero.clone(), one, zero);
    }
    if v >= one {
        return (one, zero.clone(), zero);
    }
    let om = &one - &v;
    let e = &v.recip() - &om.recip();
    let q = (-&e.abs()).exp();
    let (small, large) = (&q / &(&one + &q), (&one + &q).recip());
    let (b, cb) = if e.signum() > 0 { (small, large) } else { (large, small) };
    let db = &(&(&b * &cb) * &(&(&v * &v).recip() + &(&om * &om).recip())) / &w;
    (b, cb, db)
}

impl ChiProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.y0 > 0.0 && self.y0 < self.y1 && self.y1 < 1.0) {
            return Err(Error::Parameter(format!(
                "stretch profile needs 0 < y0 < y1 < 1, got y0 = {}, y1 = {}",
                self.y0, self.y1
            )));
        }
        Ok(())
    }

    /// Checks term by term that `log chi` is increasing on the blend interval.
    pub fn certify(&self, points: usize) -> Result<MonotonicityCertificate> {
        self.validate()?;
        let mut cert = MonotonicityCertificate {
            points,
            ln_min_stretch_term: f64::INFINITY,
            ln_min_identity_term: f64::INFINITY,
            ln_min_blend_term: f64::INFINITY,
        };
        let y0 = BigScalar::from_f64(self.y0, CERT_BITS);
        let w = &BigScalar::from_f64(self.y1, CERT_BITS) - &y0;
        let n = BigScalar::from_i64(points as i64 + 1, CERT_BITS);
        for i in 1..=points {
            let t = &y0 + &(&(&w * &BigScalar::from_i64(i as i64, CERT_BITS)) / &n);
            let (b, cb, db) = weight_big(self, &t);
            let inv = t.recip();
            let e = inv.exp();
            let terms = [
                &cb * &(&e * &(&inv * &inv)),
                &b * &inv,
                &db * &(&t.ln()? + &e),
            ];
            if terms.iter().any(|x| x.signum() <= 0) {
                return Err(Error::Construction(format!(
                    "chi is not certified increasing at t = {}: terms {:e}, {:e}, {:e}",
                    t.to_f64(),
                    terms[0].to_f64(),
                    terms[1].to_f64(),
                    terms[2].to_f64()
                )));
            }
            let ln = |x: &BigScalar| x.ln().map(|l| l.to_f64());
            cert.ln_min_stretch_term = cert.ln_min_stretch_term.min(ln(&terms[0])?);
            cert.ln_min_identity_term = cert.ln_min_identity_term.min(ln(&terms[1])?);
            cert.ln_min_blend_term = cert.ln_min_blend_term.min(ln(&terms[2])?);
        }
        Ok(cert)
    }

    /// `log chi(t)` on the blend interval together with its derivative.
    fn log_chi_blend(&self, t: &BigScalar) -> Result<(BigScalar, BigScalar)> {
        let (b, cb, db) = weight_big(self, t);
        let inv = t.recip();
        let e = inv.exp();
        let l2 = -&e;
        let lt = t.ln()?;
        let val = &(&cb * &l2) + &(&b * &lt);
        let deriv = &(&(&db * &(&lt - &l2)) + &(&cb * &(&e * &(&inv * &inv)))) + &(&b * &inv);
        Ok((val, deriv))
    }

    fn log_chi_blend_f64(&self, t: f64) -> (f64, f64) {
        let (b, db) = weight_f64(self, t);
        let e = (1.0 / t).exp();
        let val = -(1.0 - b) * e + b * t.ln();
        let deriv = db * (t.ln() + e) + (1.0 - b) * e / (t * t) + b / t;
        (val, deriv)
    }

    pub fn chi_eval(&self, y: &BigScalar) -> Result<LogScalar> {
        if y.signum() <= 0 {
            return Err(Error::Domain(format!("chi requires y > 0, got {:e}", y.to_f64())));
        }
        let yf = y.to_f64();
        if yf <= self.y0 {
            return phi2(y);
        }
        if yf >= self.y1 {
            return LogScalar::from_big(y);
        }
        Ok(LogScalar::positive(self.log_chi_blend(y)?.0))
    }

    pub fn chi_inv(&self, u: &LogScalar) -> Result<BigScalar> {
        let lu = match u.logmag() {
            Some(l) if u.sign() > 0 => l.clone(),
            _ => return Err(Error::Domain(format!("chi_inv requires u > 0, got {u}"))),
        };
        let bits = lu.bits();
        let y0 = BigScalar::from_f64(self.y0, bits);
        let lo_val = -&y0.recip().exp();
        if lu <= lo_val {
            // u = exp(-exp(1/y))
            return Ok((-&lu).ln()?.recip());
        }
        let y1 = BigScalar::from_f64(self.y1, bits);
        if lu >= y1.ln()? {
            return u.to_big(bits);
        }
        self.solve_blend(&lu)
    }

    /// Solves `log chi(t) = target` on the blend interval: bisection to a
    /// `1e-3` bracket, f64 Newton, then Newton at full precision.
    fn solve_blend(&self, target: &BigScalar) -> Result<BigScalar> {
        let bits = target.bits();
        let tf = target.to_f64();
        let (mut lo, mut hi) = (self.y0, self.y1);
        let mut iters = 0;
        while hi - lo > 1e-3 && iters < MAX_NEWTON {
            let mid = 0.5 * (lo + hi);
            if self.log_chi_blend_f64(mid).0 < tf {
                lo = mid;
            } else {
                hi = mid;
            }
            iters += 1;
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..8 {
            let (v, d) = self.log_chi_blend_f64(t);
            let next = t - (v - tf) / d;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            iters += 1;
        }
        let mut t = BigScalar::from_f64(t, bits);
        // a few ulps of slack: log chi is only evaluated to within rounding
        let eps = BigScalar::from_f64(2f64.powi(8 - bits as i32), bits);
        let noise = BigScalar::from_f64(2f64.powi(-(bits as i32) / 2), bits);
        let mut prev: Option<BigScalar> = None;
        while iters < MAX_NEWTON {
            let (v, d) = self.log_chi_blend(&t)?;
            let step = (&(&v - target) / &d).abs();
            let stalled = prev.as_ref().is_some_and(|p| step >= *p && step <= &noise * &t);
            t = &t - &(&(&v - target) / &d);
            iters += 1;
            if step <= &eps * &t || stalled {
                return Ok(t);
            }
            prev = Some(step);
        }
        Err(Error::Range(format!("chi_inv did not converge for log u = {tf:e}")))
    }
}

/// A transverse stretch applied to one coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum StretchProfile {
    Phi,
    PhiSquared,
    Chi(ChiProfile),
}

fn nonneg(y: &Real, what: &str) -> Result<BigScalar> {
    if y.signum() < 0 {
        return Err(Error::Domain(format!("{what} requires a nonnegative coordinate, got {y}")));
    }
    y.to_big()
}

impl StretchProfile {
    pub fn name(&self) -> &'static str {
        match self {
            StretchProfile::Phi => "phi",
            StretchProfile::PhiSquared => "phi^2",
            StretchProfile::Chi(_) => "chi",
        }
    }

    /// Forward stretch; `0` maps to `0`.
    pub fn apply(&self, y: &Real, bits: usize) -> Result<Real> {
        if y.is_zero() {
            return Ok(Real::zero(bits));
        }
        if y.is_log() {
            return Err(Error::Range(format!("{}: argument {y} is below the representable range", self.name())));
        }
        let yb = nonneg(y, self.name())?.with_bits(bits);
        let l = match self {
            StretchProfile::Phi => phi(&yb)?,
            StretchProfile::PhiSquared => phi2(&yb)?,
            StretchProfile::Chi(p) => p.chi_eval(&yb)?,
        };
        Real::from_log(l, bits)
    }

    pub fn apply_inv(&self, u: &Real, bits: usize) -> Result<Real> {
        if u.is_zero() {
            return Ok(Real::zero(bits));
        }
        if u.signum() < 0 {
            return Err(Error::Domain(format!("{}^-1 requires a nonnegative coordinate, got {u}", self.name())));
        }
        let l = u.to_log()?;
        let lu = l.logmag().expect("nonzero").with_bits(bits);
        let one = BigScalar::one(bits);
        let out = match self {
            StretchProfile::Phi => {
                if lu.signum() >= 0 {
                    return Err(Error::Domain(format!("phi^-1 requires u < 1, got {u}")));
                }
                -&lu.recip()
            }
            StretchProfile::PhiSquared => {
                if lu.signum() >= 0 || -&lu <= one {
                    return Err(Error::Domain(format!("phi^2^-1 requires u < exp(-1), got {u}")));
                }
                (-&lu).ln()?.recip()
            }
            StretchProfile::Chi(p) => p.chi_inv(&LogScalar::positive(lu))?,
        };
        Ok(Real::from_big(out))
    }
}
