//! The flat function `phi(y) = exp(-1/y)`, its square `phi(phi(y))` and inverses.

use super::big::BigScalar;
use super::log::LogScalar;
use crate::error::{Error, Result};

/// `1/y` above this makes `exp(1/y)` unrepresentable as a binary float.
const MAX_INV_Y: f64 = 1.45e9;

fn check_positive(y: &BigScalar, what: &str) -> Result<()> {
    if y.signum() <= 0 {
        return Err(Error::Domain(format!("{what} requires y > 0, got {:e}", y.to_f64())));
    }
    Ok(())
}

/// `exp(-1/y)` in log form; the log-magnitude is exactly `-1/y`.
pub fn phi(y: &BigScalar) -> Result<LogScalar> {
    check_positive(y, "phi")?;
    Ok(LogScalar::positive(-y.recip()))
}

/// `exp(-exp(1/y))`, i.e. `phi(phi(y))`.
pub fn phi2(y: &BigScalar) -> Result<LogScalar> {
    check_positive(y, "phi2")?;
    let inv = y.recip();
    if inv.to_f64() > MAX_INV_Y {
        return Err(Error::Range(format!(
            "phi2({:e}): exp(1/y) exceeds the log-magnitude range (need 1/y <= {MAX_INV_Y:e})",
            y.to_f64()
        )));
    }
    Ok(LogScalar::positive(-inv.exp()))
}

/// Inverse of [`phi`] on `(0, 1)`: `-1/ln u`.
pub fn phi_inv(u: &LogScalar) -> Result<BigScalar> {
    match u.logmag() {
        Some(lm) if u.sign() > 0 && lm.signum() < 0 => Ok(-lm.recip()),
        _ => Err(Error::Domain(format!("phi_inv requires 0 < u < 1, got {u}"))),
    }
}

/// Transverse coordinate of `Phi^-2 g Phi^2` for a germ whose transverse
/// factor at the boundary has logarithm `ln_h`, together with its deviation from `y`.
///
/// Uses `y / (1 + y d)`, `d = ln1p(-ln_h * exp(-1/y))`, and the deviation
/// `-y^2 d / (1 + y d)`, so neither term cancels.
pub fn conjugate_transverse_stable(ln_h: &BigScalar, y: &BigScalar) -> Result<(BigScalar, BigScalar)> {
    check_positive(y, "conjugate_transverse_stable")?;
    let bits = y.bits().max(ln_h.bits());
    let y = y.with_bits(bits);
    let inv = y.recip();
    if inv.to_f64() > MAX_INV_Y {
        return Err(Error::Range(format!("exp(-1/y) underflows at y = {:e}", y.to_f64())));
    }
    let t = ln_h * &(-&inv).exp();
    if t >= BigScalar::one(bits) {
        return Err(Error::Domain(format!(
            "exp(1/y) <= ln a at y = {:e}: the conjugated germ leaves (0, 1)",
            y.to_f64()
        )));
    }
    let d = (-t).ln1p()?;
    let denom = &BigScalar::one(bits) + &(&y * &d);
    let value = &y / &denom;
    let dev = -(&(&(&y * &y) * &d) / &denom);
    Ok((value, dev))
}

/// `1 / ln(exp(1/y) - ln a)`: the transverse part of `Phi^-2 g Phi^2` for `g(x, y) = (x, a y)`.
pub fn stable_conjugate_linear(a: &BigScalar, y: &BigScalar) -> Result<BigScalar> {
    if a.signum() <= 0 {
        return Err(Error::Domain("stable_conjugate_linear requires a > 0".into()));
    }
    if y >= &BigScalar::one(y.bits()) {
        return Err(Error::Domain("stable_conjugate_linear requires y < 1".into()));
    }
    Ok(conjugate_transverse_stable(&a.ln()?, y)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 256;

    fn big(x: f64) -> BigScalar {
        BigScalar::from_f64(x, B)
    }

    #[test]
    fn phi_values() {
        assert!((phi(&big(1.0)).unwrap().to_big(B).unwrap().to_f64() - 0.36787944117144233).abs() < 1e-16);
        assert!((phi(&big(0.5)).unwrap().to_big(B).unwrap().to_f64() - 0.1353352832366127).abs() < 1e-16);
        let l = phi(&BigScalar::parse("0.01", B).unwrap()).unwrap();
        assert_eq!(l.logmag().unwrap().to_f64(), -100.0);
        assert!(phi(&big(0.0)).is_err());
        assert!(phi(&big(-1.0)).is_err());
    }

    #[test]
    fn phi2_values() {
        let v = phi2(&big(0.5)).unwrap().to_big(B).unwrap().to_f64();
        assert!((v / 6.179_3e-4 - 1.0).abs() < 1e-4);
        let v = phi2(&big(1.0)).unwrap().to_big(B).unwrap().to_f64();
        assert!((v / 6.5988e-2 - 1.0).abs() < 1e-4);
        assert!(phi2(&big(1e-10)).is_err());
        assert!(phi2(&big(0.0)).is_err());
    }

    #[test]
    fn phi_inv_domain() {
        assert!((phi_inv(&phi(&big(0.5)).unwrap()).unwrap().to_f64() - 0.5).abs() < 1e-70);
        assert!(phi_inv(&LogScalar::positive(big(0.5))).is_err());
        assert!(phi_inv(&LogScalar::zero()).is_err());
        assert!(phi_inv(&LogScalar::new(-1, big(-2.0))).is_err());
    }

    #[test]
    fn identity_germ_is_fixed() {
        for y in [0.9, 0.3, 0.05, 0.02] {
            let v = stable_conjugate_linear(&big(1.0), &big(y)).unwrap();
            assert_eq!(v, big(y));
        }
    }

    #[test]
    fn conjugate_linear_domain_errors() {
        assert!(stable_conjugate_linear(&big(-1.0), &big(0.5)).is_err());
        assert!(stable_conjugate_linear(&big(2.0), &big(1.5)).is_err());
        // exp(1/0.9) ~ 3.04 < ln(1e2) ~ 4.6
        assert!(stable_conjugate_linear(&big(100.0), &big(0.9)).is_err());
    }
}
