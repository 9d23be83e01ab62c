//! Finite differences with Richardson extrapolation.

use serde::{Deserialize, Serialize};

use super::big::{BigScalar, DEFAULT_BITS};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdConfig {
    pub order: usize,
    pub base_step: f64,
    pub richardson_levels: usize,
    pub precision_bits: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { order: 1, base_step: 0.01, richardson_levels: 6, precision_bits: DEFAULT_BITS }
    }
}

impl FdConfig {
    pub fn with_order(order: usize) -> Self {
        FdConfig { order, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::Parameter("fd order must be >= 1".into()));
        }
        if !(self.base_step > 0.0) || !self.base_step.is_finite() {
            return Err(Error::Parameter("fd base_step must be positive".into()));
        }
        if self.richardson_levels < 2 {
            return Err(Error::Parameter("richardson_levels must be >= 2".into()));
        }
        if self.precision_bits < 32 {
            return Err(Error::Parameter("precision_bits must be >= 32".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    Central,
    /// Uses `x, x + h, ..., x + k h`: the right-sided derivative.
    Forward,
    /// Uses `x, x - h, ..., x - k h`: the left-sided derivative.
    Backward,
}

#[derive(Clone, Debug)]
pub struct FdEstimate {
    pub value: BigScalar,
    /// Magnitude of the last extrapolation correction.
    pub err: BigScalar,
    pub low_confidence: bool,
}

/// Central-difference derivative of order `cfg.order` at `x`.
pub fn fd_derivative<F>(f: F, x: &BigScalar, cfg: &FdConfig) -> Result<FdEstimate>
where
    F: Fn(&BigScalar) -> Result<BigScalar>,
{
    fd_derivative_stencil(f, x, cfg, Stencil::Central, None)
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Derivative with an explicit stencil; `domain` bounds every stencil point.
pub fn fd_derivative_stencil<F>(
    f: F,
    x: &BigScalar,
    cfg: &FdConfig,
    stencil: Stencil,
    domain: Option<(&BigScalar, &BigScalar)>,
) -> Result<FdEstimate>
where
    F: Fn(&BigScalar) -> Result<BigScalar>,
{
    cfg.validate()?;
    let bits = cfg.precision_bits;
    let k = cfg.order;
    let x = x.with_bits(bits);
    let h0 = BigScalar::from_f64(cfg.base_step, bits);
    let kb = BigScalar::from_i64(k as i64, bits);
    let half = BigScalar::from_f64(0.5, bits);

    if let Some((lo, hi)) = domain {
        let (left, right) = match stencil {
            Stencil::Central => {
                let reach = &(&kb * &h0) * &half;
                (&x - &reach, &x + &reach)
            }
            Stencil::Forward => (x.clone(), &x + &(&kb * &h0)),
            Stencil::Backward => (&x - &(&kb * &h0), x.clone()),
        };
        if &left < lo || &right > hi {
            return Err(Error::Domain(format!(
                "stencil [{:e}, {:e}] leaves the domain [{:e}, {:e}]",
                left.to_f64(),
                right.to_f64(),
                lo.to_f64(),
                hi.to_f64()
            )));
        }
    }

    let levels = cfg.richardson_levels;
    let mut column = Vec::with_capacity(levels);
    let mut h = h0;
    for _ in 0..levels {
        let mut acc = BigScalar::zero(bits);
        for j in 0..=k {
            let c = binomial(k, j);
            let (offset, sign) = match stencil {
                Stencil::Central => {
                    let off = &BigScalar::from_i64(k as i64 - 2 * j as i64, bits) * &(&h * &half);
                    (off, if j % 2 == 0 { 1 } else { -1 })
                }
                Stencil::Forward => (
                    &BigScalar::from_i64(j as i64, bits) * &h,
                    if (k - j) % 2 == 0 { 1 } else { -1 },
                ),
                Stencil::Backward => (
                    -(&BigScalar::from_i64(j as i64, bits) * &h),
                    if j % 2 == 0 { 1 } else { -1 },
                ),
            };
            let fx = f(&(&x + &offset))?;
            acc = &acc + &(&fx * &BigScalar::from_i64(sign * c, bits));
        }
        column.push(&acc / &h.powi(k as i32));
        h = &h * &half;
    }

    let q: i64 = match stencil {
        Stencil::Central => 4,
        _ => 2,
    };
    let mut prev_best;
    let mut last_correction = BigScalar::zero(bits);
    let mut factor = 1i64;
    for _level in 1..levels {
        factor *= q;
        let denom = BigScalar::from_i64(factor - 1, bits);
        let next: Vec<BigScalar> = column
            .windows(2)
            .map(|w| &w[1] + &(&(&w[1] - &w[0]) / &denom))
            .collect();
        prev_best = column[column.len() - 1].clone();
        column = next;
        last_correction = (&column[0] - &prev_best).abs();
    }
    let value = column.swap_remove(0);
    let tol = BigScalar::from_f64(2f64.powi(-(bits as i32) / 2), bits);
    let low_confidence = last_correction > value.abs() && last_correction > tol && value.abs() > tol;
    Ok(FdEstimate { value, err: last_correction, low_confidence })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: f64) -> BigScalar {
        BigScalar::from_f64(x, DEFAULT_BITS)
    }

    #[test]
    fn square_first_derivative() {
        let est = fd_derivative(|y| Ok(y * y), &big(1.0), &FdConfig::with_order(1)).unwrap();
        assert!((&est.value - &big(2.0)).abs().to_f64() < 1e-30);
        assert!(est.err.to_f64() < 1e-30);
    }

    #[test]
    fn exp_third_derivative() {
        let cfg = FdConfig { order: 3, richardson_levels: 8, ..FdConfig::default() };
        let est = fd_derivative(|y| Ok(y.exp()), &big(0.0), &cfg).unwrap();
        assert!((est.value.to_f64() - 1.0).abs() < 1e-20, "{:?}", est);
    }

    #[test]
    fn one_sided_stencils_agree_on_smooth_functions() {
        let cfg = FdConfig { order: 2, base_step: 1e-3, richardson_levels: 8, ..FdConfig::default() };
        let f = |y: &BigScalar| Ok(y.sin());
        let x = big(0.4);
        let fwd = fd_derivative_stencil(f, &x, &cfg, Stencil::Forward, None).unwrap();
        let bwd = fd_derivative_stencil(f, &x, &cfg, Stencil::Backward, None).unwrap();
        let exact = -0.4f64.sin();
        assert!((fwd.value.to_f64() - exact).abs() < 1e-12);
        assert!((bwd.value.to_f64() - exact).abs() < 1e-12);
    }

    #[test]
    fn stencil_domain_guard() {
        let cfg = FdConfig::with_order(2);
        let (lo, hi) = (big(0.0), big(1.0));
        let r = fd_derivative_stencil(|y| Ok(y.clone()), &big(0.005), &cfg, Stencil::Central, Some((&lo, &hi)));
        assert!(matches!(r, Err(Error::Domain(_))));
        let r = fd_derivative_stencil(|y| Ok(y.clone()), &big(0.0), &cfg, Stencil::Forward, Some((&lo, &hi)));
        assert!(r.is_ok());
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = FdConfig { richardson_levels: 1, ..FdConfig::default() };
        assert!(fd_derivative(|y| Ok(y.clone()), &big(0.0), &cfg).is_err());
        let cfg = FdConfig { base_step: 0.0, ..FdConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
