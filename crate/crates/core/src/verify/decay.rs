//! How fast `Phi^-2 g Phi^2` approaches `(g_x(x, 0), y)` near the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{evaluate, MapExpr};
use crate::numeric::{stable_conjugate_linear, BigScalar, Real};
use crate::par::Execution;
use crate::stretch::{stretch_conjugate, StretchProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub y_min: f64,
    pub y_max: f64,
    pub points: usize,
    /// Window `[lo, hi]` of the grid used by both fits.
    pub fit_window: (f64, f64),
    /// Tangential coordinates of the sampled germ point.
    pub x: Vec<f64>,
    pub execution: Execution,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig {
            y_min: 0.02,
            y_max: 0.2,
            points: 24,
            fit_window: (0.02, 0.05),
            x: vec![0.3],
            execution: Execution::default(),
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_min > 0.0 && self.y_min < self.y_max && self.y_max < 1.0) {
            return Err(Error::Parameter(format!("need 0 < y_min < y_max < 1, got [{}, {}]", self.y_min, self.y_max)));
        }
        if self.points < 2 {
            return Err(Error::Parameter("need at least 2 grid points".into()));
        }
        if self.fit_window.0 >= self.fit_window.1 {
            return Err(Error::Parameter("empty fit window".into()));
        }
        Ok(())
    }

    /// Log-spaced, strictly decreasing from `y_max` to `y_min`.
    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.y_max.ln(), self.y_min.ln());
        (0..self.points).map(|i| (a + (b - a) * i as f64 / (self.points - 1) as f64).exp()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least squares `v = slope * u + intercept`.
pub fn fit_line(u: &[f64], v: &[f64]) -> Option<LineFit> {
    let n = u.len();
    if n < 2 {
        return None;
    }
    let (mu, mv) = (u.iter().sum::<f64>() / n as f64, v.iter().sum::<f64>() / n as f64);
    let sxx: f64 = u.iter().map(|x| (x - mu) * (x - mu)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: mv - slope * mu, points: n })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub x: Vec<f64>,
    /// Strictly decreasing transverse offsets.
    pub grid: Vec<f64>,
    /// `ln |G_y|`; `None` where `G_y` vanishes or could not be evaluated.
    pub ln_g_y: Vec<Option<f64>>,
    /// `G_y` itself, which may underflow to 0 in `f64`.
    pub g_y: Vec<f64>,
    /// `ln |G_i|` for each tangential component.
    pub ln_g_tangential: Vec<Vec<Option<f64>>>,
    /// `ln |G_y|` against `ln y` on the fit window.
    pub slope_fit: Option<LineFit>,
    /// Mean of `ln |G_y| + 1/y - 2 ln y` on the fit window; tends to `ln C`.
    pub constant_fit: Option<f64>,
    pub tangential_slopes: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

/// Exact values of `G = Phi^-2 g Phi^2 - (g_x(x, 0), y)` at `(x, y)`.
pub fn flatness_defect(conj: &MapExpr, g: &MapExpr, x: &[f64], y: f64, bits: usize) -> Result<Vec<Real>> {
    let mut p: Vec<Real> = x.iter().map(|v| Real::from_f64(*v, bits)).collect();
    let mut p0 = p.clone();
    p.push(Real::from_f64(y, bits));
    p0.push(Real::zero(bits));
    let out = evaluate(conj, &p, bits)?;
    let base = evaluate(g, &p0, bits)?;
    let n = x.len();
    let mut d = Vec::with_capacity(n + 1);
    for i in 0..n {
        d.push(out[i].sub(&base[i])?);
    }
    d.push(out[n].sub(&p[n])?);
    Ok(d)
}

/// `ln |x|`, or `None` when `x` is indistinguishable from rounding noise of size `floor`.
fn ln_abs(x: &Real, floor: f64) -> Option<f64> {
    let l = x.ln_abs_f64();
    if x.is_zero() || l <= floor {
        None
    } else {
        Some(l)
    }
}

/// Measures the decay of `G` on the configured grid and fits it.
pub fn measure_flatness(g: &MapExpr, cfg: &DecayConfig, bits: usize) -> Result<DecayReport> {
    cfg.validate()?;
    let dim = g.dim_in().ok_or_else(|| Error::Dimension("germ has no fixed dimension".into()))?;
    if dim != cfg.x.len() + 1 {
        return Err(Error::Dimension(format!("{dim}-dimensional germ sampled at a {}-point", cfg.x.len() + 1)));
    }
    let conj = stretch_conjugate(g, StretchProfile::PhiSquared, dim)?;
    let grid = cfg.grid();
    let values = cfg.execution.map(&grid, |&y| flatness_defect(&conj, g, &cfg.x, y, bits));
    let mut warnings = Vec::new();
    let mut ln_g_y = Vec::with_capacity(grid.len());
    let mut g_y = Vec::with_capacity(grid.len());
    let mut ln_t = vec![Vec::with_capacity(grid.len()); dim - 1];
    // ln of the relative rounding level at this precision
    let noise = (16.0 - bits as f64) * std::f64::consts::LN_2;
    let scale = cfg.x.iter().fold(1.0f64, |m, v| m.max(v.abs())).ln();
    for (y, v) in grid.iter().zip(values) {
        match v {
            Ok(d) => {
                ln_g_y.push(ln_abs(&d[dim - 1], noise + y.ln()));
                g_y.push(d[dim - 1].to_f64());
                for (i, col) in ln_t.iter_mut().enumerate() {
                    col.push(ln_abs(&d[i], noise + scale));
                }
            }
            Err(Error::Range(m)) => {
                warnings.push(format!("grid truncated at y = {y:e}: {m}"));
                ln_g_y.push(None);
                g_y.push(f64::NAN);
                for col in ln_t.iter_mut() {
                    col.push(None);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let (lo, hi) = cfg.fit_window;
    let window = |vals: &[Option<f64>]| -> (Vec<f64>, Vec<f64>) {
        grid.iter()
            .zip(vals)
            .filter(|(y, v)| **y >= lo * (1.0 - 1e-12) && **y <= hi * (1.0 + 1e-12) && v.is_some())
            .map(|(y, v)| (*y, v.expect("filtered")))
            .unzip()
    };
    let (ys, ls) = window(&ln_g_y);
    let lys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let slope_fit = fit_line(&lys, &ls);
    let constant_fit = if ys.is_empty() {
        None
    } else {
        Some(ys.iter().zip(&ls).map(|(y, l)| l + 1.0 / y - 2.0 * y.ln()).sum::<f64>() / ys.len() as f64)
    };
    for (i, col) in ln_t.iter().enumerate() {
        if window(col).0.is_empty() {
            warnings.push(format!("tangential defect G_{i} is below working precision on the fit window"));
        }
    }
    let tangential_slopes = ln_t
        .iter()
        .map(|col| {
            let (ys, ls) = window(col);
            fit_line(&ys.iter().map(|y| y.ln()).collect::<Vec<_>>(), &ls).map(|f| f.slope)
        })
        .collect();
    Ok(DecayReport {
        x: cfg.x.clone(),
        grid,
        ln_g_y,
        g_y,
        ln_g_tangential: ln_t,
        slope_fit,
        constant_fit,
        tangential_slopes,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub a: f64,
    pub points: usize,
    /// Grid offsets where the measured `G_y` left the bounds.
    pub violations: Vec<f64>,
    pub pass: bool,
}

/// Checks `G_y` against the conjugated linear germs `a/2 y` and `2 a y`,
/// which bound it whenever `a/2 y <= g_y <= 2 a y`.
pub fn sandwich_check(g: &MapExpr, a: f64, cfg: &DecayConfig, bits: usize) -> Result<SandwichReport> {
    cfg.validate()?;
    let dim = g.dim_in().ok_or_else(|| Error::Dimension("germ has no fixed dimension".into()))?;
    let conj = stretch_conjugate(g, StretchProfile::PhiSquared, dim)?;
    let grid = cfg.grid();
    let slack = 2f64.powi(16 - bits as i32);
    let checks = cfg.execution.try_map(&grid, |&y| {
        let yb = BigScalar::from_f64(y, bits);
        let lower = &stable_conjugate_linear(&BigScalar::from_f64(a / 2.0, bits), &yb)? - &yb;
        let upper = &stable_conjugate_linear(&BigScalar::from_f64(2.0 * a, bits), &yb)? - &yb;
        let d = flatness_defect(&conj, g, &cfg.x, y, bits)?;
        let gy = d[dim - 1].to_big()?.with_bits(bits);
        let room = BigScalar::from_f64(slack * y, bits);
        Ok::<_, Error>(gy >= &lower - &room && gy <= &upper + &room)
    })?;
    let violations: Vec<f64> = grid.iter().zip(&checks).filter(|(_, ok)| !**ok).map(|(y, _)| *y).collect();
    Ok(SandwichReport { a, points: grid.len(), pass: violations.is_empty(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::expr::{c, var};

    const B: usize = 256;

    fn germ(tangential: crate::geometry::Expr, factor: crate::geometry::Expr) -> MapExpr {
        MapExpr::CollarGerm { tangential: vec![tangential], factor }
    }

    #[test]
    fn identity_germ_has_no_defect() {
        let rep = measure_flatness(&germ(var(0), c(1.0)), &DecayConfig::default(), B).unwrap();
        assert!(rep.ln_g_y.iter().all(Option::is_none));
        assert!(rep.slope_fit.is_none() && rep.constant_fit.is_none());
    }

    #[test]
    fn doubling_germ_constant_is_ln_ln_2() {
        let rep = measure_flatness(&germ(var(0), c(2.0)), &DecayConfig::default(), B).unwrap();
        let k = rep.constant_fit.unwrap();
        assert!((k - 2f64.ln().ln()).abs() < 0.05, "{k}");
        assert!(rep.grid.windows(2).all(|w| w[0] > w[1]));
        let cfg = DecayConfig { y_min: 0.1, y_max: 0.2, points: 2, ..DecayConfig::default() };
        let at = measure_flatness(&germ(var(0), c(2.0)), &cfg, B).unwrap();
        assert!((at.g_y[1] / 3.1469427498783984e-7 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_germ_beats_polynomials() {
        let g = germ(var(0) + var(1), c(1.0) + var(0) * var(0));
        let rep = measure_flatness(&g, &DecayConfig::default(), B).unwrap();
        assert!(rep.slope_fit.unwrap().slope > 8.0);
        // G_x = phi^2(y) is under 1e-64 on the whole grid
        assert!(rep.ln_g_tangential[0].iter().all(|v| v.is_none_or(|l| l < -140.0)));
        assert!(rep.tangential_slopes[0].is_none() && !rep.warnings.is_empty());
    }

    #[test]
    fn linear_germs_sit_inside_the_sandwich() {
        for a in [1.5, 2.0, 3.0] {
            let rep = sandwich_check(&germ(var(0), c(a)), 2.0, &DecayConfig::default(), B).unwrap();
            assert!(rep.pass, "{a}: {:?}", rep.violations);
        }
        let rep = sandwich_check(&germ(var(0), c(5.0)), 2.0, &DecayConfig::default(), B).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn line_fit_recovers_a_line() {
        let u = [1.0, 2.0, 3.0];
        let f = fit_line(&u, &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!(fit_line(&[1.0], &[1.0]).is_none());
    }
}
