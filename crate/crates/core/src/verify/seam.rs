//! Finite-order smoothness checks across a seam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glue::GluedMap;
use crate::numeric::{fd_derivative_stencil, BigScalar, FdConfig, FdEstimate, Real, Stencil, TolerancePolicy};
use crate::par::Execution;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Between the pass and fail lines, or the extrapolation error is too large.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeamCheckConfig {
    pub max_order: usize,
    /// Oblique directions sampled besides the transverse one.
    pub directions: usize,
    pub base_step: f64,
    pub richardson_levels: usize,
    /// Absolute pass line; the precision policy's `seam_pass` when absent.
    pub abs_tol: Option<f64>,
    pub rel_tol: f64,
    pub fail_factor: f64,
    pub execution: Execution,
}

impl Default for SeamCheckConfig {
    fn default() -> Self {
        SeamCheckConfig {
            max_order: 4,
            directions: 8,
            base_step: 0.01,
            richardson_levels: 6,
            abs_tol: None,
            rel_tol: 0.0,
            fail_factor: 1e3,
            execution: Execution::default(),
        }
    }
}

impl SeamCheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_order == 0 {
            return Err(Error::Parameter("max_order must be at least 1".into()));
        }
        if self.directions < 8 {
            return Err(Error::Parameter(format!("need at least 8 oblique directions, got {}", self.directions)));
        }
        if self.fail_factor <= 1.0 {
            return Err(Error::Parameter("fail_factor must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamLocation {
    pub seam: usize,
    pub u: f64,
    pub chart: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub order: usize,
    /// Transverse derivative `(d/dy)^k (u, y)` from the `y > 0` side.
    pub right: [f64; 2],
    /// The same from the `y < 0` side.
    pub left: [f64; 2],
    /// Largest one-sided difference over all directions and components.
    pub mismatch: f64,
    /// Largest Richardson correction among the estimates compared.
    pub richardson_err: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub location: SeamLocation,
    pub bits: usize,
    pub orders: Vec<OrderCheck>,
    pub pass_tol: f64,
    pub fail_tol: f64,
    pub config: SeamCheckConfig,
}

impl SmoothnessReport {
    pub fn verdict(&self, order: usize) -> Option<Verdict> {
        self.orders.iter().find(|o| o.order == order).map(|o| o.verdict)
    }

    /// Every order up to `r` passes.
    pub fn passes_through(&self, r: usize) -> bool {
        (1..=r).all(|k| self.verdict(k) == Some(Verdict::Pass))
    }
}

/// `(cos phi, sin phi)` for the transverse direction and `n` oblique ones in
/// the upper half plane; none is tangent to the seam.
fn directions(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 1.0)];
    for i in 0..n {
        let phi = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64;
        out.push((phi.cos(), phi.sin()));
    }
    out
}

/// Lifts `x` to the representative within half a period of `reference`.
fn unwrap_near(x: &BigScalar, reference: &BigScalar, period: Option<&BigScalar>) -> BigScalar {
    match period {
        Some(per) => {
            let k = (&(x - reference) / per).to_f64().round();
            x - &(per * &BigScalar::from_f64(k, x.bits()))
        }
        None => x.clone(),
    }
}

struct Probe<'a> {
    f: &'a GluedMap,
    seam: usize,
    u0: BigScalar,
    center: [BigScalar; 2],
    period: Option<BigScalar>,
    bits: usize,
}

impl Probe<'_> {
    /// Component `j` of the seam-coordinate map along `t -> (u0 + t c, t s)`.
    fn along(&self, dir: (f64, f64), j: usize, t: &BigScalar) -> Result<BigScalar> {
        let b = self.bits;
        let u = &self.u0 + &(t * &BigScalar::from_f64(dir.0, b));
        let y = t * &BigScalar::from_f64(dir.1, b);
        let out = self.f.eval_seam(self.seam, &Real::from_big(u), &Real::from_big(y), b)?;
        let v = out[j].to_big()?.with_bits(b);
        Ok(if j == 0 { unwrap_near(&v, &self.center[0], self.period.as_ref()) } else { v })
    }

    fn estimate(&self, dir: (f64, f64), j: usize, stencil: Stencil, cfg: &FdConfig) -> Result<FdEstimate> {
        let zero = BigScalar::zero(self.bits);
        fd_derivative_stencil(|t| self.along(dir, j, t), &zero, cfg, stencil, None)
    }
}

/// One-sided transverse and oblique derivatives of `f` in the coordinates
/// of seam `seam` at `(u, 0)`, orders `1..=cfg.max_order`, compared across
/// the seam.
pub fn verify_cr_at_seam(
    f: &GluedMap,
    seam: usize,
    u: f64,
    cfg: &SeamCheckConfig,
    bits: usize,
) -> Result<SmoothnessReport> {
    cfg.validate()?;
    let policy = TolerancePolicy::for_bits(bits);
    let pass_tol = cfg.abs_tol.unwrap_or(policy.seam_pass);
    let fail_tol = pass_tol * cfg.fail_factor;
    let reach = cfg.max_order as f64 * cfg.base_step;
    if reach >= 1.0 {
        return Err(Error::Domain(format!("stencil reach {reach} leaves the collar (depth 1)")));
    }
    let u0 = BigScalar::from_f64(u, bits);
    let c = f.eval_seam(seam, &Real::from_big(u0.clone()), &Real::zero(bits), bits)?;
    let period = f.host.seam_period(seam)?.map(|_| &BigScalar::pi(bits) * &BigScalar::from_i64(2, bits));
    let probe = Probe {
        f,
        seam,
        u0,
        center: [c[0].to_big()?.with_bits(bits), c[1].to_big()?.with_bits(bits)],
        period,
        bits,
    };
    let dirs = directions(cfg.directions);
    let mut orders = Vec::with_capacity(cfg.max_order);
    for k in 1..=cfg.max_order {
        let fd = FdConfig { order: k, base_step: cfg.base_step, richardson_levels: cfg.richardson_levels, precision_bits: bits };
        let jobs: Vec<((f64, f64), usize)> = dirs.iter().flat_map(|&d| [(d, 0), (d, 1)]).collect();
        let pairs = cfg.execution.try_map(&jobs, |&(d, j)| {
            let right = probe.estimate(d, j, Stencil::Forward, &fd)?;
            let left = probe.estimate(d, j, Stencil::Backward, &fd)?;
            Ok::<_, Error>((right, left))
        })?;
        let mut mismatch = 0.0f64;
        let mut scale = 0.0f64;
        let mut err = 0.0f64;
        for (r, l) in &pairs {
            mismatch = mismatch.max((&r.value - &l.value).abs().to_f64());
            scale = scale.max(r.value.abs().to_f64()).max(l.value.abs().to_f64());
            err = err.max(r.err.to_f64()).max(l.err.to_f64());
        }
        let tol = pass_tol.max(cfg.rel_tol * scale);
        let verdict = if mismatch < tol && err < tol {
            Verdict::Pass
        } else if mismatch > fail_tol.max(cfg.fail_factor * cfg.rel_tol * scale) {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        // the first job pair is the transverse direction
        let right = [pairs[0].0.value.to_f64(), pairs[1].0.value.to_f64()];
        let left = [pairs[0].1.value.to_f64(), pairs[1].1.value.to_f64()];
        orders.push(OrderCheck { order: k, right, left, mismatch, richardson_err: err, tol, verdict });
    }
    let s = f.host.seam(seam)?;
    Ok(SmoothnessReport {
        location: SeamLocation {
            seam,
            u,
            chart: format!("{}:{} | {}:{}", s.a.piece, s.a.component, s.b.piece, s.b.component),
        },
        bits,
        orders,
        pass_tol,
        fail_tol,
        config: cfg.clone(),
    })
}

/// Largest seam-coordinate distance between the images of `(u, delta)` and
/// `(u, -delta)` over `samples` values of `u`: a continuity probe across the seam.
pub fn seam_straddle_defect(f: &GluedMap, seam: usize, samples: usize, delta: f64, bits: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let per = f.host.seam_period(seam)?;
    for i in 0..samples {
        let u = Real::from_f64(-3.0 + 6.0 * (i as f64 + 0.5) / samples as f64, bits);
        let a = f.eval_seam(seam, &u, &Real::from_f64(delta, bits), bits)?;
        let b = f.eval_seam(seam, &u, &Real::from_f64(-delta, bits), bits)?;
        let mut du = a[0].sub(&b[0])?.to_f64();
        if let Some(p) = per {
            du -= p * (du / p).round();
        }
        worst = worst.max(du.hypot(a[1].sub(&b[1])?.to_f64()));
    }
    Ok(worst)
}
